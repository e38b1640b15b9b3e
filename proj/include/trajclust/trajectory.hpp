#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "trajclust/csv.hpp"
#include "trajclust/road_network.hpp"

namespace trajclust {

struct Visit {
  double t;        // seconds; non-decreasing along the trajectory
  EdgeIndex edge;  // visited road segment
};

struct Trajectory {
  std::string id;
  std::vector<Visit> visits;  // never empty
};

struct TrajectoryLoadReport {
  std::size_t trajectory_count = 0;
  std::size_t visit_count = 0;
  std::size_t distinct_segment_count = 0;
  std::size_t connectivity_gaps = 0;  // consecutive visits that are not head-to-tail adjacent
};

/// The trajectory dataset, validated against one road network.
/// Immutable after load; safe for shared reads.
class TrajectorySet {
 public:
  explicit TrajectorySet(const RoadNetwork& net) : net_(&net) {}

  std::size_t add(Trajectory t) {
    validate(t);
    if (index_.count(t.id)) throw std::runtime_error("duplicate trajectory id: " + t.id);
    std::size_t pos = trajectories_.size();
    index_.emplace(t.id, pos);
    trajectories_.push_back(std::move(t));
    return pos;
  }

  std::size_t size() const { return trajectories_.size(); }
  const Trajectory& trajectory(std::size_t i) const { return trajectories_.at(i); }
  const std::vector<Trajectory>& trajectories() const { return trajectories_; }
  const RoadNetwork& network() const { return *net_; }

  std::optional<std::size_t> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? std::nullopt : std::optional<std::size_t>(it->second);
  }

 private:
  void validate(const Trajectory& t) const {
    if (t.visits.empty()) throw std::runtime_error("trajectory " + t.id + " is empty");
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& v : t.visits) {
      if (v.edge < 0 || static_cast<std::size_t>(v.edge) >= net_->edge_count()) {
        throw std::runtime_error("trajectory " + t.id + " references unknown edge index");
      }
      if (v.t < prev) throw std::runtime_error("trajectory " + t.id + " has decreasing timestamps");
      prev = v.t;
    }
  }

  const RoadNetwork* net_;
  std::vector<Trajectory> trajectories_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Loads trajectories from a long-format CSV `traj_id,seq,timestamp,edge_id`
/// (rows of one trajectory contiguous, seq counting up from 0). When
/// strict_connectivity is set, consecutive edges must be head-to-tail
/// adjacent; otherwise gaps are only counted in the report.
inline TrajectorySet load_trajectories(const std::string& path, const RoadNetwork& net,
                                       bool strict_connectivity = false,
                                       TrajectoryLoadReport* report = nullptr) {
  TrajectorySet ts(net);
  TrajectoryLoadReport rep;
  std::unordered_set<EdgeIndex> distinct;

  auto rows = read_csv(path, {"traj_id", "seq", "timestamp", "edge_id"});
  if (rows.empty()) throw std::runtime_error(path + ": no trajectories");

  Trajectory current;
  std::size_t expected_seq = 0;
  auto flush = [&](std::size_t line) {
    if (current.visits.empty()) return;
    try {
      ts.add(std::move(current));
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(csv_context(path, line) + ": " + e.what());
    }
    current = Trajectory{};
    expected_seq = 0;
  };

  for (const auto& row : rows) {
    const auto ctx = csv_context(path, row.line);
    const std::string& id = row.fields[0];
    if (id.empty()) throw std::runtime_error(ctx + ": empty trajectory id");
    if (id != current.id) {
      flush(row.line);
      current.id = id;
    }
    auto seq = parse_int(row.fields[1], ctx);
    if (static_cast<std::size_t>(seq) != expected_seq) {
      throw std::runtime_error(ctx + ": trajectory " + id + " expects seq " +
                               std::to_string(expected_seq) + ", got " + row.fields[1]);
    }
    ++expected_seq;
    double t = parse_double(row.fields[2], ctx);
    auto edge = net.find_edge(row.fields[3]);
    if (!edge) {
      throw std::runtime_error(ctx + ": trajectory " + id + " references unknown edge id '" +
                               row.fields[3] + "'");
    }
    if (!current.visits.empty()) {
      if (t < current.visits.back().t) {
        throw std::runtime_error(ctx + ": trajectory " + id + " has decreasing timestamps");
      }
      const auto& prev_edge = net.edge(current.visits.back().edge);
      if (prev_edge.to != net.edge(*edge).from) {
        if (strict_connectivity) {
          throw std::runtime_error(ctx + ": trajectory " + id +
                                   " breaks head-to-tail connectivity at edge '" + row.fields[3] +
                                   "'");
        }
        ++rep.connectivity_gaps;
      }
    }
    current.visits.push_back(Visit{t, *edge});
    distinct.insert(*edge);
    ++rep.visit_count;
  }
  flush(rows.back().line);

  rep.trajectory_count = ts.size();
  rep.distinct_segment_count = distinct.size();
  if (report) *report = rep;
  return ts;
}

inline void save_trajectories(const TrajectorySet& ts, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "traj_id,seq,timestamp,edge_id\n";
  for (const auto& t : ts.trajectories()) {
    for (std::size_t i = 0; i < t.visits.size(); ++i) {
      out << t.id << ',' << i << ',' << format_double(t.visits[i].t) << ','
          << ts.network().edge(t.visits[i].edge).id << '\n';
    }
  }
}

// Start/end points are network node coordinates: the tail node of the first
// edge and the head node of the last edge.
inline Point start_point(const Trajectory& t, const RoadNetwork& net) {
  return net.node_point(net.edge(t.visits.front().edge).from);
}

inline Point end_point(const Trajectory& t, const RoadNetwork& net) {
  return net.node_point(net.edge(t.visits.back().edge).to);
}

}  // namespace trajclust
