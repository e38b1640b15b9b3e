#pragma once

#include <algorithm>
#include <string>
#include <unordered_set>
#include <vector>

#include "trajclust/modularity.hpp"
#include "trajclust/random.hpp"
#include "trajclust/road_network.hpp"
#include "trajclust/trajectory.hpp"

namespace trajclust {

struct OdPair {
  NodeIndex origin;
  NodeIndex destination;
};

struct GeneratedDataset {
  TrajectorySet trajectories;
  std::vector<std::int32_t> corridor_labels;  // per trajectory; empty without corridors
};

/// Samples k origin/destination pairs uniformly over the nodes, retrying a
/// pair up to `max_retries` times until origin != destination and the
/// destination is reachable.
inline std::vector<OdPair> sample_od_pairs(const RoadNetwork& net, std::size_t k, Rng& rng,
                                           int max_retries = 50) {
  if (net.node_count() < 2) throw std::runtime_error("network too small to sample OD pairs");
  std::vector<OdPair> pairs;
  pairs.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    bool ok = false;
    for (int attempt = 0; attempt <= max_retries && !ok; ++attempt) {
      auto o = static_cast<NodeIndex>(rng.next_below(net.node_count()));
      auto d = static_cast<NodeIndex>(rng.next_below(net.node_count()));
      if (o == d) continue;
      if (shortest_path(net, o, d)) {
        pairs.push_back(OdPair{o, d});
        ok = true;
      }
    }
    if (!ok) {
      throw std::runtime_error("could not sample a reachable OD pair after " +
                               std::to_string(max_retries) + " retries");
    }
  }
  return pairs;
}

namespace detail {

// Replaces path edges with 2-edge detours: at each intermediate node, with
// probability deviation_prob, the direct edge to the next path node is
// swapped for a route through one off-path neighbor that rejoins immediately.
inline std::vector<EdgeIndex> apply_detours(const RoadNetwork& net,
                                            const std::vector<EdgeIndex>& path,
                                            double deviation_prob, Rng& rng) {
  if (path.size() < 2 || deviation_prob <= 0.0) return path;

  std::unordered_set<NodeIndex> on_path;
  on_path.insert(net.edge(path.front()).from);
  for (EdgeIndex e : path) on_path.insert(net.edge(e).to);

  std::vector<EdgeIndex> result;
  result.push_back(path.front());
  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto& direct = net.edge(path[i]);
    // Always draw so the stream does not depend on candidate availability.
    bool deviate = rng.next_double() < deviation_prob;
    if (!deviate) {
      result.push_back(path[i]);
      continue;
    }
    // Candidate detour nodes w with edges from -> w -> to, off the path.
    // One option per via node, using the smallest edge ids for both legs.
    struct Option {
      NodeIndex via;
      EdgeIndex leave;
      EdgeIndex rejoin;
    };
    std::vector<Option> options;
    for (EdgeIndex leave : net.out_edges(direct.from)) {
      NodeIndex w = net.edge(leave).to;
      if (on_path.count(w)) continue;
      EdgeIndex rejoin = -1;
      for (EdgeIndex back : net.out_edges(w)) {
        if (net.edge(back).to != direct.to) continue;
        if (rejoin < 0 || net.edge(back).id < net.edge(rejoin).id) rejoin = back;
      }
      if (rejoin < 0) continue;
      auto existing = std::find_if(options.begin(), options.end(),
                                   [&](const Option& o) { return o.via == w; });
      if (existing != options.end()) {
        if (net.edge(leave).id < net.edge(existing->leave).id) {
          existing->leave = leave;
          existing->rejoin = rejoin;
        }
      } else {
        options.push_back(Option{w, leave, rejoin});
      }
    }
    if (options.empty()) {
      result.push_back(path[i]);
      continue;
    }
    std::sort(options.begin(), options.end(), [&](const Option& a, const Option& b) {
      return net.edge(a.leave).id < net.edge(b.leave).id;
    });
    const auto& pick = options[static_cast<std::size_t>(rng.next_below(options.size()))];
    result.push_back(pick.leave);
    result.push_back(pick.rejoin);
  }
  return result;
}

}  // namespace detail

/// Seeded synthetic dataset. With corridors, trajectory i follows corridor
/// i mod k (its shortest path, plus per-node detours with the given
/// probability) and the planted corridor index is recorded as its label.
/// Without corridors every trajectory gets a fresh uniformly sampled OD
/// pair. Timestamps advance at a constant 10 m/s from t=0. The same seed
/// always produces the same dataset, byte for byte.
inline GeneratedDataset generate(const RoadNetwork& net, std::size_t n,
                                 const std::vector<OdPair>& corridors, double deviation_prob,
                                 std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("trajectory count must be >= 1");
  if (deviation_prob < 0.0 || deviation_prob > 1.0) {
    throw std::invalid_argument("deviation probability must be in [0,1]");
  }

  std::vector<std::vector<EdgeIndex>> corridor_paths;
  corridor_paths.reserve(corridors.size());
  for (const auto& od : corridors) {
    auto path = shortest_path(net, od.origin, od.destination);
    if (!path || path->empty()) {
      throw std::runtime_error("corridor OD pair is not connected by a non-empty path");
    }
    corridor_paths.push_back(std::move(*path));
  }

  Rng rng(derive_seed(seed, "generate"));
  const int id_width = static_cast<int>(std::to_string(n - 1).size());
  auto make_id = [&](std::size_t i) {
    std::string digits = std::to_string(i);
    return "t" + std::string(static_cast<std::size_t>(id_width) - digits.size(), '0') + digits;
  };

  GeneratedDataset out{TrajectorySet(net), {}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<EdgeIndex> path;
    if (!corridors.empty()) {
      std::size_t c = i % corridors.size();
      path = corridor_paths[c];
      out.corridor_labels.push_back(static_cast<std::int32_t>(c));
    } else {
      constexpr int kMaxRetries = 50;
      bool ok = false;
      for (int attempt = 0; attempt <= kMaxRetries && !ok; ++attempt) {
        auto o = static_cast<NodeIndex>(rng.next_below(net.node_count()));
        auto d = static_cast<NodeIndex>(rng.next_below(net.node_count()));
        if (o == d) continue;
        auto p = shortest_path(net, o, d);
        if (p && !p->empty()) {
          path = std::move(*p);
          ok = true;
        }
      }
      if (!ok) {
        throw std::runtime_error("could not sample a reachable OD pair after " +
                                 std::to_string(kMaxRetries) + " retries");
      }
    }
    path = detail::apply_detours(net, path, deviation_prob, rng);

    Trajectory t;
    t.id = make_id(i);
    constexpr double kSpeed = 10.0;  // m/s
    double clock = 0.0;
    for (EdgeIndex e : path) {
      t.visits.push_back(Visit{clock, e});
      clock += net.edge(e).length / kSpeed;
    }
    out.trajectories.add(std::move(t));
  }
  return out;
}

/// Planted labels dump: `traj_id,corridor_id`.
inline void write_labels_csv(const TrajectorySet& ts, const std::vector<std::int32_t>& labels,
                             const std::string& path) {
  if (labels.size() != ts.size()) throw std::invalid_argument("labels/dataset size mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "traj_id,corridor_id\n";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out << ts.trajectory(i).id << ',' << labels[i] << '\n';
  }
}

/// Reads `traj_id,corridor_id` into a partition over the dataset order.
inline Partition read_labels_csv(const std::string& path, const TrajectorySet& ts) {
  auto rows = read_csv(path, {"traj_id", "corridor_id"});
  std::unordered_map<std::string, std::int32_t> by_id;
  for (const auto& row : rows) {
    auto label = static_cast<std::int32_t>(parse_int(row.fields[1], csv_context(path, row.line)));
    if (!by_id.emplace(row.fields[0], label).second) {
      throw std::runtime_error(csv_context(path, row.line) + ": duplicate trajectory id '" +
                               row.fields[0] + "'");
    }
  }
  if (by_id.size() != ts.size()) {
    throw std::runtime_error(path + ": labels cover " + std::to_string(by_id.size()) +
                             " trajectories, dataset has " + std::to_string(ts.size()));
  }
  std::vector<std::int32_t> raw;
  raw.reserve(ts.size());
  for (const auto& t : ts.trajectories()) {
    auto it = by_id.find(t.id);
    if (it == by_id.end()) {
      throw std::runtime_error(path + ": labels missing trajectory '" + t.id + "'");
    }
    raw.push_back(it->second);
  }
  return Partition::from_labels(raw);
}

}  // namespace trajclust
