#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "trajclust/csv.hpp"

namespace trajclust {

using NodeIndex = std::int32_t;
using EdgeIndex = std::int32_t;

struct Point {
  double x;
  double y;
};

struct NetworkNode {
  std::string id;
  double x;
  double y;
};

struct NetworkEdge {
  std::string id;
  NodeIndex from;
  NodeIndex to;
  double length;  // meters, > 0
};

/// Directed road network. Intersections carry planar coordinates in meters;
/// a two-way street is two distinct directed edges. Immutable once built,
/// safe for concurrent reads.
class RoadNetwork {
 public:
  NodeIndex add_node(std::string id, double x, double y) {
    if (node_index_.count(id)) throw std::runtime_error("duplicate node id: " + id);
    NodeIndex idx = static_cast<NodeIndex>(nodes_.size());
    node_index_.emplace(id, idx);
    nodes_.push_back(NetworkNode{std::move(id), x, y});
    out_edges_.emplace_back();
    in_edges_.emplace_back();
    return idx;
  }

  EdgeIndex add_edge(std::string id, const std::string& from_id, const std::string& to_id,
                     double length) {
    if (edge_index_.count(id)) throw std::runtime_error("duplicate edge id: " + id);
    auto from = find_node(from_id);
    if (!from) throw std::runtime_error("edge " + id + " references unknown node id: " + from_id);
    auto to = find_node(to_id);
    if (!to) throw std::runtime_error("edge " + id + " references unknown node id: " + to_id);
    if (!(length > 0)) {
      throw std::runtime_error("edge " + id + " has non-positive length " + format_double(length));
    }
    EdgeIndex idx = static_cast<EdgeIndex>(edges_.size());
    edge_index_.emplace(id, idx);
    edges_.push_back(NetworkEdge{std::move(id), *from, *to, length});
    out_edges_[*from].push_back(idx);
    in_edges_[*to].push_back(idx);
    return idx;
  }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const NetworkNode& node(NodeIndex i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  const NetworkEdge& edge(EdgeIndex i) const { return edges_.at(static_cast<std::size_t>(i)); }

  std::optional<NodeIndex> find_node(std::string_view id) const {
    auto it = node_index_.find(std::string(id));
    return it == node_index_.end() ? std::nullopt : std::optional<NodeIndex>(it->second);
  }
  std::optional<EdgeIndex> find_edge(std::string_view id) const {
    auto it = edge_index_.find(std::string(id));
    return it == edge_index_.end() ? std::nullopt : std::optional<EdgeIndex>(it->second);
  }

  const std::vector<EdgeIndex>& out_edges(NodeIndex n) const {
    return out_edges_.at(static_cast<std::size_t>(n));
  }
  const std::vector<EdgeIndex>& in_edges(NodeIndex n) const {
    return in_edges_.at(static_cast<std::size_t>(n));
  }

  Point node_point(NodeIndex n) const {
    const auto& nd = node(n);
    return Point{nd.x, nd.y};
  }

 private:
  std::vector<NetworkNode> nodes_;
  std::vector<NetworkEdge> edges_;
  std::vector<std::vector<EdgeIndex>> out_edges_;
  std::vector<std::vector<EdgeIndex>> in_edges_;
  std::unordered_map<std::string, NodeIndex> node_index_;
  std::unordered_map<std::string, EdgeIndex> edge_index_;
};

/// Loads a network from two CSV files:
///   nodes: `node_id,x,y`
///   edges: `edge_id,from,to,length,oneway` with oneway in {0,1}
/// A row with oneway=0 expands into two directed edges `<id>_f` and `<id>_r`.
inline RoadNetwork load_network(const std::string& nodes_path, const std::string& edges_path) {
  RoadNetwork net;
  for (const auto& row : read_csv(nodes_path, {"node_id", "x", "y"})) {
    const auto ctx = csv_context(nodes_path, row.line);
    if (row.fields[0].empty()) throw std::runtime_error(ctx + ": empty node id");
    try {
      net.add_node(row.fields[0], parse_double(row.fields[1], ctx), parse_double(row.fields[2], ctx));
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(ctx + ": " + e.what());
    }
  }
  for (const auto& row : read_csv(edges_path, {"edge_id", "from", "to", "length", "oneway"})) {
    const auto ctx = csv_context(edges_path, row.line);
    if (row.fields[0].empty()) throw std::runtime_error(ctx + ": empty edge id");
    double length = parse_double(row.fields[3], ctx);
    const std::string& oneway = row.fields[4];
    if (oneway != "0" && oneway != "1") {
      throw std::runtime_error(ctx + ": oneway must be 0 or 1, got '" + oneway + "'");
    }
    try {
      if (oneway == "1") {
        net.add_edge(row.fields[0], row.fields[1], row.fields[2], length);
      } else {
        net.add_edge(row.fields[0] + "_f", row.fields[1], row.fields[2], length);
        net.add_edge(row.fields[0] + "_r", row.fields[2], row.fields[1], length);
      }
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(ctx + ": " + e.what());
    }
  }
  return net;
}

/// Minimal-total-length directed path from `from` to `to`, as edge indices.
/// Returns nullopt when unreachable and an empty path when from == to.
/// Among equal-length paths the lexicographically smallest edge-id sequence
/// is returned.
inline std::optional<std::vector<EdgeIndex>> shortest_path(const RoadNetwork& net, NodeIndex from,
                                                           NodeIndex to) {
  const auto n = static_cast<std::ptrdiff_t>(net.node_count());
  if (from < 0 || from >= n) throw std::invalid_argument("unknown node index: " + std::to_string(from));
  if (to < 0 || to >= n) throw std::invalid_argument("unknown node index: " + std::to_string(to));
  if (from == to) return std::vector<EdgeIndex>{};

  // Reverse Dijkstra: dist[v] = length of the shortest v -> to path.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(net.node_count(), inf);
  std::vector<char> settled(net.node_count(), 0);
  using Entry = std::pair<double, NodeIndex>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  dist[static_cast<std::size_t>(to)] = 0.0;
  queue.emplace(0.0, to);
  while (!queue.empty()) {
    auto [d, v] = queue.top();
    queue.pop();
    if (settled[static_cast<std::size_t>(v)]) continue;
    settled[static_cast<std::size_t>(v)] = 1;
    for (EdgeIndex ei : net.in_edges(v)) {
      const auto& e = net.edge(ei);
      double cand = d + e.length;
      if (cand < dist[static_cast<std::size_t>(e.from)]) {
        dist[static_cast<std::size_t>(e.from)] = cand;
        queue.emplace(cand, e.from);
      }
    }
  }
  if (dist[static_cast<std::size_t>(from)] == inf) return std::nullopt;

  // Walk forward, always taking the smallest edge id that stays on a shortest
  // path. Exact equality is safe: dist[u] was produced by the identical
  // length + dist[v] sum during relaxation.
  std::vector<EdgeIndex> path;
  NodeIndex u = from;
  std::size_t guard = net.edge_count() + 1;
  while (u != to) {
    EdgeIndex best = -1;
    for (EdgeIndex ei : net.out_edges(u)) {
      const auto& e = net.edge(ei);
      double dv = dist[static_cast<std::size_t>(e.to)];
      if (dv == inf) continue;
      if (e.length + dv == dist[static_cast<std::size_t>(u)]) {
        if (best < 0 || e.id < net.edge(best).id) best = ei;
      }
    }
    if (best < 0 || guard-- == 0) {
      throw std::logic_error("shortest_path walk failed to reach target");
    }
    path.push_back(best);
    u = net.edge(best).to;
  }
  return path;
}

inline double path_length(const RoadNetwork& net, const std::vector<EdgeIndex>& path) {
  double total = 0.0;
  for (EdgeIndex ei : path) total += net.edge(ei).length;
  return total;
}

}  // namespace trajclust
