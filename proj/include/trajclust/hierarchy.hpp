#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trajclust/modularity.hpp"

namespace trajclust {

/// Subgraph induced by `members` (node indices of g). The new node order is
/// the order of `members`.
inline SimilarityGraph induced_subgraph(const SimilarityGraph& g,
                                        const std::vector<std::int32_t>& members) {
  std::unordered_map<std::int32_t, std::int32_t> local;
  local.reserve(members.size());
  std::vector<std::string> ids;
  ids.reserve(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    local.emplace(members[i], static_cast<std::int32_t>(i));
    ids.push_back(g.node_ids[static_cast<std::size_t>(members[i])]);
  }
  std::vector<SimilarityGraph::Edge> edges;
  for (const auto& e : g.edges) {
    auto iu = local.find(e.u);
    if (iu == local.end()) continue;
    auto iv = local.find(e.v);
    if (iv == local.end()) continue;
    auto u = iu->second, v = iv->second;
    if (u > v) std::swap(u, v);
    edges.push_back(SimilarityGraph::Edge{u, v, e.w});
  }
  return SimilarityGraph::from_edges(std::move(ids), std::move(edges));
}

/// One cluster in the nested hierarchy. Children, when present, partition the
/// member set. modularity_of_split records the Q of the best split found on
/// this cluster's induced subgraph (present even when the split failed
/// validation and was discarded); validated says whether the split was
/// accepted.
struct ClusterNode {
  std::int32_t id = 0;
  std::vector<std::int32_t> members;  // node indices into the clustered graph
  std::vector<ClusterNode> children;
  std::optional<double> modularity_of_split;
  bool validated = false;

  bool is_leaf() const { return children.empty(); }
};

struct ClusterHierarchy {
  ClusterNode root;
  std::vector<std::string> node_ids;

  int max_depth() const {
    std::function<int(const ClusterNode&)> depth = [&](const ClusterNode& n) -> int {
      int d = 0;
      for (const auto& c : n.children) d = std::max(d, 1 + depth(c));
      return d;
    };
    return depth(root);
  }

  std::size_t leaf_count() const {
    std::function<std::size_t(const ClusterNode&)> count = [&](const ClusterNode& n) -> std::size_t {
      if (n.is_leaf()) return 1;
      std::size_t total = 0;
      for (const auto& c : n.children) total += count(c);
      return total;
    };
    return count(root);
  }
};

struct HierarchyParams {
  int null_replicates = 20;
  double z_threshold = 2.0;
  std::uint64_t seed = 0;
  std::size_t min_size = 2;  // clusters smaller than this are never split further
};

/// Recursive modularity clustering. Each cluster is split by the greedy
/// optimizer on its induced subgraph; a split is kept only when it yields
/// k >= 2 communities and passes null-model validation, and the recursion
/// then descends into every child large enough (>= min_size). Node ids are
/// assigned in preorder, so identical inputs and seed give an identical tree.
inline ClusterHierarchy build_hierarchy(const SimilarityGraph& g, const HierarchyParams& params) {
  ClusterHierarchy h;
  h.node_ids = g.node_ids;
  std::int32_t next_id = 0;

  std::function<ClusterNode(const std::vector<std::int32_t>&)> build =
      [&](const std::vector<std::int32_t>& members) -> ClusterNode {
    ClusterNode node;
    node.id = next_id++;
    node.members = members;
    if (members.size() < 2 || members.size() < params.min_size) return node;

    SimilarityGraph sub = induced_subgraph(g, members);
    auto res = greedy_partition_detailed(sub);
    if (res.partition.k < 2) return node;
    node.modularity_of_split = modularity(sub, res.partition);

    ValidationOptions vopt;
    vopt.replicates = params.null_replicates;
    vopt.z_threshold = params.z_threshold;
    vopt.seed = derive_seed(params.seed, "validate", static_cast<std::uint64_t>(node.id));
    if (!validate_partition(sub, res.partition, vopt)) return node;

    node.validated = true;
    auto groups = res.partition.clusters();
    node.children.reserve(groups.size());
    for (const auto& group : groups) {
      std::vector<std::int32_t> child_members;
      child_members.reserve(group.size());
      for (auto local : group) child_members.push_back(members[static_cast<std::size_t>(local)]);
      node.children.push_back(build(child_members));
    }
    return node;
  };

  std::vector<std::int32_t> all(g.node_count());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::int32_t>(i);
  h.root = build(all);
  return h;
}

/// Flat partition at depth `level`: clusters are the nodes at that depth plus
/// every leaf that sits shallower. Level 0 is the root alone.
inline Partition flatten_by_level(const ClusterHierarchy& h, int level) {
  if (level < 0) throw std::invalid_argument("level must be >= 0");
  std::vector<std::int32_t> labels(h.node_ids.size(), 0);
  std::int32_t cluster = 0;
  std::function<void(const ClusterNode&, int)> walk = [&](const ClusterNode& n, int depth) {
    if (depth == level || (n.is_leaf() && depth < level)) {
      for (auto v : n.members) labels[static_cast<std::size_t>(v)] = cluster;
      ++cluster;
      return;
    }
    for (const auto& c : n.children) walk(c, depth + 1);
  };
  walk(h.root, 0);
  return Partition::from_labels(labels);
}

/// Expands the hierarchy cluster by cluster, always opening the cluster whose
/// children cost the least modularity on the full graph (the "gain"
/// Q(after) - Q(before) may be negative; the largest gain = minimal loss
/// wins, ties to the smallest cluster id). Stops once the partition has at
/// least k clusters or nothing is expandable.
inline Partition greedy_expand(const ClusterHierarchy& h, const SimilarityGraph& g, std::size_t k) {
  if (k < 1 || k > h.leaf_count()) throw std::invalid_argument("expansion target k out of range");

  std::vector<const ClusterNode*> frontier{&h.root};
  auto to_partition = [&](const std::vector<const ClusterNode*>& nodes) {
    std::vector<std::int32_t> labels(h.node_ids.size(), 0);
    std::int32_t cluster = 0;
    for (const auto* n : nodes) {
      for (auto v : n->members) labels[static_cast<std::size_t>(v)] = cluster;
      ++cluster;
    }
    return Partition::from_labels(labels);
  };

  while (frontier.size() < k) {
    double q_current = modularity(g, to_partition(frontier));
    bool found = false;
    double best_gain = 0.0;
    std::size_t best_pos = 0;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      if (frontier[i]->is_leaf()) continue;
      std::vector<const ClusterNode*> candidate;
      candidate.reserve(frontier.size() + frontier[i]->children.size());
      for (std::size_t j = 0; j < frontier.size(); ++j) {
        if (j == i) {
          for (const auto& c : frontier[i]->children) candidate.push_back(&c);
        } else {
          candidate.push_back(frontier[j]);
        }
      }
      double gain = modularity(g, to_partition(candidate)) - q_current;
      bool better = !found || gain > best_gain ||
                    (gain == best_gain && frontier[i]->id < frontier[best_pos]->id);
      if (better) {
        found = true;
        best_gain = gain;
        best_pos = i;
      }
    }
    if (!found) break;  // nothing expandable
    const ClusterNode* expand = frontier[best_pos];
    std::vector<const ClusterNode*> next;
    next.reserve(frontier.size() + expand->children.size() - 1);
    for (std::size_t j = 0; j < frontier.size(); ++j) {
      if (j == best_pos) {
        for (const auto& c : expand->children) next.push_back(&c);
      } else {
        next.push_back(frontier[j]);
      }
    }
    frontier = std::move(next);
  }
  return to_partition(frontier);
}

/// Nested JSON: {id, size, validated, modularity_of_split, children, members}
/// with members listed only at leaves.
inline nlohmann::ordered_json hierarchy_to_json(const ClusterHierarchy& h) {
  std::function<nlohmann::ordered_json(const ClusterNode&)> render =
      [&](const ClusterNode& n) -> nlohmann::ordered_json {
    nlohmann::ordered_json j;
    j["id"] = n.id;
    j["size"] = n.members.size();
    j["validated"] = n.validated;
    if (n.modularity_of_split) {
      j["modularity_of_split"] = *n.modularity_of_split;
    } else {
      j["modularity_of_split"] = nullptr;
    }
    j["children"] = nlohmann::ordered_json::array();
    for (const auto& c : n.children) j["children"].push_back(render(c));
    if (n.is_leaf()) {
      auto members = nlohmann::ordered_json::array();
      for (auto v : n.members) members.push_back(h.node_ids[static_cast<std::size_t>(v)]);
      j["members"] = std::move(members);
    }
    return j;
  };
  return render(h.root);
}

}  // namespace trajclust
