#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "trajclust/random.hpp"
#include "trajclust/similarity.hpp"

namespace trajclust {

/// Flat community assignment. Community ids are dense 0..k-1, numbered by
/// first occurrence in node order.
struct Partition {
  std::vector<std::int32_t> assignment;
  std::int32_t k = 0;

  static Partition from_labels(const std::vector<std::int32_t>& raw) {
    Partition p;
    p.assignment.resize(raw.size());
    std::unordered_map<std::int32_t, std::int32_t> remap;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      auto [it, inserted] = remap.emplace(raw[i], static_cast<std::int32_t>(remap.size()));
      (void)inserted;
      p.assignment[i] = it->second;
    }
    p.k = static_cast<std::int32_t>(remap.size());
    return p;
  }

  std::vector<std::vector<std::int32_t>> clusters() const {
    std::vector<std::vector<std::int32_t>> out(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      out[static_cast<std::size_t>(assignment[i])].push_back(static_cast<std::int32_t>(i));
    }
    return out;
  }
};

/// Weighted Newman–Girvan modularity:
///   Q = sum_c [ w_in(c)/m - (w_tot(c)/2m)^2 ]
/// with m the total edge weight, w_in(c) the weight inside community c and
/// w_tot(c) its summed weighted degrees. Q = 0 for an edgeless graph.
inline double modularity(const SimilarityGraph& g, const Partition& p) {
  if (p.assignment.size() != g.node_count()) {
    throw std::invalid_argument("partition does not cover the graph nodes");
  }
  const double m = g.total_weight;
  if (m == 0.0) return 0.0;
  std::vector<double> w_in(static_cast<std::size_t>(p.k), 0.0);
  std::vector<double> w_tot(static_cast<std::size_t>(p.k), 0.0);
  for (const auto& e : g.edges) {
    auto cu = p.assignment[static_cast<std::size_t>(e.u)];
    auto cv = p.assignment[static_cast<std::size_t>(e.v)];
    if (cu < 0 || cu >= p.k || cv < 0 || cv >= p.k) {
      throw std::invalid_argument("partition has community id out of range");
    }
    if (cu == cv) w_in[static_cast<std::size_t>(cu)] += e.w;
  }
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    w_tot[static_cast<std::size_t>(p.assignment[i])] += g.degree[i];
  }
  double q = 0.0;
  const double two_m = 2.0 * m;
  for (std::int32_t c = 0; c < p.k; ++c) {
    double a = w_tot[static_cast<std::size_t>(c)] / two_m;
    q += w_in[static_cast<std::size_t>(c)] / m - a * a;
  }
  return q;
}

struct MergeStep {
  std::int32_t a, b;  // communities merged (a < b, b folded into a)
  double delta_q;
};

struct GreedyResult {
  Partition partition;
  std::vector<MergeStep> merge_log;
  double final_q = 0.0;  // Q after the last merge, from incremental bookkeeping
};

/// Greedy agglomerative modularity optimization. Starts from singleton
/// communities and repeatedly performs the merge with the largest dQ as long
/// as dQ > 0; ties go to the smallest (a,b) community-id pair. For a merge of
/// a and b, dQ = w_ab/m - w_tot(a)*w_tot(b)/(2 m^2).
inline GreedyResult greedy_partition_detailed(const SimilarityGraph& g) {
  const std::size_t n = g.node_count();
  if (n == 0) throw std::invalid_argument("empty graph");
  const double m = g.total_weight;

  std::vector<std::unordered_map<std::int32_t, double>> between(n);
  for (const auto& e : g.edges) {
    between[static_cast<std::size_t>(e.u)][e.v] = e.w;
    between[static_cast<std::size_t>(e.v)][e.u] = e.w;
  }
  std::vector<double> w_tot(g.degree);
  std::vector<double> w_in(n, 0.0);
  std::vector<char> alive(n, 1);
  std::vector<std::vector<std::int32_t>> members(n);
  for (std::size_t i = 0; i < n; ++i) members[i] = {static_cast<std::int32_t>(i)};

  GreedyResult result;
  double q = 0.0;
  if (m > 0.0) {
    const double two_m = 2.0 * m;
    for (std::size_t i = 0; i < n; ++i) {
      double a = g.degree[i] / two_m;
      q -= a * a;
    }
    for (;;) {
      bool found = false;
      double best_dq = 0.0;
      std::int32_t best_a = 0, best_b = 0;
      for (std::size_t a = 0; a < n; ++a) {
        if (!alive[a]) continue;
        for (const auto& [b, w] : between[a]) {
          if (b <= static_cast<std::int32_t>(a)) continue;
          double dq = w / m - w_tot[a] * w_tot[static_cast<std::size_t>(b)] / (2.0 * m * m);
          bool better = !found || dq > best_dq ||
                        (dq == best_dq && (static_cast<std::int32_t>(a) < best_a ||
                                           (static_cast<std::int32_t>(a) == best_a && b < best_b)));
          if (better) {
            found = true;
            best_dq = dq;
            best_a = static_cast<std::int32_t>(a);
            best_b = b;
          }
        }
      }
      if (!found || best_dq <= 0.0) break;

      auto a = static_cast<std::size_t>(best_a);
      auto b = static_cast<std::size_t>(best_b);
      w_in[a] += w_in[b] + between[a][best_b];
      w_tot[a] += w_tot[b];
      members[a].insert(members[a].end(), members[b].begin(), members[b].end());
      members[b].clear();
      between[a].erase(best_b);
      for (const auto& [c, w] : between[b]) {
        if (c == best_a) continue;
        auto cs = static_cast<std::size_t>(c);
        between[a][c] += w;
        between[cs].erase(best_b);
        between[cs][best_a] = between[a][c];
      }
      between[b].clear();
      alive[b] = 0;
      q += best_dq;
      result.merge_log.push_back(MergeStep{best_a, best_b, best_dq});
    }
  }

  std::vector<std::int32_t> labels(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    if (!alive[c]) continue;
    for (auto v : members[c]) labels[static_cast<std::size_t>(v)] = static_cast<std::int32_t>(c);
  }
  result.partition = Partition::from_labels(labels);
  result.final_q = m > 0.0 ? q : 0.0;
  return result;
}

inline Partition greedy_partition(const SimilarityGraph& g) {
  return greedy_partition_detailed(g).partition;
}

/// Degree-preserving null model: weight-preserving double-edge swaps,
/// 10*|E| attempts. A swap of {a,b},{c,d} proposes {a,c},{b,d} or
/// {a,d},{b,c} (coin flip) and is rejected if it would create a self-loop or
/// a duplicate edge. Weights travel with the first/second slot.
inline SimilarityGraph rewire_null_model(const SimilarityGraph& g, Rng& rng) {
  auto edges = g.edges;
  const std::size_t ec = edges.size();
  if (ec < 2) return g;

  auto key = [](std::int32_t u, std::int32_t v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
           static_cast<std::uint32_t>(v);
  };
  std::unordered_set<std::uint64_t> present;
  present.reserve(ec * 2);
  for (const auto& e : edges) present.insert(key(e.u, e.v));

  const std::size_t attempts = 10 * ec;
  for (std::size_t t = 0; t < attempts; ++t) {
    std::size_t i = static_cast<std::size_t>(rng.next_below(ec));
    std::size_t j = static_cast<std::size_t>(rng.next_below(ec));
    bool flip = rng.next_bool();
    if (i == j) continue;
    std::int32_t a = edges[i].u, b = edges[i].v;
    std::int32_t c = edges[j].u, d = edges[j].v;
    if (flip) std::swap(c, d);
    // proposal: {a,c} and {b,d}
    if (a == c || b == d) continue;
    std::uint64_t k1 = key(a, c), k2 = key(b, d);
    if (k1 == k2) continue;
    std::uint64_t old1 = key(edges[i].u, edges[i].v), old2 = key(edges[j].u, edges[j].v);
    present.erase(old1);
    present.erase(old2);
    if (present.count(k1) || present.count(k2)) {
      present.insert(old1);
      present.insert(old2);
      continue;
    }
    present.insert(k1);
    present.insert(k2);
    edges[i] = SimilarityGraph::Edge{std::min(a, c), std::max(a, c), edges[i].w};
    edges[j] = SimilarityGraph::Edge{std::min(b, d), std::max(b, d), edges[j].w};
  }
  return SimilarityGraph::from_edges(g.node_ids, std::move(edges));
}

struct ValidationOptions {
  int replicates = 20;
  double z_threshold = 2.0;
  std::uint64_t seed = 0;
};

/// Null-model significance check for a discovered partition: the partition is
/// accepted iff its Q exceeds mean + z*stddev of the Q values that the greedy
/// optimizer reaches on degree-preserving rewirings of the graph (plain
/// Q_obs > mean when the replicate spread is zero). Sample stddev over the
/// replicates; each replicate gets its own derived seed.
inline bool validate_partition(const SimilarityGraph& g, const Partition& p,
                               const ValidationOptions& options) {
  if (options.replicates < 2) throw std::invalid_argument("validation needs at least 2 replicates");
  if (p.k < 2) throw std::invalid_argument("validation needs a partition with k >= 2");

  const double q_obs = modularity(g, p);
  std::vector<double> q_null(static_cast<std::size_t>(options.replicates));
  for (int r = 0; r < options.replicates; ++r) {
    Rng rng(derive_seed(options.seed, "null-model", static_cast<std::uint64_t>(r)));
    SimilarityGraph null_graph = rewire_null_model(g, rng);
    auto res = greedy_partition_detailed(null_graph);
    q_null[static_cast<std::size_t>(r)] = modularity(null_graph, res.partition);
  }
  double mean = 0.0;
  for (double v : q_null) mean += v;
  mean /= static_cast<double>(q_null.size());
  double var = 0.0;
  for (double v : q_null) var += (v - mean) * (v - mean);
  var /= static_cast<double>(q_null.size() - 1);
  double sd = std::sqrt(var);
  if (sd > 0.0) return q_obs > mean + options.z_threshold * sd;
  return q_obs > mean;
}

/// Assignment dump: `traj_id,cluster_id`, one row per trajectory in node
/// order.
inline void write_assignment_csv(const std::vector<std::string>& node_ids, const Partition& p,
                                 const std::string& path) {
  if (node_ids.size() != p.assignment.size()) {
    throw std::invalid_argument("assignment/node id size mismatch");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "traj_id,cluster_id\n";
  for (std::size_t i = 0; i < node_ids.size(); ++i) {
    out << node_ids[i] << ',' << p.assignment[i] << '\n';
  }
}

/// Reads `traj_id,cluster_id` back into a partition over `node_ids` order.
/// The id sets must match exactly.
inline Partition read_assignment_csv(const std::string& path,
                                     const std::vector<std::string>& node_ids) {
  auto rows = read_csv(path, {"traj_id", "cluster_id"});
  std::unordered_map<std::string, std::int32_t> by_id;
  for (const auto& row : rows) {
    auto label = static_cast<std::int32_t>(parse_int(row.fields[1], csv_context(path, row.line)));
    if (!by_id.emplace(row.fields[0], label).second) {
      throw std::runtime_error(csv_context(path, row.line) + ": duplicate trajectory id '" +
                               row.fields[0] + "'");
    }
  }
  if (by_id.size() != node_ids.size()) {
    throw std::runtime_error(path + ": assignment covers " + std::to_string(by_id.size()) +
                             " trajectories, dataset has " + std::to_string(node_ids.size()));
  }
  std::vector<std::int32_t> raw;
  raw.reserve(node_ids.size());
  for (const auto& id : node_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw std::runtime_error(path + ": assignment is missing trajectory '" + id + "'");
    }
    raw.push_back(it->second);
  }
  return Partition::from_labels(raw);
}

}  // namespace trajclust
