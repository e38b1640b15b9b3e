#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "trajclust/weighting.hpp"

namespace trajclust {

enum class SimilarityScheme { spatial, classic, jaccard };

inline const char* to_string(SimilarityScheme s) {
  switch (s) {
    case SimilarityScheme::spatial: return "spatial";
    case SimilarityScheme::classic: return "classic";
    case SimilarityScheme::jaccard: return "jaccard";
  }
  return "?";
}

/// Cosine similarity of two sparse profiles, in [0,1]. The dot product is a
/// merge join over the edge-sorted supports, so sim(p,q) == sim(q,p) exactly.
/// Zero-norm vectors are similar to nothing (0, never NaN).
inline double cosine_similarity(const WeightVector& p, const WeightVector& q) {
  if (p.norm == 0.0 || q.norm == 0.0) return 0.0;
  double dot = 0.0;
  auto it = p.weights.begin();
  auto jt = q.weights.begin();
  while (it != p.weights.end() && jt != q.weights.end()) {
    if (it->first < jt->first) {
      ++it;
    } else if (jt->first < it->first) {
      ++jt;
    } else {
      dot += it->second * jt->second;
      ++it;
      ++jt;
    }
  }
  double sim = dot / (p.norm * q.norm);
  return sim > 1.0 ? 1.0 : sim;
}

inline std::vector<EdgeIndex> distinct_segments(const Trajectory& t) {
  std::vector<EdgeIndex> segs;
  segs.reserve(t.visits.size());
  for (const auto& v : t.visits) segs.push_back(v.edge);
  std::sort(segs.begin(), segs.end());
  segs.erase(std::unique(segs.begin(), segs.end()), segs.end());
  return segs;
}

// |A ∩ B| / |A ∪ B| over sorted distinct segment vectors.
inline double jaccard_similarity(const std::vector<EdgeIndex>& a, const std::vector<EdgeIndex>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t shared = 0;
  auto it = a.begin();
  auto jt = b.begin();
  while (it != a.end() && jt != b.end()) {
    if (*it < *jt) {
      ++it;
    } else if (*jt < *it) {
      ++jt;
    } else {
      ++shared;
      ++it;
      ++jt;
    }
  }
  return static_cast<double>(shared) / static_cast<double>(a.size() + b.size() - shared);
}

inline double jaccard_similarity(const Trajectory& a, const Trajectory& b) {
  return jaccard_similarity(distinct_segments(a), distinct_segments(b));
}

/// Per-dataset similarity context for one scheme: profiles for the cosine
/// schemes, distinct segment sets for Jaccard.
class TrajectoryFeatures {
 public:
  TrajectoryFeatures(const TrajectorySet& ts, SimilarityScheme scheme)
      : scheme_(scheme), n_(ts.size()) {
    ids_.reserve(n_);
    for (const auto& t : ts.trajectories()) ids_.push_back(t.id);
    if (scheme == SimilarityScheme::jaccard) {
      segments_.reserve(n_);
      for (const auto& t : ts.trajectories()) segments_.push_back(distinct_segments(t));
    } else {
      auto stats = corpus_stats(ts);
      auto ws = scheme == SimilarityScheme::spatial ? WeightScheme::spatial : WeightScheme::classic;
      profiles_ = compute_profiles(ts, stats, ws);
    }
  }

  std::size_t size() const { return n_; }
  SimilarityScheme scheme() const { return scheme_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<WeightVector>& profiles() const { return profiles_; }
  const std::vector<EdgeIndex>& segments(std::size_t i) const { return segments_.at(i); }

  double similarity(std::size_t i, std::size_t j) const {
    if (scheme_ == SimilarityScheme::jaccard) return jaccard_similarity(segments_[i], segments_[j]);
    return cosine_similarity(profiles_[i], profiles_[j]);
  }

  double distance(std::size_t i, std::size_t j) const { return 1.0 - similarity(i, j); }

 private:
  SimilarityScheme scheme_;
  std::size_t n_;
  std::vector<std::string> ids_;
  std::vector<WeightVector> profiles_;                // cosine schemes
  std::vector<std::vector<EdgeIndex>> segments_;      // jaccard
};

/// Segment postings: for each edge, the trajectories it appears in (with the
/// profile weight, or 1 for set schemes), sorted by trajectory index.
struct InvertedIndex {
  std::vector<std::vector<std::pair<std::int32_t, double>>> postings;  // by EdgeIndex

  static InvertedIndex build(const TrajectoryFeatures& feats, std::size_t edge_count) {
    InvertedIndex index;
    index.postings.assign(edge_count, {});
    if (feats.scheme() == SimilarityScheme::jaccard) {
      for (std::size_t i = 0; i < feats.size(); ++i) {
        for (EdgeIndex e : feats.segments(i)) {
          index.postings[static_cast<std::size_t>(e)].emplace_back(static_cast<std::int32_t>(i), 1.0);
        }
      }
    } else {
      for (std::size_t i = 0; i < feats.size(); ++i) {
        for (const auto& [e, w] : feats.profiles()[i].weights) {
          index.postings[static_cast<std::size_t>(e)].emplace_back(static_cast<std::int32_t>(i), w);
        }
      }
    }
    return index;
  }
};

/// Weighted undirected similarity graph over trajectories. Nodes are all
/// trajectories (isolated ones included); an edge exists iff the pairwise
/// similarity exceeds the configured floor (0 by default, i.e. "> 0").
struct SimilarityGraph {
  struct Edge {
    std::int32_t u, v;  // u < v
    double w;           // in (0,1]
  };

  std::vector<std::string> node_ids;
  std::vector<Edge> edges;  // sorted by (u,v)
  std::vector<std::vector<std::pair<std::int32_t, double>>> adjacency;
  std::vector<double> degree;   // weighted degree
  double total_weight = 0.0;    // m, each edge counted once

  std::size_t node_count() const { return node_ids.size(); }
  std::size_t edge_count() const { return edges.size(); }
  double two_m() const { return 2.0 * total_weight; }

  static SimilarityGraph from_edges(std::vector<std::string> node_ids, std::vector<Edge> edges) {
    SimilarityGraph g;
    g.node_ids = std::move(node_ids);
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    g.edges = std::move(edges);
    g.adjacency.assign(g.node_ids.size(), {});
    g.degree.assign(g.node_ids.size(), 0.0);
    std::int32_t n = static_cast<std::int32_t>(g.node_ids.size());
    for (const auto& e : g.edges) {
      if (e.u < 0 || e.v >= n || e.u >= e.v) throw std::invalid_argument("bad similarity edge");
      if (!(e.w > 0.0)) throw std::invalid_argument("similarity edge weight must be > 0");
      g.adjacency[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.w);
      g.adjacency[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.w);
      g.degree[static_cast<std::size_t>(e.u)] += e.w;
      g.degree[static_cast<std::size_t>(e.v)] += e.w;
      g.total_weight += e.w;
    }
    for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
    return g;
  }
};

struct SimilarityGraphOptions {
  // Edges with similarity <= min_similarity are dropped. 0 keeps the exact
  // "similarity > 0" rule.
  double min_similarity = 0.0;
};

/// All trajectory pairs with positive similarity, found through the inverted
/// index (only pairs sharing at least one indexed segment are candidates).
inline std::vector<SimilarityGraph::Edge> pairwise_similarities(
    const TrajectoryFeatures& feats, std::size_t edge_count,
    const SimilarityGraphOptions& options = {}) {
  auto index = InvertedIndex::build(feats, edge_count);

  // Accumulate shared-support dot products (or shared counts for Jaccard)
  // per candidate pair, scanning edges in index order for determinism.
  std::unordered_map<std::uint64_t, double> acc;
  for (const auto& postings : index.postings) {
    for (std::size_t a = 0; a + 1 < postings.size(); ++a) {
      for (std::size_t b = a + 1; b < postings.size(); ++b) {
        std::uint64_t key = (static_cast<std::uint64_t>(postings[a].first) << 32) |
                            static_cast<std::uint32_t>(postings[b].first);
        acc[key] += postings[a].second * postings[b].second;
      }
    }
  }

  std::vector<SimilarityGraph::Edge> edges;
  edges.reserve(acc.size());
  for (const auto& [key, dot] : acc) {
    auto i = static_cast<std::int32_t>(key >> 32);
    auto j = static_cast<std::int32_t>(key & 0xffffffffu);
    double sim;
    if (feats.scheme() == SimilarityScheme::jaccard) {
      double union_size = static_cast<double>(feats.segments(static_cast<std::size_t>(i)).size() +
                                              feats.segments(static_cast<std::size_t>(j)).size()) -
                          dot;
      sim = dot / union_size;
    } else {
      const auto& pi = feats.profiles()[static_cast<std::size_t>(i)];
      const auto& pj = feats.profiles()[static_cast<std::size_t>(j)];
      sim = dot / (pi.norm * pj.norm);
      if (sim > 1.0) sim = 1.0;
    }
    if (sim > options.min_similarity) {
      edges.push_back(SimilarityGraph::Edge{i, j, sim});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  return edges;
}

inline SimilarityGraph build_similarity_graph(const TrajectorySet& ts, SimilarityScheme scheme,
                                              const SimilarityGraphOptions& options = {}) {
  TrajectoryFeatures feats(ts, scheme);
  auto edges = pairwise_similarities(feats, ts.network().edge_count(), options);
  std::vector<std::string> ids = feats.ids();
  return SimilarityGraph::from_edges(std::move(ids), std::move(edges));
}

/// Graph dump: `traj_i,traj_j,weight` with traj_i < traj_j (string order),
/// rows sorted.
inline void write_graph_csv(const SimilarityGraph& g, const std::string& path) {
  std::vector<std::tuple<std::string, std::string, double>> rows;
  rows.reserve(g.edges.size());
  for (const auto& e : g.edges) {
    std::string a = g.node_ids[static_cast<std::size_t>(e.u)];
    std::string b = g.node_ids[static_cast<std::size_t>(e.v)];
    if (b < a) std::swap(a, b);
    rows.emplace_back(std::move(a), std::move(b), e.w);
  }
  std::sort(rows.begin(), rows.end());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "traj_i,traj_j,weight\n";
  for (const auto& [a, b, w] : rows) {
    out << a << ',' << b << ',' << format_double(w) << '\n';
  }
}

}  // namespace trajclust
