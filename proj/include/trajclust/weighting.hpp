#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "trajclust/trajectory.hpp"

namespace trajclust {

enum class WeightScheme { spatial, classic, binary };

inline const char* to_string(WeightScheme s) {
  switch (s) {
    case WeightScheme::spatial: return "spatial";
    case WeightScheme::classic: return "classic";
    case WeightScheme::binary: return "binary";
  }
  return "?";
}

/// Corpus-level document frequencies: doc_freq[e] counts the trajectories in
/// which segment e occurs at least once (set semantics, repeats ignored).
struct CorpusStats {
  std::size_t n_trajectories = 0;
  std::vector<std::int32_t> doc_freq;  // indexed by EdgeIndex, 0 = absent

  std::int32_t df(EdgeIndex e) const { return doc_freq.at(static_cast<std::size_t>(e)); }
};

/// Sparse segment profile of one trajectory. Entries are sorted by edge
/// index, zero weights are dropped, and the Euclidean norm is cached.
struct WeightVector {
  std::string owner;
  std::vector<std::pair<EdgeIndex, double>> weights;
  double norm = 0.0;
};

inline CorpusStats corpus_stats(const TrajectorySet& ts) {
  CorpusStats stats;
  stats.n_trajectories = ts.size();
  stats.doc_freq.assign(ts.network().edge_count(), 0);
  std::vector<EdgeIndex> seen;
  for (const auto& t : ts.trajectories()) {
    seen.clear();
    for (const auto& v : t.visits) seen.push_back(v.edge);
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (EdgeIndex e : seen) ++stats.doc_freq[static_cast<std::size_t>(e)];
  }
  return stats;
}

/// Turns a trajectory into its weighted segment profile.
///
/// spatial: (count(e) * length(e) / total visited length) * ln(N / df(e))
/// classic: (count(e) / n visits) * ln(N / df(e))
/// binary:  1 per distinct segment
///
/// Term frequency uses bag semantics (repeated segments count), document
/// frequency set semantics. Natural log; the base only rescales vectors and
/// cancels in cosine similarity.
inline WeightVector compute_profile(const Trajectory& t, const CorpusStats& stats,
                                    WeightScheme scheme, const RoadNetwork& net) {
  WeightVector vec;
  vec.owner = t.id;

  std::map<EdgeIndex, std::int64_t> counts;
  double total_length = 0.0;
  for (const auto& v : t.visits) {
    ++counts[v.edge];
    total_length += net.edge(v.edge).length;
  }
  const double n_visits = static_cast<double>(t.visits.size());
  const double corpus_size = static_cast<double>(stats.n_trajectories);

  double sq_sum = 0.0;
  for (const auto& [e, c] : counts) {
    double w = 0.0;
    if (scheme == WeightScheme::binary) {
      w = 1.0;
    } else {
      auto df = stats.df(e);
      if (df <= 0) {
        throw std::runtime_error("segment '" + net.edge(e).id +
                                 "' missing from corpus stats (stats/dataset mismatch)");
      }
      double idf = std::log(corpus_size / static_cast<double>(df));
      double tf = scheme == WeightScheme::spatial
                      ? static_cast<double>(c) * net.edge(e).length / total_length
                      : static_cast<double>(c) / n_visits;
      w = tf * idf;
    }
    if (w > 0.0) {
      vec.weights.emplace_back(e, w);
      sq_sum += w * w;
    }
  }
  vec.norm = std::sqrt(sq_sum);
  return vec;
}

inline std::vector<WeightVector> compute_profiles(const TrajectorySet& ts, const CorpusStats& stats,
                                                  WeightScheme scheme) {
  std::vector<WeightVector> profiles;
  profiles.reserve(ts.size());
  for (const auto& t : ts.trajectories()) {
    profiles.push_back(compute_profile(t, stats, scheme, ts.network()));
  }
  return profiles;
}

/// Debug dump: `traj_id,edge_id,weight` sorted by (traj_id, edge_id).
inline void dump_profiles_csv(const std::vector<WeightVector>& profiles, const RoadNetwork& net,
                              const std::string& path) {
  std::vector<std::tuple<std::string, std::string, double>> rows;
  for (const auto& p : profiles) {
    for (const auto& [e, w] : p.weights) {
      rows.emplace_back(p.owner, net.edge(e).id, w);
    }
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    return std::get<1>(a) < std::get<1>(b);
  });
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "traj_id,edge_id,weight\n";
  for (const auto& [tid, eid, w] : rows) {
    out << tid << ',' << eid << ',' << format_double(w) << '\n';
  }
}

}  // namespace trajclust
