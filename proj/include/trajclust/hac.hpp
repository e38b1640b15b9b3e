#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "trajclust/modularity.hpp"
#include "trajclust/similarity.hpp"

namespace trajclust {

enum class Linkage { single, average, complete };

inline const char* to_string(Linkage l) {
  switch (l) {
    case Linkage::single: return "single";
    case Linkage::average: return "average";
    case Linkage::complete: return "complete";
  }
  return "?";
}

/// Symmetric distance matrix with zero diagonal, stored as the condensed
/// upper triangle.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t n, double fill = 0.0)
      : n_(n), data_(n * (n - 1) / 2, fill) {
    if (n < 1) throw std::invalid_argument("distance matrix needs at least 1 point");
  }

  std::size_t size() const { return n_; }

  double at(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    return data_[index(i, j)];
  }

  void set(std::size_t i, std::size_t j, double v) { data_[index(i, j)] = v; }

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
  }

  std::size_t n_;
  std::vector<double> data_;
};

/// d(i,j) = 1 - similarity(i,j); pairs sharing no segment get exactly 1.
/// O(n^2) memory is inherent to the baseline, hence the hard cap.
inline DistanceMatrix distance_matrix(const TrajectorySet& ts, SimilarityScheme scheme,
                                      std::size_t cap = 20000) {
  if (ts.size() > cap) {
    throw std::runtime_error("distance matrix for " + std::to_string(ts.size()) +
                             " trajectories exceeds the cap of " + std::to_string(cap));
  }
  TrajectoryFeatures feats(ts, scheme);
  DistanceMatrix d(ts.size(), 1.0);
  for (const auto& e : pairwise_similarities(feats, ts.network().edge_count())) {
    d.set(static_cast<std::size_t>(e.u), static_cast<std::size_t>(e.v), 1.0 - e.w);
  }
  return d;
}

/// Agglomeration trace. Leaves are clusters 0..n-1; the cluster created by
/// merge step s (0-based) has id n+s.
struct Dendrogram {
  struct Merge {
    std::int32_t left;   // smaller cluster id
    std::int32_t right;  // larger cluster id
    double distance;
  };
  std::size_t n_leaves = 0;
  std::vector<Merge> merges;  // exactly n_leaves - 1 entries
};

/// Standard HAC over a precomputed distance matrix. Each step merges the pair
/// of clusters at minimal linkage distance (ties to the smallest cluster-id
/// pair) and updates the matrix with the Lance-Williams rule for the linkage:
/// min for single, max for complete, size-weighted mean (UPGMA) for average.
inline Dendrogram agglomerate(const DistanceMatrix& d, Linkage linkage) {
  const std::size_t n = d.size();
  if (n < 2) throw std::invalid_argument("agglomerate needs at least 2 points");

  DistanceMatrix work = d;
  std::vector<char> active(n, 1);
  std::vector<std::int32_t> cluster_id(n);
  std::vector<std::size_t> cluster_size(n, 1);
  for (std::size_t i = 0; i < n; ++i) cluster_id[i] = static_cast<std::int32_t>(i);

  Dendrogram dend;
  dend.n_leaves = n;
  dend.merges.reserve(n - 1);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    bool found = false;
    double best = 0.0;
    std::size_t bi = 0, bj = 0;
    std::int32_t blo = 0, bhi = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        double dist = work.at(i, j);
        std::int32_t lo = std::min(cluster_id[i], cluster_id[j]);
        std::int32_t hi = std::max(cluster_id[i], cluster_id[j]);
        bool better = !found || dist < best ||
                      (dist == best && (lo < blo || (lo == blo && hi < bhi)));
        if (better) {
          found = true;
          best = dist;
          bi = i;
          bj = j;
          blo = lo;
          bhi = hi;
        }
      }
    }

    dend.merges.push_back(Dendrogram::Merge{blo, bhi, best});
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      double dik = work.at(bi, k);
      double djk = work.at(bj, k);
      double updated;
      switch (linkage) {
        case Linkage::single: updated = std::min(dik, djk); break;
        case Linkage::complete: updated = std::max(dik, djk); break;
        case Linkage::average:
        default: {
          auto si = static_cast<double>(cluster_size[bi]);
          auto sj = static_cast<double>(cluster_size[bj]);
          updated = (si * dik + sj * djk) / (si + sj);
          break;
        }
      }
      work.set(bi, k, updated);
    }
    active[bj] = 0;
    cluster_size[bi] += cluster_size[bj];
    cluster_id[bi] = static_cast<std::int32_t>(n + step);
  }
  return dend;
}

/// Cuts the dendrogram into k clusters by undoing the last k-1 merges.
inline Partition cut(const Dendrogram& dend, std::size_t k) {
  const std::size_t n = dend.n_leaves;
  if (k < 1 || k > n) throw std::invalid_argument("cut k out of range");

  // Union-find over leaves; merged cluster ids map onto their root.
  std::vector<std::int32_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::int32_t>(i);
  std::function<std::int32_t(std::int32_t)> find = [&](std::int32_t x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  std::vector<std::int32_t> root_of_cluster(n + dend.merges.size());
  for (std::size_t i = 0; i < n; ++i) root_of_cluster[i] = static_cast<std::int32_t>(i);

  const std::size_t replay = n - k;
  for (std::size_t s = 0; s < replay; ++s) {
    const auto& m = dend.merges[s];
    auto ra = find(root_of_cluster[static_cast<std::size_t>(m.left)]);
    auto rb = find(root_of_cluster[static_cast<std::size_t>(m.right)]);
    parent[static_cast<std::size_t>(rb)] = ra;
    root_of_cluster[n + s] = ra;
  }

  std::vector<std::int32_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = find(static_cast<std::int32_t>(i));
  return Partition::from_labels(labels);
}

/// Dendrogram dump: `step,left,right,distance`.
inline void write_dendrogram_csv(const Dendrogram& dend, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "step,left,right,distance\n";
  for (std::size_t s = 0; s < dend.merges.size(); ++s) {
    const auto& m = dend.merges[s];
    out << s << ',' << m.left << ',' << m.right << ',' << format_double(m.distance) << '\n';
  }
}

}  // namespace trajclust
