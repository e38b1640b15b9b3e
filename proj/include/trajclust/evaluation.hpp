#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "trajclust/modularity.hpp"
#include "trajclust/similarity.hpp"
#include "trajclust/trajectory.hpp"

namespace trajclust {

/// Length-weighted overlap of T' onto T: summed length of the distinct
/// segments present in both, over the summed length of the distinct segments
/// of T. Asymmetric in its arguments.
inline double pair_overlap(const Trajectory& t, const Trajectory& other, const RoadNetwork& net) {
  auto a = distinct_segments(t);
  auto b = distinct_segments(other);
  double shared = 0.0, total = 0.0;
  for (EdgeIndex e : a) total += net.edge(e).length;
  auto it = a.begin();
  auto jt = b.begin();
  while (it != a.end() && jt != b.end()) {
    if (*it < *jt) {
      ++it;
    } else if (*jt < *it) {
      ++jt;
    } else {
      shared += net.edge(*it).length;
      ++it;
      ++jt;
    }
  }
  return total > 0.0 ? shared / total : 0.0;
}

namespace detail {

// Distinct segment lists and their total lengths, precomputed once per
// dataset for the overlap sums.
struct OverlapCache {
  std::vector<std::vector<EdgeIndex>> segments;
  std::vector<double> total_length;

  explicit OverlapCache(const TrajectorySet& ts) {
    segments.reserve(ts.size());
    total_length.reserve(ts.size());
    for (const auto& t : ts.trajectories()) {
      segments.push_back(distinct_segments(t));
      double total = 0.0;
      for (EdgeIndex e : segments.back()) total += ts.network().edge(e).length;
      total_length.push_back(total);
    }
  }

  double overlap(std::size_t i, std::size_t j, const RoadNetwork& net) const {
    if (total_length[i] <= 0.0) return 0.0;
    const auto& a = segments[i];
    const auto& b = segments[j];
    double shared = 0.0;
    auto it = a.begin();
    auto jt = b.begin();
    while (it != a.end() && jt != b.end()) {
      if (*it < *jt) {
        ++it;
      } else if (*jt < *it) {
        ++jt;
      } else {
        shared += net.edge(*it).length;
        ++it;
        ++jt;
      }
    }
    return shared / total_length[i];
  }
};

}  // namespace detail

/// sum over clusters C of (1/|C|) * sum over ordered pairs Ti != Tj in C of
/// pair_overlap(Ti, Tj).
inline double intraclass_overlap(const Partition& p, const TrajectorySet& ts) {
  if (p.assignment.size() != ts.size()) throw std::invalid_argument("partition/dataset mismatch");
  detail::OverlapCache cache(ts);
  double total = 0.0;
  for (const auto& cluster : p.clusters()) {
    if (cluster.size() < 2) continue;
    double acc = 0.0;
    for (auto i : cluster) {
      for (auto j : cluster) {
        if (i == j) continue;
        acc += cache.overlap(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                             ts.network());
      }
    }
    total += acc / static_cast<double>(cluster.size());
  }
  return total;
}

/// sum over clusters Ci of 1/(|T|-|Ci|) * sum over T in Ci, T' outside Ci of
/// pair_overlap(T, T'). A cluster holding the whole dataset contributes 0.
inline double interclass_overlap(const Partition& p, const TrajectorySet& ts) {
  if (p.assignment.size() != ts.size()) throw std::invalid_argument("partition/dataset mismatch");
  detail::OverlapCache cache(ts);
  const std::size_t n = ts.size();
  double total = 0.0;
  for (const auto& cluster : p.clusters()) {
    if (cluster.size() == n) continue;
    double acc = 0.0;
    for (auto i : cluster) {
      for (std::size_t j = 0; j < n; ++j) {
        if (p.assignment[j] == p.assignment[static_cast<std::size_t>(i)]) continue;
        acc += cache.overlap(static_cast<std::size_t>(i), j, ts.network());
      }
    }
    total += acc / static_cast<double>(n - cluster.size());
  }
  return total;
}

struct InertiaResult {
  double intra = 0.0;
  double inter = 0.0;
  double total = 0.0;  // equals intra + inter (Huygens decomposition)
};

enum class EndpointKind { start, end };

/// Start- or end-point inertia of a partition:
///   intra = sum_C sum_{T in C} ||p_T - mu_C||^2
///   inter = sum_C |C| * ||mu_C - mu||^2
///   total = sum_T ||p_T - mu||^2
inline InertiaResult inertia(const Partition& p, const TrajectorySet& ts, EndpointKind which) {
  if (p.assignment.size() != ts.size()) throw std::invalid_argument("partition/dataset mismatch");
  const auto& net = ts.network();
  std::vector<Point> pts;
  pts.reserve(ts.size());
  for (const auto& t : ts.trajectories()) {
    pts.push_back(which == EndpointKind::start ? start_point(t, net) : end_point(t, net));
  }

  Point mean{0.0, 0.0};
  for (const auto& pt : pts) {
    mean.x += pt.x;
    mean.y += pt.y;
  }
  mean.x /= static_cast<double>(pts.size());
  mean.y /= static_cast<double>(pts.size());

  std::vector<Point> cluster_mean(static_cast<std::size_t>(p.k), Point{0.0, 0.0});
  std::vector<std::size_t> cluster_size(static_cast<std::size_t>(p.k), 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto c = static_cast<std::size_t>(p.assignment[i]);
    cluster_mean[c].x += pts[i].x;
    cluster_mean[c].y += pts[i].y;
    ++cluster_size[c];
  }
  for (std::size_t c = 0; c < cluster_mean.size(); ++c) {
    cluster_mean[c].x /= static_cast<double>(cluster_size[c]);
    cluster_mean[c].y /= static_cast<double>(cluster_size[c]);
  }

  auto sq_dist = [](const Point& a, const Point& b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
  };

  InertiaResult res;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto c = static_cast<std::size_t>(p.assignment[i]);
    res.intra += sq_dist(pts[i], cluster_mean[c]);
    res.total += sq_dist(pts[i], mean);
  }
  for (std::size_t c = 0; c < cluster_mean.size(); ++c) {
    res.inter += static_cast<double>(cluster_size[c]) * sq_dist(cluster_mean[c], mean);
  }
  return res;
}

/// Adjusted Rand index between two partitions of the same elements, via the
/// permutation-model expectation of the pair-counting contingency table.
inline double adjusted_rand_index(const Partition& p, const Partition& q) {
  if (p.assignment.size() != q.assignment.size()) {
    throw std::invalid_argument("partitions cover different element sets");
  }
  const std::size_t n = p.assignment.size();
  std::vector<std::vector<std::int64_t>> table(static_cast<std::size_t>(p.k),
                                               std::vector<std::int64_t>(static_cast<std::size_t>(q.k), 0));
  std::vector<std::int64_t> row(static_cast<std::size_t>(p.k), 0);
  std::vector<std::int64_t> col(static_cast<std::size_t>(q.k), 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto a = static_cast<std::size_t>(p.assignment[i]);
    auto b = static_cast<std::size_t>(q.assignment[i]);
    ++table[a][b];
    ++row[a];
    ++col[b];
  }
  auto comb2 = [](std::int64_t x) {
    return x < 2 ? 0.0 : 0.5 * static_cast<double>(x) * static_cast<double>(x - 1);
  };
  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (std::size_t a = 0; a < table.size(); ++a) {
    for (std::size_t b = 0; b < table[a].size(); ++b) sum_cells += comb2(table[a][b]);
    sum_rows += comb2(row[a]);
  }
  for (std::size_t b = 0; b < col.size(); ++b) sum_cols += comb2(col[b]);
  double pairs = comb2(static_cast<std::int64_t>(n));
  double expected = pairs > 0.0 ? sum_rows * sum_cols / pairs : 0.0;
  double maximum = 0.5 * (sum_rows + sum_cols);
  if (maximum == expected) return 1.0;  // both partitions trivial (all-ones or all-singletons)
  return (sum_cells - expected) / (maximum - expected);
}

struct EvaluationReport {
  std::int32_t k = 0;
  double intraclass_overlap = 0.0;
  double interclass_overlap = 0.0;
  InertiaResult start_inertia;
  InertiaResult end_inertia;
  std::optional<double> ari;
};

inline EvaluationReport evaluate_partition(const Partition& p, const TrajectorySet& ts,
                                           const std::optional<Partition>& labels = std::nullopt) {
  EvaluationReport report;
  report.k = p.k;
  report.intraclass_overlap = intraclass_overlap(p, ts);
  report.interclass_overlap = interclass_overlap(p, ts);
  report.start_inertia = inertia(p, ts, EndpointKind::start);
  report.end_inertia = inertia(p, ts, EndpointKind::end);
  if (labels) report.ari = adjusted_rand_index(p, *labels);
  return report;
}

/// Report CSV, one row per evaluated (method, k).
inline void write_report_csv(std::ostream& out,
                             const std::vector<std::pair<std::string, EvaluationReport>>& rows) {
  out << "method,k,intraclass_overlap,interclass_overlap,"
         "start_intra_inertia,start_inter_inertia,start_total_inertia,"
         "end_intra_inertia,end_inter_inertia,end_total_inertia,ari\n";
  for (const auto& [method, r] : rows) {
    out << method << ',' << r.k << ',' << format_double(r.intraclass_overlap) << ','
        << format_double(r.interclass_overlap) << ',' << format_double(r.start_inertia.intra)
        << ',' << format_double(r.start_inertia.inter) << ','
        << format_double(r.start_inertia.total) << ',' << format_double(r.end_inertia.intra) << ','
        << format_double(r.end_inertia.inter) << ',' << format_double(r.end_inertia.total) << ',';
    if (r.ari) out << format_double(*r.ari);
    out << '\n';
  }
}

}  // namespace trajclust
