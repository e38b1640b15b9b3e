#pragma once

// Shared test fixtures: throwaway directories, CSV builders, and small
// networks/graphs used across the suites.

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "trajclust/trajclust.hpp"

namespace testsupport {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = fs::temp_directory_path() /
            ("trajclust_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path file(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Network builders

struct NodeRow {
  std::string id;
  double x, y;
};
struct EdgeRow {
  std::string id, from, to;
  double length;
  int oneway;
};

inline std::string nodes_csv(const std::vector<NodeRow>& nodes) {
  std::string s = "node_id,x,y\n";
  for (const auto& n : nodes) {
    s += n.id + "," + trajclust::format_double(n.x) + "," + trajclust::format_double(n.y) + "\n";
  }
  return s;
}

inline std::string edges_csv(const std::vector<EdgeRow>& edges) {
  std::string s = "edge_id,from,to,length,oneway\n";
  for (const auto& e : edges) {
    s += e.id + "," + e.from + "," + e.to + "," + trajclust::format_double(e.length) + "," +
         std::to_string(e.oneway) + "\n";
  }
  return s;
}

// In-memory builder mirroring the loader's oneway expansion.
inline trajclust::RoadNetwork build_network(const std::vector<NodeRow>& nodes,
                                            const std::vector<EdgeRow>& edges) {
  trajclust::RoadNetwork net;
  for (const auto& n : nodes) net.add_node(n.id, n.x, n.y);
  for (const auto& e : edges) {
    if (e.oneway) {
      net.add_edge(e.id, e.from, e.to, e.length);
    } else {
      net.add_edge(e.id + "_f", e.from, e.to, e.length);
      net.add_edge(e.id + "_r", e.to, e.from, e.length);
    }
  }
  return net;
}

// Line of `n` nodes with two-way edges; ids n0..n{n-1}, edges e0...
inline trajclust::RoadNetwork chain_network(int n, double length = 100.0) {
  std::vector<NodeRow> nodes;
  std::vector<EdgeRow> edges;
  for (int i = 0; i < n; ++i) nodes.push_back({"n" + std::to_string(i), 100.0 * i, 0.0});
  for (int i = 0; i + 1 < n; ++i) {
    edges.push_back({"e" + std::to_string(i), "n" + std::to_string(i), "n" + std::to_string(i + 1),
                     length, 0});
  }
  return build_network(nodes, edges);
}

// rows x cols grid, all streets two-way. Node ids "g<r>_<c>", horizontal
// edges "h<r>_<c>", vertical "v<r>_<c>".
inline void grid_rows(int rows, int cols, std::vector<NodeRow>& nodes, std::vector<EdgeRow>& edges,
                      const std::string& prefix = "", double spacing = 100.0, double x0 = 0.0,
                      double y0 = 0.0) {
  auto nid = [&](int r, int c) { return prefix + "g" + std::to_string(r) + "_" + std::to_string(c); };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      nodes.push_back({nid(r, c), x0 + spacing * c, y0 + spacing * r});
    }
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c + 1 < cols; ++c) {
      edges.push_back({prefix + "h" + std::to_string(r) + "_" + std::to_string(c), nid(r, c),
                       nid(r, c + 1), spacing, 0});
    }
  }
  for (int r = 0; r + 1 < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      edges.push_back({prefix + "v" + std::to_string(r) + "_" + std::to_string(c), nid(r, c),
                       nid(r + 1, c), spacing, 0});
    }
  }
}

inline trajclust::RoadNetwork grid_network(int rows, int cols, double spacing = 100.0) {
  std::vector<NodeRow> nodes;
  std::vector<EdgeRow> edges;
  grid_rows(rows, cols, nodes, edges, "", spacing);
  return build_network(nodes, edges);
}

// k disconnected "ladder" components: a main line of `span` nodes plus one
// detour node bridging every consecutive pair, so 2-edge deviations exist.
// od_ids holds the ends of each main line.
struct LadderFixture {
  std::vector<NodeRow> nodes;
  std::vector<EdgeRow> edges;
  std::vector<std::pair<std::string, std::string>> od_ids;
};

inline LadderFixture ladder_fixture(int k, int span, double spacing = 100.0) {
  LadderFixture f;
  for (int c = 0; c < k; ++c) {
    std::string p = "c" + std::to_string(c) + "_";
    auto main_id = [&](int i) { return p + "m" + std::to_string(i); };
    auto side_id = [&](int i) { return p + "s" + std::to_string(i); };
    double y = 1000.0 * c;
    for (int i = 0; i < span; ++i) f.nodes.push_back({main_id(i), spacing * i, y});
    for (int i = 0; i + 1 < span; ++i) {
      f.nodes.push_back({side_id(i), spacing * i + spacing / 2, y + spacing / 2});
      f.edges.push_back({p + "m" + std::to_string(i), main_id(i), main_id(i + 1), spacing, 0});
      f.edges.push_back({p + "a" + std::to_string(i), main_id(i), side_id(i), spacing * 0.6, 0});
      f.edges.push_back({p + "b" + std::to_string(i), side_id(i), main_id(i + 1), spacing * 0.6, 0});
    }
    f.od_ids.emplace_back(main_id(0), main_id(span - 1));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Trajectory helpers

inline trajclust::Trajectory make_traj(const std::string& id,
                                       const std::vector<std::string>& edge_ids,
                                       const trajclust::RoadNetwork& net, double t0 = 0.0,
                                       double dt = 1.0) {
  trajclust::Trajectory t;
  t.id = id;
  double clock = t0;
  for (const auto& eid : edge_ids) {
    auto e = net.find_edge(eid);
    if (!e) throw std::runtime_error("fixture references unknown edge " + eid);
    t.visits.push_back({clock, *e});
    clock += dt;
  }
  return t;
}

// Random head-to-tail walk of `steps` edges; shorter if a dead end is hit.
inline trajclust::Trajectory random_walk(const std::string& id, const trajclust::RoadNetwork& net,
                                         int steps, trajclust::Rng& rng) {
  trajclust::Trajectory t;
  t.id = id;
  auto node = static_cast<trajclust::NodeIndex>(rng.next_below(net.node_count()));
  double clock = 0.0;
  for (int i = 0; i < steps; ++i) {
    const auto& out = net.out_edges(node);
    if (out.empty()) break;
    auto e = out[static_cast<std::size_t>(rng.next_below(out.size()))];
    t.visits.push_back({clock, e});
    clock += 1.0;
    node = net.edge(e).to;
  }
  if (t.visits.empty()) {
    t.visits.push_back({0.0, 0});
  }
  return t;
}

inline trajclust::TrajectorySet random_dataset(const trajclust::RoadNetwork& net, int count,
                                               int max_steps, trajclust::Rng& rng) {
  trajclust::TrajectorySet ts(net);
  for (int i = 0; i < count; ++i) {
    int steps = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_steps)));
    ts.add(random_walk("t" + std::to_string(i), net, steps, rng));
  }
  return ts;
}

// ---------------------------------------------------------------------------
// Similarity graphs

// Two unit-weight triangles joined by a single bridge edge.
inline trajclust::SimilarityGraph barbell_graph() {
  using G = trajclust::SimilarityGraph;
  std::vector<std::string> ids;
  for (int i = 0; i < 6; ++i) ids.push_back("n" + std::to_string(i));
  std::vector<G::Edge> edges = {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}, {2, 3, 1.0},
                                {3, 4, 1.0}, {3, 5, 1.0}, {4, 5, 1.0}};
  return G::from_edges(ids, edges);
}

inline trajclust::SimilarityGraph complete_graph(int n, double w = 1.0) {
  using G = trajclust::SimilarityGraph;
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("n" + std::to_string(i));
  std::vector<G::Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j, w});
  }
  return G::from_edges(ids, edges);
}

// Erdos-Renyi-ish random weighted graph (possibly disconnected).
inline trajclust::SimilarityGraph random_graph(int n, double p, trajclust::Rng& rng) {
  using G = trajclust::SimilarityGraph;
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("n" + std::to_string(i));
  std::vector<G::Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.next_double() < p) edges.push_back({i, j, 0.05 + 0.95 * rng.next_double()});
    }
  }
  return G::from_edges(ids, edges);
}

}  // namespace testsupport
