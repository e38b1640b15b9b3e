// trajclust command line: dataset generation, similarity graphs, modularity
// and HAC clustering, evaluation reports, and GeoJSON export.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "trajclust/trajclust.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace trajclust;

namespace {

// Files written by the current run. On failure everything is removed again so
// a failed run never leaves partial output behind.
class OutputTracker {
 public:
  fs::path ensure_dir(const fs::path& dir) {
    if (!fs::exists(dir)) {
      fs::create_directories(dir);
      created_dirs_.push_back(dir);
    }
    return dir;
  }

  fs::path track(const fs::path& file) {
    files_.push_back(file);
    return file;
  }

  void discard() {
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
    for (auto it = created_dirs_.rbegin(); it != created_dirs_.rend(); ++it) {
      if (fs::exists(*it) && fs::is_empty(*it)) fs::remove(*it, ec);
    }
  }

 private:
  std::vector<fs::path> files_;
  std::vector<fs::path> created_dirs_;
};

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << content;
}

void write_json(const fs::path& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

ordered_json run_record(const std::string& command, ordered_json parameters) {
  ordered_json j;
  j["command"] = command;
  j["parameters"] = std::move(parameters);
  return j;
}

const std::map<std::string, SimilarityScheme> kSchemes{
    {"spatial", SimilarityScheme::spatial},
    {"classic", SimilarityScheme::classic},
    {"jaccard", SimilarityScheme::jaccard}};

const std::map<std::string, Linkage> kLinkages{{"single", Linkage::single},
                                               {"average", Linkage::average},
                                               {"complete", Linkage::complete}};

struct CommonInputs {
  std::string nodes;
  std::string edges;
  std::string trajectories;
};

void add_network_options(CLI::App* cmd, CommonInputs& in) {
  cmd->add_option("--nodes", in.nodes, "nodes CSV (node_id,x,y)")->required();
  cmd->add_option("--edges", in.edges, "edges CSV (edge_id,from,to,length,oneway)")->required();
}

void add_dataset_options(CLI::App* cmd, CommonInputs& in) {
  add_network_options(cmd, in);
  cmd->add_option("--trajectories", in.trajectories,
                  "trajectories CSV (traj_id,seq,timestamp,edge_id)")
      ->required();
}

TrajectorySet load_dataset(const CommonInputs& in, const RoadNetwork& net) {
  return load_trajectories(in.trajectories, net);
}

// ---------------------------------------------------------------------------

struct ClusterOptions {
  CommonInputs in;
  std::string weighting = "spatial";
  int null_replicates = 20;
  double z = 2.0;
  std::size_t min_size = 2;
  std::uint64_t seed = 0;
  double min_similarity = 0.0;
  std::string out;
};

int run_cluster(const ClusterOptions& opt, OutputTracker& tracker) {
  auto net = load_network(opt.in.nodes, opt.in.edges);
  auto ts = load_dataset(opt.in, net);
  auto graph = build_similarity_graph(ts, kSchemes.at(opt.weighting), {opt.min_similarity});

  HierarchyParams params;
  params.null_replicates = opt.null_replicates;
  params.z_threshold = opt.z;
  params.min_size = opt.min_size;
  params.seed = opt.seed;
  auto hierarchy = build_hierarchy(graph, params);

  fs::path out = tracker.ensure_dir(opt.out);
  write_json(tracker.track(out / "hierarchy.json"), hierarchy_to_json(hierarchy));

  int depth = hierarchy.max_depth();
  ordered_json clusters_per_level = ordered_json::array();
  for (int level = 0; level <= depth; ++level) {
    auto partition = flatten_by_level(hierarchy, level);
    clusters_per_level.push_back(partition.k);
    write_assignment_csv(
        graph.node_ids, partition,
        tracker.track(out / ("assignment_level_" + std::to_string(level) + ".csv")).string());
  }

  ordered_json summary;
  if (depth >= 1) {
    summary["top_level_modularity"] = modularity(graph, flatten_by_level(hierarchy, 1));
  } else {
    summary["top_level_modularity"] = nullptr;
  }
  summary["levels"] = depth + 1;
  summary["clusters_per_level"] = clusters_per_level;
  summary["trajectories"] = ts.size();
  summary["graph_edges"] = graph.edge_count();
  write_json(tracker.track(out / "summary.json"), summary);

  ordered_json params_json;
  params_json["nodes"] = opt.in.nodes;
  params_json["edges"] = opt.in.edges;
  params_json["trajectories"] = opt.in.trajectories;
  params_json["weighting"] = opt.weighting;
  params_json["null-replicates"] = opt.null_replicates;
  params_json["z"] = opt.z;
  params_json["min-size"] = opt.min_size;
  params_json["seed"] = opt.seed;
  params_json["min-similarity"] = opt.min_similarity;
  params_json["out"] = opt.out;
  write_json(tracker.track(out / "run.json"), run_record("cluster", params_json));

  std::cout << "hierarchy: " << depth + 1 << " level(s), " << hierarchy.leaf_count()
            << " leaf cluster(s)\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct HacOptions {
  CommonInputs in;
  std::string weighting = "spatial";
  std::string linkage;
  std::size_t k = 0;
  std::size_t cap = 20000;
  std::string out;
};

int run_hac(const HacOptions& opt, OutputTracker& tracker) {
  auto net = load_network(opt.in.nodes, opt.in.edges);
  auto ts = load_dataset(opt.in, net);
  auto d = distance_matrix(ts, kSchemes.at(opt.weighting), opt.cap);
  auto dendrogram = agglomerate(d, kLinkages.at(opt.linkage));
  auto partition = cut(dendrogram, opt.k);

  std::vector<std::string> ids;
  ids.reserve(ts.size());
  for (const auto& t : ts.trajectories()) ids.push_back(t.id);

  fs::path out = tracker.ensure_dir(opt.out);
  write_dendrogram_csv(dendrogram, tracker.track(out / "dendrogram.csv").string());
  write_assignment_csv(ids, partition, tracker.track(out / "assignment.csv").string());

  ordered_json params_json;
  params_json["nodes"] = opt.in.nodes;
  params_json["edges"] = opt.in.edges;
  params_json["trajectories"] = opt.in.trajectories;
  params_json["weighting"] = opt.weighting;
  params_json["linkage"] = opt.linkage;
  params_json["k"] = opt.k;
  params_json["cap"] = opt.cap;
  params_json["out"] = opt.out;
  write_json(tracker.track(out / "run.json"), run_record("hac", params_json));

  std::cout << "hac: cut " << dendrogram.n_leaves << " trajectories into " << partition.k
            << " cluster(s)\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct EvaluateOptions {
  CommonInputs in;
  std::string assignment;
  std::string labels;
  std::string out;  // empty -> stdout
};

int run_evaluate(const EvaluateOptions& opt, OutputTracker& tracker) {
  auto net = load_network(opt.in.nodes, opt.in.edges);
  auto ts = load_dataset(opt.in, net);
  std::vector<std::string> ids;
  ids.reserve(ts.size());
  for (const auto& t : ts.trajectories()) ids.push_back(t.id);

  auto partition = read_assignment_csv(opt.assignment, ids);
  std::optional<Partition> labels;
  if (!opt.labels.empty()) labels = read_labels_csv(opt.labels, ts);

  auto report = evaluate_partition(partition, ts, labels);
  std::string method = fs::path(opt.assignment).stem().string();
  std::vector<std::pair<std::string, EvaluationReport>> rows{{method, report}};

  if (opt.out.empty()) {
    write_report_csv(std::cout, rows);
  } else {
    std::ostringstream ss;
    write_report_csv(ss, rows);
    write_text(tracker.track(opt.out), ss.str());

    ordered_json params_json;
    params_json["assignment"] = opt.assignment;
    params_json["trajectories"] = opt.in.trajectories;
    params_json["nodes"] = opt.in.nodes;
    params_json["edges"] = opt.in.edges;
    if (!opt.labels.empty()) params_json["labels"] = opt.labels;
    params_json["out"] = opt.out;
    write_json(tracker.track(opt.out + ".run.json"), run_record("evaluate", params_json));
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct GenerateOptions {
  std::string nodes;
  std::string edges;
  std::size_t n = 0;
  std::size_t corridors = 0;
  double deviation = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_generate(const GenerateOptions& opt, OutputTracker& tracker) {
  auto net = load_network(opt.nodes, opt.edges);

  std::vector<OdPair> od_pairs;
  if (opt.corridors > 0) {
    Rng rng(derive_seed(opt.seed, "od-pairs"));
    od_pairs = sample_od_pairs(net, opt.corridors, rng);
  }
  auto data = generate(net, opt.n, od_pairs, opt.deviation, opt.seed);

  fs::path out = tracker.ensure_dir(opt.out);
  save_trajectories(data.trajectories, tracker.track(out / "trajectories.csv").string());
  if (opt.corridors > 0) {
    write_labels_csv(data.trajectories, data.corridor_labels,
                     tracker.track(out / "labels.csv").string());
  }

  ordered_json params_json;
  params_json["nodes"] = opt.nodes;
  params_json["edges"] = opt.edges;
  params_json["n"] = opt.n;
  params_json["corridors"] = opt.corridors;
  params_json["deviation"] = opt.deviation;
  params_json["seed"] = opt.seed;
  params_json["out"] = opt.out;
  write_json(tracker.track(out / "run.json"), run_record("generate", params_json));

  std::cout << "generated " << data.trajectories.size() << " trajectories\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct ExportOptions {
  CommonInputs in;
  std::string assignment;
  std::string out;
};

int run_export_geojson(const ExportOptions& opt, OutputTracker& tracker) {
  auto net = load_network(opt.in.nodes, opt.in.edges);
  auto ts = load_dataset(opt.in, net);
  std::vector<std::string> ids;
  ids.reserve(ts.size());
  for (const auto& t : ts.trajectories()) ids.push_back(t.id);
  auto partition = read_assignment_csv(opt.assignment, ids);

  fs::path out = tracker.ensure_dir(opt.out);
  for (std::int32_t c = 0; c < partition.k; ++c) {
    tracker.track(out / ("cluster_" + std::to_string(c) + ".geojson"));
  }
  auto written = export_cluster_geojson(ts, partition, out);

  ordered_json params_json;
  params_json["assignment"] = opt.assignment;
  params_json["nodes"] = opt.in.nodes;
  params_json["edges"] = opt.in.edges;
  params_json["trajectories"] = opt.in.trajectories;
  params_json["out"] = opt.out;
  write_json(tracker.track(out / "run.json"), run_record("export-geojson", params_json));

  std::cout << "wrote " << written.size() << " cluster feature collection(s)\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct GraphOptions {
  CommonInputs in;
  std::string weighting = "spatial";
  double min_similarity = 0.0;
  std::string out;
};

int run_graph(const GraphOptions& opt, OutputTracker& tracker) {
  auto net = load_network(opt.in.nodes, opt.in.edges);
  auto ts = load_dataset(opt.in, net);
  auto graph = build_similarity_graph(ts, kSchemes.at(opt.weighting), {opt.min_similarity});
  write_graph_csv(graph, tracker.track(opt.out).string());

  ordered_json params_json;
  params_json["nodes"] = opt.in.nodes;
  params_json["edges"] = opt.in.edges;
  params_json["trajectories"] = opt.in.trajectories;
  params_json["weighting"] = opt.weighting;
  params_json["min-similarity"] = opt.min_similarity;
  params_json["out"] = opt.out;
  write_json(tracker.track(opt.out + ".run.json"), run_record("graph", params_json));

  std::cout << "graph: " << graph.node_count() << " node(s), " << graph.edge_count()
            << " edge(s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustering of road-network-constrained trajectories"};
  app.require_subcommand(1);

  ClusterOptions cluster_opt;
  auto* cluster = app.add_subcommand("cluster", "similarity graph + recursive modularity hierarchy");
  add_dataset_options(cluster, cluster_opt.in);
  cluster->add_option("--weighting", cluster_opt.weighting, "similarity scheme")
      ->check(CLI::IsMember({"spatial", "classic", "jaccard"}))
      ->capture_default_str();
  cluster->add_option("--null-replicates", cluster_opt.null_replicates,
                      "null-model replicates per split")
      ->check(CLI::Range(2, 1000000))
      ->capture_default_str();
  cluster->add_option("--z", cluster_opt.z, "null-model z threshold")->capture_default_str();
  cluster->add_option("--min-size", cluster_opt.min_size, "don't split clusters smaller than this")
      ->capture_default_str();
  cluster->add_option("--seed", cluster_opt.seed, "master seed")->capture_default_str();
  cluster->add_option("--min-similarity", cluster_opt.min_similarity,
                      "prune graph edges with similarity <= this floor")
      ->capture_default_str();
  cluster->add_option("--out", cluster_opt.out, "output directory")->required();

  HacOptions hac_opt;
  auto* hac = app.add_subcommand("hac", "agglomerative baseline on distance = 1 - similarity");
  add_dataset_options(hac, hac_opt.in);
  hac->add_option("--weighting", hac_opt.weighting, "similarity scheme")
      ->check(CLI::IsMember({"spatial", "classic", "jaccard"}))
      ->capture_default_str();
  hac->add_option("--linkage", hac_opt.linkage, "linkage rule")
      ->check(CLI::IsMember({"single", "average", "complete"}))
      ->required();
  hac->add_option("--k", hac_opt.k, "number of clusters to cut")->required();
  hac->add_option("--cap", hac_opt.cap, "refuse datasets larger than this (O(n^2) memory)")
      ->capture_default_str();
  hac->add_option("--out", hac_opt.out, "output directory")->required();

  EvaluateOptions eval_opt;
  auto* evaluate = app.add_subcommand("evaluate", "overlap/inertia report for an assignment");
  add_dataset_options(evaluate, eval_opt.in);
  evaluate->add_option("--assignment", eval_opt.assignment, "assignment CSV (traj_id,cluster_id)")
      ->required();
  evaluate->add_option("--labels", eval_opt.labels, "planted labels CSV for ARI");
  evaluate->add_option("--out", eval_opt.out, "report CSV path (default: stdout)");

  GenerateOptions gen_opt;
  auto* generate = app.add_subcommand("generate", "seeded synthetic trajectory dataset");
  generate->add_option("--nodes", gen_opt.nodes, "nodes CSV")->required();
  generate->add_option("--edges", gen_opt.edges, "edges CSV")->required();
  generate->add_option("--n", gen_opt.n, "trajectory count")->required()->check(CLI::Range(1, 1000000000));
  generate->add_option("--corridors", gen_opt.corridors, "planted corridor count (0 = none)")
      ->capture_default_str();
  generate->add_option("--deviation", gen_opt.deviation, "per-node detour probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  generate->add_option("--seed", gen_opt.seed, "master seed")->capture_default_str();
  generate->add_option("--out", gen_opt.out, "output directory")->required();

  ExportOptions export_opt;
  auto* export_geojson =
      app.add_subcommand("export-geojson", "per-cluster GeoJSON with departures and arrivals");
  add_dataset_options(export_geojson, export_opt.in);
  export_geojson->add_option("--assignment", export_opt.assignment, "assignment CSV")->required();
  export_geojson->add_option("--out", export_opt.out, "output directory")->required();

  GraphOptions graph_opt;
  auto* graph = app.add_subcommand("graph", "similarity graph CSV dump");
  add_dataset_options(graph, graph_opt.in);
  graph->add_option("--weighting", graph_opt.weighting, "similarity scheme")
      ->check(CLI::IsMember({"spatial", "classic", "jaccard"}))
      ->capture_default_str();
  graph->add_option("--min-similarity", graph_opt.min_similarity,
                    "prune graph edges with similarity <= this floor")
      ->capture_default_str();
  graph->add_option("--out", graph_opt.out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  OutputTracker tracker;
  try {
    if (cluster->parsed()) return run_cluster(cluster_opt, tracker);
    if (hac->parsed()) return run_hac(hac_opt, tracker);
    if (evaluate->parsed()) return run_evaluate(eval_opt, tracker);
    if (generate->parsed()) return run_generate(gen_opt, tracker);
    if (export_geojson->parsed()) return run_export_geojson(export_opt, tracker);
    if (graph->parsed()) return run_graph(graph_opt, tracker);
  } catch (const std::exception& e) {
    tracker.discard();
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
