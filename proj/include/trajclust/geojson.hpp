#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trajclust/modularity.hpp"
#include "trajclust/trajectory.hpp"

namespace trajclust {

/// Feature collection for one cluster: every member trajectory as a
/// LineString over its node coordinate chain, plus a departure point and an
/// arrival point per trajectory (properties role=departure / role=arrival).
inline nlohmann::ordered_json cluster_feature_collection(
    const TrajectorySet& ts, const std::vector<std::int32_t>& member_indices,
    std::int32_t cluster_id) {
  const auto& net = ts.network();
  auto features = nlohmann::ordered_json::array();

  auto point_feature = [&](const Trajectory& t, const Point& pt, const char* role) {
    nlohmann::ordered_json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Point"}, {"coordinates", {pt.x, pt.y}}};
    f["properties"] = {{"traj_id", t.id}, {"cluster", cluster_id}, {"role", role}};
    return f;
  };

  for (auto idx : member_indices) {
    const auto& t = ts.trajectory(static_cast<std::size_t>(idx));
    auto coords = nlohmann::ordered_json::array();
    NodeIndex last_head = -1;
    for (const auto& v : t.visits) {
      const auto& e = net.edge(v.edge);
      if (e.from != last_head) {
        Point p = net.node_point(e.from);
        coords.push_back({p.x, p.y});
      }
      Point p = net.node_point(e.to);
      coords.push_back({p.x, p.y});
      last_head = e.to;
    }
    nlohmann::ordered_json line;
    line["type"] = "Feature";
    line["geometry"] = {{"type", "LineString"}, {"coordinates", std::move(coords)}};
    line["properties"] = {{"traj_id", t.id}, {"cluster", cluster_id}, {"role", "trajectory"}};
    features.push_back(std::move(line));
    features.push_back(point_feature(t, start_point(t, net), "departure"));
    features.push_back(point_feature(t, end_point(t, net), "arrival"));
  }

  nlohmann::ordered_json collection;
  collection["type"] = "FeatureCollection";
  collection["features"] = std::move(features);
  return collection;
}

/// Writes one `cluster_<id>.geojson` per cluster of the partition into
/// out_dir; returns the written paths.
inline std::vector<std::filesystem::path> export_cluster_geojson(
    const TrajectorySet& ts, const Partition& p, const std::filesystem::path& out_dir) {
  if (p.assignment.size() != ts.size()) throw std::invalid_argument("partition/dataset mismatch");
  std::vector<std::filesystem::path> written;
  auto clusters = p.clusters();
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    auto collection =
        cluster_feature_collection(ts, clusters[c], static_cast<std::int32_t>(c));
    auto path = out_dir / ("cluster_" + std::to_string(c) + ".geojson");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << collection.dump(2) << '\n';
    written.push_back(path);
  }
  return written;
}

}  // namespace trajclust
