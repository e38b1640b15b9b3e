#pragma once

// Umbrella header: clustering of road-network-constrained trajectories via
// TF-IDF-weighted similarity graphs and recursive modularity optimization,
// with agglomerative baselines, evaluation metrics, and a synthetic dataset
// generator.

#include "trajclust/csv.hpp"
#include "trajclust/evaluation.hpp"
#include "trajclust/generator.hpp"
#include "trajclust/geojson.hpp"
#include "trajclust/hac.hpp"
#include "trajclust/hierarchy.hpp"
#include "trajclust/modularity.hpp"
#include "trajclust/random.hpp"
#include "trajclust/road_network.hpp"
#include "trajclust/similarity.hpp"
#include "trajclust/trajectory.hpp"
#include "trajclust/weighting.hpp"
