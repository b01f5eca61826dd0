#pragma once

#include <span>
#include <vector>

#include "hortimap/gaussian_map.hpp"
#include "hortimap/types.hpp"

namespace hortimap {

struct ClusterConfig {
  Scalar eps = 0.02;    // neighborhood radius
  int min_samples = 10;

  void validate() const;
};

struct Clustering {
  std::vector<std::vector<int>> clusters;  // point indices per cluster
  std::vector<int> noise;
};

/// Standard DBSCAN with a uniform-grid neighbor index, Euclidean metric.
/// Deterministic for a fixed input order; callers wanting order-independent
/// output sort points lexicographically first.
Clustering dbscan(std::span<const Vec3> points, const ClusterConfig& cfg);

struct FruitCluster {
  std::vector<int> point_indices;
  Vec3 centroid = Vec3::Zero();
  Scalar hull_volume = 0;
  bool degenerate_hull = false;
};

struct FruitReport {
  int count = 0;
  Scalar total_volume = 0;
  std::vector<FruitCluster> clusters;
};

/// Centers of splats whose argmax semantic equals target_class and whose
/// opacity is at least min_opacity.
PointCloud extract_target_points(std::span<const Gaussian3D> splats, SemanticClass target_class,
                                 Scalar min_opacity = 0.005);

FruitReport fruit_report_from_points(PointCloud points, const ClusterConfig& cfg);

/// extract -> canonical sort -> DBSCAN -> per-cluster convex hull volumes.
FruitReport fruit_report(std::span<const Gaussian3D> splats, const ClusterConfig& cfg,
                         SemanticClass target_class = SemanticClass::kFruit,
                         Scalar min_opacity = 0.005);

}  // namespace hortimap
