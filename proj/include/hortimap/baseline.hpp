#pragma once

#include "hortimap/octomap.hpp"
#include "hortimap/types.hpp"

namespace hortimap {

/// Octomap-only baseline: same pipeline with the splat map removed and a
/// high-resolution semantic octree standing in for reconstruction output.
struct BaselineConfig {
  Scalar resolution = 0.01;  // 0.01 or 0.015 in the evaluation
  OctomapConfig octree;      // resolution field is overridden

  void validate() const;
};

/// Reconstruction cloud of the baseline: centers of occupied voxels whose
/// argmax class is fruit, sorted by key.
PointCloud baseline_fruit_cloud(const SemanticOctomap& map);

/// DBSCAN eps for voxel-center clouds scales with the quantization step.
Scalar baseline_cluster_eps(Scalar resolution);

}  // namespace hortimap
