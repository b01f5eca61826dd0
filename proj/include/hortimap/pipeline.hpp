#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hortimap/arm.hpp"
#include "hortimap/baseline.hpp"
#include "hortimap/clustering.hpp"
#include "hortimap/metrics.hpp"
#include "hortimap/octomap.hpp"
#include "hortimap/optimize.hpp"
#include "hortimap/perception.hpp"
#include "hortimap/planner.hpp"
#include "hortimap/scene.hpp"
#include "hortimap/timing.hpp"

namespace hortimap {

enum class Method : std::int32_t { kHybrid = 0, kOctomapFine = 1, kOctomapCoarse = 2 };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct AblationFlags {
  bool no_confidence = false;    // conf == 1 in the semantic loss term
  bool exploration_only = false; // drop exploitation sampling
  bool no_downsample = false;    // keep fraction 1.0 in densification
};

struct ExperimentConfig {
  SceneConfig scene;
  NoiseConfig noise;
  bool noise_enabled = false;
  Method method = Method::kHybrid;
  int waypoints_per_row = 4;  // per side; the robot runs both sides
  int max_viewpoints_per_waypoint = 10;
  PlannerConfig planner;
  SamplingConfig sampling;
  LossWeights loss;
  DensifyConfig densify;
  ClusterConfig cluster;
  EvalConfig eval;
  OptimConfig optim;
  OctomapConfig planning_octree;  // hybrid planning resolution
  Scalar baseline_fine_resolution = 0.01;
  Scalar baseline_coarse_resolution = 0.015;
  CameraModel camera;
  int arm_steps_per_joint = 5;
  Scalar reach_tolerance = 0.08;
  Scalar max_slide = 0.3;
  Scalar slide_step = 0.02;
  Scalar waypoint_standoff = 0.5;
  Scalar robot_radius = 0.04;
  Scalar proximity_radius = 0.1;
  int gain_stride = 4;
  Scalar prune_min_opacity = 0.005;
  Scalar prune_max_radius = 0.25;
  Scalar dedup_position_tol = 0.05;
  Scalar dedup_angle_tol = 0.2;
  AblationFlags ablation;
  std::string output_dir = "out";
  std::vector<std::uint64_t> seeds = {1};
  std::vector<int> rows;  // empty means every row in the scene

  void validate() const;
};

struct RunStats {
  int observations = 0;
  int successful_viewpoints = 0;
  int planning_rounds = 0;
  int skipped_collisions = 0;
  int skipped_waypoints = 0;
  int densified_total = 0;
  std::size_t peak_splats = 0;
  std::size_t final_splats = 0;
};

struct RowResult {
  MetricsReport metrics;
  RunStats stats;
  RuntimeBreakdown runtime;
  GaussianMap splat_map;     // empty for baseline methods
  SemanticOctomap octree;    // planning octree (hybrid) or mapping octree (baseline)
  FruitReport fruits;
  FruitCloud gt_fruits;
  PointCloud recon_cloud;    // row-filtered reconstruction used for the metrics
};

struct ResultRow {
  std::uint64_t seed = 0;
  std::string method;
  Scalar noise_p = 1.0;  // 1.0 when noise is disabled
  int row_id = 0;
  MetricsReport metrics;
  RunStats stats;
  RuntimeBreakdown runtime;
};

/// One crop-row mapping run: 4 waypoints per side, initial observation plus
/// planned viewpoints at each, maps updated online, final phenotyping metrics
/// against the row's ground-truth fruit cloud.
RowResult run_row(const Scene& scene, int row_id, const ExperimentConfig& cfg,
                  std::uint64_t seed);

/// Cross product of seeds x configured rows for one method/noise setting.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg,
                                      std::vector<RowResult>* keep_maps = nullptr);

/// Deterministic metrics serialization (no wall-clock content).
std::string results_to_json(const std::vector<ResultRow>& rows);
std::string results_to_csv(const std::vector<ResultRow>& rows);
std::string timing_to_json(const std::vector<ResultRow>& rows);

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);
std::string config_hash(const ExperimentConfig& cfg);

/// Writes metrics CSV/JSON, timing JSON, splat checkpoints and PLY clouds
/// into cfg.output_dir with filenames keyed by the config hash. Returns the
/// directory used.
std::string export_results(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows,
                           const std::vector<RowResult>& maps);

}  // namespace hortimap
