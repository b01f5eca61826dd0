#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hortimap/arm.hpp"
#include "hortimap/camera.hpp"
#include "hortimap/clustering.hpp"
#include "hortimap/octomap.hpp"
#include "hortimap/scene.hpp"

namespace hortimap {

struct SamplingConfig {
  Scalar sphere_radius = 0.4;
  int n_azimuth = 10;
  int n_elevation = 5;
  Scalar elevation_min = -0.9;  // radians from horizontal
  Scalar elevation_max = 0.9;
  Scalar row_plane_offset = 0.4;
  int grid_along_row = 4;
  int grid_vertical = 3;

  void validate() const;
};

struct PlannerConfig {
  int top_k = 20;
  int n_near = 4;
  int k_exec = 4;
  Scalar cost_weight = 0.05;  // beta, joint-space actuation cost per radian

  void validate() const;
};

enum class ViewpointKind : std::int32_t { kExploration = 0, kExploitation = 1 };
enum class ViewpointStatus : std::int32_t { kCandidate = 0, kFeasible = 1, kExecuted = 2 };

struct Viewpoint {
  int id = 0;
  Isometry world_T_cam = Isometry::Identity();  // camera-to-world, optical axis +z
  JointVec joints;                              // set once feasible
  Scalar gain = 0;
  Scalar normalized_gain = 0;
  ViewpointKind kind = ViewpointKind::kExploration;
  ViewpointStatus status = ViewpointStatus::kCandidate;

  Vec3 position() const { return world_T_cam.translation(); }
  Vec3 optical_axis() const { return world_T_cam.linear().col(2); }
};

/// N_phi x N_theta look-at poses on a sphere of cfg.sphere_radius around each
/// cluster centroid. Ids continue from first_id.
std::vector<Viewpoint> sample_exploitation(std::span<const Vec3> cluster_centroids,
                                           const SamplingConfig& cfg, int first_id = 0);

/// Grid of poses on the plane parallel to the row at row_plane_offset on the
/// given side (+1/-1 across the row axis), looking perpendicularly at the row,
/// spanning the row length and plant-height extent.
std::vector<Viewpoint> sample_exploration(const RowGeometry& row, const SamplingConfig& cfg,
                                          int side, int first_id = 0);

/// Slides vp along its optical axis (nearest offsets first, forward preferred
/// on ties) until a workspace pose lies within tol of the slid position; the
/// result keeps the slid pose and adopts that workspace pose's joints.
/// world_T_base maps arm base coordinates to world.
std::optional<Viewpoint> project_to_reachable(const Viewpoint& vp, const Workspace& workspace,
                                              const Isometry& world_T_base, Scalar max_slide,
                                              Scalar tol, Scalar slide_step = 0.02);

/// Unknown Voxel Count: distinct unknown voxels in the view frustum, along
/// subsampled pixel rays, truncated at the first occupied voxel and max_range.
int uvc_gain(const SemanticOctomap& map, const Viewpoint& vp, const CameraModel& cam,
             int pixel_stride = 4);

/// Entropy gain for exploitation: sum over distinct visible non-free voxels of
/// the class-distribution entropy, weighted by one plus the count of occupied
/// target-class voxels within proximity_radius.
Scalar osamcep_gain(const SemanticOctomap& map, const Viewpoint& vp, const CameraModel& cam,
                    Scalar proximity_radius, SemanticClass target = SemanticClass::kFruit,
                    int pixel_stride = 4);

/// Normalizes each subset by its own max gain (all zeros stay zero), merges,
/// and keeps the top_k by normalized gain with stable id tie-breaking.
std::vector<Viewpoint> normalize_and_select(std::vector<Viewpoint> exploit,
                                            std::vector<Viewpoint> explore, int top_k);

struct ViewGraph {
  std::vector<Viewpoint> nodes;
  std::vector<std::vector<int>> adj;  // symmetric closure of n-near lists
};

/// Connects each node to its n_near nearest neighbors in joint space.
ViewGraph build_graph(std::vector<Viewpoint> viewpoints, int n_near);

/// Best-first utility search from the current configuration: a virtual start
/// (utility 0) connects to its n_near nearest nodes; popping the max-utility
/// node expands it once, assigning each undiscovered neighbor
///   utility = predecessor utility + gain - beta * joint_distance.
/// The path backtracks from the global max-utility node; the first k_exec
/// nodes are returned.
std::vector<Viewpoint> best_first_plan(const ViewGraph& graph, const JointVec& start_joints,
                                       int k_exec, Scalar beta, int start_n_near = 4);

}  // namespace hortimap
