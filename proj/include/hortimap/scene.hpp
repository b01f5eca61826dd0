#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hortimap/camera.hpp"
#include "hortimap/types.hpp"

namespace hortimap {

struct SceneConfig {
  int n_rows = 1;
  int plants_per_row = 5;
  Scalar row_spacing = 1.2;          // meters between row axes
  Scalar plant_spacing = 0.28;       // meters between stems along a row
  std::pair<Scalar, Scalar> fruit_radius_range = {0.025, 0.04};
  std::pair<int, int> fruits_per_plant_range = {1, 3};
  std::pair<int, int> leaf_count_range = {3, 6};
  std::pair<Scalar, Scalar> plant_height_range = {0.30, 0.45};
  std::uint64_t rng_seed = 1;
  SemanticClass stem_class = SemanticClass::kLeaf;  // stems are not their own class

  void validate() const;
};

enum class ShapeKind : std::int32_t { kSphere = 0, kEllipsoid = 1, kCylinder = 2, kDisc = 3 };

/// One analytic solid. `size` meaning by shape:
///   sphere    (r, -, -)
///   ellipsoid (a, b, c) semi-axes
///   cylinder  (radius, half_length, -), axis = local z, lateral surface only
///   disc      (radius, -, -), plane z = 0 in the local frame
struct Primitive {
  ShapeKind shape = ShapeKind::kSphere;
  Isometry world_T_local = Isometry::Identity();
  Vec3 size = Vec3::Zero();
  SemanticClass cls = SemanticClass::kBackground;
  std::int32_t instance_id = -1;
};

struct RowGeometry {
  Vec3 origin = Vec3::Zero();  // start of the row axis on the ground plane
  Vec3 axis = Vec3::UnitX();   // unit vector along the row
  Scalar length = 0;
  Scalar height = 0;  // plant height extent above ground
};

struct Scene {
  SceneConfig config;
  std::vector<Primitive> primitives;
  std::vector<RowGeometry> rows;
  std::vector<std::int32_t> fruit_instance_ids;

  int plant_count() const { return config.n_rows * config.plants_per_row; }
};

/// Posed ground-truth RGBD + semantics frame. `cam_T_world` maps world points
/// into the camera frame. Missed rays carry the far-plane depth sentinel,
/// background label and instance -1.
struct GroundTruthFrame {
  CameraModel cam;
  Isometry cam_T_world = Isometry::Identity();
  ColorImage color;
  Image depth;
  LabelImage true_labels;
  LabelImage instance_ids;
};

struct FruitCloud {
  PointCloud points;
  std::vector<std::int32_t> instance;  // per point
  std::vector<Scalar> volumes;         // analytic volume per fruit instance
  int count = 0;

  Scalar total_volume() const;
};

Scene generate_scene(const SceneConfig& config);

GroundTruthFrame render_ground_truth(const Scene& scene, const Isometry& cam_T_world,
                                     const CameraModel& cam);

/// Samples the fruit surfaces at roughly `surface_density` points per m^2
/// (Fibonacci lattice per sphere, deterministic). Volumes are analytic.
FruitCloud ground_truth_fruit_cloud(const Scene& scene, Scalar surface_density);

Scalar primitive_volume(const Primitive& p);

// Ray / primitive intersection in world coordinates. The ray is
// origin + t * dir with unnormalized dir; returns smallest t in
// (t_min, t_max) or nullopt. Exposed for the render oracle tests.
std::optional<Scalar> intersect_primitive(const Primitive& prim, const Vec3& origin,
                                          const Vec3& dir, Scalar t_min, Scalar t_max);

std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);
void save_scene(const Scene& scene, const std::string& path);
Scene load_scene(const std::string& path);

}  // namespace hortimap
