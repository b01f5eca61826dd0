#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hortimap/perception.hpp"
#include "hortimap/types.hpp"

namespace hortimap {

struct OctomapConfig {
  Scalar resolution = 0.05;
  Scalar max_range = 1.0;
  Scalar p_hit = 0.7;
  Scalar p_miss = 0.4;
  Scalar l_min = -2.0;
  Scalar l_max = 3.5;
  Scalar occ_threshold = 0.5;
  // Per-observed-label categorical likelihood: the observed class gets
  // label_hit, the others label_miss. The octree deliberately ignores the
  // extractor's confidence; only the splat loss weighs it.
  Scalar label_hit = 0.8;
  Scalar label_miss = 0.1;
  // Collision queries treat unknown voxels as free by default (camera motion).
  bool unknown_blocks = false;

  void validate() const;
};

struct VoxelKey {
  std::int32_t x = 0, y = 0, z = 0;
  bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    std::uint64_t h = static_cast<std::uint32_t>(k.x);
    h = h * 0x9e3779b97f4a7c15ULL + static_cast<std::uint32_t>(k.y);
    h = h * 0x9e3779b97f4a7c15ULL + static_cast<std::uint32_t>(k.z);
    h ^= h >> 29;
    return static_cast<std::size_t>(h);
  }
};

struct SemanticVoxel {
  Scalar log_odds = 0.0;
  ClassVec class_log_weights = ClassVec::Zero();
};

enum class VoxelState { kUnknown, kFree, kOccupied };

struct RayCastResult {
  std::vector<VoxelKey> traversed;   // in visiting order, includes the stop voxel
  std::optional<VoxelKey> hit;       // first occupied voxel, if any
};

/// Probabilistic semantic occupancy grid with octree-style integer keys.
/// Voxels are half-open boxes [k*res, (k+1)*res) per axis, so a point exactly
/// on a face belongs to the voxel on the upper side. A flat hash map backs the
/// leaves; at planning resolution no tree pruning is needed.
class SemanticOctomap {
 public:
  SemanticOctomap() = default;
  explicit SemanticOctomap(const OctomapConfig& cfg);

  const OctomapConfig& config() const { return cfg_; }
  std::size_t size() const { return voxels_.size(); }

  VoxelKey key_of(const Vec3& p) const;
  Vec3 center_of(const VoxelKey& k) const;

  /// Integrates one posed RGBD+label frame. Each pixel ray updates every
  /// traversed voxel with the miss log-odds and, when the depth is within
  /// max_range, the endpoint voxel with the hit log-odds plus the categorical
  /// label likelihood. Rays beyond max_range carve free space only.
  void insert_observation(const SemanticObservation& obs);

  /// Single-ray update, exposed for oracle tests. `hit` false means carve only.
  void insert_ray(const Vec3& origin, const Vec3& endpoint, SemanticClass label, bool hit);

  /// Exact voxel walk from origin along dir (need not be normalized), stopping
  /// at the first occupied voxel or at max_range. The stop voxel is included.
  RayCastResult ray_cast(const Vec3& origin, const Vec3& dir, Scalar max_range) const;

  VoxelState state(const VoxelKey& k) const;
  VoxelState state_at(const Vec3& p) const { return state(key_of(p)); }
  Scalar occupancy(const VoxelKey& k) const;  // probability, 0.5 when unknown
  ClassVec class_distribution(const VoxelKey& k) const;
  ClassVec class_distribution_at(const Vec3& p) const { return class_distribution(key_of(p)); }
  const SemanticVoxel* find(const VoxelKey& k) const;

  /// True iff no occupied voxel center lies within robot_radius of the
  /// segment a-b. With cfg.unknown_blocks, untouched voxels block as well.
  bool collision_free(const Vec3& a, const Vec3& b, Scalar robot_radius) const;

  /// Occupied voxels whose argmax class matches `cls`, centers sorted by key.
  PointCloud occupied_centers(SemanticClass cls) const;
  std::vector<std::pair<VoxelKey, SemanticVoxel>> sorted_voxels() const;

  void save(const std::string& path) const;
  static SemanticOctomap load(const std::string& path);
  void export_occupied_ply(const std::string& path) const;

 private:
  void apply_miss(const VoxelKey& k);
  void apply_hit(const VoxelKey& k, SemanticClass label);

  OctomapConfig cfg_;
  Scalar logit_hit_ = 0, logit_miss_ = 0, logit_occ_ = 0;
  std::unordered_map<VoxelKey, SemanticVoxel, VoxelKeyHash> voxels_;
};

inline Scalar logit(Scalar p) { return std::log(p / (1.0 - p)); }
inline Scalar sigmoid(Scalar x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace hortimap
