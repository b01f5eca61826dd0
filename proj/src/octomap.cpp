#include "hortimap/octomap.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "hortimap/io.hpp"

namespace hortimap {

void OctomapConfig::validate() const {
  if (resolution <= 0) throw std::invalid_argument("octomap: resolution must be positive");
  if (max_range <= 0) throw std::invalid_argument("octomap: max_range must be positive");
  if (!(0.5 < p_hit && p_hit < 1.0)) throw std::invalid_argument("octomap: need 0.5 < p_hit < 1");
  if (!(0.0 < p_miss && p_miss < 0.5)) throw std::invalid_argument("octomap: need 0 < p_miss < 0.5");
  if (!(l_min < 0 && 0 < l_max)) throw std::invalid_argument("octomap: need l_min < 0 < l_max");
  if (!(0 < occ_threshold && occ_threshold < 1))
    throw std::invalid_argument("octomap: occ_threshold outside (0,1)");
  if (!(0 < label_miss && label_miss < label_hit && label_hit < 1))
    throw std::invalid_argument("octomap: need 0 < label_miss < label_hit < 1");
}

SemanticOctomap::SemanticOctomap(const OctomapConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  logit_hit_ = logit(cfg_.p_hit);
  logit_miss_ = logit(cfg_.p_miss);
  logit_occ_ = logit(cfg_.occ_threshold);
}

VoxelKey SemanticOctomap::key_of(const Vec3& p) const {
  const Scalar inv = 1.0 / cfg_.resolution;
  return {static_cast<std::int32_t>(std::floor(p.x() * inv)),
          static_cast<std::int32_t>(std::floor(p.y() * inv)),
          static_cast<std::int32_t>(std::floor(p.z() * inv))};
}

Vec3 SemanticOctomap::center_of(const VoxelKey& k) const {
  return {(k.x + 0.5) * cfg_.resolution, (k.y + 0.5) * cfg_.resolution,
          (k.z + 0.5) * cfg_.resolution};
}

namespace {

// Amanatides-Woo voxel walk. Visits the start voxel, then every voxel the ray
// enters up to ray length max_t (meters). A boundary crossing exactly at
// max_t still enters the next voxel, so an endpoint on a face belongs to the
// voxel the ray is entering. Callback returns false to stop early.
template <typename Visit>
void walk_voxels(const Vec3& origin, const Vec3& dir_raw, Scalar max_t, Scalar res, Visit&& visit) {
  const Scalar len = dir_raw.norm();
  if (len == 0) throw std::invalid_argument("ray walk: zero direction");
  const Vec3 dir = dir_raw / len;
  const Scalar inv_res = 1.0 / res;

  std::int32_t key[3];
  for (int i = 0; i < 3; ++i) key[i] = static_cast<std::int32_t>(std::floor(origin[i] * inv_res));

  int step[3];
  Scalar t_max[3], t_delta[3];
  constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();
  for (int i = 0; i < 3; ++i) {
    if (dir[i] > 0) {
      step[i] = 1;
      t_delta[i] = res / dir[i];
      t_max[i] = ((key[i] + 1) * res - origin[i]) / dir[i];
    } else if (dir[i] < 0) {
      step[i] = -1;
      t_delta[i] = -res / dir[i];
      t_max[i] = (key[i] * res - origin[i]) / dir[i];
    } else {
      step[i] = 0;
      t_delta[i] = kInf;
      t_max[i] = kInf;
    }
  }

  if (!visit(VoxelKey{key[0], key[1], key[2]})) return;
  while (true) {
    int a = 0;
    if (t_max[1] < t_max[a]) a = 1;
    if (t_max[2] < t_max[a]) a = 2;
    const Scalar t_cross = t_max[a];
    if (t_cross > max_t) break;
    key[a] += step[a];
    t_max[a] += t_delta[a];
    if (!visit(VoxelKey{key[0], key[1], key[2]})) return;
    if (t_cross >= max_t) break;
  }
}

}  // namespace

void SemanticOctomap::apply_miss(const VoxelKey& k) {
  SemanticVoxel& v = voxels_[k];
  v.log_odds = std::clamp(v.log_odds + logit_miss_, cfg_.l_min, cfg_.l_max);
}

void SemanticOctomap::apply_hit(const VoxelKey& k, SemanticClass label) {
  SemanticVoxel& v = voxels_[k];
  v.log_odds = std::clamp(v.log_odds + logit_hit_, cfg_.l_min, cfg_.l_max);
  const int li = static_cast<int>(label);
  for (int c = 0; c < kNumClasses; ++c)
    v.class_log_weights[c] += std::log(c == li ? cfg_.label_hit : cfg_.label_miss);
}

void SemanticOctomap::insert_ray(const Vec3& origin, const Vec3& endpoint, SemanticClass label,
                                 bool hit) {
  const Vec3 d = endpoint - origin;
  const Scalar len = d.norm();
  if (len == 0) {
    if (hit) apply_hit(key_of(origin), label);
    return;
  }
  std::vector<VoxelKey> keys;
  walk_voxels(origin, d, len, cfg_.resolution, [&](const VoxelKey& k) {
    keys.push_back(k);
    return true;
  });
  const std::size_t n_free = hit ? keys.size() - 1 : keys.size();
  for (std::size_t i = 0; i < n_free; ++i) apply_miss(keys[i]);
  if (hit) apply_hit(keys.back(), label);
}

void SemanticOctomap::insert_observation(const SemanticObservation& obs) {
  const Isometry world_T_cam = obs.cam_T_world.inverse();
  const Vec3 origin = world_T_cam.translation();

  for (int v = 0; v < obs.cam.height; ++v) {
    for (int u = 0; u < obs.cam.width; ++u) {
      const Scalar d = obs.depth(v, u);
      if (d <= 0) continue;
      const bool hit = depth_valid(obs.cam, d) && d <= cfg_.max_range;
      const Scalar z_end = hit ? d : cfg_.max_range;
      const Vec3 endpoint = world_T_cam * backproject(obs.cam, u, v, z_end);
      insert_ray(origin, endpoint, static_cast<SemanticClass>(obs.labels(v, u)), hit);
    }
  }
}

RayCastResult SemanticOctomap::ray_cast(const Vec3& origin, const Vec3& dir,
                                        Scalar max_range) const {
  if (dir.squaredNorm() == 0) throw std::invalid_argument("ray_cast: zero direction");
  RayCastResult result;
  walk_voxels(origin, dir, max_range, cfg_.resolution, [&](const VoxelKey& k) {
    result.traversed.push_back(k);
    if (state(k) == VoxelState::kOccupied) {
      result.hit = k;
      return false;
    }
    return true;
  });
  return result;
}

VoxelState SemanticOctomap::state(const VoxelKey& k) const {
  const auto it = voxels_.find(k);
  if (it == voxels_.end()) return VoxelState::kUnknown;
  return it->second.log_odds >= logit_occ_ ? VoxelState::kOccupied : VoxelState::kFree;
}

Scalar SemanticOctomap::occupancy(const VoxelKey& k) const {
  const auto it = voxels_.find(k);
  return it == voxels_.end() ? 0.5 : sigmoid(it->second.log_odds);
}

ClassVec SemanticOctomap::class_distribution(const VoxelKey& k) const {
  const auto it = voxels_.find(k);
  if (it == voxels_.end()) return ClassVec::Constant(1.0 / kNumClasses);
  const ClassVec& w = it->second.class_log_weights;
  const Scalar m = w.maxCoeff();
  ClassVec e = (w.array() - m).exp();
  return e / e.sum();
}

const SemanticVoxel* SemanticOctomap::find(const VoxelKey& k) const {
  const auto it = voxels_.find(k);
  return it == voxels_.end() ? nullptr : &it->second;
}

namespace {

Scalar point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  if (len2 == 0) return (p - a).norm();
  const Scalar t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace

bool SemanticOctomap::collision_free(const Vec3& a, const Vec3& b, Scalar robot_radius) const {
  if (cfg_.unknown_blocks) {
    // Enumerate candidate keys in the inflated segment AABB; absent voxels count.
    const Vec3 lo = a.cwiseMin(b).array() - robot_radius;
    const Vec3 hi = a.cwiseMax(b).array() + robot_radius;
    const VoxelKey klo = key_of(lo), khi = key_of(hi);
    for (std::int32_t x = klo.x; x <= khi.x; ++x)
      for (std::int32_t y = klo.y; y <= khi.y; ++y)
        for (std::int32_t z = klo.z; z <= khi.z; ++z) {
          const VoxelKey k{x, y, z};
          const VoxelState s = state(k);
          if (s == VoxelState::kFree) continue;
          if (point_segment_distance(center_of(k), a, b) <= robot_radius) return false;
        }
    return true;
  }
  for (const auto& [k, v] : voxels_) {
    if (v.log_odds < logit_occ_) continue;
    if (point_segment_distance(center_of(k), a, b) <= robot_radius) return false;
  }
  return true;
}

std::vector<std::pair<VoxelKey, SemanticVoxel>> SemanticOctomap::sorted_voxels() const {
  std::vector<std::pair<VoxelKey, SemanticVoxel>> out(voxels_.begin(), voxels_.end());
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    return std::tie(l.first.x, l.first.y, l.first.z) < std::tie(r.first.x, r.first.y, r.first.z);
  });
  return out;
}

PointCloud SemanticOctomap::occupied_centers(SemanticClass cls) const {
  PointCloud out;
  for (const auto& [k, v] : sorted_voxels()) {
    if (v.log_odds < logit_occ_) continue;
    int arg = 0;
    v.class_log_weights.maxCoeff(&arg);
    if (arg == static_cast<int>(cls)) out.push_back(center_of(k));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Binary dump: magic, version, config scalars, count, then fixed records.

namespace {
constexpr char kMagic[4] = {'S', 'O', 'C', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("octomap load: truncated file");
  return v;
}
}  // namespace

void SemanticOctomap::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("octomap save: cannot open " + path);
  out.write(kMagic, 4);
  put(out, kVersion);
  put(out, cfg_.resolution);
  put(out, cfg_.max_range);
  put(out, cfg_.p_hit);
  put(out, cfg_.p_miss);
  put(out, cfg_.l_min);
  put(out, cfg_.l_max);
  put(out, cfg_.occ_threshold);
  put(out, cfg_.label_hit);
  put(out, cfg_.label_miss);
  const auto sorted = sorted_voxels();
  put(out, static_cast<std::uint64_t>(sorted.size()));
  for (const auto& [k, v] : sorted) {
    put(out, k.x);
    put(out, k.y);
    put(out, k.z);
    put(out, v.log_odds);
    for (int c = 0; c < kNumClasses; ++c) put(out, v.class_log_weights[c]);
  }
}

SemanticOctomap SemanticOctomap::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("octomap load: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("octomap load: bad magic");
  if (get<std::uint32_t>(in) != kVersion) throw std::runtime_error("octomap load: bad version");

  OctomapConfig cfg;
  cfg.resolution = get<Scalar>(in);
  cfg.max_range = get<Scalar>(in);
  cfg.p_hit = get<Scalar>(in);
  cfg.p_miss = get<Scalar>(in);
  cfg.l_min = get<Scalar>(in);
  cfg.l_max = get<Scalar>(in);
  cfg.occ_threshold = get<Scalar>(in);
  cfg.label_hit = get<Scalar>(in);
  cfg.label_miss = get<Scalar>(in);

  SemanticOctomap map(cfg);
  const auto n = get<std::uint64_t>(in);
  map.voxels_.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    VoxelKey k;
    k.x = get<std::int32_t>(in);
    k.y = get<std::int32_t>(in);
    k.z = get<std::int32_t>(in);
    SemanticVoxel v;
    v.log_odds = get<Scalar>(in);
    for (int c = 0; c < kNumClasses; ++c) v.class_log_weights[c] = get<Scalar>(in);
    map.voxels_.emplace(k, v);
  }
  return map;
}

void SemanticOctomap::export_occupied_ply(const std::string& path) const {
  PlyCloud cloud;
  for (const auto& [k, v] : sorted_voxels()) {
    if (v.log_odds < logit_occ_) continue;
    int arg = 0;
    v.class_log_weights.maxCoeff(&arg);
    cloud.points.push_back(center_of(k));
    cloud.cls.push_back(arg);
    const Vec3 c = class_color(static_cast<SemanticClass>(arg)) * 255.0;
    cloud.rgb.push_back({static_cast<std::uint8_t>(c.x()), static_cast<std::uint8_t>(c.y()),
                         static_cast<std::uint8_t>(c.z())});
  }
  write_ply(path, cloud);
}

}  // namespace hortimap
