#include "hortimap/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace hortimap {

void SamplingConfig::validate() const {
  if (sphere_radius <= 0) throw std::invalid_argument("sampling: sphere_radius must be positive");
  if (n_azimuth < 1 || n_elevation < 1 || grid_along_row < 1 || grid_vertical < 1)
    throw std::invalid_argument("sampling: counts must be >= 1");
}

void PlannerConfig::validate() const {
  if (top_k < 1 || n_near < 1 || k_exec < 1)
    throw std::invalid_argument("planner: counts must be >= 1");
  if (k_exec > top_k) throw std::invalid_argument("planner: k_exec must be <= top_k");
  if (cost_weight < 0) throw std::invalid_argument("planner: cost_weight must be >= 0");
}

std::vector<Viewpoint> sample_exploitation(std::span<const Vec3> cluster_centroids,
                                           const SamplingConfig& cfg, int first_id) {
  cfg.validate();
  std::vector<Viewpoint> out;
  int id = first_id;
  for (const Vec3& c : cluster_centroids) {
    for (int e = 0; e < cfg.n_elevation; ++e) {
      // Midpoint elevations keep samples off the poles.
      const Scalar theta = cfg.elevation_min + (cfg.elevation_max - cfg.elevation_min) *
                                                   (e + 0.5) / cfg.n_elevation;
      for (int a = 0; a < cfg.n_azimuth; ++a) {
        const Scalar phi = 2.0 * std::numbers::pi * a / cfg.n_azimuth;
        const Vec3 pos = c + cfg.sphere_radius * Vec3(std::cos(theta) * std::cos(phi),
                                                      std::cos(theta) * std::sin(phi),
                                                      std::sin(theta));
        Viewpoint vp;
        vp.id = id++;
        vp.world_T_cam = look_at(pos, c);
        vp.kind = ViewpointKind::kExploitation;
        out.push_back(vp);
      }
    }
  }
  return out;
}

std::vector<Viewpoint> sample_exploration(const RowGeometry& row, const SamplingConfig& cfg,
                                          int side, int first_id) {
  cfg.validate();
  if (side != 1 && side != -1) throw std::invalid_argument("sample_exploration: side must be +-1");

  const Vec3 axis = row.axis.normalized();
  const Vec3 perp = Vec3::UnitZ().cross(axis).normalized();

  std::vector<Viewpoint> out;
  int id = first_id;
  for (int i = 0; i < cfg.grid_along_row; ++i) {
    const Scalar s = row.length * (i + 0.5) / cfg.grid_along_row;
    for (int j = 0; j < cfg.grid_vertical; ++j) {
      const Scalar z = row.height * (j + 0.5) / cfg.grid_vertical;
      const Vec3 on_row = row.origin + s * axis + Vec3(0, 0, z);
      const Vec3 pos = on_row + side * cfg.row_plane_offset * perp;
      Viewpoint vp;
      vp.id = id++;
      vp.world_T_cam = look_at(pos, on_row);  // optical axis perpendicular to the row
      vp.kind = ViewpointKind::kExploration;
      out.push_back(vp);
    }
  }
  return out;
}

std::optional<Viewpoint> project_to_reachable(const Viewpoint& vp, const Workspace& workspace,
                                              const Isometry& world_T_base, Scalar max_slide,
                                              Scalar tol, Scalar slide_step) {
  const Isometry base_T_world = world_T_base.inverse();
  const Vec3 axis = vp.optical_axis();

  // Offsets ordered by magnitude, forward (+z, toward the view target) first.
  const int n_steps = static_cast<int>(std::floor(max_slide / slide_step));
  for (int k = 0; k <= n_steps; ++k) {
    for (const int sign : {1, -1}) {
      if (k == 0 && sign < 0) continue;
      const Scalar offset = sign * k * slide_step;
      const Vec3 pos = vp.position() + offset * axis;
      const auto nn = workspace.nearest(base_T_world * pos);
      if (nn && nn->second <= tol) {
        Viewpoint result = vp;
        result.world_T_cam.translation() = pos;
        result.joints = workspace.joints(nn->first);
        result.status = ViewpointStatus::kFeasible;
        return result;
      }
    }
  }
  return std::nullopt;
}

namespace {

// Distinct voxels seen through the subsampled pixel bundle, each ray truncated
// at the first occupied voxel (inclusive) and the map's max range.
std::unordered_set<VoxelKey, VoxelKeyHash> visible_voxels(const SemanticOctomap& map,
                                                          const Viewpoint& vp,
                                                          const CameraModel& cam,
                                                          int pixel_stride) {
  if (pixel_stride < 1) throw std::invalid_argument("gain: pixel_stride must be >= 1");
  const Vec3 origin = vp.position();
  const Mat3 rot = vp.world_T_cam.linear();

  std::unordered_set<VoxelKey, VoxelKeyHash> seen;
  for (int v = 0; v < cam.height; v += pixel_stride) {
    for (int u = 0; u < cam.width; u += pixel_stride) {
      const Vec3 dir = rot * pixel_ray(cam, u, v);
      const RayCastResult rc = map.ray_cast(origin, dir, map.config().max_range);
      seen.insert(rc.traversed.begin(), rc.traversed.end());
    }
  }
  return seen;
}

}  // namespace

int uvc_gain(const SemanticOctomap& map, const Viewpoint& vp, const CameraModel& cam,
             int pixel_stride) {
  int count = 0;
  for (const VoxelKey& k : visible_voxels(map, vp, cam, pixel_stride))
    if (map.state(k) == VoxelState::kUnknown) ++count;
  return count;
}

Scalar osamcep_gain(const SemanticOctomap& map, const Viewpoint& vp, const CameraModel& cam,
                    Scalar proximity_radius, SemanticClass target, int pixel_stride) {
  if (proximity_radius <= 0)
    throw std::invalid_argument("osamcep_gain: proximity_radius must be positive");

  // Occupied target voxels indexed on a grid of the proximity radius.
  struct CellHash {
    std::size_t operator()(const VoxelKey& k) const { return VoxelKeyHash{}(k); }
  };
  const PointCloud targets = map.occupied_centers(target);
  std::unordered_map<VoxelKey, std::vector<std::uint32_t>, CellHash> target_grid;
  auto cell_of = [&](const Vec3& p) {
    return VoxelKey{static_cast<std::int32_t>(std::floor(p.x() / proximity_radius)),
                    static_cast<std::int32_t>(std::floor(p.y() / proximity_radius)),
                    static_cast<std::int32_t>(std::floor(p.z() / proximity_radius))};
  };
  for (std::size_t i = 0; i < targets.size(); ++i)
    target_grid[cell_of(targets[i])].push_back(static_cast<std::uint32_t>(i));

  auto proximity_count = [&](const Vec3& p) {
    int count = 0;
    const VoxelKey c = cell_of(p);
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          const auto it = target_grid.find({c.x + dx, c.y + dy, c.z + dz});
          if (it == target_grid.end()) continue;
          for (std::uint32_t i : it->second)
            if ((targets[i] - p).norm() <= proximity_radius) ++count;
        }
    return count;
  };

  Scalar gain = 0;
  for (const VoxelKey& k : visible_voxels(map, vp, cam, pixel_stride)) {
    if (map.state(k) == VoxelState::kFree) continue;
    const ClassVec dist = map.class_distribution(k);
    Scalar entropy = 0;
    for (int c = 0; c < kNumClasses; ++c)
      if (dist[c] > 0) entropy -= dist[c] * std::log(dist[c]);
    if (entropy == 0) continue;
    gain += entropy * (1.0 + proximity_count(map.center_of(k)));
  }
  return gain;
}

std::vector<Viewpoint> normalize_and_select(std::vector<Viewpoint> exploit,
                                            std::vector<Viewpoint> explore, int top_k) {
  auto normalize = [](std::vector<Viewpoint>& vps) {
    Scalar best = 0;
    for (const Viewpoint& v : vps) best = std::max(best, v.gain);
    for (Viewpoint& v : vps) v.normalized_gain = best > 0 ? v.gain / best : 0.0;
  };
  normalize(exploit);
  normalize(explore);

  std::vector<Viewpoint> merged = std::move(exploit);
  merged.insert(merged.end(), explore.begin(), explore.end());
  std::sort(merged.begin(), merged.end(), [](const Viewpoint& a, const Viewpoint& b) {
    if (a.normalized_gain != b.normalized_gain) return a.normalized_gain > b.normalized_gain;
    return a.id < b.id;
  });
  if (static_cast<int>(merged.size()) > top_k) merged.resize(top_k);
  return merged;
}

namespace {

Scalar joint_distance(const JointVec& a, const JointVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("joint_distance: size mismatch");
  return (a - b).norm();
}

}  // namespace

ViewGraph build_graph(std::vector<Viewpoint> viewpoints, int n_near) {
  for (const Viewpoint& v : viewpoints)
    if (v.joints.size() == 0)
      throw std::invalid_argument("build_graph: all viewpoints must carry joints");

  ViewGraph g;
  g.nodes = std::move(viewpoints);
  const int n = static_cast<int>(g.nodes.size());
  g.adj.assign(n, {});

  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<Scalar, int>> dist;
    for (int j = 0; j < n; ++j)
      if (j != i) dist.emplace_back(joint_distance(g.nodes[i].joints, g.nodes[j].joints), j);
    std::sort(dist.begin(), dist.end());
    const int take = std::min<int>(n_near, static_cast<int>(dist.size()));
    for (int k = 0; k < take; ++k) {
      const int j = dist[k].second;
      if (std::find(g.adj[i].begin(), g.adj[i].end(), j) == g.adj[i].end()) g.adj[i].push_back(j);
      if (std::find(g.adj[j].begin(), g.adj[j].end(), i) == g.adj[j].end()) g.adj[j].push_back(i);
    }
  }
  for (auto& neighbors : g.adj) std::sort(neighbors.begin(), neighbors.end());
  return g;
}

std::vector<Viewpoint> best_first_plan(const ViewGraph& graph, const JointVec& start_joints,
                                       int k_exec, Scalar beta, int start_n_near) {
  const int n = static_cast<int>(graph.nodes.size());
  if (n == 0 || k_exec <= 0) return {};

  constexpr Scalar kUnset = -std::numeric_limits<Scalar>::infinity();
  std::vector<Scalar> utility(n, kUnset);
  std::vector<int> parent(n, -2);
  std::vector<bool> expanded(n, false);

  struct Entry {
    Scalar utility;
    int node;
  };
  auto cmp = [](const Entry& a, const Entry& b) {
    if (a.utility != b.utility) return a.utility < b.utility;
    return a.node > b.node;  // lower id wins ties
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> queue(cmp);

  // Virtual start at the current configuration, utility 0, linked to its
  // nearest nodes in joint space.
  {
    std::vector<std::pair<Scalar, int>> dist;
    for (int i = 0; i < n; ++i)
      dist.emplace_back(joint_distance(start_joints, graph.nodes[i].joints), i);
    std::sort(dist.begin(), dist.end());
    const int take = std::min<int>(start_n_near, n);
    for (int k = 0; k < take; ++k) {
      const auto& [d, i] = dist[k];
      utility[i] = graph.nodes[i].normalized_gain - beta * d;
      parent[i] = -1;
      queue.push({utility[i], i});
    }
  }

  int best_node = -1;
  while (!queue.empty()) {
    const Entry e = queue.top();
    queue.pop();
    if (expanded[e.node]) continue;
    expanded[e.node] = true;
    if (best_node < 0 || utility[e.node] > utility[best_node] ||
        (utility[e.node] == utility[best_node] && e.node < best_node))
      best_node = e.node;

    for (int j : graph.adj[e.node]) {
      if (utility[j] != kUnset) continue;  // discovered once, utility set once
      utility[j] = utility[e.node] + graph.nodes[j].normalized_gain -
                   beta * joint_distance(graph.nodes[e.node].joints, graph.nodes[j].joints);
      parent[j] = e.node;
      queue.push({utility[j], j});
    }
  }
  if (best_node < 0) return {};

  std::vector<Viewpoint> path;
  for (int i = best_node; i != -1; i = parent[i]) path.push_back(graph.nodes[i]);
  std::reverse(path.begin(), path.end());
  if (static_cast<int>(path.size()) > k_exec) path.resize(k_exec);
  return path;
}

}  // namespace hortimap
