#include "hortimap/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "hortimap/convex_hull.hpp"
#include "hortimap/io.hpp"
#include "json.hpp"

namespace hortimap {

const char* method_name(Method m) {
  switch (m) {
    case Method::kHybrid: return "hybrid";
    case Method::kOctomapFine: return "octomap-0.01";
    case Method::kOctomapCoarse: return "octomap-0.015";
  }
  return "invalid";
}

Method method_from_name(const std::string& name) {
  if (name == "hybrid") return Method::kHybrid;
  if (name == "octomap-0.01") return Method::kOctomapFine;
  if (name == "octomap-0.015") return Method::kOctomapCoarse;
  throw std::invalid_argument("unknown method: " + name);
}

void ExperimentConfig::validate() const {
  scene.validate();
  noise.validate();
  planner.validate();
  sampling.validate();
  cluster.validate();
  eval.validate();
  planning_octree.validate();
  camera.validate();
  if (waypoints_per_row < 1) throw std::invalid_argument("config: waypoints_per_row must be >= 1");
  if (max_viewpoints_per_waypoint < 0)
    throw std::invalid_argument("config: max_viewpoints_per_waypoint must be >= 0");
  if (baseline_fine_resolution <= 0 || baseline_coarse_resolution <= 0)
    throw std::invalid_argument("config: baseline resolutions must be positive");
  if (seeds.empty()) throw std::invalid_argument("config: need at least one seed");
}

namespace {

std::uint64_t pose_hash(const Isometry& pose) {
  std::uint64_t h = 0x7c9e1a5b;
  auto mix = [&h](Scalar v) { h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v)); };
  for (int i = 0; i < 3; ++i) mix(pose.translation()[i]);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) mix(pose.linear()(r, c));
  return h;
}

struct WaypointPose {
  Isometry world_T_cam = Isometry::Identity();
  Isometry world_T_base = Isometry::Identity();
  int side = -1;  // sign along UnitZ x row.axis
};

// Fixed fractions along each side, left side first, right side on the way
// back. The camera looks straight across the row at mid-canopy height.
std::vector<WaypointPose> make_waypoints(const RowGeometry& row, const ExperimentConfig& cfg) {
  const Vec3 axis = row.axis.normalized();
  const Vec3 perp = Vec3::UnitZ().cross(axis).normalized();
  const Scalar z_cam = 0.55 * row.height;

  std::vector<Scalar> fractions(cfg.waypoints_per_row);
  for (int i = 0; i < cfg.waypoints_per_row; ++i)
    fractions[i] = (i + 0.5) / cfg.waypoints_per_row;

  std::vector<WaypointPose> out;
  for (const int side : {-1, 1}) {
    std::vector<Scalar> order = fractions;
    if (side == 1) std::reverse(order.begin(), order.end());
    for (const Scalar f : order) {
      const Vec3 on_row = row.origin + f * row.length * axis + Vec3(0, 0, z_cam);
      const Vec3 eye = on_row + side * cfg.waypoint_standoff * perp;

      WaypointPose wp;
      wp.side = side;
      wp.world_T_cam = look_at(eye, on_row);
      Isometry base = Isometry::Identity();
      base.translation() = Vec3(eye.x(), eye.y(), 0.0);
      // Base x axis faces the row so the arm works in front of itself.
      const Vec3 face = (-side) * perp;
      base.linear() = Eigen::AngleAxis<Scalar>(std::atan2(face.y(), face.x()), Vec3::UnitZ())
                          .toRotationMatrix();
      wp.world_T_base = base;
      out.push_back(wp);
    }
  }
  return out;
}

bool near_pose(const Viewpoint& vp, const std::vector<Viewpoint>& executed, Scalar pos_tol,
               Scalar ang_tol) {
  for (const Viewpoint& e : executed) {
    if ((e.position() - vp.position()).norm() >= pos_tol) continue;
    const Mat3 rel = e.world_T_cam.linear().transpose() * vp.world_T_cam.linear();
    if (std::abs(Eigen::AngleAxis<Scalar>(rel).angle()) < ang_tol) return true;
  }
  return false;
}

Scalar lateral_distance(const Vec3& p, const RowGeometry& row) {
  const Vec3 perp = Vec3::UnitZ().cross(row.axis.normalized()).normalized();
  return std::abs((p - row.origin).dot(perp));
}

}  // namespace

RowResult run_row(const Scene& scene, int row_id, const ExperimentConfig& cfg,
                  std::uint64_t seed) {
  cfg.validate();
  if (row_id < 0 || row_id >= static_cast<int>(scene.rows.size()))
    throw std::invalid_argument("run_row: row_id out of range");
  const RowGeometry& row = scene.rows[row_id];
  const bool hybrid = cfg.method == Method::kHybrid;

  OctomapConfig octo_cfg = cfg.planning_octree;
  if (cfg.method == Method::kOctomapFine) octo_cfg.resolution = cfg.baseline_fine_resolution;
  if (cfg.method == Method::kOctomapCoarse) octo_cfg.resolution = cfg.baseline_coarse_resolution;

  ClusterConfig cluster_cfg = cfg.cluster;
  if (!hybrid) cluster_cfg.eps = baseline_cluster_eps(octo_cfg.resolution);

  DensifyConfig densify_cfg = cfg.densify;
  if (cfg.ablation.no_downsample) densify_cfg.nontarget_keep_fraction = 1.0;

  RowResult result;
  result.octree = SemanticOctomap(octo_cfg);
  RunStats& stats = result.stats;

  ArmModel arm = ArmModel::default_arm();
  arm.steps_per_joint = cfg.arm_steps_per_joint;
  const Workspace workspace = reachable_workspace(arm);

  TimingLog log;

  auto observe_at = [&](const Isometry& world_T_cam) {
    const GroundTruthFrame frame =
        render_ground_truth(scene, world_T_cam.inverse(), cfg.camera);
    NoiseConfig noise = cfg.noise;
    if (!cfg.noise_enabled) noise.p_correct = 1.0;
    noise.rng_seed = derive_seed(seed, static_cast<std::uint64_t>(row_id), pose_hash(world_T_cam));
    SemanticObservation obs = corrupt_labels(frame, noise);
    if (cfg.ablation.no_confidence) obs.confidence.setOnes();
    ++stats.observations;
    return obs;
  };

  auto integrate = [&](const SemanticObservation& obs) {
    {
      ScopedPhase t(log, Phase::kOctomapMapping);
      result.octree.insert_observation(obs);
    }
    if (hybrid) {
      ScopedPhase t(log, Phase::kGsMapping);
      Rng densify_rng(derive_seed(seed, 0xD5F1ull, pose_hash(obs.cam_T_world)));
      stats.densified_total += densify(result.splat_map, obs, densify_cfg, densify_rng);
      optimize(result.splat_map, obs, cfg.loss, cfg.optim);
      prune(result.splat_map, cfg.prune_min_opacity, cfg.prune_max_radius);
      stats.peak_splats = std::max(stats.peak_splats, result.splat_map.splats.size());
    }
  };

  const auto waypoints = make_waypoints(row, cfg);
  Isometry current_cam = waypoints.front().world_T_cam;
  std::vector<Viewpoint> executed;

  auto plan_round = [&](const WaypointPose& wp, int budget) -> std::vector<Viewpoint> {
    std::vector<Vec3> centroids;
    if (!cfg.ablation.exploration_only) {
      const FruitReport rep =
          hybrid ? fruit_report(result.splat_map.splats, cluster_cfg, densify_cfg.target,
                                cfg.prune_min_opacity)
                 : fruit_report_from_points(baseline_fruit_cloud(result.octree), cluster_cfg);
      for (const FruitCluster& c : rep.clusters) centroids.push_back(c.centroid);
    }

    std::vector<Viewpoint> exploit = sample_exploitation(centroids, cfg.sampling, 0);
    std::vector<Viewpoint> explore =
        sample_exploration(row, cfg.sampling, wp.side, static_cast<int>(exploit.size()));

    auto make_feasible = [&](std::vector<Viewpoint>& candidates) {
      std::vector<Viewpoint> feasible;
      for (const Viewpoint& vp : candidates) {
        auto f = project_to_reachable(vp, workspace, wp.world_T_base, cfg.max_slide,
                                      cfg.reach_tolerance, cfg.slide_step);
        if (!f) continue;
        if (near_pose(*f, executed, cfg.dedup_position_tol, cfg.dedup_angle_tol)) continue;
        feasible.push_back(std::move(*f));
      }
      return feasible;
    };
    std::vector<Viewpoint> f_exploit = make_feasible(exploit);
    std::vector<Viewpoint> f_explore = make_feasible(explore);

    for (Viewpoint& vp : f_exploit)
      vp.gain = osamcep_gain(result.octree, vp, cfg.camera, cfg.proximity_radius,
                             densify_cfg.target, cfg.gain_stride);
    for (Viewpoint& vp : f_explore)
      vp.gain = static_cast<Scalar>(uvc_gain(result.octree, vp, cfg.camera, cfg.gain_stride));

    std::vector<Viewpoint> selected =
        normalize_and_select(std::move(f_exploit), std::move(f_explore), cfg.planner.top_k);
    if (selected.empty()) return {};

    const ViewGraph graph = build_graph(std::move(selected), cfg.planner.n_near);
    const auto nn = workspace.nearest(wp.world_T_base.inverse() * current_cam.translation());
    const JointVec start_joints = workspace.joints(nn->first);
    return best_first_plan(graph, start_joints, budget, cfg.planner.cost_weight,
                           cfg.planner.n_near);
  };

  for (const WaypointPose& wp : waypoints) {
    bool reachable = true;
    {
      ScopedPhase t(log, Phase::kExecution);
      reachable = result.octree.collision_free(current_cam.translation(),
                                               wp.world_T_cam.translation(), cfg.robot_radius);
    }
    if (!reachable) {
      ++stats.skipped_waypoints;
      continue;
    }
    current_cam = wp.world_T_cam;
    integrate(observe_at(current_cam));

    int successes = 0;
    const int rounds_cap =
        (cfg.max_viewpoints_per_waypoint + cfg.planner.k_exec - 1) / cfg.planner.k_exec;
    for (int round = 0; round < rounds_cap && successes < cfg.max_viewpoints_per_waypoint;
         ++round) {
      const int budget = std::min(cfg.planner.k_exec, cfg.max_viewpoints_per_waypoint - successes);
      std::vector<Viewpoint> plan;
      {
        ScopedPhase t(log, Phase::kPlanning);
        plan = plan_round(wp, budget);
        ++stats.planning_rounds;
      }
      if (plan.empty()) break;

      for (Viewpoint& vp : plan) {
        if (successes >= cfg.max_viewpoints_per_waypoint) break;
        bool clear = true;
        {
          ScopedPhase t(log, Phase::kExecution);
          clear = result.octree.collision_free(current_cam.translation(), vp.position(),
                                               cfg.robot_radius);
        }
        if (!clear) {
          ++stats.skipped_collisions;
          continue;
        }
        current_cam = vp.world_T_cam;
        vp.status = ViewpointStatus::kExecuted;
        executed.push_back(vp);
        integrate(observe_at(current_cam));
        ++successes;
        ++stats.successful_viewpoints;
      }
    }
  }

  stats.final_splats = result.splat_map.splats.size();

  // Ground truth restricted to this row; the reconstruction is filtered by the
  // same lateral slab so multi-row scenes stay comparable.
  const Scalar half_lane = scene.config.row_spacing / 2;
  Scene row_fruits;
  row_fruits.config = scene.config;
  for (const Primitive& p : scene.primitives)
    if (p.cls == SemanticClass::kFruit &&
        lateral_distance(p.world_T_local.translation(), row) <= half_lane)
      row_fruits.primitives.push_back(p);
  result.gt_fruits = ground_truth_fruit_cloud(row_fruits, cfg.eval.gt_surface_density);

  PointCloud est = hybrid ? extract_target_points(result.splat_map.splats, densify_cfg.target,
                                                  cfg.prune_min_opacity)
                          : baseline_fruit_cloud(result.octree);
  std::erase_if(est, [&](const Vec3& p) { return lateral_distance(p, row) > half_lane; });
  result.recon_cloud = est;
  result.fruits = fruit_report_from_points(est, cluster_cfg);

  MetricsReport& m = result.metrics;
  m.fruit_count_gt = result.gt_fruits.count;
  m.fruit_count_est = result.fruits.count;
  m.volume_est = result.fruits.total_volume;
  if (result.gt_fruits.count == 0) {
    m.defined = false;  // undefined-metric row, run still completes
  } else {
    m.defined = true;
    m.volume_gt_analytic = result.gt_fruits.total_volume();
    // Hull variant of the GT volume: hull of each fruit's sample points.
    Scalar gt_hull = 0;
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= result.gt_fruits.points.size(); ++i) {
      if (i == result.gt_fruits.points.size() ||
          result.gt_fruits.instance[i] != result.gt_fruits.instance[begin]) {
        gt_hull += convex_hull_volume(std::span<const Vec3>(result.gt_fruits.points)
                                          .subspan(begin, i - begin))
                       .volume;
        begin = i;
      }
    }
    m.volume_gt_hull = gt_hull;
    m.count_accuracy_pct = count_accuracy(m.fruit_count_est, m.fruit_count_gt);
    m.volume_accuracy_pct = volume_accuracy(m.volume_est, m.volume_gt_analytic);
    m.volume_accuracy_hull_pct = volume_accuracy(m.volume_est, m.volume_gt_hull);
    if (est.empty()) {
      m.chamfer = -1.0;  // nothing reconstructed; distances undefined
      m.precision = m.recall = m.f1 = 0.0;
    } else {
      m.chamfer = chamfer_distance(est, result.gt_fruits.points);
      const PrecisionRecall pr = precision_recall_f1(est, result.gt_fruits.points, cfg.eval.tau);
      m.precision = pr.precision;
      m.recall = pr.recall;
      m.f1 = pr.f1;
    }
  }

  result.runtime = runtime_report(log.spans());
  m.runtime = result.runtime.per_phase;
  return result;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg,
                                      std::vector<RowResult>* keep_maps) {
  cfg.validate();
  std::vector<ResultRow> rows;
  for (const std::uint64_t seed : cfg.seeds) {
    SceneConfig scene_cfg = cfg.scene;
    scene_cfg.rng_seed = seed;
    const Scene scene = generate_scene(scene_cfg);

    std::vector<int> row_ids = cfg.rows;
    if (row_ids.empty())
      for (int r = 0; r < static_cast<int>(scene.rows.size()); ++r) row_ids.push_back(r);

    for (const int row_id : row_ids) {
      RowResult rr = run_row(scene, row_id, cfg, seed);
      ResultRow out;
      out.seed = seed;
      out.method = method_name(cfg.method);
      out.noise_p = cfg.noise_enabled ? cfg.noise.p_correct : 1.0;
      out.row_id = row_id;
      out.metrics = rr.metrics;
      out.stats = rr.stats;
      out.runtime = rr.runtime;
      rows.push_back(out);
      if (keep_maps) keep_maps->push_back(std::move(rr));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

using nlohmann::json;

json metrics_json(const MetricsReport& m) {
  return json{{"defined", m.defined},
              {"chamfer", m.chamfer},
              {"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1},
              {"volume_accuracy_pct", m.volume_accuracy_pct},
              {"volume_accuracy_hull_pct", m.volume_accuracy_hull_pct},
              {"count_accuracy_pct", m.count_accuracy_pct},
              {"fruit_count_est", m.fruit_count_est},
              {"fruit_count_gt", m.fruit_count_gt},
              {"volume_est", m.volume_est},
              {"volume_gt_analytic", m.volume_gt_analytic},
              {"volume_gt_hull", m.volume_gt_hull}};
}

json stats_json(const RunStats& s) {
  return json{{"observations", s.observations},
              {"successful_viewpoints", s.successful_viewpoints},
              {"planning_rounds", s.planning_rounds},
              {"skipped_collisions", s.skipped_collisions},
              {"skipped_waypoints", s.skipped_waypoints},
              {"densified_total", s.densified_total},
              {"peak_splats", s.peak_splats},
              {"final_splats", s.final_splats}};
}

}  // namespace

std::string results_to_json(const std::vector<ResultRow>& rows) {
  json body = json::array();
  for (const ResultRow& r : rows) {
    json row{{"seed", r.seed},
             {"method", r.method},
             {"noise_p", r.noise_p},
             {"row_id", r.row_id},
             {"stats", stats_json(r.stats)}};
    row.update(metrics_json(r.metrics));
    body.push_back(row);
  }
  return json{{"format", "hortimap-metrics"}, {"version", 1}, {"rows", body}}.dump(2);
}

std::string results_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "seed,method,noise_p,row_id,defined,chamfer,precision,recall,f1,"
         "volume_accuracy_pct,volume_accuracy_hull_pct,count_accuracy_pct,"
         "fruit_count_est,fruit_count_gt,volume_est,volume_gt_analytic,volume_gt_hull,"
         "observations,successful_viewpoints,planning_rounds,skipped_collisions,"
         "peak_splats,final_splats\n";
  for (const ResultRow& r : rows) {
    const MetricsReport& m = r.metrics;
    out << r.seed << "," << r.method << "," << r.noise_p << "," << r.row_id << ","
        << (m.defined ? 1 : 0) << "," << m.chamfer << "," << m.precision << "," << m.recall << ","
        << m.f1 << "," << m.volume_accuracy_pct << "," << m.volume_accuracy_hull_pct << ","
        << m.count_accuracy_pct << "," << m.fruit_count_est << "," << m.fruit_count_gt << ","
        << m.volume_est << "," << m.volume_gt_analytic << "," << m.volume_gt_hull << ","
        << r.stats.observations << "," << r.stats.successful_viewpoints << ","
        << r.stats.planning_rounds << "," << r.stats.skipped_collisions << ","
        << r.stats.peak_splats << "," << r.stats.final_splats << "\n";
  }
  return out.str();
}

std::string timing_to_json(const std::vector<ResultRow>& rows) {
  json body = json::array();
  for (const ResultRow& r : rows) {
    body.push_back(json{{"seed", r.seed},
                        {"method", r.method},
                        {"row_id", r.row_id},
                        {"per_phase", r.runtime.per_phase},
                        {"gs_mapping_raw", r.runtime.gs_mapping_raw},
                        {"gs_mapping_critical_path", r.runtime.gs_mapping_critical_path},
                        {"total", r.runtime.total}});
  }
  return json{{"format", "hortimap-timing"}, {"version", 1}, {"rows", body}}.dump(2);
}

// ---------------------------------------------------------------------------
// Config round trip. Reading starts from defaults and overrides present keys.

namespace {

template <typename T>
void maybe(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

template <typename T>
void maybe_pair(const json& j, const char* key, std::pair<T, T>& field) {
  if (j.contains(key)) field = {j.at(key).at(0).get<T>(), j.at(key).at(1).get<T>()};
}

json camera_json(const CameraModel& c) {
  return json{{"width", c.width}, {"height", c.height}, {"fx", c.fx},
              {"fy", c.fy},       {"cx", c.cx},         {"cy", c.cy},
              {"near", c.near_plane}, {"far", c.far_plane}};
}

void camera_from(const json& j, CameraModel& c) {
  maybe(j, "width", c.width);
  maybe(j, "height", c.height);
  maybe(j, "fx", c.fx);
  maybe(j, "fy", c.fy);
  maybe(j, "cx", c.cx);
  maybe(j, "cy", c.cy);
  maybe(j, "near", c.near_plane);
  maybe(j, "far", c.far_plane);
}

}  // namespace

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["format"] = "hortimap-config";
  j["version"] = 1;
  j["scene"] = {{"n_rows", c.scene.n_rows},
                {"plants_per_row", c.scene.plants_per_row},
                {"row_spacing", c.scene.row_spacing},
                {"plant_spacing", c.scene.plant_spacing},
                {"fruit_radius_range",
                 {c.scene.fruit_radius_range.first, c.scene.fruit_radius_range.second}},
                {"fruits_per_plant_range",
                 {c.scene.fruits_per_plant_range.first, c.scene.fruits_per_plant_range.second}},
                {"leaf_count_range",
                 {c.scene.leaf_count_range.first, c.scene.leaf_count_range.second}},
                {"plant_height_range",
                 {c.scene.plant_height_range.first, c.scene.plant_height_range.second}},
                {"stem_class", static_cast<int>(c.scene.stem_class)}};
  j["noise"] = {{"enabled", c.noise_enabled},
                {"p_correct", c.noise.p_correct},
                {"conf_correct_range",
                 {c.noise.conf_correct_range.first, c.noise.conf_correct_range.second}},
                {"conf_wrong_range",
                 {c.noise.conf_wrong_range.first, c.noise.conf_wrong_range.second}}};
  j["method"] = method_name(c.method);
  j["waypoints_per_row"] = c.waypoints_per_row;
  j["max_viewpoints_per_waypoint"] = c.max_viewpoints_per_waypoint;
  j["planner"] = {{"top_k", c.planner.top_k},
                  {"n_near", c.planner.n_near},
                  {"k_exec", c.planner.k_exec},
                  {"cost_weight", c.planner.cost_weight}};
  j["sampling"] = {{"sphere_radius", c.sampling.sphere_radius},
                   {"n_azimuth", c.sampling.n_azimuth},
                   {"n_elevation", c.sampling.n_elevation},
                   {"elevation_min", c.sampling.elevation_min},
                   {"elevation_max", c.sampling.elevation_max},
                   {"row_plane_offset", c.sampling.row_plane_offset},
                   {"grid_along_row", c.sampling.grid_along_row},
                   {"grid_vertical", c.sampling.grid_vertical}};
  j["loss"] = {{"lambda_depth", c.loss.lambda_depth},
               {"lambda_color", c.loss.lambda_color},
               {"lambda_semantic", c.loss.lambda_semantic},
               {"alpha", c.loss.alpha}};
  j["densify"] = {{"silhouette_threshold", c.densify.silhouette_threshold},
                  {"nontarget_keep_fraction", c.densify.nontarget_keep_fraction},
                  {"depth_error_threshold", c.densify.depth_error_threshold},
                  {"init_opacity", c.densify.init_opacity},
                  {"label_smoothing", c.densify.label_smoothing}};
  j["cluster"] = {{"eps", c.cluster.eps}, {"min_samples", c.cluster.min_samples}};
  j["eval"] = {{"tau", c.eval.tau}, {"gt_surface_density", c.eval.gt_surface_density}};
  j["optim"] = {{"iterations", c.optim.iterations},
                {"lr_mu", c.optim.lr_mu},
                {"lr_color", c.optim.lr_color},
                {"lr_semantic", c.optim.lr_semantic},
                {"lr_opacity", c.optim.lr_opacity},
                {"lr_radius", c.optim.lr_radius},
                {"silhouette_threshold", c.optim.silhouette_threshold}};
  j["planning_octree"] = {{"resolution", c.planning_octree.resolution},
                          {"max_range", c.planning_octree.max_range},
                          {"p_hit", c.planning_octree.p_hit},
                          {"p_miss", c.planning_octree.p_miss},
                          {"l_min", c.planning_octree.l_min},
                          {"l_max", c.planning_octree.l_max},
                          {"occ_threshold", c.planning_octree.occ_threshold},
                          {"label_hit", c.planning_octree.label_hit},
                          {"label_miss", c.planning_octree.label_miss}};
  j["baseline_fine_resolution"] = c.baseline_fine_resolution;
  j["baseline_coarse_resolution"] = c.baseline_coarse_resolution;
  j["camera"] = camera_json(c.camera);
  j["arm_steps_per_joint"] = c.arm_steps_per_joint;
  j["reach_tolerance"] = c.reach_tolerance;
  j["max_slide"] = c.max_slide;
  j["slide_step"] = c.slide_step;
  j["waypoint_standoff"] = c.waypoint_standoff;
  j["robot_radius"] = c.robot_radius;
  j["proximity_radius"] = c.proximity_radius;
  j["gain_stride"] = c.gain_stride;
  j["prune_min_opacity"] = c.prune_min_opacity;
  j["prune_max_radius"] = c.prune_max_radius;
  j["dedup_position_tol"] = c.dedup_position_tol;
  j["dedup_angle_tol"] = c.dedup_angle_tol;
  j["ablation"] = {{"no_confidence", c.ablation.no_confidence},
                   {"exploration_only", c.ablation.exploration_only},
                   {"no_downsample", c.ablation.no_downsample}};
  j["output_dir"] = c.output_dir;
  j["seeds"] = c.seeds;
  j["rows"] = c.rows;
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig c;
  if (j.contains("scene")) {
    const json& s = j.at("scene");
    maybe(s, "n_rows", c.scene.n_rows);
    maybe(s, "plants_per_row", c.scene.plants_per_row);
    maybe(s, "row_spacing", c.scene.row_spacing);
    maybe(s, "plant_spacing", c.scene.plant_spacing);
    maybe_pair(s, "fruit_radius_range", c.scene.fruit_radius_range);
    maybe_pair(s, "fruits_per_plant_range", c.scene.fruits_per_plant_range);
    maybe_pair(s, "leaf_count_range", c.scene.leaf_count_range);
    maybe_pair(s, "plant_height_range", c.scene.plant_height_range);
    if (s.contains("stem_class"))
      c.scene.stem_class = static_cast<SemanticClass>(s.at("stem_class").get<int>());
  }
  if (j.contains("noise")) {
    const json& s = j.at("noise");
    maybe(s, "enabled", c.noise_enabled);
    maybe(s, "p_correct", c.noise.p_correct);
    maybe_pair(s, "conf_correct_range", c.noise.conf_correct_range);
    maybe_pair(s, "conf_wrong_range", c.noise.conf_wrong_range);
  }
  if (j.contains("method")) c.method = method_from_name(j.at("method").get<std::string>());
  maybe(j, "waypoints_per_row", c.waypoints_per_row);
  maybe(j, "max_viewpoints_per_waypoint", c.max_viewpoints_per_waypoint);
  if (j.contains("planner")) {
    const json& s = j.at("planner");
    maybe(s, "top_k", c.planner.top_k);
    maybe(s, "n_near", c.planner.n_near);
    maybe(s, "k_exec", c.planner.k_exec);
    maybe(s, "cost_weight", c.planner.cost_weight);
  }
  if (j.contains("sampling")) {
    const json& s = j.at("sampling");
    maybe(s, "sphere_radius", c.sampling.sphere_radius);
    maybe(s, "n_azimuth", c.sampling.n_azimuth);
    maybe(s, "n_elevation", c.sampling.n_elevation);
    maybe(s, "elevation_min", c.sampling.elevation_min);
    maybe(s, "elevation_max", c.sampling.elevation_max);
    maybe(s, "row_plane_offset", c.sampling.row_plane_offset);
    maybe(s, "grid_along_row", c.sampling.grid_along_row);
    maybe(s, "grid_vertical", c.sampling.grid_vertical);
  }
  if (j.contains("loss")) {
    const json& s = j.at("loss");
    maybe(s, "lambda_depth", c.loss.lambda_depth);
    maybe(s, "lambda_color", c.loss.lambda_color);
    maybe(s, "lambda_semantic", c.loss.lambda_semantic);
    maybe(s, "alpha", c.loss.alpha);
  }
  if (j.contains("densify")) {
    const json& s = j.at("densify");
    maybe(s, "silhouette_threshold", c.densify.silhouette_threshold);
    maybe(s, "nontarget_keep_fraction", c.densify.nontarget_keep_fraction);
    maybe(s, "depth_error_threshold", c.densify.depth_error_threshold);
    maybe(s, "init_opacity", c.densify.init_opacity);
    maybe(s, "label_smoothing", c.densify.label_smoothing);
  }
  if (j.contains("cluster")) {
    maybe(j.at("cluster"), "eps", c.cluster.eps);
    maybe(j.at("cluster"), "min_samples", c.cluster.min_samples);
  }
  if (j.contains("eval")) {
    maybe(j.at("eval"), "tau", c.eval.tau);
    maybe(j.at("eval"), "gt_surface_density", c.eval.gt_surface_density);
  }
  if (j.contains("optim")) {
    const json& s = j.at("optim");
    maybe(s, "iterations", c.optim.iterations);
    maybe(s, "lr_mu", c.optim.lr_mu);
    maybe(s, "lr_color", c.optim.lr_color);
    maybe(s, "lr_semantic", c.optim.lr_semantic);
    maybe(s, "lr_opacity", c.optim.lr_opacity);
    maybe(s, "lr_radius", c.optim.lr_radius);
    maybe(s, "silhouette_threshold", c.optim.silhouette_threshold);
  }
  if (j.contains("planning_octree")) {
    const json& s = j.at("planning_octree");
    maybe(s, "resolution", c.planning_octree.resolution);
    maybe(s, "max_range", c.planning_octree.max_range);
    maybe(s, "p_hit", c.planning_octree.p_hit);
    maybe(s, "p_miss", c.planning_octree.p_miss);
    maybe(s, "l_min", c.planning_octree.l_min);
    maybe(s, "l_max", c.planning_octree.l_max);
    maybe(s, "occ_threshold", c.planning_octree.occ_threshold);
    maybe(s, "label_hit", c.planning_octree.label_hit);
    maybe(s, "label_miss", c.planning_octree.label_miss);
  }
  maybe(j, "baseline_fine_resolution", c.baseline_fine_resolution);
  maybe(j, "baseline_coarse_resolution", c.baseline_coarse_resolution);
  if (j.contains("camera")) camera_from(j.at("camera"), c.camera);
  maybe(j, "arm_steps_per_joint", c.arm_steps_per_joint);
  maybe(j, "reach_tolerance", c.reach_tolerance);
  maybe(j, "max_slide", c.max_slide);
  maybe(j, "slide_step", c.slide_step);
  maybe(j, "waypoint_standoff", c.waypoint_standoff);
  maybe(j, "robot_radius", c.robot_radius);
  maybe(j, "proximity_radius", c.proximity_radius);
  maybe(j, "gain_stride", c.gain_stride);
  maybe(j, "prune_min_opacity", c.prune_min_opacity);
  maybe(j, "prune_max_radius", c.prune_max_radius);
  maybe(j, "dedup_position_tol", c.dedup_position_tol);
  maybe(j, "dedup_angle_tol", c.dedup_angle_tol);
  if (j.contains("ablation")) {
    const json& s = j.at("ablation");
    maybe(s, "no_confidence", c.ablation.no_confidence);
    maybe(s, "exploration_only", c.ablation.exploration_only);
    maybe(s, "no_downsample", c.ablation.no_downsample);
  }
  maybe(j, "output_dir", c.output_dir);
  maybe(j, "seeds", c.seeds);
  maybe(j, "rows", c.rows);
  return c;
}

std::string config_hash(const ExperimentConfig& cfg) {
  return fnv1a_hex(config_to_json(cfg)).substr(0, 12);
}

std::string export_results(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows,
                           const std::vector<RowResult>& maps) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir))
    throw std::runtime_error("export_results: cannot create output dir " + cfg.output_dir);

  const std::string h = config_hash(cfg);
  write_text_file((dir / ("config_" + h + ".json")).string(), config_to_json(cfg));
  write_text_file((dir / ("metrics_" + h + ".json")).string(), results_to_json(rows));
  write_text_file((dir / ("metrics_" + h + ".csv")).string(), results_to_csv(rows));
  write_text_file((dir / ("timing_" + h + ".json")).string(), timing_to_json(rows));

  for (std::size_t i = 0; i < maps.size() && i < rows.size(); ++i) {
    const ResultRow& r = rows[i];
    std::ostringstream tag;
    tag << h << "_s" << r.seed << "_row" << r.row_id << "_" << r.method;
    const RowResult& rr = maps[i];

    if (!rr.splat_map.splats.empty()) {
      save_checkpoint((dir / ("splats_" + tag.str() + ".bin")).string(), rr.splat_map);
      export_splats_ply((dir / ("splats_" + tag.str() + ".ply")).string(), rr.splat_map);
    }
    rr.octree.save((dir / ("octree_" + tag.str() + ".bin")).string());
    rr.octree.export_occupied_ply((dir / ("octree_" + tag.str() + ".ply")).string());

    PlyCloud recon;
    recon.points = rr.recon_cloud;
    write_ply((dir / ("recon_" + tag.str() + ".ply")).string(), recon);

    PlyCloud gt;
    gt.points = rr.gt_fruits.points;
    gt.instance = rr.gt_fruits.instance;
    gt.cls.assign(rr.gt_fruits.points.size(), static_cast<int>(SemanticClass::kFruit));
    write_ply((dir / ("gt_fruits_" + tag.str() + ".ply")).string(), gt);
  }
  return dir.string();
}

}  // namespace hortimap
