#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "hortimap/optimize.hpp"

using namespace hortimap;

namespace {

CameraModel fixture_camera() {
  CameraModel cam;
  cam.width = 24;
  cam.height = 24;
  cam.fx = cam.fy = 24.0;
  cam.cx = cam.cy = 12.0;
  return cam;
}

// Observation that the splat should explain: uniform target color, depth from
// the splat's own geometry, labels from its argmax class.
SemanticObservation target_observation(const std::vector<Gaussian3D>& splats,
                                       const CameraModel& cam, const Vec3& color) {
  const RenderedFrame frame = render(splats, cam, Isometry::Identity());
  SemanticObservation obs;
  obs.cam = cam;
  obs.cam_T_world = Isometry::Identity();
  obs.color.resize(cam.height, cam.width);
  obs.depth = frame.depth;
  obs.labels = LabelImage::Zero(cam.height, cam.width);
  obs.confidence = Image::Constant(cam.height, cam.width, 1.0);
  for (int y = 0; y < cam.height; ++y)
    for (int x = 0; x < cam.width; ++x) {
      obs.color.set(y, x, color);
      int arg = 0;
      if (!splats.empty()) splats[0].semantic.maxCoeff(&arg);
      obs.labels(y, x) = arg;
    }
  return obs;
}

Gaussian3D base_splat() {
  Gaussian3D g;
  g.mu = Vec3(0, 0, 0.5);
  g.radius = 0.04;
  g.opacity = 0.8;
  g.color = Vec3(0.5, 0.5, 0.5);
  g.semantic = ClassVec(0.8, 0.1, 0.1);
  return g;
}

}  // namespace

TEST_CASE("zero iterations leave the map untouched") {
  GaussianMap map;
  map.splats.push_back(base_splat());
  const GaussianMap before = map.snapshot();

  OptimConfig cfg;
  cfg.iterations = 0;
  const SemanticObservation obs = target_observation(map.splats, fixture_camera(), {0.6, 0.4, 0.3});
  optimize(map, obs, LossWeights{}, cfg);
  CHECK(map.splats[0].mu == before.splats[0].mu);
  CHECK(map.splats[0].color == before.splats[0].color);
  CHECK(map.splats[0].opacity == before.splats[0].opacity);
}

TEST_CASE("a wrongly colored splat converges to the observed color") {
  const CameraModel cam = fixture_camera();
  GaussianMap map;
  map.splats.push_back(base_splat());

  const Vec3 target(0.62, 0.38, 0.55);
  const SemanticObservation obs = target_observation(map.splats, cam, target);

  OptimConfig cfg;
  cfg.iterations = 100;
  cfg.silhouette_threshold = 0.5;
  LossWeights w;
  w.lambda_depth = 0.0;     // color-only fixture
  w.lambda_semantic = 0.0;
  w.alpha = 1.0;
  optimize(map, obs, w, cfg);
  CHECK((map.splats[0].color - target).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("loss decreases over the run and trends down over 10-step windows") {
  const CameraModel cam = fixture_camera();
  GaussianMap map;
  Gaussian3D g = base_splat();
  g.color = Vec3(0.2, 0.7, 0.3);
  g.mu += Vec3(0.01, -0.008, 0.02);  // geometry slightly off as well
  map.splats.push_back(g);

  std::vector<Gaussian3D> truth{base_splat()};
  const RenderedFrame gt_frame = render(truth, cam, Isometry::Identity());
  SemanticObservation obs;
  obs.cam = cam;
  obs.cam_T_world = Isometry::Identity();
  obs.color = gt_frame.color;
  obs.depth = gt_frame.depth;
  obs.labels = LabelImage::Zero(cam.height, cam.width);
  obs.confidence = Image::Constant(cam.height, cam.width, 1.0);

  OptimConfig cfg;
  cfg.iterations = 60;
  cfg.silhouette_threshold = 0.5;
  const OptimizeStats stats = optimize(map, obs, LossWeights{}, cfg);

  REQUIRE(stats.loss_trace.size() == 61);
  CHECK(stats.loss_trace.back() <= stats.loss_trace.front());

  // windowed trend: means of consecutive 10-step windows do not increase
  for (std::size_t t = 0; t + 20 < stats.loss_trace.size(); t += 10) {
    Scalar w0 = 0, w1 = 0;
    for (int i = 0; i < 10; ++i) {
      w0 += stats.loss_trace[t + i];
      w1 += stats.loss_trace[t + 10 + i];
    }
    CHECK(w1 <= w0 * 1.001 + 1e-12);
  }
}

TEST_CASE("densify spawns per-pixel for targets and downsamples the rest") {
  const CameraModel cam = fixture_camera();  // 24x24 = 576 pixels

  SemanticObservation obs;
  obs.cam = cam;
  obs.cam_T_world = Isometry::Identity();
  obs.color.resize(cam.height, cam.width);
  obs.depth = Image::Constant(cam.height, cam.width, 0.5);
  obs.labels = LabelImage::Constant(cam.height, cam.width, static_cast<int>(SemanticClass::kLeaf));
  obs.confidence = Image::Constant(cam.height, cam.width, 1.0);

  DensifyConfig cfg;

  SUBCASE("non-target pixels keep with the configured fraction") {
    GaussianMap map;
    Rng rng(10);
    const int added = densify(map, obs, cfg, rng);
    // 576 valid non-target pixels at keep 0.1: binomial sd ~ 7.2
    CHECK(added > 576 * 0.1 - 22);
    CHECK(added < 576 * 0.1 + 22);
    for (const Gaussian3D& g : map.splats) {
      CHECK(g.opacity == cfg.init_opacity);
      CHECK(g.radius == doctest::Approx(0.5 / cam.fx));
      int arg = 0;
      g.semantic.maxCoeff(&arg);
      CHECK(arg == static_cast<int>(SemanticClass::kLeaf));
      CHECK(g.semantic.sum() == doctest::Approx(1.0));
    }
  }

  SUBCASE("target pixels always spawn") {
    obs.labels.setConstant(static_cast<int>(SemanticClass::kFruit));
    GaussianMap map;
    Rng rng(11);
    CHECK(densify(map, obs, cfg, rng) == 576);
    // back-projection puts the splat on the observed surface
    const Vec3 mu = map.splats.front().mu;
    CHECK(mu.z() == doctest::Approx(0.5));
  }

  SUBCASE("invalid depth pixels never spawn") {
    obs.depth.setConstant(cam.far_plane);
    GaussianMap map;
    Rng rng(12);
    CHECK(densify(map, obs, cfg, rng) == 0);
  }

  SUBCASE("a fully covered view adds nothing") {
    obs.labels.setConstant(static_cast<int>(SemanticClass::kFruit));
    GaussianMap map;
    Rng rng(13);
    densify(map, obs, cfg, rng);  // seed from the frame itself
    OptimConfig ocfg;
    ocfg.iterations = 25;
    optimize(map, obs, LossWeights{}, ocfg);

    const RenderedFrame frame = render(map.splats, cam, obs.cam_T_world);
    DensifyConfig covered = cfg;
    // thresholds at the level this map actually reaches
    covered.silhouette_threshold = frame.silhouette.minCoeff() - 1e-6;
    covered.depth_error_threshold = (frame.depth - obs.depth).abs().maxCoeff() + 1e-6;
    Rng rng2(14);
    CHECK(densify(map, obs, covered, rng2) == 0);
  }
}

TEST_CASE("prune removes weak and oversized splats idempotently") {
  GaussianMap map;
  for (int i = 0; i < 10; ++i) {
    Gaussian3D g = base_splat();
    g.opacity = 0.9;
    map.splats.push_back(g);
  }
  CHECK(prune(map, 0.005, 1.0) == 0);
  CHECK(map.splats.size() == 10);

  map.splats[3].opacity = 0.001;
  map.splats[7].radius = 2.0;
  CHECK(prune(map, 0.005, 1.0) == 2);
  CHECK(map.splats.size() == 8);
  CHECK(prune(map, 0.005, 1.0) == 0);  // idempotent
}
