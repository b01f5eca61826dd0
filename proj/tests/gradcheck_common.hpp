#pragma once

// Finite-difference harness for the mapping loss. Fixtures are rejection
// sampled away from the loss's non-smooth sets (L1 kinks, the well-observed
// mask threshold, footprint boundaries, depth sort ties, the alpha clamp) so
// central differences are valid at the sampled point.

#include <cmath>
#include <optional>
#include <vector>

#include "hortimap/loss.hpp"
#include "hortimap/rng.hpp"

namespace gradcheck {

using namespace hortimap;

struct Fixture {
  std::vector<Gaussian3D> splats;
  SemanticObservation obs;
  LossWeights weights;
  Scalar silhouette_threshold = 0.2;
};

inline CameraModel fixture_camera() {
  CameraModel cam;
  cam.width = 8;
  cam.height = 8;
  cam.fx = cam.fy = 8.0;
  cam.cx = cam.cy = 4.0;
  cam.near_plane = 0.05;
  cam.far_plane = 2.0;
  return cam;
}

inline std::optional<Fixture> try_fixture(std::uint64_t seed) {
  Rng rng(seed);
  Fixture fx;
  const CameraModel cam = fixture_camera();

  const int n = uniform_int(rng, 1, 5);
  for (int i = 0; i < n; ++i) {
    const Scalar u = uniform(rng, 1.0, 7.0), v = uniform(rng, 1.0, 7.0);
    const Scalar z = uniform(rng, 0.4, 1.2);
    const Scalar sigma_px = uniform(rng, 0.8, 2.5);
    Gaussian3D g;
    g.mu = backproject(cam, u, v, z);
    g.radius = sigma_px * z / cam.fx;
    g.opacity = uniform(rng, 0.25, 0.85);
    g.color = Vec3(uniform(rng, 0.1, 0.9), uniform(rng, 0.1, 0.9), uniform(rng, 0.1, 0.9));
    ClassVec s(uniform(rng, 0.1, 1.0), uniform(rng, 0.1, 1.0), uniform(rng, 0.1, 1.0));
    g.semantic = s / s.sum();
    fx.splats.push_back(g);
  }

  SemanticObservation& obs = fx.obs;
  obs.cam = cam;
  obs.cam_T_world = Isometry::Identity();
  obs.color.resize(cam.height, cam.width);
  obs.depth = Image::Zero(cam.height, cam.width);
  obs.labels = LabelImage::Zero(cam.height, cam.width);
  obs.confidence = Image::Zero(cam.height, cam.width);
  for (int y = 0; y < cam.height; ++y)
    for (int x = 0; x < cam.width; ++x) {
      obs.color.set(y, x, Vec3(uniform(rng, 0, 1), uniform(rng, 0, 1), uniform(rng, 0, 1)));
      obs.depth(y, x) = uniform(rng, 0.0, 1.0) < 0.15 ? cam.far_plane : uniform(rng, 0.2, 1.5);
      obs.labels(y, x) = uniform_int(rng, 0, kNumClasses - 1);
      obs.confidence(y, x) = uniform(rng, 0, 1);
    }

  // --- smoothness margins, sized for the h = 1e-4 stencil ---
  for (std::size_t i = 0; i < fx.splats.size(); ++i)
    for (std::size_t j = i + 1; j < fx.splats.size(); ++j)
      if (std::abs(fx.splats[i].mu.z() - fx.splats[j].mu.z()) < 1e-3) return std::nullopt;

  const RenderedFrame frame = render(fx.splats, cam, obs.cam_T_world);
  for (int y = 0; y < cam.height; ++y)
    for (int x = 0; x < cam.width; ++x) {
      if (std::abs(frame.silhouette(y, x) - fx.silhouette_threshold) < 5e-3) return std::nullopt;
      const bool masked = frame.silhouette(y, x) > fx.silhouette_threshold &&
                          depth_valid(cam, obs.depth(y, x));
      if (!masked) continue;
      if (std::abs(frame.depth(y, x) - obs.depth(y, x)) < 1e-3) return std::nullopt;
      for (int c = 0; c < 3; ++c)
        if (std::abs(frame.color.ch[c](y, x) - obs.color.ch[c](y, x)) < 1e-3)
          return std::nullopt;
      for (int k = 0; k < kNumClasses; ++k) {
        const Scalar gt = k == obs.labels(y, x) ? 1.0 : 0.0;
        if (std::abs(frame.semantic.ch[k](y, x) - gt) < 1e-3) return std::nullopt;
      }
    }

  for (const Gaussian3D& g : fx.splats) {
    const auto s = project_gaussian(g, cam, obs.cam_T_world);
    if (!s) return std::nullopt;  // fixture centers are always in frame
    if (g.opacity >= kMaxAlpha - 1e-3) return std::nullopt;
    for (int y = 0; y < cam.height; ++y)
      for (int x = 0; x < cam.width; ++x) {
        const Scalar d = std::hypot(x - s->center.x(), y - s->center.y());
        if (std::abs(d - s->footprint_radius) < 0.02) return std::nullopt;
      }
  }
  return fx;
}

inline Fixture make_fixture(std::uint64_t& seed_cursor) {
  for (;;) {
    if (auto fx = try_fixture(seed_cursor++)) return *fx;
  }
}

// parameter accessors: 11 scalars per splat
inline constexpr int kParamCount = 11;

inline Scalar* param_ptr(Gaussian3D& g, int p) {
  switch (p) {
    case 0: return &g.mu.x();
    case 1: return &g.mu.y();
    case 2: return &g.mu.z();
    case 3: return &g.radius;
    case 4: return &g.color.x();
    case 5: return &g.color.y();
    case 6: return &g.color.z();
    case 7: return &g.opacity;
    default: return &g.semantic[p - 8];
  }
}

inline Scalar analytic_grad(const SplatGrad& g, int p) {
  switch (p) {
    case 0: return g.d_mu.x();
    case 1: return g.d_mu.y();
    case 2: return g.d_mu.z();
    case 3: return g.d_radius;
    case 4: return g.d_color.x();
    case 5: return g.d_color.y();
    case 6: return g.d_color.z();
    case 7: return g.d_opacity;
    default: return g.d_semantic[p - 8];
  }
}

struct GradCheckResult {
  int checked = 0;
  int failed = 0;
  Scalar worst_rel = 0;
};

inline GradCheckResult check_fixture(const Fixture& fx, Scalar h = 1e-4, Scalar rel_tol = 1e-3,
                                     Scalar abs_tol = 1e-6) {
  GradCheckResult result;
  const LossResult analytic =
      mapping_loss(fx.splats, fx.obs, fx.weights, fx.silhouette_threshold);

  std::vector<Gaussian3D> work = fx.splats;
  for (std::size_t i = 0; i < work.size(); ++i) {
    for (int p = 0; p < kParamCount; ++p) {
      Scalar* theta = param_ptr(work[i], p);
      const Scalar saved = *theta;

      *theta = saved + h;
      const Scalar plus = mapping_loss_value(render(work, fx.obs.cam, fx.obs.cam_T_world),
                                             fx.obs, fx.weights, fx.silhouette_threshold);
      *theta = saved - h;
      const Scalar minus = mapping_loss_value(render(work, fx.obs.cam, fx.obs.cam_T_world),
                                              fx.obs, fx.weights, fx.silhouette_threshold);
      *theta = saved;

      const Scalar fd = (plus - minus) / (2.0 * h);
      const Scalar an = analytic_grad(analytic.grads[i], p);
      const Scalar diff = std::abs(fd - an);
      const Scalar rel = diff / std::max({std::abs(fd), std::abs(an), abs_tol});
      ++result.checked;
      if (diff > abs_tol && rel > rel_tol) ++result.failed;
      result.worst_rel = std::max(result.worst_rel, diff <= abs_tol ? 0.0 : rel);
    }
  }
  return result;
}

}  // namespace gradcheck
