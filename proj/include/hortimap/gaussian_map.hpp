#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hortimap/camera.hpp"
#include "hortimap/types.hpp"

namespace hortimap {

/// One isotropic splat. `semantic` lives on the |S|-simplex and is rendered
/// like a color channel; the class label is its argmax.
struct Gaussian3D {
  Vec3 mu = Vec3::Zero();
  Scalar radius = 0.01;
  Vec3 color = Vec3::Zero();
  Scalar opacity = 0.5;
  ClassVec semantic = ClassVec::Constant(1.0 / kNumClasses);
};

/// Screen-space footprint of a projected splat: pixel center, isotropic 2D
/// sigma = radius * fx / z, camera-space depth, and the 3-sigma pixel radius
/// outside which the kernel is treated as zero.
struct Splat2D {
  Vec2 center = Vec2::Zero();
  Scalar sigma2d = 0;
  Scalar z = 0;
  Scalar footprint_radius = 0;
};

struct RenderedFrame {
  int width = 0, height = 0;
  ColorImage color;
  Image depth;
  SemanticImage semantic;
  Image silhouette;  // accumulated alpha, equals the sum of compositing weights
};

// Per-pixel alpha saturates just below 1 so transmittance stays positive and
// gradients finite.
inline constexpr Scalar kMaxAlpha = 0.9999;
inline constexpr Scalar kFootprintSigmas = 3.0;

/// Eq.-style kernel value o * exp(-|x - mu|^2 / (2 r^2)) at a 3D point.
inline Scalar eval_gaussian(const Gaussian3D& g, const Vec3& x) {
  const Scalar d2 = (x - g.mu).squaredNorm();
  return g.opacity * std::exp(-d2 / (2.0 * g.radius * g.radius));
}

/// nullopt when the splat is behind the near plane or its footprint cannot
/// touch the image.
std::optional<Splat2D> project_gaussian(const Gaussian3D& g, const CameraModel& cam,
                                        const Isometry& cam_T_world);

/// Front-to-back alpha compositing of all splats, globally sorted by
/// camera-space depth (ties broken by index). Color, depth, semantics and
/// silhouette are accumulated with the same weights.
RenderedFrame render(std::span<const Gaussian3D> splats, const CameraModel& cam,
                     const Isometry& cam_T_world);

/// Splat map with value-semantics snapshots: planning and clustering read a
/// copy while the optimizer owns the live instance.
struct GaussianMap {
  std::vector<Gaussian3D> splats;

  GaussianMap snapshot() const { return *this; }
};

namespace detail {
// Visible splats in compositing order (ascending z, then index). The loss
// backward pass replays exactly this order.
std::vector<std::pair<int, Splat2D>> project_and_sort(std::span<const Gaussian3D> splats,
                                                      const CameraModel& cam,
                                                      const Isometry& cam_T_world);
}  // namespace detail

}  // namespace hortimap
