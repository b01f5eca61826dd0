#include "hortimap/gaussian_map.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hortimap {

std::optional<Splat2D> project_gaussian(const Gaussian3D& g, const CameraModel& cam,
                                        const Isometry& cam_T_world) {
  const Vec3 p = cam_T_world * g.mu;
  if (p.z() <= cam.near_plane) return std::nullopt;

  Splat2D s;
  s.center = project_pixel(cam, p);
  s.z = p.z();
  s.sigma2d = g.radius * cam.fx / p.z();
  s.footprint_radius = kFootprintSigmas * s.sigma2d;

  if (s.center.x() + s.footprint_radius < 0 ||
      s.center.x() - s.footprint_radius > cam.width - 1 ||
      s.center.y() + s.footprint_radius < 0 ||
      s.center.y() - s.footprint_radius > cam.height - 1)
    return std::nullopt;
  return s;
}

namespace detail {

// Projection plus global front-to-back order, shared by the renderer and the
// loss backward pass so both walk splats identically.
std::vector<std::pair<int, Splat2D>> project_and_sort(std::span<const Gaussian3D> splats,
                                                      const CameraModel& cam,
                                                      const Isometry& cam_T_world) {
  std::vector<std::pair<int, Splat2D>> projected;
  projected.reserve(splats.size());
  for (int i = 0; i < static_cast<int>(splats.size()); ++i)
    if (auto s = project_gaussian(splats[i], cam, cam_T_world)) projected.emplace_back(i, *s);
  std::sort(projected.begin(), projected.end(), [](const auto& a, const auto& b) {
    if (a.second.z != b.second.z) return a.second.z < b.second.z;
    return a.first < b.first;
  });
  return projected;
}

}  // namespace detail

RenderedFrame render(std::span<const Gaussian3D> splats, const CameraModel& cam,
                     const Isometry& cam_T_world) {
  cam.validate();

  RenderedFrame frame;
  frame.width = cam.width;
  frame.height = cam.height;
  frame.color.resize(cam.height, cam.width);
  frame.depth = Image::Zero(cam.height, cam.width);
  frame.semantic.resize(cam.height, cam.width);
  frame.silhouette = Image::Zero(cam.height, cam.width);

  const auto projected = detail::project_and_sort(splats, cam, cam_T_world);
  Image transmittance = Image::Constant(cam.height, cam.width, 1.0);

  for (const auto& [idx, s] : projected) {
    const Gaussian3D& g = splats[idx];
    const Scalar fr2 = s.footprint_radius * s.footprint_radius;
    const Scalar inv_2s2 = 1.0 / (2.0 * s.sigma2d * s.sigma2d);
    const int u0 = std::max(0, static_cast<int>(std::floor(s.center.x() - s.footprint_radius)));
    const int u1 = std::min(cam.width - 1,
                            static_cast<int>(std::ceil(s.center.x() + s.footprint_radius)));
    const int v0 = std::max(0, static_cast<int>(std::floor(s.center.y() - s.footprint_radius)));
    const int v1 = std::min(cam.height - 1,
                            static_cast<int>(std::ceil(s.center.y() + s.footprint_radius)));

    for (int v = v0; v <= v1; ++v) {
      for (int u = u0; u <= u1; ++u) {
        const Scalar dx = u - s.center.x();
        const Scalar dy = v - s.center.y();
        const Scalar d2 = dx * dx + dy * dy;
        if (d2 > fr2) continue;
        const Scalar f = std::min(g.opacity * std::exp(-d2 * inv_2s2), kMaxAlpha);
        const Scalar w = f * transmittance(v, u);
        for (int c = 0; c < 3; ++c) frame.color.ch[c](v, u) += w * g.color[c];
        frame.depth(v, u) += w * s.z;
        for (int k = 0; k < kNumClasses; ++k) frame.semantic.ch[k](v, u) += w * g.semantic[k];
        frame.silhouette(v, u) += w;
        transmittance(v, u) *= 1.0 - f;
      }
    }
  }
  return frame;
}

}  // namespace hortimap
