#include <algorithm>
#include <cmath>

#include "hortimap/rng.hpp"
#include "hortimap/scene.hpp"

namespace hortimap {

namespace {

struct BoundedPrimitive {
  const Primitive* prim;
  Vec3 center_cam;
  Scalar bound_radius;
};

Scalar bounding_radius(const Primitive& p) {
  switch (p.shape) {
    case ShapeKind::kSphere: return p.size.x();
    case ShapeKind::kEllipsoid: return p.size.maxCoeff();
    case ShapeKind::kCylinder: return std::hypot(p.size.x(), p.size.y());
    case ShapeKind::kDisc: return p.size.x();
  }
  return 0;
}

Vec3 shaded_color(SemanticClass cls, std::int32_t instance) {
  // +-10% per-instance brightness jitter on the class palette.
  const Scalar scale = 1.0 + 0.1 * instance_jitter(instance);
  return (class_color(cls) * scale).cwiseMax(0.0).cwiseMin(1.0);
}

}  // namespace

GroundTruthFrame render_ground_truth(const Scene& scene, const Isometry& cam_T_world,
                                     const CameraModel& cam) {
  cam.validate();

  GroundTruthFrame frame;
  frame.cam = cam;
  frame.cam_T_world = cam_T_world;
  frame.color.resize(cam.height, cam.width);
  frame.depth = Image::Constant(cam.height, cam.width, cam.far_plane);
  frame.true_labels =
      LabelImage::Constant(cam.height, cam.width, static_cast<int>(SemanticClass::kBackground));
  frame.instance_ids = LabelImage::Constant(cam.height, cam.width, -1);

  const Isometry world_T_cam = cam_T_world.inverse();
  const Vec3 origin = world_T_cam.translation();
  const Mat3 rot = world_T_cam.linear();

  // View cone half-angle with slack, for the conservative bounding-sphere cull.
  const Scalar span_x = std::max(cam.cx, cam.width - cam.cx) / cam.fx;
  const Scalar span_y = std::max(cam.cy, cam.height - cam.cy) / cam.fy;
  const Scalar cone_half = std::atan(std::hypot(span_x, span_y)) + 0.02;

  std::vector<BoundedPrimitive> visible;
  visible.reserve(scene.primitives.size());
  for (const Primitive& p : scene.primitives) {
    const Vec3 c = cam_T_world * p.world_T_local.translation();
    const Scalar rb = bounding_radius(p);
    if (c.z() + rb < cam.near_plane || c.z() - rb > cam.far_plane) continue;
    const Scalar dist = c.norm();
    if (dist > rb) {
      const Scalar ang = std::acos(std::clamp<Scalar>(c.z() / dist, -1.0, 1.0));
      if (ang > cone_half + std::asin(std::min<Scalar>(1.0, rb / dist))) continue;
    }
    visible.push_back({&p, c, rb});
  }

  const Vec3 bg = class_color(SemanticClass::kBackground);
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      const Vec3 dir = rot * pixel_ray(cam, u, v);
      Scalar best_t = cam.far_plane;
      const Primitive* best = nullptr;
      for (const auto& bp : visible) {
        if (auto t = intersect_primitive(*bp.prim, origin, dir, cam.near_plane, best_t)) {
          best_t = *t;
          best = bp.prim;
        }
      }
      if (best) {
        frame.depth(v, u) = best_t;
        frame.true_labels(v, u) = static_cast<int>(best->cls);
        frame.instance_ids(v, u) = best->instance_id;
        frame.color.set(v, u, shaded_color(best->cls, best->instance_id));
      } else {
        frame.color.set(v, u, bg);
      }
    }
  }
  return frame;
}

}  // namespace hortimap
