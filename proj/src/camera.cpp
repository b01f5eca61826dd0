#include "hortimap/camera.hpp"

namespace hortimap {

Isometry look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  Vec3 z = target - eye;
  const Scalar n = z.norm();
  if (n < 1e-12) throw std::invalid_argument("look_at: eye equals target");
  z /= n;

  Vec3 up_ref = up;
  if (std::abs(z.dot(up_ref.normalized())) > 1.0 - 1e-9) up_ref = Vec3::UnitX();

  const Vec3 x = z.cross(up_ref).normalized();
  const Vec3 y = z.cross(x);  // +y points "down" w.r.t. the up reference

  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;

  Isometry world_T_cam = Isometry::Identity();
  world_T_cam.linear() = r;
  world_T_cam.translation() = eye;
  return world_T_cam;
}

}  // namespace hortimap
