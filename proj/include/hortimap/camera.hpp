#pragma once

#include <stdexcept>

#include "hortimap/types.hpp"

namespace hortimap {

/// Pinhole RGBD camera. The optical axis is +z in the camera frame, +x right,
/// +y down. Depth images store camera-space z, not ray length.
struct CameraModel {
  int width = 160;
  int height = 120;
  Scalar fx = 130.0;
  Scalar fy = 130.0;
  Scalar cx = 80.0;
  Scalar cy = 60.0;
  Scalar near_plane = 0.05;
  Scalar far_plane = 2.0;  // doubles as the no-hit depth sentinel

  void validate() const {
    if (width <= 0 || height <= 0) throw std::invalid_argument("camera: non-positive image size");
    if (fx <= 0 || fy <= 0) throw std::invalid_argument("camera: non-positive focal length");
    if (!(0 < near_plane && near_plane < far_plane))
      throw std::invalid_argument("camera: require 0 < near < far");
  }
};

// Unit-depth ray direction through pixel center (u, v), camera frame.
inline Vec3 pixel_ray(const CameraModel& cam, Scalar u, Scalar v) {
  return {(u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0};
}

// Perspective projection of a camera-frame point; caller checks z > 0.
inline Vec2 project_pixel(const CameraModel& cam, const Vec3& p_cam) {
  return {cam.fx * p_cam.x() / p_cam.z() + cam.cx, cam.fy * p_cam.y() / p_cam.z() + cam.cy};
}

// Inverse of project_pixel at a given z-depth.
inline Vec3 backproject(const CameraModel& cam, Scalar u, Scalar v, Scalar depth) {
  return {(u - cam.cx) * depth / cam.fx, (v - cam.cy) * depth / cam.fy, depth};
}

inline bool depth_valid(const CameraModel& cam, Scalar d) {
  return d > 0.0 && d < cam.far_plane;
}

/// Camera-to-world pose looking from `eye` toward `target` with +z along the
/// view direction. `up` picks the roll; falls back to +x when degenerate.
Isometry look_at(const Vec3& eye, const Vec3& target, const Vec3& up = Vec3::UnitZ());

}  // namespace hortimap
