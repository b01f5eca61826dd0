#pragma once

#include <span>

#include "hortimap/types.hpp"

namespace hortimap {

struct HullResult {
  Scalar volume = 0;
  bool degenerate = false;  // fewer than 4 points, or coplanar within tolerance
};

/// Exact 3D convex hull volume via an incremental hull. Points are processed
/// in a canonical lexicographic order so the result is input-order invariant.
/// Point sets whose best seed tetrahedron is flatter than `flat_eps` (meters)
/// report volume 0 with the degenerate flag set.
HullResult convex_hull_volume(std::span<const Vec3> points, Scalar flat_eps = 1e-9);

}  // namespace hortimap
