#include "hortimap/convex_hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace hortimap {

namespace {

struct Face {
  int a, b, c;
  Vec3 normal;  // outward, unnormalized
  Scalar offset; // normal . vertex
  bool alive = true;
};

Scalar signed_dist(const Face& f, const Vec3& p) { return f.normal.dot(p) - f.offset; }

Face make_face(int a, int b, int c, const std::vector<Vec3>& pts) {
  Face f{a, b, c, Vec3::Zero(), 0, true};
  f.normal = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
  f.offset = f.normal.dot(pts[a]);
  return f;
}

}  // namespace

HullResult convex_hull_volume(std::span<const Vec3> points, Scalar flat_eps) {
  if (points.size() < 4) return {0.0, true};

  std::vector<Vec3> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const Vec3& l, const Vec3& r) {
    if (l.x() != r.x()) return l.x() < r.x();
    if (l.y() != r.y()) return l.y() < r.y();
    return l.z() < r.z();
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec3& l, const Vec3& r) { return l == r; }),
            pts.end());
  const int n = static_cast<int>(pts.size());
  if (n < 4) return {0.0, true};

  // Seed tetrahedron: extreme point pair, then max line distance, then max
  // plane distance. Degenerate inputs bail out at each stage.
  int i1 = 1;
  for (int i = 1; i < n; ++i)
    if ((pts[i] - pts[0]).squaredNorm() > (pts[i1] - pts[0]).squaredNorm()) i1 = i;
  if ((pts[i1] - pts[0]).norm() < flat_eps) return {0.0, true};

  const Vec3 line = (pts[i1] - pts[0]).normalized();
  int i2 = -1;
  Scalar best_line = flat_eps;
  for (int i = 0; i < n; ++i) {
    const Vec3 d = pts[i] - pts[0];
    const Scalar dist = (d - d.dot(line) * line).norm();
    if (dist > best_line) {
      best_line = dist;
      i2 = i;
    }
  }
  if (i2 < 0) return {0.0, true};

  Vec3 plane_n = (pts[i1] - pts[0]).cross(pts[i2] - pts[0]).normalized();
  int i3 = -1;
  Scalar best_plane = flat_eps;
  for (int i = 0; i < n; ++i) {
    const Scalar dist = std::abs(plane_n.dot(pts[i] - pts[0]));
    if (dist > best_plane) {
      best_plane = dist;
      i3 = i;
    }
  }
  if (i3 < 0) return {0.0, true};  // coplanar within tolerance

  std::vector<Face> faces;
  {
    const int t[4] = {0, i1, i2, i3};
    const Vec3 centroid = (pts[t[0]] + pts[t[1]] + pts[t[2]] + pts[t[3]]) / 4.0;
    const int tri[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    for (const auto& tr : tri) {
      Face f = make_face(t[tr[0]], t[tr[1]], t[tr[2]], pts);
      if (signed_dist(f, centroid) > 0) f = make_face(f.a, f.c, f.b, pts);
      faces.push_back(f);
    }
  }

  // Visibility epsilon scales with the data so slightly perturbed coplanar
  // points do not generate sliver faces.
  Vec3 lo = pts[0], hi = pts[0];
  for (const Vec3& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Scalar scale = std::max<Scalar>((hi - lo).norm(), 1e-12);
  const Scalar eps_vis = 1e-12 * scale;

  for (int i = 0; i < n; ++i) {
    if (i == i1 || i == i2 || i == i3 || i == 0) continue;

    std::vector<int> visible;
    for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi) {
      if (!faces[fi].alive) continue;
      // Distance normalized by face normal length keeps the test scale-free.
      if (signed_dist(faces[fi], pts[i]) > eps_vis * faces[fi].normal.norm()) visible.push_back(fi);
    }
    if (visible.empty()) continue;

    // Horizon: directed edges of visible faces whose reverse is not visible.
    std::map<std::pair<int, int>, int> edge_count;
    for (int fi : visible) {
      const Face& f = faces[fi];
      edge_count[{f.a, f.b}]++;
      edge_count[{f.b, f.c}]++;
      edge_count[{f.c, f.a}]++;
    }
    for (int fi : visible) faces[fi].alive = false;
    for (const auto& [edge, cnt] : edge_count) {
      (void)cnt;
      if (edge_count.count({edge.second, edge.first})) continue;  // interior edge
      faces.push_back(make_face(edge.first, edge.second, i, pts));
    }
  }

  // Divergence-theorem volume over the surviving faces.
  Vec3 origin = Vec3::Zero();
  int alive = 0;
  for (const Face& f : faces)
    if (f.alive) {
      origin += pts[f.a];
      ++alive;
    }
  origin /= std::max(alive, 1);

  Scalar volume = 0;
  for (const Face& f : faces) {
    if (!f.alive) continue;
    volume += (pts[f.a] - origin).dot((pts[f.b] - origin).cross(pts[f.c] - origin));
  }
  return {volume / 6.0, false};
}

}  // namespace hortimap
