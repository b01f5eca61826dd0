#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hortimap/convex_hull.hpp"
#include "hortimap/rng.hpp"

using namespace hortimap;

namespace {

std::vector<Vec3> random_cloud(Rng& rng, int n, Scalar extent) {
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i)
    pts.emplace_back(uniform(rng, -extent, extent), uniform(rng, -extent, extent),
                     uniform(rng, -extent, extent));
  return pts;
}

std::vector<Vec3> fibonacci_sphere(int n, Scalar r) {
  std::vector<Vec3> pts;
  const Scalar golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const Scalar z = 1.0 - 2.0 * (i + 0.5) / n;
    const Scalar s = std::sqrt(1.0 - z * z);
    pts.emplace_back(r * s * std::cos(golden * i), r * s * std::sin(golden * i), r * z);
  }
  return pts;
}

}  // namespace

TEST_CASE("cube volume is exact") {
  std::vector<Vec3> corners;
  for (int x = 0; x <= 1; ++x)
    for (int y = 0; y <= 1; ++y)
      for (int z = 0; z <= 1; ++z) corners.emplace_back(0.1 * x, 0.1 * y, 0.1 * z);
  const HullResult hull = convex_hull_volume(corners);
  CHECK(!hull.degenerate);
  CHECK(std::abs(hull.volume - 1.0e-3) < 1e-15);

  // interior points must not change the hull
  corners.emplace_back(0.05, 0.05, 0.05);
  corners.emplace_back(0.02, 0.07, 0.04);
  const HullResult hull2 = convex_hull_volume(corners);
  CHECK(std::abs(hull2.volume - 1.0e-3) < 1e-15);
}

TEST_CASE("regular tetrahedron volume matches edge^3 / (6 sqrt(2))") {
  const Scalar a = 0.1;
  const std::vector<Vec3> verts = {
      {0, 0, 0},
      {a, 0, 0},
      {a / 2, a * std::sqrt(3.0) / 2, 0},
      {a / 2, a * std::sqrt(3.0) / 6, a * std::sqrt(2.0 / 3.0)},
  };
  const HullResult hull = convex_hull_volume(verts);
  CHECK(!hull.degenerate);
  CHECK(hull.volume == doctest::Approx(a * a * a / (6.0 * std::sqrt(2.0))).epsilon(1e-9));
}

TEST_CASE("degenerate inputs yield zero volume with the flag set") {
  CHECK(convex_hull_volume(std::vector<Vec3>{}).degenerate);
  CHECK(convex_hull_volume(std::vector<Vec3>{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}).degenerate);

  // coplanar cloud
  Rng rng(4);
  std::vector<Vec3> flat;
  for (int i = 0; i < 100; ++i)
    flat.emplace_back(uniform(rng, -1, 1), uniform(rng, -1, 1), 0.37);
  const HullResult hull = convex_hull_volume(flat);
  CHECK(hull.degenerate);
  CHECK(hull.volume == 0.0);

  // collinear cloud
  std::vector<Vec3> line;
  for (int i = 0; i < 50; ++i) line.emplace_back(i * 0.01, 2 * i * 0.01, -i * 0.01);
  CHECK(convex_hull_volume(line).degenerate);
}

TEST_CASE("volume is invariant to rotation and translation") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = random_cloud(rng, 150, 0.2);
    const Scalar base = convex_hull_volume(pts).volume;

    const Vec3 axis =
        Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)).normalized();
    const Eigen::AngleAxis<Scalar> rot(uniform(rng, 0, 3.0), axis);
    const Vec3 shift(uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -5, 5));
    std::vector<Vec3> moved;
    for (const Vec3& p : pts) moved.push_back(rot * p + shift);

    const Scalar vol = convex_hull_volume(moved).volume;
    CHECK(std::abs(vol - base) <= 1e-9 * std::max<Scalar>(base, 1e-30));
  }
}

TEST_CASE("hull volume is monotone under point insertion") {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    auto pts = random_cloud(rng, 60, 0.15);
    const Scalar small = convex_hull_volume(pts).volume;
    auto more = pts;
    for (const Vec3& p : random_cloud(rng, 40, 0.18)) more.push_back(p);
    const Scalar big = convex_hull_volume(more).volume;
    CHECK(big >= small - 1e-12);
  }
}

TEST_CASE("hull of a dense sphere shell approaches the sphere volume from below") {
  const Scalar r = 0.03;
  const Scalar sphere = 4.0 / 3.0 * std::numbers::pi * r * r * r;
  const HullResult hull = convex_hull_volume(fibonacci_sphere(600, r));
  CHECK(!hull.degenerate);
  CHECK(hull.volume < sphere * (1.0 + 1e-9));
  CHECK(hull.volume > 0.85 * sphere);
}

TEST_CASE("hull volume does not depend on input order") {
  Rng rng(31);
  auto pts = random_cloud(rng, 120, 0.1);
  const Scalar base = convex_hull_volume(pts).volume;
  std::reverse(pts.begin(), pts.end());
  CHECK(convex_hull_volume(pts).volume == doctest::Approx(base).epsilon(1e-12));
}
