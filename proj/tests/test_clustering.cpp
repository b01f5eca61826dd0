#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hortimap/clustering.hpp"
#include "hortimap/rng.hpp"

using namespace hortimap;

namespace {

// Independent O(n^2) DBSCAN with the same expansion semantics: index-order
// seeding, sorted neighbor lists, noise adopted as border points.
Clustering dbscan_reference(const std::vector<Vec3>& pts, const ClusterConfig& cfg) {
  const int n = static_cast<int>(pts.size());
  const Scalar eps2 = cfg.eps * cfg.eps;
  auto neighbors = [&](int i) {
    std::vector<int> out;
    for (int j = 0; j < n; ++j)
      if ((pts[i] - pts[j]).squaredNorm() <= eps2) out.push_back(j);
    return out;
  };

  constexpr int kUnvisited = -2, kNoise = -1;
  std::vector<int> label(n, kUnvisited);
  Clustering result;
  for (int i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    auto seed = neighbors(i);
    if (static_cast<int>(seed.size()) < cfg.min_samples) {
      label[i] = kNoise;
      continue;
    }
    const int cid = static_cast<int>(result.clusters.size());
    result.clusters.emplace_back();
    label[i] = cid;
    result.clusters[cid].push_back(i);
    for (std::size_t f = 0; f < seed.size(); ++f) {
      const int j = seed[f];
      if (label[j] == kNoise) {
        label[j] = cid;
        result.clusters[cid].push_back(j);
      }
      if (label[j] != kUnvisited) continue;
      label[j] = cid;
      result.clusters[cid].push_back(j);
      auto nj = neighbors(j);
      if (static_cast<int>(nj.size()) >= cfg.min_samples)
        seed.insert(seed.end(), nj.begin(), nj.end());
    }
    std::sort(result.clusters[cid].begin(), result.clusters[cid].end());
  }
  for (int i = 0; i < n; ++i)
    if (label[i] == kNoise) result.noise.push_back(i);
  return result;
}

std::vector<Vec3> ball(Rng& rng, const Vec3& center, Scalar radius, int n) {
  std::vector<Vec3> pts;
  while (static_cast<int>(pts.size()) < n) {
    const Vec3 p(uniform(rng, -radius, radius), uniform(rng, -radius, radius),
                 uniform(rng, -radius, radius));
    if (p.norm() <= radius) pts.push_back(center + p);
  }
  return pts;
}

std::vector<Vec3> fruit_shell(const Vec3& center, Scalar r, int n) {
  std::vector<Vec3> pts;
  const Scalar golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const Scalar z = 1.0 - 2.0 * (i + 0.5) / n;
    const Scalar s = std::sqrt(1.0 - z * z);
    pts.push_back(center + r * Vec3(s * std::cos(golden * i), s * std::sin(golden * i), z));
  }
  return pts;
}

}  // namespace

TEST_CASE("a tight ball forms one cluster with no noise") {
  Rng rng(1);
  const auto pts = ball(rng, {0.5, 0.5, 0.5}, 0.005, 20);
  ClusterConfig cfg;  // eps 0.02, min 10
  const Clustering c = dbscan(pts, cfg);
  REQUIRE(c.clusters.size() == 1);
  CHECK(c.clusters[0].size() == 20);
  CHECK(c.noise.empty());
}

TEST_CASE("isolated points below min_samples are all noise") {
  std::vector<Vec3> pts;
  for (int i = 0; i < 5; ++i) pts.emplace_back(i * 1.0, 0, 0);
  const Clustering c = dbscan(pts, ClusterConfig{});
  CHECK(c.clusters.empty());
  CHECK(c.noise.size() == 5);
}

TEST_CASE("two separated blobs form two clusters matching the reference") {
  Rng rng(2);
  auto pts = ball(rng, {0, 0, 0}, 0.008, 50);
  for (const Vec3& p : ball(rng, {0.2, 0, 0}, 0.008, 50)) pts.push_back(p);
  ClusterConfig cfg;
  const Clustering fast = dbscan(pts, cfg);
  const Clustering ref = dbscan_reference(pts, cfg);
  REQUIRE(fast.clusters.size() == 2);
  CHECK(fast.clusters == ref.clusters);
  CHECK(fast.noise == ref.noise);
}

TEST_CASE("grid DBSCAN equals the O(n^2) reference on 100 random instances") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = uniform_int(rng, 0, 300);
    std::vector<Vec3> pts;
    const int blobs = uniform_int(rng, 1, 5);
    for (int b = 0; b < blobs && static_cast<int>(pts.size()) < n; ++b) {
      const Vec3 c(uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3));
      const int k = std::min<int>(uniform_int(rng, 1, 80), n - static_cast<int>(pts.size()));
      for (const Vec3& p : ball(rng, c, uniform(rng, 0.004, 0.05), k)) pts.push_back(p);
    }
    ClusterConfig cfg;
    cfg.eps = uniform(rng, 0.008, 0.04);
    cfg.min_samples = uniform_int(rng, 2, 12);

    const Clustering fast = dbscan(pts, cfg);
    const Clustering ref = dbscan_reference(pts, cfg);
    CHECK(fast.clusters == ref.clusters);
    CHECK(fast.noise == ref.noise);
  }
}

TEST_CASE("every cluster satisfies the density contract and the output partitions") {
  Rng rng(9);
  std::vector<Vec3> pts = ball(rng, {0, 0, 0}, 0.03, 120);
  for (const Vec3& p : ball(rng, {0.5, 0, 0}, 0.02, 60)) pts.push_back(p);
  for (int i = 0; i < 10; ++i)
    pts.emplace_back(uniform(rng, 1, 2), uniform(rng, 1, 2), uniform(rng, 1, 2));

  ClusterConfig cfg;
  cfg.eps = 0.02;
  cfg.min_samples = 8;
  const Clustering c = dbscan(pts, cfg);

  std::vector<int> seen(pts.size(), 0);
  for (const auto& cluster : c.clusters) {
    CHECK(static_cast<int>(cluster.size()) >= cfg.min_samples);
    for (int i : cluster) seen[i]++;
  }
  for (int i : c.noise) seen[i]++;
  for (int count : seen) CHECK(count == 1);
}

TEST_CASE("extract_target_points matches a plain filter") {
  Rng rng(5);
  std::vector<Gaussian3D> splats;
  for (int i = 0; i < 200; ++i) {
    Gaussian3D g;
    g.mu = Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    g.opacity = uniform(rng, 0, 1);
    ClassVec s = ClassVec::Zero();
    s[uniform_int(rng, 0, 2)] = 0.8;
    s.array() += 0.1;
    g.semantic = s / s.sum();
    splats.push_back(g);
  }
  const PointCloud got = extract_target_points(splats, SemanticClass::kFruit, 0.3);

  PointCloud expect;
  for (const auto& g : splats) {
    int arg = 0;
    g.semantic.maxCoeff(&arg);
    if (arg == 0 && g.opacity >= 0.3) expect.push_back(g.mu);
  }
  REQUIRE(got.size() == expect.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == expect[i]);

  CHECK(extract_target_points({}, SemanticClass::kFruit).empty());
}

TEST_CASE("fruit_report composes extraction, clustering and hull volumes") {
  CHECK(fruit_report({}, ClusterConfig{}).count == 0);

  std::vector<Gaussian3D> splats;
  auto add_shell = [&](const Vec3& c, Scalar r) {
    for (const Vec3& p : fruit_shell(c, r, 200)) {
      Gaussian3D g;
      g.mu = p;
      g.opacity = 0.8;
      g.semantic = ClassVec::Zero();
      g.semantic[0] = 1.0;
      splats.push_back(g);
    }
  };
  const Scalar r = 0.03;
  add_shell({0, 0, 0}, r);

  ClusterConfig cfg;  // eps 0.02 spans the shell point spacing
  FruitReport rep = fruit_report(splats, cfg);
  REQUIRE(rep.count == 1);
  const Scalar sphere = 4.0 / 3.0 * std::numbers::pi * r * r * r;
  CHECK(rep.total_volume == doctest::Approx(sphere).epsilon(0.15));
  CHECK((rep.clusters[0].centroid - Vec3(0, 0, 0)).norm() < 1e-6);

  add_shell({0.3, 0.1, 0}, r);
  rep = fruit_report(splats, cfg);
  CHECK(rep.count == 2);
}
