#include "hortimap/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

#include "hortimap/convex_hull.hpp"

namespace hortimap {

void ClusterConfig::validate() const {
  if (eps <= 0) throw std::invalid_argument("cluster config: eps must be positive");
  if (min_samples < 1) throw std::invalid_argument("cluster config: min_samples must be >= 1");
}

namespace {

struct CellKey {
  std::int32_t x, y, z;
  bool operator==(const CellKey&) const = default;
};
struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = static_cast<std::uint32_t>(k.x);
    h = h * 0x9e3779b97f4a7c15ULL + static_cast<std::uint32_t>(k.y);
    h = h * 0x9e3779b97f4a7c15ULL + static_cast<std::uint32_t>(k.z);
    return static_cast<std::size_t>(h ^ (h >> 31));
  }
};

class NeighborGrid {
 public:
  NeighborGrid(std::span<const Vec3> pts, Scalar eps) : pts_(pts), eps_(eps) {
    for (std::size_t i = 0; i < pts.size(); ++i) grid_[cell_of(pts[i])].push_back(i);
  }

  // Indices within eps (inclusive), ascending order; includes the query itself.
  std::vector<int> query(int i) const {
    std::vector<int> out;
    const Vec3& p = pts_[i];
    const CellKey c = cell_of(p);
    const Scalar eps2 = eps_ * eps_;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          const auto it = grid_.find({c.x + dx, c.y + dy, c.z + dz});
          if (it == grid_.end()) continue;
          for (std::size_t j : it->second)
            if ((pts_[j] - p).squaredNorm() <= eps2) out.push_back(static_cast<int>(j));
        }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  CellKey cell_of(const Vec3& p) const {
    return {static_cast<std::int32_t>(std::floor(p.x() / eps_)),
            static_cast<std::int32_t>(std::floor(p.y() / eps_)),
            static_cast<std::int32_t>(std::floor(p.z() / eps_))};
  }

  std::span<const Vec3> pts_;
  Scalar eps_;
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> grid_;
};

}  // namespace

Clustering dbscan(std::span<const Vec3> points, const ClusterConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(points.size());
  constexpr int kUnvisited = -2, kNoise = -1;
  std::vector<int> label(n, kUnvisited);
  const NeighborGrid grid(points, cfg.eps);

  Clustering out;
  for (int i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    std::vector<int> neigh = grid.query(i);
    if (static_cast<int>(neigh.size()) < cfg.min_samples) {
      label[i] = kNoise;
      continue;
    }
    const int cid = static_cast<int>(out.clusters.size());
    out.clusters.emplace_back();
    label[i] = cid;
    out.clusters[cid].push_back(i);

    std::vector<int> frontier = std::move(neigh);
    for (std::size_t f = 0; f < frontier.size(); ++f) {
      const int j = frontier[f];
      if (label[j] == kNoise) {
        label[j] = cid;  // border point adopted by the cluster
        out.clusters[cid].push_back(j);
      }
      if (label[j] != kUnvisited) continue;
      label[j] = cid;
      out.clusters[cid].push_back(j);
      std::vector<int> nj = grid.query(j);
      if (static_cast<int>(nj.size()) >= cfg.min_samples)
        frontier.insert(frontier.end(), nj.begin(), nj.end());
    }
    std::sort(out.clusters[cid].begin(), out.clusters[cid].end());
  }
  for (int i = 0; i < n; ++i)
    if (label[i] == kNoise) out.noise.push_back(i);
  return out;
}

PointCloud extract_target_points(std::span<const Gaussian3D> splats, SemanticClass target_class,
                                 Scalar min_opacity) {
  PointCloud out;
  for (const Gaussian3D& g : splats) {
    if (g.opacity < min_opacity) continue;
    int arg = 0;
    g.semantic.maxCoeff(&arg);
    if (arg == static_cast<int>(target_class)) out.push_back(g.mu);
  }
  return out;
}

FruitReport fruit_report_from_points(PointCloud points, const ClusterConfig& cfg) {
  std::sort(points.begin(), points.end(), [](const Vec3& l, const Vec3& r) {
    if (l.x() != r.x()) return l.x() < r.x();
    if (l.y() != r.y()) return l.y() < r.y();
    return l.z() < r.z();
  });

  const Clustering clustering = dbscan(points, cfg);

  FruitReport report;
  report.count = static_cast<int>(clustering.clusters.size());
  for (const auto& idx : clustering.clusters) {
    FruitCluster cluster;
    cluster.point_indices = idx;
    std::vector<Vec3> pts;
    pts.reserve(idx.size());
    for (int i : idx) {
      pts.push_back(points[i]);
      cluster.centroid += points[i];
    }
    cluster.centroid /= static_cast<Scalar>(idx.size());
    const HullResult hull = convex_hull_volume(pts);
    cluster.hull_volume = hull.volume;
    cluster.degenerate_hull = hull.degenerate;
    report.total_volume += hull.volume;
    report.clusters.push_back(std::move(cluster));
  }
  return report;
}

FruitReport fruit_report(std::span<const Gaussian3D> splats, const ClusterConfig& cfg,
                         SemanticClass target_class, Scalar min_opacity) {
  return fruit_report_from_points(extract_target_points(splats, target_class, min_opacity), cfg);
}

}  // namespace hortimap
