#include "hortimap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

namespace hortimap {

void EvalConfig::validate() const {
  if (tau <= 0) throw std::invalid_argument("eval config: tau must be positive");
  if (gt_surface_density <= 0)
    throw std::invalid_argument("eval config: gt_surface_density must be positive");
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

// Exact nearest-neighbor distances over a uniform grid; falls back to a plain
// scan for tiny or degenerate inputs.
class GridNN {
 public:
  explicit GridNN(std::span<const Vec3> pts) : pts_(pts) {
    if (pts.size() < 64) return;  // brute force is faster below this
    Vec3 lo = pts[0], hi = pts[0];
    for (const Vec3& p : pts) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Scalar vol = std::max<Scalar>((hi - lo).prod(), 0);
    cell_ = std::cbrt(std::max<Scalar>(vol, 1e-18) / pts.size());
    if (!(cell_ > 1e-9)) {
      cell_ = 0;  // collapsed extent, keep brute force
      return;
    }
    for (std::size_t i = 0; i < pts.size(); ++i)
      grid_[cell_of(pts[i])].push_back(static_cast<std::uint32_t>(i));
    CellKey c = cell_of(lo);
    min_cell_ = c;
    max_cell_ = cell_of(hi);
  }

  Scalar nearest_distance(const Vec3& q) const {
    if (cell_ == 0) {
      Scalar best = std::numeric_limits<Scalar>::infinity();
      for (const Vec3& p : pts_) best = std::min(best, (p - q).squaredNorm());
      return std::sqrt(best);
    }
    const CellKey c0 = cell_of(q);
    Scalar best2 = std::numeric_limits<Scalar>::infinity();
    const int r_cap =
        1 + std::max({std::abs(c0.x - min_cell_.x), std::abs(c0.x - max_cell_.x),
                      std::abs(c0.y - min_cell_.y), std::abs(c0.y - max_cell_.y),
                      std::abs(c0.z - min_cell_.z), std::abs(c0.z - max_cell_.z)});
    for (int r = 0; r <= r_cap; ++r) {
      if (best2 < std::numeric_limits<Scalar>::infinity()) {
        const Scalar lo = (r - 1) * cell_;
        if (lo > 0 && lo * lo > best2) break;
      }
      for (int dx = -r; dx <= r; ++dx)
        for (int dy = -r; dy <= r; ++dy)
          for (int dz = -r; dz <= r; ++dz) {
            if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != r) continue;
            const auto it = grid_.find({c0.x + dx, c0.y + dy, c0.z + dz});
            if (it == grid_.end()) continue;
            for (std::uint32_t i : it->second)
              best2 = std::min(best2, (pts_[i] - q).squaredNorm());
          }
    }
    return std::sqrt(best2);
  }

 private:
  CellKey cell_of(const Vec3& p) const {
    return {static_cast<std::int32_t>(std::floor(p.x() / cell_)),
            static_cast<std::int32_t>(std::floor(p.y() / cell_)),
            static_cast<std::int32_t>(std::floor(p.z() / cell_))};
  }

  std::span<const Vec3> pts_;
  Scalar cell_ = 0;
  CellKey min_cell_{0, 0, 0}, max_cell_{0, 0, 0};
  std::unordered_map<CellKey, std::vector<std::uint32_t>, CellHash> grid_;
};

}  // namespace

Scalar chamfer_distance(std::span<const Vec3> p, std::span<const Vec3> q) {
  if (p.empty() || q.empty())
    throw UndefinedMetricError("chamfer_distance: empty point cloud");
  const GridNN nn_q(q), nn_p(p);
  Scalar sum_pq = 0, sum_qp = 0;
  for (const Vec3& x : p) sum_pq += nn_q.nearest_distance(x);
  for (const Vec3& x : q) sum_qp += nn_p.nearest_distance(x);
  return sum_pq / p.size() + sum_qp / q.size();
}

PrecisionRecall precision_recall_f1(std::span<const Vec3> p, std::span<const Vec3> q, Scalar tau) {
  if (p.empty() || q.empty())
    throw UndefinedMetricError("precision_recall_f1: empty point cloud");
  if (tau <= 0) throw std::invalid_argument("precision_recall_f1: tau must be positive");

  const GridNN nn_q(q), nn_p(p);
  std::size_t hits_p = 0, hits_q = 0;
  for (const Vec3& x : p)
    if (nn_q.nearest_distance(x) < tau) ++hits_p;
  for (const Vec3& x : q)
    if (nn_p.nearest_distance(x) < tau) ++hits_q;

  PrecisionRecall pr;
  pr.precision = static_cast<Scalar>(hits_p) / p.size();
  pr.recall = static_cast<Scalar>(hits_q) / q.size();
  pr.f1 = (pr.precision + pr.recall) > 0
              ? 2.0 * pr.precision * pr.recall / (pr.precision + pr.recall)
              : 0.0;
  return pr;
}

Scalar volume_accuracy(Scalar v_est, Scalar v_gt) {
  if (v_gt <= 0) throw UndefinedMetricError("volume_accuracy: ground-truth volume is zero");
  return 100.0 * v_est / v_gt;
}

Scalar count_accuracy(int n_est, int n_gt) {
  if (n_gt <= 0) throw UndefinedMetricError("count_accuracy: ground-truth count is zero");
  return 100.0 * static_cast<Scalar>(n_est) / static_cast<Scalar>(n_gt);
}

}  // namespace hortimap
