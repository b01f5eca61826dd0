#include "hortimap/arm.hpp"

#include <algorithm>
#include <stdexcept>

namespace hortimap {

void ArmModel::validate() const {
  if (joints.empty()) throw std::invalid_argument("arm: needs at least one joint");
  for (const auto& j : joints) {
    if (!(j.lo < j.hi)) throw std::invalid_argument("arm: joint limits must satisfy lo < hi");
    if (j.axis.norm() < 1e-12) throw std::invalid_argument("arm: zero joint axis");
  }
}

ArmModel ArmModel::default_arm() {
  ArmModel arm;
  const Vec3 z = Vec3::UnitZ(), y = Vec3::UnitY();
  arm.joints = {
      {z, {0, 0, 0.10}, -M_PI, M_PI},
      {y, {0, 0, 0.10}, -1.6, 1.6},
      {y, {0, 0, 0.10}, -2.2, 2.2},
      {z, {0, 0, 0.08}, -M_PI, M_PI},
      {y, {0, 0, 0.07}, -1.6, 1.6},
      {z, {0, 0, 0.05}, -M_PI, M_PI},
  };
  return arm;
}

Isometry forward_kinematics(const ArmModel& arm, std::span<const Scalar> q) {
  if (q.size() != arm.joints.size())
    throw std::invalid_argument("forward_kinematics: joint vector size mismatch");
  Isometry t = Isometry::Identity();
  for (std::size_t i = 0; i < arm.joints.size(); ++i) {
    const RevoluteJoint& j = arm.joints[i];
    t = t * Eigen::AngleAxis<Scalar>(q[i], j.axis.normalized()) *
        Eigen::Translation<Scalar, 3>(j.offset);
  }
  return t;
}

std::size_t Workspace::CellHash::operator()(const CellKey& k) const {
  std::uint64_t h = static_cast<std::uint32_t>(k.x);
  h = h * 0x9e3779b97f4a7c15ULL + static_cast<std::uint32_t>(k.y);
  h = h * 0x9e3779b97f4a7c15ULL + static_cast<std::uint32_t>(k.z);
  return static_cast<std::size_t>(h ^ (h >> 31));
}

Workspace::CellKey Workspace::cell_of(const Vec3& p) const {
  return {static_cast<std::int32_t>(std::floor(p.x() / cell_size_)),
          static_cast<std::int32_t>(std::floor(p.y() / cell_size_)),
          static_cast<std::int32_t>(std::floor(p.z() / cell_size_))};
}

Workspace::Workspace(std::vector<Vec3> positions, std::vector<JointVec> joints, Scalar cell_size)
    : positions_(std::move(positions)), joints_(std::move(joints)), cell_size_(cell_size) {
  if (positions_.size() != joints_.size())
    throw std::invalid_argument("workspace: positions/joints size mismatch");
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    const CellKey c = cell_of(positions_[i]);
    grid_[c].push_back(static_cast<std::uint32_t>(i));
    if (i == 0) {
      min_cell_ = max_cell_ = c;
    } else {
      min_cell_ = {std::min(min_cell_.x, c.x), std::min(min_cell_.y, c.y),
                   std::min(min_cell_.z, c.z)};
      max_cell_ = {std::max(max_cell_.x, c.x), std::max(max_cell_.y, c.y),
                   std::max(max_cell_.z, c.z)};
    }
  }
}

std::optional<std::pair<std::size_t, Scalar>> Workspace::nearest(const Vec3& p) const {
  if (positions_.empty()) return std::nullopt;

  const CellKey c0 = cell_of(p);
  std::size_t best = 0;
  Scalar best_d2 = std::numeric_limits<Scalar>::infinity();

  // Expanding Chebyshev shells; a cell at ring r cannot hold anything closer
  // than (r-1) * cell_size, which bounds the search once a candidate exists.
  const int r_cap =
      1 + std::max({std::abs(c0.x - min_cell_.x), std::abs(c0.x - max_cell_.x),
                    std::abs(c0.y - min_cell_.y), std::abs(c0.y - max_cell_.y),
                    std::abs(c0.z - min_cell_.z), std::abs(c0.z - max_cell_.z)});
  for (int r = 0; r <= r_cap; ++r) {
    if (best_d2 < std::numeric_limits<Scalar>::infinity()) {
      const Scalar ring_lo = (r - 1) * cell_size_;
      if (ring_lo > 0 && ring_lo * ring_lo > best_d2) break;
    }
    for (int dx = -r; dx <= r; ++dx)
      for (int dy = -r; dy <= r; ++dy)
        for (int dz = -r; dz <= r; ++dz) {
          if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != r) continue;
          const auto it = grid_.find({c0.x + dx, c0.y + dy, c0.z + dz});
          if (it == grid_.end()) continue;
          for (std::uint32_t i : it->second) {
            const Scalar d2 = (positions_[i] - p).squaredNorm();
            if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
              best_d2 = d2;
              best = i;
            }
          }
        }
  }
  return std::make_pair(best, std::sqrt(best_d2));
}

Workspace reachable_workspace(const ArmModel& arm, std::size_t max_poses) {
  arm.validate();
  if (arm.steps_per_joint < 2)
    throw std::invalid_argument("reachable_workspace: need at least 2 steps per joint");

  std::size_t total = 1;
  for (std::size_t i = 0; i < arm.joints.size(); ++i) {
    total *= static_cast<std::size_t>(arm.steps_per_joint);
    if (total > max_poses)
      throw std::invalid_argument("reachable_workspace: joint grid exceeds pose cap");
  }

  std::vector<Vec3> positions;
  std::vector<JointVec> joints;
  positions.reserve(total);
  joints.reserve(total);

  const int nj = static_cast<int>(arm.joints.size());
  std::vector<int> idx(nj, 0);
  std::vector<Scalar> q(nj);
  while (true) {
    for (int i = 0; i < nj; ++i) {
      const auto& j = arm.joints[i];
      q[i] = j.lo + (j.hi - j.lo) * idx[i] / static_cast<Scalar>(arm.steps_per_joint - 1);
    }
    const Isometry t = forward_kinematics(arm, q);
    positions.push_back(t.translation());
    joints.push_back(Eigen::Map<const JointVec>(q.data(), nj));

    int i = nj - 1;
    while (i >= 0 && ++idx[i] == arm.steps_per_joint) idx[i--] = 0;
    if (i < 0) break;
  }
  return Workspace(std::move(positions), std::move(joints), 0.05);
}

}  // namespace hortimap
