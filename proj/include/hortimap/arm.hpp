#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hortimap/types.hpp"

namespace hortimap {

struct RevoluteJoint {
  Vec3 axis = Vec3::UnitZ();   // rotation axis in the parent link frame
  Vec3 offset = Vec3::Zero();  // link translation applied after the rotation
  Scalar lo = -M_PI;
  Scalar hi = M_PI;
};

struct ArmModel {
  std::vector<RevoluteJoint> joints;
  int steps_per_joint = 5;  // joint-grid discretization for the workspace

  void validate() const;

  /// 6R chain with link lengths summing to 0.5 m, a stand-in for a small
  /// tabletop manipulator.
  static ArmModel default_arm();
};

/// End-effector pose in the arm base frame: product over joints of
/// Rot(axis_i, q_i) * Trans(offset_i).
Isometry forward_kinematics(const ArmModel& arm, std::span<const Scalar> q);

/// FK poses over the full joint grid with a position index for nearest
/// neighbor queries. Poses are in the arm base frame.
class Workspace {
 public:
  Workspace(std::vector<Vec3> positions, std::vector<JointVec> joints, Scalar cell_size);

  std::size_t size() const { return positions_.size(); }
  const Vec3& position(std::size_t i) const { return positions_[i]; }
  const JointVec& joints(std::size_t i) const { return joints_[i]; }

  /// Exact nearest workspace pose by position. Returns (index, distance).
  std::optional<std::pair<std::size_t, Scalar>> nearest(const Vec3& p) const;

 private:
  struct CellKey {
    std::int32_t x, y, z;
    bool operator==(const CellKey&) const = default;
  };
  struct CellHash {
    std::size_t operator()(const CellKey& k) const;
  };
  CellKey cell_of(const Vec3& p) const;

  std::vector<Vec3> positions_;
  std::vector<JointVec> joints_;
  Scalar cell_size_;
  CellKey min_cell_{0, 0, 0}, max_cell_{0, 0, 0};
  std::unordered_map<CellKey, std::vector<std::uint32_t>, CellHash> grid_;
};

/// Dense FK sweep of the discretized joint space. Throws when the grid would
/// exceed max_poses or a joint has fewer than 2 steps.
Workspace reachable_workspace(const ArmModel& arm, std::size_t max_poses = 20000);

}  // namespace hortimap
