#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "hortimap/arm.hpp"
#include "hortimap/rng.hpp"

using namespace hortimap;

namespace {

ArmModel planar_2r() {
  ArmModel arm;
  arm.joints = {
      {Vec3::UnitZ(), {1.0, 0, 0}, -M_PI / 2, M_PI / 2},
      {Vec3::UnitZ(), {1.0, 0, 0}, -M_PI / 2, M_PI / 2},
  };
  arm.steps_per_joint = 3;
  return arm;
}

}  // namespace

TEST_CASE("planar 2R forward kinematics matches the textbook formula") {
  const ArmModel arm = planar_2r();
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Scalar q1 = uniform(rng, -1.5, 1.5), q2 = uniform(rng, -1.5, 1.5);
    const Isometry t = forward_kinematics(arm, std::vector<Scalar>{q1, q2});
    const Vec3 expect(std::cos(q1) + std::cos(q1 + q2), std::sin(q1) + std::sin(q1 + q2), 0.0);
    CHECK((t.translation() - expect).norm() < 1e-12);
  }
}

TEST_CASE("all joints at zero give the chained link offsets") {
  const ArmModel arm = ArmModel::default_arm();
  std::vector<Scalar> q(arm.joints.size(), 0.0);
  const Isometry t = forward_kinematics(arm, q);
  Vec3 expect = Vec3::Zero();
  for (const auto& j : arm.joints) expect += j.offset;
  CHECK((t.translation() - expect).norm() < 1e-12);
  CHECK((t.linear() - Mat3::Identity()).norm() < 1e-12);
}

TEST_CASE("the 3-step planar grid enumerates nine hand-computed poses") {
  const ArmModel arm = planar_2r();
  const Workspace ws = reachable_workspace(arm);
  REQUIRE(ws.size() == 9);
  std::size_t i = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const Scalar q1 = -M_PI / 2 + a * (M_PI / 2);
      const Scalar q2 = -M_PI / 2 + b * (M_PI / 2);
      const Vec3 expect(std::cos(q1) + std::cos(q1 + q2), std::sin(q1) + std::sin(q1 + q2), 0.0);
      CHECK((ws.position(i) - expect).norm() < 1e-12);
      CHECK(ws.joints(i)[0] == doctest::Approx(q1));
      CHECK(ws.joints(i)[1] == doctest::Approx(q2));
      ++i;
    }
}

TEST_CASE("degenerate discretization and oversized grids are rejected") {
  ArmModel arm = planar_2r();
  arm.steps_per_joint = 1;
  CHECK_THROWS_AS(reachable_workspace(arm), std::invalid_argument);

  ArmModel big = ArmModel::default_arm();
  big.steps_per_joint = 9;  // 9^6 far beyond the cap
  CHECK_THROWS_AS(reachable_workspace(big), std::invalid_argument);

  ArmModel empty;
  CHECK_THROWS_AS(reachable_workspace(empty), std::invalid_argument);
}

TEST_CASE("default arm workspace fits under the pose cap") {
  const Workspace ws = reachable_workspace(ArmModel::default_arm());
  CHECK(ws.size() == 15625);  // 5^6
  CHECK(ws.size() <= 20000);
}

TEST_CASE("workspace nearest neighbor matches a linear scan") {
  const Workspace ws = reachable_workspace(ArmModel::default_arm());
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 q(uniform(rng, -0.8, 0.8), uniform(rng, -0.8, 0.8), uniform(rng, -0.8, 0.8));
    const auto got = ws.nearest(q);
    REQUIRE(got.has_value());

    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (std::size_t i = 0; i < ws.size(); ++i)
      best = std::min(best, (ws.position(i) - q).norm());
    CHECK(got->second == doctest::Approx(best).epsilon(1e-12));
    CHECK((ws.position(got->first) - q).norm() == doctest::Approx(got->second));
  }
}

TEST_CASE("joint limit validation") {
  ArmModel arm = planar_2r();
  arm.joints[0].lo = arm.joints[0].hi;
  CHECK_THROWS_AS(arm.validate(), std::invalid_argument);
}
