#include "tetherswarm/tether.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

namespace tetherswarm {
namespace {

TetherParams elastic(double rest, double k, double c) {
  TetherParams p;
  p.kind = TetherKind::Elastic;
  p.rest_length = rest;
  p.stiffness = k;
  p.damping = c;
  return p;
}

TEST(TetherForce, SlackLeashIsZero) {
  const TetherForce f = tether_force({0, 0, 0.4}, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
                                     elastic(0.5, 50, 1));
  EXPECT_FALSE(f.taut);
  EXPECT_EQ(f.tension, 0.0);
  EXPECT_EQ(f.on_finger, Vec3::Zero());
  EXPECT_EQ(f.on_drone, Vec3::Zero());
}

TEST(TetherForce, ElasticSpringLaw) {
  const Vec3 finger(0.1, 0.2, 0.8);
  const TetherForce f = tether_force(finger + Vec3(0, 0, 0.52), Vec3::Zero(), finger,
                                     Vec3::Zero(), elastic(0.5, 50, 0.3));
  EXPECT_TRUE(f.taut);
  EXPECT_NEAR(f.tension, 1.0, 1e-12);
  EXPECT_NEAR(f.on_finger.z(), 1.0, 1e-12);
  EXPECT_EQ(f.on_finger.x(), 0.0);
  EXPECT_EQ(f.on_drone, -f.on_finger);
}

TEST(TetherForce, FastSlackeningClampsToZero) {
  // Stretched by 1 cm but closing at 1 m/s: 50*0.01 - 2*1 < 0.
  const TetherForce f = tether_force({0, 0, 0.51}, {0, 0, -1.0}, Vec3::Zero(), Vec3::Zero(),
                                     elastic(0.5, 50, 2.0));
  EXPECT_TRUE(f.taut);
  EXPECT_EQ(f.tension, 0.0);
  EXPECT_EQ(f.on_finger, Vec3::Zero());
}

TEST(TetherForce, InextensibleUsesPenaltyConstants) {
  TetherParams p;
  p.kind = TetherKind::Inextensible;
  p.rest_length = 0.5;
  p.constraint_stiffness = 2000;
  p.constraint_damping = 10;
  const TetherForce f = tether_force({0, 0, 0.5005}, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), p);
  EXPECT_NEAR(f.tension, 1.0, 1e-9);
  const TetherForce moving =
      tether_force({0, 0, 0.5005}, {0, 0, 0.01}, Vec3::Zero(), Vec3::Zero(), p);
  EXPECT_NEAR(moving.tension, 1.1, 1e-9);
}

TEST(TetherForce, CoincidentEndpointsAreDegenerate) {
  EXPECT_THROW(tether_force(Vec3::Ones(), Vec3::Zero(), Vec3::Ones(), Vec3::Zero(),
                            elastic(0.5, 50, 0)),
               DegenerateGeometryError);
}

TEST(TetherForce, ContinuousAtRestLength) {
  const TetherParams p = elastic(0.5, 50, 0.0);
  const double eps = 1e-12;
  const TetherForce below =
      tether_force({0, 0, 0.5 - eps}, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), p);
  const TetherForce above =
      tether_force({0, 0, 0.5 + eps}, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), p);
  EXPECT_EQ(below.tension, 0.0);
  EXPECT_LT(above.tension, 1e-9);
}

// Random endpoints, velocities and leash parameters.
struct TetherCase {
  Vec3 attach, attach_vel, finger, finger_vel;
  TetherParams params;
};

TetherCase random_case(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-1.0, 1.0);
  std::uniform_real_distribution<double> vel(-3.0, 3.0);
  std::uniform_real_distribution<double> rest(0.05, 1.5);
  std::uniform_real_distribution<double> k(0.0, 3000.0);
  std::uniform_real_distribution<double> c(0.0, 20.0);
  TetherCase tc;
  tc.attach = {pos(rng), pos(rng), pos(rng)};
  tc.finger = {pos(rng), pos(rng), pos(rng)};
  tc.attach_vel = {vel(rng), vel(rng), vel(rng)};
  tc.finger_vel = {vel(rng), vel(rng), vel(rng)};
  tc.params.kind = rng() % 2 ? TetherKind::Elastic : TetherKind::Inextensible;
  tc.params.rest_length = rest(rng);
  tc.params.stiffness = k(rng);
  tc.params.damping = c(rng);
  tc.params.constraint_stiffness = k(rng);
  tc.params.constraint_damping = c(rng);
  return tc;
}

TEST(TetherForceProperty, ActionReactionTensionOnlyAndDirection) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20000; ++i) {
    const TetherCase tc = random_case(rng);
    const TetherForce f =
        tether_force(tc.attach, tc.attach_vel, tc.finger, tc.finger_vel, tc.params);
    ASSERT_EQ(f.on_finger + f.on_drone, Vec3::Zero());
    ASSERT_GE(f.tension, 0.0);
    ASSERT_NEAR(f.on_finger.norm(), f.tension, 1e-12 * std::max(1.0, f.tension));
    const Vec3 line = tc.attach - tc.finger;
    if (line.norm() < tc.params.rest_length) {
      ASSERT_EQ(f.on_finger, Vec3::Zero());
    }
    ASSERT_LE(f.on_finger.cross(line).norm(), 1e-12 * f.tension * line.norm() + 1e-300);
    ASSERT_GE(f.on_finger.dot(line), 0.0);
  }
}

TEST(TetherForceProperty, FrameIndependence) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> a(-3.14, 3.14);
  for (int i = 0; i < 2000; ++i) {
    const TetherCase tc = random_case(rng);
    const Mat3 rot = (Eigen::AngleAxisd(a(rng), Vec3::UnitZ()) *
                      Eigen::AngleAxisd(a(rng), Vec3::UnitY()) *
                      Eigen::AngleAxisd(a(rng), Vec3::UnitX()))
                         .toRotationMatrix();
    const TetherForce f =
        tether_force(tc.attach, tc.attach_vel, tc.finger, tc.finger_vel, tc.params);
    const TetherForce g = tether_force(rot * tc.attach, rot * tc.attach_vel, rot * tc.finger,
                                       rot * tc.finger_vel, tc.params);
    const double scale = std::max(1.0, f.tension);
    EXPECT_LE((rot * f.on_finger - g.on_finger).norm(), 1e-12 * scale);
    EXPECT_LE((rot * f.on_drone - g.on_drone).norm(), 1e-12 * scale);
  }
}

TEST(SumFingerForces, EmptyAndCancelling) {
  EXPECT_EQ(sum_finger_forces({}), Vec3::Zero());
  TetherForce up, down;
  up.on_finger = {0, 0, 1};
  down.on_finger = {0, 0, -1};
  const std::vector<TetherForce> v{up, down};
  EXPECT_EQ(sum_finger_forces(v), Vec3::Zero());
}

TEST(SumFingerForces, ElasticPlusInextensibleAt45Degrees) {
  const Vec3 finger = Vec3::Zero();
  const TetherForce a =
      tether_force({0, 0, 0.52}, Vec3::Zero(), finger, Vec3::Zero(), elastic(0.5, 50, 0));
  TetherParams inext;
  inext.kind = TetherKind::Inextensible;
  inext.rest_length = 0.5;
  inext.constraint_stiffness = 2000;
  const double d = 0.5 + 0.5 / 2000.0;
  const Vec3 dir = Vec3(1, 0, 1).normalized();
  const TetherForce b = tether_force(dir * d, Vec3::Zero(), finger, Vec3::Zero(), inext);
  const std::vector<TetherForce> v{a, b};
  const Vec3 sum = sum_finger_forces(v);
  EXPECT_NEAR(sum.x(), 0.3535533905932738, 1e-9);
  EXPECT_NEAR(sum.y(), 0.0, 1e-15);
  EXPECT_NEAR(sum.z(), 1.3535533905932737, 1e-9);
}

TEST(TetherParams, ValidationNamesRestLength) {
  TetherParams p;
  p.rest_length = 0.0;
  try {
    p.validate("tethers[0]");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "tethers[0].rest_length");
  }
}

}  // namespace
}  // namespace tetherswarm
