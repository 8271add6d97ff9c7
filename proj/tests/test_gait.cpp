#include "gaitopt/gait.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace gaitopt;

namespace {

constexpr double kPi = std::numbers::pi;

Gait random_gait(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  GaitVector z;
  for (int k = 0; k < kGaitParameters; ++k) z[k] = u(rng);
  z[kPeriodIndex] = 1.0 + std::abs(z[kPeriodIndex]);
  return Gait::from_parameters(z);
}

}  // namespace

TEST(Gait, CircleIsUniformAndCounterclockwise) {
  const Gait g = Gait::circle({1.0, -0.5}, 0.3, 2.0);
  for (double t : {0.0, 0.3, 1.1}) {
    const ShapeState s = g.evaluate(t);
    EXPECT_NEAR(std::hypot(s.shape.alpha1 - 1.0, s.shape.alpha2 + 0.5), 0.3, 1e-14);
    EXPECT_NEAR(s.velocity.norm(), 2 * kPi * 0.3 / 2.0, 1e-14);
    const Vec2 rel(s.shape.alpha1 - 1.0, s.shape.alpha2 + 0.5);
    EXPECT_GT(rel[0] * s.velocity[1] - rel[1] * s.velocity[0], 0.0);
  }
  EXPECT_NEAR(amplitude(g), 0.3, 1e-12);
}

TEST(Gait, DerivativesMatchDifferences) {
  std::mt19937_64 rng(3);
  const Gait g = random_gait(rng);
  const double h = 1e-5, t = 0.37;
  const ShapeState a = g.evaluate(t - h), b = g.evaluate(t + h), c = g.evaluate(t);
  EXPECT_NEAR((b.shape.vec() - a.shape.vec()).norm() / (2 * h), c.velocity.norm(), 1e-7 * c.velocity.norm());
  EXPECT_NEAR(((b.velocity - a.velocity) / (2 * h) - c.acceleration).norm(), 0.0, 1e-7 * c.acceleration.norm());
}

TEST(Gait, ParametersRoundTrip) {
  std::mt19937_64 rng(4);
  const Gait g = random_gait(rng);
  EXPECT_EQ(Gait::from_parameters(g.parameters()).parameters(), g.parameters());
  EXPECT_EQ(g.with_period(3.0).period(), 3.0);
}

TEST(Gait, ReversedRetracesLocus) {
  std::mt19937_64 rng(5);
  const Gait g = random_gait(rng);
  const Gait r = g.reversed();
  const ShapeState a = g.evaluate(0.2), b = r.evaluate(g.period() - 0.2);
  EXPECT_NEAR((a.shape.vec() - b.shape.vec()).norm(), 0.0, 1e-13);
  EXPECT_NEAR((a.velocity + b.velocity).norm(), 0.0, 1e-13);
}

TEST(Gait, WaypointsCloseAndCarryTime) {
  const Gait g = Gait::circle({0.0, 0.0}, 1.0, 4.0);
  const auto w = to_waypoints(g, 64);
  ASSERT_EQ(w.size(), 65u);
  EXPECT_NEAR((w.front().shape.vec() - w.back().shape.vec()).norm(), 0.0, 1e-13);
  EXPECT_NEAR(w.back().time, 4.0, 1e-14);
  EXPECT_THROW(to_waypoints(g, kMinWaypoints - 1), std::invalid_argument);
}

TEST(Gait, CoefficientJacobianMatchesDifferences) {
  std::mt19937_64 rng(6);
  const Gait g = random_gait(rng);
  const int n = 40;
  const auto jac = coefficient_jacobian(g, n);
  const double h = 1e-6;
  for (int p = 0; p < kGaitParameters; ++p) {
    GaitVector zp = g.parameters(), zm = zp;
    zp[p] += h;
    zm[p] -= h;
    const auto wp = to_waypoints(Gait::from_parameters(zp), n), wm = to_waypoints(Gait::from_parameters(zm), n);
    for (int k : {0, 7, 23, n}) {
      Eigen::Matrix<double, 5, 1> d;
      d << wp[k].shape.alpha1 - wm[k].shape.alpha1, wp[k].shape.alpha2 - wm[k].shape.alpha2, wp[k].tau - wm[k].tau,
          wp[k].velocity[0] - wm[k].velocity[0], wp[k].velocity[1] - wm[k].velocity[1];
      EXPECT_NEAR((jac[k].col(p) - d / (2 * h)).norm(), 0.0, 1e-6) << "parameter " << p << " waypoint " << k;
    }
  }
}

TEST(Gait, JsonRoundTrip) {
  std::mt19937_64 rng(7);
  const Gait g = random_gait(rng);
  nlohmann::json j = g;
  const Gait back = gait_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.parameters(), g.parameters());
}

TEST(Gait, JsonRejectsMalformedInput) {
  nlohmann::json good = Gait::circle({0, 0}, 1, 1);
  auto bad = good;
  bad["period"] = -1.0;
  EXPECT_THROW(gait_from_json(bad), std::invalid_argument);
  bad = good;
  bad["joints"][0].erase(0);
  EXPECT_THROW(gait_from_json(bad), std::invalid_argument);
  bad = good;
  bad["extra"] = 1;
  EXPECT_THROW(gait_from_json(bad), std::invalid_argument);
  bad = good;
  bad["joints"][1][2] = "x";
  EXPECT_THROW(gait_from_json(bad), std::invalid_argument);
}

TEST(Gait, RejectsNonFinite) {
  GaitVector z = GaitVector::Zero();
  z[kPeriodIndex] = 1.0;
  z[3] = std::nan("");
  EXPECT_THROW(Gait::from_parameters(z), std::invalid_argument);
  z[3] = 0.0;
  z[kPeriodIndex] = 0.0;
  EXPECT_THROW(Gait::from_parameters(z), std::invalid_argument);
}
