#include "gaitopt/simulate.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace gaitopt;

namespace {

const ShapeGrid& swimmer_grid() {
  static const ShapeGrid g = ShapeGrid::build(SystemModel::swimmer(), 64);
  return g;
}

const ShapeGrid& snake_grid() {
  static const ShapeGrid g = ShapeGrid::build(SystemModel::snake(), 64);
  return g;
}

Gait test_gait() {
  std::array<JointSeries, 2> j;
  j[0].a0 = 0.2;
  j[0].a = {0.9, 0.0, 0.1, 0.0};
  j[0].b = {0.1, 0.2, 0.0, 0.0};
  j[1].a0 = -0.1;
  j[1].a = {0.0, 0.15, 0.0, 0.0};
  j[1].b = {0.8, 0.0, 0.0, 0.05};
  return Gait(j, 2.5);
}

double pose_distance(const GroupElement& a, const GroupElement& b) {
  return (a.matrix() - b.matrix()).norm();
}

}  // namespace

TEST(Simulate, PointGaitWithoutMomentumStaysPut) {
  const GaitOutcome o = evaluate_gait(swimmer_grid(), Gait::point({0.4, -0.2}, 3.0), Covector());
  EXPECT_EQ(o.displacement.norm(), 0.0);
  EXPECT_EQ(o.effort, 0.0);
}

TEST(Simulate, SnakeDriftsAtLockedRate) {
  const SystemModel& model = snake_grid().model();
  const Shape r{1.0, 2.0};
  const double L = 0.5, T = 3.0;
  const Mat3 M = inertia_matrix(model, r).M_gg;
  const Vec2 c = mass_center(model, r);
  const Mat3 Mc = locked_inertia_in_frame(M, GroupElement(c[0], c[1], 0.0));
  const GaitOutcome o = evaluate_gait(snake_grid(), Gait::point(r, T), Covector(Vec3(0.0, 0.0, L)));
  EXPECT_NEAR(o.displacement[2], T * L / Mc(2, 2), 1e-9);
  // The grid frame sits at the interpolated center, so it circles slightly.
  EXPECT_NEAR(o.displacement.head<2>().norm(), 0.0, 1e-6);
  EXPECT_NEAR(drift_velocity(snake_grid(), r, Covector(Vec3(0.0, 0.0, L)), Direction::Theta), L / Mc(2, 2), 1e-6);
}

TEST(Simulate, DisplacementIndependentOfPaceWithoutMomentum) {
  const Gait g = test_gait();
  const Vec3 a = evaluate_gait(swimmer_grid(), g, Covector(), 800).displacement;
  const Vec3 b = evaluate_gait(swimmer_grid(), g.with_period(7.0), Covector(), 800).displacement;
  EXPECT_NEAR((a - b).norm(), 0.0, 1e-12);
  EXPECT_GT(a.norm(), 1e-2);
}

TEST(Simulate, EffortScalesWithInverseFourthPowerOfPeriod) {
  const Gait g = test_gait();
  const double e1 = average_effort(swimmer_grid(), g, Covector());
  const double e2 = average_effort(swimmer_grid(), g.with_period(2 * g.period()), Covector());
  EXPECT_NEAR(e2 / e1, 1.0 / 16.0, 1e-10);
}

TEST(Simulate, MomentumConserved) {
  const Covector p(Vec3(0.3, -0.1, 0.2));
  const Trajectory traj = integrate_gait(swimmer_grid(), test_gait(), p, GroupElement(0.5, 1.0, 0.4));
  const SystemModel& model = swimmer_grid().model();
  for (const auto& s : traj.samples) {
    const InertiaMatrix M = inertia_matrix(model, s.shape);
    const Vec3 body = M.M_gg * s.body_velocity_original.v + M.M_gr * s.shape_velocity;
    EXPECT_NEAR((body - dual_adjoint(s.pose_original, p).v).norm(), 0.0, 1e-12);
  }
}

TEST(Simulate, TimeReversal) {
  const Covector p(Vec3(0.1, 0.2, -0.15));
  const Gait g = test_gait();
  const GroupElement g0(0.3, -0.2, 0.1);
  const Trajectory fwd = integrate_gait(snake_grid(), g, p, g0);
  const Trajectory back = integrate_gait(snake_grid(), g.reversed(), Covector(-p.v), fwd.samples.back().pose);
  EXPECT_LT(pose_distance(back.samples.back().pose, g0), 1e-9);
}

TEST(Simulate, FourthOrderConvergence) {
  const Covector p(Vec3(0.2, 0.1, 0.3));
  const Gait g = test_gait();
  const Vec3 ref = evaluate_gait(swimmer_grid(), g, p, 3200).displacement;
  const double e1 = (evaluate_gait(swimmer_grid(), g, p, 50).displacement - ref).norm();
  const double e2 = (evaluate_gait(swimmer_grid(), g, p, 100).displacement - ref).norm();
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e2, 1e-5);
}

TEST(Simulate, PowerBalance) {
  // Work done by the joints equals the change in kinetic energy.
  const Covector p(Vec3(0.2, 0.0, 0.1));
  const Trajectory traj = integrate_gait(swimmer_grid(), test_gait(), p, GroupElement(), 2000);
  double work = 0.0, worst = 0.0, scale = 0.0;
  const auto& s = traj.samples;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double dt = s[k].t - s[k - 1].t;
    work += 0.5 * dt * (s[k].force.dot(s[k].shape_velocity) + s[k - 1].force.dot(s[k - 1].shape_velocity));
    worst = std::max(worst, std::abs(work - (s[k].kinetic_energy - s[0].kinetic_energy)));
    scale = std::max(scale, s[k].kinetic_energy);
  }
  EXPECT_LT(worst, 1e-4 * scale);
}

TEST(Simulate, TorquesSatisfyShapeEquations) {
  // u = d/dt (dl/d rdot) - dl/dr with l = 1/2 v^T M(r) v, differentiated numerically.
  const Covector p(Vec3(0.1, 0.3, -0.2));
  const Trajectory traj = integrate_gait(snake_grid(), test_gait(), p, GroupElement(), 4000);
  const SystemModel& model = snake_grid().model();
  const auto& s = traj.samples;
  const double h = 1e-6;
  for (std::size_t k : {200u, 1111u, 2500u, 3800u}) {
    const double dt = s[k + 1].t - s[k - 1].t;
    const Vec2 dmom = (s[k + 1].shape_momentum - s[k - 1].shape_momentum) / dt;
    Eigen::Matrix<double, 5, 1> v;
    v << s[k].body_velocity_original.v, s[k].shape_velocity;
    Vec2 dl;
    for (int j = 0; j < 2; ++j) {
      Shape a = s[k].shape, b = s[k].shape;
      (j == 0 ? a.alpha1 : a.alpha2) += h;
      (j == 0 ? b.alpha1 : b.alpha2) -= h;
      dl[j] = 0.5 * v.dot((inertia_matrix(model, a).full() - inertia_matrix(model, b).full()) * v) / (2 * h);
    }
    const Vec2 u = dmom - dl;
    EXPECT_LT((u - s[k].force).norm(), 1e-4 * std::max(1.0, u.norm())) << "sample " << k;
  }
}

TEST(Simulate, RejectsTooFewSteps) {
  EXPECT_THROW(integrate_gait(swimmer_grid(), test_gait(), Covector(), GroupElement(), kMinSteps - 1),
               std::invalid_argument);
}

TEST(Simulate, SwimmerCircleRegression) {
  // Frozen output of this implementation; guards against silent changes.
  const GaitOutcome o = evaluate_gait(swimmer_grid(), Gait::circle({0.0, 0.0}, 0.5, 5.0), Covector());
  EXPECT_NEAR(o.displacement[0], -0.33426551871085608, 1e-10);
  EXPECT_NEAR(o.displacement[1], 0.024279250567226462, 1e-10);
  EXPECT_NEAR(o.displacement[2], 0.0, 1e-12);
  EXPECT_NEAR(o.effort, 0.0025547294958986892, 1e-13);
}
