#include "gaitopt/curvature.hpp"
#include "gaitopt/simulate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

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

}  // namespace

TEST(Curvature, ZeroMomentumHasNoTimeComponent) {
  const LiftedConnection c = lifted_connection(swimmer_grid(), {0.4, 1.0}, GroupElement(1.0, 2.0, 0.3), Covector());
  EXPECT_EQ(c.A3.v.norm(), 0.0);
  const CCFSample d = ccf(swimmer_grid(), {0.4, 1.0}, GroupElement(), Covector());
  EXPECT_LT(d.D1t.v.norm(), 1e-14);
  EXPECT_LT(d.D2t.v.norm(), 1e-14);
}

TEST(Curvature, BilinearForm) {
  const CCFSample d = ccf(swimmer_grid(), {0.4, 1.0}, GroupElement(), Covector(Vec3(0.2, 0.0, 0.1)));
  const Vec3 e1(1, 0, 0), e2(0, 1, 0), e3(0, 0, 1);
  EXPECT_NEAR((d.apply(e1, e2).v - d.D12.v).norm(), 0.0, 1e-15);
  EXPECT_NEAR((d.apply(e2, e1).v + d.D12.v).norm(), 0.0, 1e-15);
  EXPECT_NEAR((d.apply(e2, e3).v - d.D2t.v).norm(), 0.0, 1e-15);
}

TEST(Curvature, ShrinkingLoopsApproachAreaTimesCurvature) {
  // The net displacement of a small loop tends to its enclosed area times D12.
  const Shape c{0.6, -0.8};
  const Vec3 d12 = ccf(swimmer_grid(), c, GroupElement(), Covector()).D12.v;
  double previous = 1e9;
  for (double radius : {0.2, 0.1, 0.05}) {
    const Trajectory traj = integrate_gait(swimmer_grid(), Gait::circle(c, radius, 1.0), Covector());
    const Vec3 disp = outcome(traj).displacement;
    const Vec3 area = std::numbers::pi * radius * radius * d12;
    const double rel = (disp - area).norm() / area.norm();
    EXPECT_LT(rel, previous);
    previous = rel;
  }
  EXPECT_LT(previous, 0.02);
}

TEST(Curvature, SnakeRotationCurvatureIsOddUnderMirror) {
  for (const Shape r : {Shape{0.7, 1.9}, Shape{-2.0, 0.4}, Shape{1.0, 1.0}}) {
    const double a = ccf(snake_grid(), r, GroupElement(), Covector()).D12.v[2];
    const double b = ccf(snake_grid(), {-r.alpha1, -r.alpha2}, GroupElement(), Covector()).D12.v[2];
    EXPECT_NEAR(a, -b, 1e-6);
  }
}

TEST(Curvature, FluxEstimateConvergesWithLoopSize) {
  const Covector p(Vec3(0.0, 0.0, 0.3));
  double previous = 1e9;
  for (double radius : {0.4, 0.2, 0.1}) {
    const Gait gait = Gait::circle({1.0, 2.0}, radius, 2.0);
    const Trajectory traj = integrate_gait(snake_grid(), gait, p);
    std::vector<GroupElement> poses;
    for (const auto& s : traj.samples) poses.push_back(s.pose);
    const Vec3 est = flux_estimate(snake_grid(), gait, p, poses);
    const Vec3 disp = outcome(traj).displacement;
    const double rel = (est - disp).norm() / disp.norm();
    EXPECT_LT(rel, previous);
    previous = rel;
  }
  EXPECT_LT(previous, 0.02);
}
