#include "gaitopt/connection.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace gaitopt;

namespace {

constexpr double kPi = std::numbers::pi;

double smooth(double a, double b) { return std::sin(a) * std::cos(2 * b) + 0.3 * std::cos(a - b); }

PeriodicField sampled(int n) {
  PeriodicField f(n, 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f.at(i, j, 0) = smooth(i * f.spacing(), j * f.spacing());
  f.finalize();
  return f;
}

double interpolation_error(int n) {
  const PeriodicField f = sampled(n);
  double err = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Shape r{0.137 + 0.071 * k, -1.3 + 0.053 * k};
    err = std::max(err, std::abs(f.sample(r, 0) - smooth(r.alpha1, r.alpha2)));
  }
  return err;
}

// Potential theta(a, b) = sin a cos b + 0.5 sin 2b, with its exact gradient as input.
double potential(double a, double b) { return std::sin(a) * std::cos(b) + 0.5 * std::sin(2 * b); }

double potential_error(int n, double* residual) {
  PeriodicField grad(n, 2);
  const double h = grad.spacing();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = i * h, b = j * h;
      grad.at(i, j, 0) = std::cos(a) * std::cos(b);
      grad.at(i, j, 1) = -std::sin(a) * std::sin(b) + std::cos(2 * b);
    }
  }
  grad.finalize();
  const PeriodicField theta = solve_orientation_potential(grad, residual);
  double err = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) err = std::max(err, std::abs(theta.at(i, j, 0) - potential(i * h, j * h)));
  return err;
}

}  // namespace

TEST(PeriodicField, InterpolatesNodesExactly) {
  const PeriodicField f = sampled(16);
  const double h = f.spacing();
  EXPECT_NEAR(f.sample(Shape{3 * h, 5 * h}, 0), f.at(3, 5, 0), 1e-15);
  EXPECT_NEAR(f.sample(Shape{3 * h + 2 * kPi, 5 * h - 4 * kPi}, 0), f.at(3, 5, 0), 1e-13);
}

TEST(PeriodicField, FourthOrderInterpolation) {
  const double coarse = interpolation_error(32), fine = interpolation_error(64);
  EXPECT_LT(fine, 1e-4);
  EXPECT_GT(coarse / fine, 12.0);
}

TEST(PeriodicField, FourthOrderDerivative) {
  const PeriodicField f = sampled(64);
  const double h = f.spacing();
  const double exact = std::cos(7 * h) * std::cos(2 * 3 * h) - 0.3 * std::sin(4 * h);
  EXPECT_NEAR(f.derivative(0, 7, 3, 0), exact, 1e-5);
}

TEST(OrientationPotential, RecoversGradientField) {
  double r32 = 0.0, r64 = 0.0;
  const double e32 = potential_error(32, &r32), e64 = potential_error(64, &r64);
  EXPECT_LT(e64, 1e-4);
  EXPECT_GT(e32 / e64, 12.0);
  EXPECT_LT(r64, 1e-10);
}

TEST(ShapeGrid, NodesMatchDirectEvaluation) {
  const SystemModel model = SystemModel::swimmer();
  const ShapeGrid grid = ShapeGrid::build(model, 32, Coordinates::Original);
  for (const auto [i, j] : {std::pair{0, 0}, std::pair{5, 17}, std::pair{31, 2}}) {
    const ConnectionSample direct = local_connection(model, grid.node_shape(i, j));
    EXPECT_NEAR((grid.original_node(i, j).A - direct.A).norm(), 0.0, 1e-12);
    EXPECT_NEAR((grid.node(i, j).A - direct.A).norm(), 0.0, 1e-12);
  }
}

TEST(ShapeGrid, InterpolationCloseToDirect) {
  const SystemModel model = SystemModel::swimmer();
  const ShapeGrid grid = ShapeGrid::build(model, 64, Coordinates::Original);
  for (const Shape r : {Shape{0.31, -1.7}, Shape{2.2, 2.9}, Shape{-0.05, 0.77}}) {
    const ConnectionSample direct = local_connection(model, r);
    EXPECT_LT((grid.interpolate(r).A - direct.A).norm(), 1e-4 * std::max(1.0, direct.A.norm()));
  }
}

TEST(ShapeGrid, MinimumPerturbationShrinksRotationalConnection) {
  const SystemModel model = SystemModel::swimmer();
  const ShapeGrid original = ShapeGrid::build(model, 32, Coordinates::Original);
  const ShapeGrid mp = ShapeGrid::build(model, 32, Coordinates::MinimumPerturbation);
  double a = 0.0, b = 0.0;
  for (int i = 0; i < 32; ++i) {
    for (int j = 0; j < 32; ++j) {
      a += original.node(i, j).A.row(2).squaredNorm();
      b += mp.node(i, j).A.row(2).squaredNorm();
    }
  }
  // Least squares can only lower the rotational part (beta = 0 is admissible).
  EXPECT_LT(b, a);
  EXPECT_LT(mp.orientation_residual(), 1e-10);
  EXPECT_NEAR(mp.beta_node(0, 0).theta, 0.0, 1e-12);
}

TEST(ShapeGrid, TransformMatchesFrameChange) {
  // At p = 0 the analysis-frame connection satisfies
  // xi_beta = Ad_{beta^-1} xi + beta^-1 dbeta, with xi = -A rdot.
  const SystemModel model = SystemModel::snake();
  const ShapeGrid grid = ShapeGrid::build(model, 64);
  const Shape r{0.9, -0.4};
  const GridSample s = grid.sample(r);
  const ConnectionSample direct = local_connection(model, r);
  const Vec2 rdot(0.3, -1.1);
  const Vec3 xi = -direct.A * rdot;
  const Vec3 expect = adjoint(s.beta.inverse()) * xi + s.grad_beta * rdot;
  EXPECT_LT((-s.connection.A * rdot - expect).norm(), 1e-4);
}
