#include "gaitopt/connection.hpp"
#include "gaitopt/linkage.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace gaitopt;

namespace {

constexpr double kPi = std::numbers::pi;

// Added mass of an ellipse (semi-axes a along x, b along y) in unit-density
// ideal fluid from a constant-strength source panel method. Returns
// (m_xx, m_yy, J) for translation along x, along y and rotation about the center.
Vec3 panel_added_mass(double a, double b, int n) {
  std::vector<Vec2> node(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double t = 2 * kPi * k / n;
    node[k] = {a * std::cos(t), b * std::sin(t)};
  }
  std::vector<Vec2> mid(n), normal(n);
  std::vector<double> len(n);
  for (int k = 0; k < n; ++k) {
    const Vec2 d = node[k + 1] - node[k];
    mid[k] = 0.5 * (node[k] + node[k + 1]);
    len[k] = d.norm();
    normal[k] = Vec2(d[1], -d[0]) / len[k];  // outward for counterclockwise nodes
  }
  static const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
  static const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
  const int sub = 4;  // subpanels per panel for near-field accuracy

  Eigen::MatrixXd K(n, n), P(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        K(i, j) = 0.5;
        P(i, j) = len[j] * (std::log(len[j] / 2) - 1) / (2 * kPi);
        continue;
      }
      double dn = 0.0, g = 0.0;
      for (int s = 0; s < sub; ++s) {
        for (int q = 0; q < 4; ++q) {
          const double u = (s + 0.5 * (gx[q] + 1)) / sub;
          const Vec2 y = node[j] + u * (node[j + 1] - node[j]);
          const Vec2 r = mid[i] - y;
          const double w = gw[q] * 0.5 * len[j] / sub;
          dn += w * r.dot(normal[i]) / r.squaredNorm() / (2 * kPi);
          g += w * std::log(r.norm()) / (2 * kPi);
        }
      }
      K(i, j) = dn;
      P(i, j) = g;
    }
  }
  Eigen::MatrixXd rhs(n, 3);
  for (int i = 0; i < n; ++i) {
    rhs(i, 0) = normal[i][0];
    rhs(i, 1) = normal[i][1];
    rhs(i, 2) = normal[i].dot(Vec2(-mid[i][1], mid[i][0]));
  }
  const Eigen::MatrixXd sigma = K.partialPivLu().solve(rhs);
  const Eigen::MatrixXd phi = P * sigma;
  Vec3 out;
  for (int m = 0; m < 3; ++m) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s -= phi(i, m) * rhs(i, m) * len[i];
    out[m] = s;
  }
  return out;
}

// Kinetic energy from finite-differenced link placements: an oracle for the
// assembled inertia matrix that never touches the Jacobians.
double kinetic_energy_by_differences(const SystemModel& model, const Shape& r, const Vec3& xi, const Vec2& rdot) {
  const double h = 1e-6;
  auto placement = [&](double t, int i) {
    const GroupElement g = exp(AlgebraVector(xi), t);
    const Shape s{r.alpha1 + t * rdot[0], r.alpha2 + t * rdot[1]};
    return g * forward_kinematics(model, s)[i];
  };
  double ke = 0.0;
  for (int i = 0; i < 3; ++i) {
    const GroupElement a = placement(-h, i), b = placement(h, i), c = placement(0.0, i);
    // Body velocity of the link from the central difference of its placement.
    const Mat3 d = (b.matrix() - a.matrix()) / (2 * h);
    const Mat3 body = c.inverse().matrix() * d;
    const Vec3 v(body(0, 2), body(1, 2), body(1, 0));
    ke += 0.5 * v.dot(model.link_inertia(i) * v);
  }
  return ke;
}

}  // namespace

TEST(Linkage, AddedMassMatchesPanelMethod) {
  for (double aspect : {0.5, 0.1}) {
    LinkGeometry g{1.0, aspect, 0.0, 1.0};
    const Mat3 I = link_inertia(g);
    const Vec3 ref = panel_added_mass(0.5, 0.5 * aspect, 400);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(I(k, k) / ref[k], 1.0, 5e-3) << "aspect " << aspect << " mode " << k;
  }
}

TEST(Linkage, CircleHasNoRotationalAddedMass) {
  LinkGeometry g{2.0, 1.0, 0.0, 1.0};
  const Mat3 I = link_inertia(g);
  EXPECT_DOUBLE_EQ(I(0, 0), I(1, 1));
  EXPECT_DOUBLE_EQ(I(2, 2), 0.0);
}

TEST(Linkage, RigidEllipseInertia) {
  LinkGeometry g{2.0, 0.5, 3.0, 0.0};
  const Mat3 I = link_inertia(g);
  const double m = 3.0 * kPi * 1.0 * 0.5;
  EXPECT_NEAR(I(0, 0), m, 1e-14);
  EXPECT_NEAR(I(2, 2), m * (1.0 + 0.25) / 4, 1e-14);
}

TEST(Linkage, RejectsBadGeometry) {
  EXPECT_THROW((LinkGeometry{0.0, 0.1, 1.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((LinkGeometry{1.0, 1.5, 1.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((LinkGeometry{1.0, 0.1, -1.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW(SystemModel::preset("eel"), std::invalid_argument);
}

TEST(Linkage, ForwardKinematicsStraightChain) {
  const auto f = forward_kinematics(SystemModel::snake(), {0.0, 0.0});
  EXPECT_NEAR(f[0].x, -1.5, 1e-15);
  EXPECT_NEAR(f[2].x, 1.5, 1e-15);
  EXPECT_NEAR(f[0].y, 0.0, 1e-15);
}

TEST(Linkage, InertiaMatchesKineticEnergyOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const SystemModel& model : {SystemModel::swimmer(), SystemModel::snake()}) {
    for (int k = 0; k < 10; ++k) {
      const Shape r{u(rng), u(rng)};
      const Vec3 xi(u(rng), u(rng), u(rng));
      const Vec2 rd(u(rng), u(rng));
      Eigen::Matrix<double, 5, 1> v;
      v << xi, rd;
      const double ke = 0.5 * v.dot(inertia_matrix(model, r).full() * v);
      EXPECT_NEAR(ke, kinetic_energy_by_differences(model, r, xi, rd), 1e-7 * std::max(1.0, ke));
    }
  }
}

TEST(Linkage, InertiaSymmetricPositiveDefinite) {
  const SystemModel model = SystemModel::swimmer();
  for (double a : {-3.0, -1.0, 0.0, 2.0, kPi}) {
    const Mat5 M = inertia_matrix(model, {a, 0.7}).full();
    EXPECT_NEAR((M - M.transpose()).norm(), 0.0, 1e-14);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Mat5>(M).eigenvalues().minCoeff(), 0.0);
  }
}

TEST(Linkage, InertiaDerivativeMatchesDifferences) {
  const SystemModel model = SystemModel::swimmer();
  const Shape r{0.4, -1.1};
  const double h = 1e-6;
  for (int k = 0; k < 2; ++k) {
    Shape rp = r, rm = r;
    (k == 0 ? rp.alpha1 : rp.alpha2) += h;
    (k == 0 ? rm.alpha1 : rm.alpha2) -= h;
    const Mat5 fd = (inertia_matrix(model, rp).full() - inertia_matrix(model, rm).full()) / (2 * h);
    EXPECT_NEAR((inertia_derivative(model, r, k) - fd).norm(), 0.0, 1e-8);
  }
}

TEST(Linkage, MirrorSymmetry) {
  // Reflecting the chain across its long axis (alpha -> -alpha) flips y and theta.
  const SystemModel model = SystemModel::snake();
  const Mat3 S = Vec3(1.0, -1.0, -1.0).asDiagonal();
  const InertiaMatrix a = inertia_matrix(model, {0.8, -0.3});
  const InertiaMatrix b = inertia_matrix(model, {-0.8, 0.3});
  EXPECT_NEAR((S * a.M_gg * S - b.M_gg).norm(), 0.0, 1e-13);
  EXPECT_NEAR((S * a.M_gr * -1.0 - b.M_gr).norm(), 0.0, 1e-13);
}

TEST(Linkage, ConnectionMatchesDenseSolve) {
  // Zero-momentum row of the 5x5 system solved by full-pivot LU.
  const SystemModel model = SystemModel::swimmer();
  for (const Shape r : {Shape{0.3, 1.2}, Shape{-2.0, 0.5}, Shape{3.0, 3.0}}) {
    const Mat5 M = inertia_matrix(model, r).full();
    const Mat3 Mgg = M.topLeftCorner<3, 3>();
    const Mat32 Mgr = M.topRightCorner<3, 2>();
    const Mat32 A = Mgg.fullPivLu().solve(Mgr);
    const ConnectionSample c = local_connection(model, r);
    EXPECT_NEAR((c.A - A).norm(), 0.0, 1e-12);
    EXPECT_NEAR((c.Mgg_inv * Mgg - Mat3::Identity()).norm(), 0.0, 1e-12);
  }
}

TEST(Linkage, MinimumInertiaShapes) {
  const Shape snake = minimum_inertia_shape(SystemModel::snake(), Direction::Theta, centered_frame(SystemModel::snake()));
  EXPECT_LT(periodic_distance(snake, {kPi, kPi}), 2 * kPi / 128);
  const Shape swimmer = minimum_inertia_shape(SystemModel::swimmer(), Direction::X);
  EXPECT_LT(periodic_distance(swimmer, {0.0, 0.0}), 2 * kPi / 128);
}

TEST(Linkage, MassCenterWithoutFluidDecouplesInertia) {
  const SystemModel model = SystemModel::snake();
  const Shape r{1.0, -0.4};
  const Vec2 c = mass_center(model, r);
  const Mat3 Mc = locked_inertia_in_frame(inertia_matrix(model, r).M_gg, GroupElement(c[0], c[1], 0.0));
  EXPECT_NEAR(Mc(0, 2), 0.0, 1e-13);
  EXPECT_NEAR(Mc(1, 2), 0.0, 1e-13);
}

TEST(Linkage, MassCenterOfIdenticalLinksIsMeanPosition) {
  const SystemModel model = SystemModel::swimmer();
  const Shape r{0.7, 2.1};
  const auto f = forward_kinematics(model, r);
  const Vec2 mean = (Vec2(f[0].x, f[0].y) + Vec2(f[1].x, f[1].y) + Vec2(f[2].x, f[2].y)) / 3.0;
  EXPECT_NEAR((mass_center(model, r) - mean).norm(), 0.0, 1e-15);
}
