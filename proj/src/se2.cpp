#include "gaitopt/se2.hpp"

#include <cmath>
#include <numbers>

namespace gaitopt {

namespace {

// Below this |angle| the closed-form exp/log coefficients switch to Taylor series.
constexpr double kSmallAngle = 1e-6;

// sin(w)/w and (1 - cos(w))/w
void exp_coefficients(double w, double& a, double& b) {
  if (std::abs(w) < kSmallAngle) {
    const double w2 = w * w;
    a = 1.0 - w2 / 6.0 + w2 * w2 / 120.0;
    b = w / 2.0 - w * w2 / 24.0;
  } else {
    a = std::sin(w) / w;
    b = (1.0 - std::cos(w)) / w;
  }
}

}  // namespace

double wrap_angle(double a) {
  constexpr double pi = std::numbers::pi;
  if (a > -pi && a <= pi) return a;
  double r = std::fmod(a + pi, 2.0 * pi);
  if (r <= 0.0) r += 2.0 * pi;
  return r - pi;
}

GroupElement GroupElement::inverse() const {
  const double c = std::cos(theta), s = std::sin(theta);
  return {-(c * x + s * y), -(-s * x + c * y), -theta};
}

Mat3 GroupElement::matrix() const {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat3 m;
  m << c, -s, x, s, c, y, 0, 0, 1;
  return m;
}

GroupElement GroupElement::from_matrix(const Mat3& m) {
  return {m(0, 2), m(1, 2), std::atan2(m(1, 0), m(0, 0))};
}

GroupElement compose(const GroupElement& g1, const GroupElement& g2) {
  const double c = std::cos(g1.theta), s = std::sin(g1.theta);
  return {g1.x + c * g2.x - s * g2.y, g1.y + s * g2.x + c * g2.y, g1.theta + g2.theta};
}

Mat3 adjoint(const GroupElement& g) {
  const double c = std::cos(g.theta), s = std::sin(g.theta);
  Mat3 m;
  m << c, -s, g.y, s, c, -g.x, 0, 0, 1;
  return m;
}

Mat3 dual_adjoint_matrix(const GroupElement& g) { return adjoint(g).transpose(); }

Covector dual_adjoint(const GroupElement& g, const Covector& p_spatial) {
  return Covector(dual_adjoint_matrix(g) * p_spatial.v);
}

AlgebraVector lie_bracket(const AlgebraVector& xi, const AlgebraVector& eta) {
  // Translation part of the matrix commutator: W_xi v_eta - W_eta v_xi,
  // where W_w is the 2x2 generator of rotation at rate w.
  return {-xi.vtheta() * eta.vy() + eta.vtheta() * xi.vy(),
          xi.vtheta() * eta.vx() - eta.vtheta() * xi.vx(), 0.0};
}

Mat3 ad_matrix(const AlgebraVector& xi) {
  Mat3 m;
  m << 0, -xi.vtheta(), xi.vy(), xi.vtheta(), 0, -xi.vx(), 0, 0, 0;
  return m;
}

GroupElement exp(const AlgebraVector& xi, double dt) {
  const double w = xi.vtheta() * dt;
  const double vx = xi.vx() * dt, vy = xi.vy() * dt;
  double a, b;
  exp_coefficients(w, a, b);
  return {a * vx - b * vy, b * vx + a * vy, w};
}

AlgebraVector log(const GroupElement& g) {
  if (std::abs(g.theta) == std::numbers::pi) {
    throw BranchAmbiguity("se2::log: theta = +-pi has no unique logarithm");
  }
  const double w = g.theta;
  double a, b;
  exp_coefficients(w, a, b);
  const double det = a * a + b * b;
  return {(a * g.x + b * g.y) / det, (-b * g.x + a * g.y) / det, w};
}

AlgebraVector dexp_inv_right(const AlgebraVector& u, const AlgebraVector& xi) {
  const AlgebraVector b1 = lie_bracket(u, xi);
  return xi + 0.5 * b1 + (1.0 / 12.0) * lie_bracket(u, b1);
}

}  // namespace gaitopt
