#pragma once

#include <Eigen/Core>

#include <stdexcept>

namespace gaitopt {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Element of se(2): body velocity (vx, vy, vtheta).
struct AlgebraVector {
  Vec3 v = Vec3::Zero();

  AlgebraVector() = default;
  AlgebraVector(double vx, double vy, double vtheta) : v(vx, vy, vtheta) {}
  explicit AlgebraVector(const Vec3& vec) : v(vec) {}

  double vx() const { return v[0]; }
  double vy() const { return v[1]; }
  double vtheta() const { return v[2]; }
  double operator[](int i) const { return v[i]; }

  AlgebraVector& operator+=(const AlgebraVector& o) { v += o.v; return *this; }
  AlgebraVector& operator-=(const AlgebraVector& o) { v -= o.v; return *this; }
  friend AlgebraVector operator+(AlgebraVector a, const AlgebraVector& b) { return a += b; }
  friend AlgebraVector operator-(AlgebraVector a, const AlgebraVector& b) { return a -= b; }
  friend AlgebraVector operator-(const AlgebraVector& a) { return AlgebraVector(-a.v); }
  friend AlgebraVector operator*(double s, const AlgebraVector& a) { return AlgebraVector(s * a.v); }
  friend AlgebraVector operator*(const AlgebraVector& a, double s) { return AlgebraVector(s * a.v); }
};

/// Element of se(2)*: momentum (px, py, ptheta), spatial or body depending on context.
struct Covector {
  Vec3 v = Vec3::Zero();

  Covector() = default;
  Covector(double px, double py, double ptheta) : v(px, py, ptheta) {}
  explicit Covector(const Vec3& vec) : v(vec) {}

  double px() const { return v[0]; }
  double py() const { return v[1]; }
  double ptheta() const { return v[2]; }
  double operator[](int i) const { return v[i]; }
  double norm() const { return v.norm(); }

  friend Covector operator*(double s, const Covector& c) { return Covector(s * c.v); }
  friend Covector operator+(const Covector& a, const Covector& b) { return Covector(a.v + b.v); }
  friend Covector operator-(const Covector& a, const Covector& b) { return Covector(a.v - b.v); }
};

/// <p, xi>
inline double pairing(const Covector& p, const AlgebraVector& xi) { return p.v.dot(xi.v); }

/// Planar rigid placement. theta is kept in (-pi, pi] by every constructor and
/// group operation; callers that need a continuous heading track it separately.
struct GroupElement {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  GroupElement() = default;
  GroupElement(double x_, double y_, double theta_) : x(x_), y(y_), theta(wrap_angle(theta_)) {}

  static GroupElement identity() { return {}; }

  GroupElement inverse() const;
  /// 3x3 homogeneous transform.
  Mat3 matrix() const;
  static GroupElement from_matrix(const Mat3& m);
};

/// g1 * g2
GroupElement compose(const GroupElement& g1, const GroupElement& g2);
inline GroupElement operator*(const GroupElement& a, const GroupElement& b) { return compose(a, b); }

/// Ad_g: maps body velocity at g to spatial (identity-referenced) velocity.
Mat3 adjoint(const GroupElement& g);

/// Ad*_g as a matrix acting on spatial covectors: Ad_g^T.
Mat3 dual_adjoint_matrix(const GroupElement& g);

/// Converts spatial momentum to body momentum at g.
Covector dual_adjoint(const GroupElement& g, const Covector& p_spatial);

/// Matrix commutator [xi^, eta^] of the 3x3 matrix representations.
AlgebraVector lie_bracket(const AlgebraVector& xi, const AlgebraVector& eta);

/// ad_xi as a 3x3 matrix: ad_xi * eta = [xi, eta].
Mat3 ad_matrix(const AlgebraVector& xi);

/// exp(dt * xi)
GroupElement exp(const AlgebraVector& xi, double dt = 1.0);

/// Thrown by log() on the theta = +-pi branch cut.
class BranchAmbiguity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Principal logarithm. Throws BranchAmbiguity when |theta| == pi.
AlgebraVector log(const GroupElement& g);

/// Inverse of the left-trivialized differential of exp truncated at second
/// order, used by the Munthe-Kaas stages: u' = xi + [u, xi]/2 + [u, [u, xi]]/12.
AlgebraVector dexp_inv_right(const AlgebraVector& u, const AlgebraVector& xi);

}  // namespace gaitopt
