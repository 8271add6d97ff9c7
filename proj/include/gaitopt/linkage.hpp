#pragma once

#include "gaitopt/se2.hpp"

#include <array>
#include <functional>
#include <string>

namespace gaitopt {

using Mat32 = Eigen::Matrix<double, 3, 2>;
using Mat2 = Eigen::Matrix2d;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Mat35 = Eigen::Matrix<double, 3, 5>;

/// Joint angles of the three-link chain. Both components are 2pi-periodic.
struct Shape {
  double alpha1 = 0.0;
  double alpha2 = 0.0;

  Vec2 vec() const { return {alpha1, alpha2}; }
  static Shape from(const Vec2& v) { return {v[0], v[1]}; }
  double operator[](int i) const { return i == 0 ? alpha1 : alpha2; }
};

/// Fiber direction used for objectives and inertia queries.
enum class Direction { X = 0, Y = 1, Theta = 2 };

Direction parse_direction(const std::string& s);
std::string to_string(Direction d);

/// Elliptical link. fluid_density == 0 disables the added-mass model.
struct LinkGeometry {
  double length = 1.0;
  double aspect_ratio = 0.1;
  double body_density = 1.0;
  double fluid_density = 0.0;

  /// Throws std::invalid_argument on nonpositive length, aspect ratio outside
  /// (0, 1] or negative densities.
  void validate() const;
};

/// Diagonal link-frame inertia diag(m + m_ax, m + m_ay, J + J_a).
Mat3 link_inertia(const LinkGeometry& geom);

/// Serial three-link chain; the middle link carries the original body frame.
class SystemModel {
 public:
  SystemModel(std::string name, std::array<LinkGeometry, 3> links);

  /// Three unit links in a unit-density fluid.
  static SystemModel swimmer();
  /// Center link of length 2 with unit arms, no fluid.
  static SystemModel snake();
  /// "swimmer" or "snake"; throws std::invalid_argument otherwise.
  static SystemModel preset(const std::string& name);

  const std::string& name() const { return name_; }
  const std::array<LinkGeometry, 3>& links() const { return links_; }
  const Mat3& link_inertia(int i) const { return inertia_[i]; }
  bool has_fluid() const;

 private:
  std::string name_;
  std::array<LinkGeometry, 3> links_;
  std::array<Mat3, 3> inertia_;
};

/// Link frames (centers, long axis along x) relative to the middle-link frame.
std::array<GroupElement, 3> forward_kinematics(const SystemModel& model, const Shape& r);

/// J_i such that the body velocity of link i is J_i [xi; rdot].
std::array<Mat35, 3> link_jacobians(const SystemModel& model, const Shape& r);

struct InertiaMatrix {
  Mat3 M_gg = Mat3::Zero();
  Mat32 M_gr = Mat32::Zero();
  Mat2 M_rr = Mat2::Zero();

  Mat5 full() const;
  static InertiaMatrix from_full(const Mat5& m);
};

/// Generalized inertia in the original (middle-link) body frame. Throws
/// std::runtime_error if the assembled matrix is not positive definite.
InertiaMatrix inertia_matrix(const SystemModel& model, const Shape& r);

/// Partial derivative of the full 5x5 inertia with respect to joint k.
Mat5 inertia_derivative(const SystemModel& model, const Shape& r, int k);

/// Locked inertia M_gg expressed in the frame `beta` (relative to the original frame).
Mat3 locked_inertia_in_frame(const Mat3& M_gg, const GroupElement& beta);

/// Mean of the link centers weighted by mass plus mean added mass, in the
/// middle-link frame; the center of mass when there is no fluid.
Vec2 mass_center(const SystemModel& model, const Shape& r);

/// Frame field beta(r) from the original to the analysis body frame.
using FrameField = std::function<GroupElement(const Shape&)>;

/// Frame at mass_center, aligned with the middle link.
FrameField centered_frame(const SystemModel& model);

/// Shape minimizing the (d, d) entry of the locked inertia in the given frame
/// field, found by a dense periodic grid scan refined with a compass search.
/// The result lies in [0, 2pi)^2.
Shape minimum_inertia_shape(const SystemModel& model, Direction direction,
                            const FrameField& frame = {}, int scan_resolution = 128);

/// Distance on the 2-torus of joint angles.
double periodic_distance(const Shape& a, const Shape& b);

}  // namespace gaitopt
