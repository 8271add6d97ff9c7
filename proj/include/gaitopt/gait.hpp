#pragma once

#include "gaitopt/linkage.hpp"

#include <nlohmann/json_fwd.hpp>

#include <Eigen/Core>

#include <array>
#include <vector>

namespace gaitopt {

inline constexpr int kFourierOrder = 4;
inline constexpr int kCoeffsPerJoint = 1 + 2 * kFourierOrder;
/// Coefficients of both joints followed by the period.
inline constexpr int kGaitParameters = 2 * kCoeffsPerJoint + 1;
inline constexpr int kPeriodIndex = kGaitParameters - 1;
/// Lower bound on the period used by the optimizer.
inline constexpr double kMinPeriod = 0.1;

using GaitVector = Eigen::Matrix<double, kGaitParameters, 1>;

/// alpha(t) = a0 + sum_k a_k cos(2 pi k t / T) + b_k sin(2 pi k t / T)
struct JointSeries {
  double a0 = 0.0;
  std::array<double, kFourierOrder> a{};
  std::array<double, kFourierOrder> b{};
};

struct ShapeState {
  Shape shape;
  Vec2 velocity = Vec2::Zero();
  Vec2 acceleration = Vec2::Zero();
};

class Gait {
 public:
  /// Throws std::invalid_argument unless period > 0 and all coefficients are finite.
  Gait(std::array<JointSeries, 2> joints, double period);

  static Gait point(const Shape& at, double period = 1.0);
  /// Uniform-pace counterclockwise circle of radius R about center.
  static Gait circle(const Shape& center, double radius, double period);
  static Gait from_parameters(const GaitVector& z);

  GaitVector parameters() const;
  const std::array<JointSeries, 2>& joints() const { return joints_; }
  double period() const { return period_; }

  ShapeState evaluate(double t) const;

  /// Same coefficients, different period.
  Gait with_period(double period) const;
  /// Reverses the direction of travel along the shape locus.
  Gait reversed() const;

 private:
  std::array<JointSeries, 2> joints_;
  double period_;
};

/// Lifted waypoint (alpha1, alpha2, tau) with its shape velocity.
struct Waypoint {
  double time = 0.0;
  Shape shape;
  double tau = 0.0;
  Vec2 velocity = Vec2::Zero();
  Vec2 acceleration = Vec2::Zero();
};

/// n + 1 samples at t_k = k T / n; first and last shapes coincide.
std::vector<Waypoint> to_waypoints(const Gait& gait, int n);

/// Rows: alpha1, alpha2, tau, alpha1dot, alpha2dot at a waypoint.
using WaypointJacobian = Eigen::Matrix<double, 5, kGaitParameters>;

/// Exact derivatives of to_waypoints(gait, n) with respect to parameters().
std::vector<WaypointJacobian> coefficient_jacobian(const Gait& gait, int n);

/// RMS distance of the shape locus from its time-averaged center.
double amplitude(const Gait& gait);

/// Minimum waypoint count accepted by to_waypoints.
inline constexpr int kMinWaypoints = 32;

void to_json(nlohmann::json& j, const Gait& gait);
/// Strict parser for {"joints": [[a0, a1..a4, b1..b4], [...]], "period": T}.
Gait gait_from_json(const nlohmann::json& j);

}  // namespace gaitopt
