#pragma once

#include "gaitopt/connection.hpp"
#include "gaitopt/gait.hpp"

#include <vector>

namespace gaitopt {

inline constexpr int kDefaultSteps = 400;
inline constexpr int kMinSteps = 16;

struct TrajectorySample {
  double t = 0.0;
  Shape shape;
  Vec2 shape_velocity = Vec2::Zero();
  Vec2 shape_acceleration = Vec2::Zero();
  /// Placement of the grid's body frame and its continuous heading.
  GroupElement pose;
  double heading = 0.0;
  AlgebraVector body_velocity;
  /// Same quantities for the middle-link frame.
  GroupElement pose_original;
  double heading_original = 0.0;
  AlgebraVector body_velocity_original;
  double kinetic_energy = 0.0;
  /// Momentum conjugate to the joint angles, dL/d(rdot).
  Vec2 shape_momentum = Vec2::Zero();
  /// Joint torques.
  Vec2 force = Vec2::Zero();
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Covector momentum;
  double period = 0.0;
  int steps = 0;
};

/// Integrates one cycle of the reconstruction equation with a 4th-order
/// Runge-Kutta-Munthe-Kaas scheme. The motion is integrated with the exact
/// inertia model in the middle-link frame; the grid supplies the frame change
/// used for reporting. g0 is the initial placement of the grid's body frame
/// and p the spatial momentum. Joint torques are filled in.
Trajectory integrate_gait(const ShapeGrid& grid, const Gait& gait, const Covector& p,
                          const GroupElement& g0 = GroupElement::identity(), int steps = kDefaultSteps);

/// Joint torques u = d/dt(dL/d rdot) - dL/dr along a trajectory, evaluated
/// in closed form from the conserved momentum.
void actuator_forces(const SystemModel& model, Trajectory& trajectory);

/// (1/T) times the trapezoid integral of |u|^2.
double average_effort(const Trajectory& trajectory);
double average_effort(const ShapeGrid& grid, const Gait& gait, const Covector& p, int steps = kDefaultSteps);

struct GaitOutcome {
  /// Final placement relative to the initial one: x, y and accumulated heading.
  Vec3 displacement = Vec3::Zero();
  /// displacement / T
  Vec3 average_velocity = Vec3::Zero();
  double effort = 0.0;
};

GaitOutcome outcome(const Trajectory& trajectory);
GaitOutcome evaluate_gait(const ShapeGrid& grid, const Gait& gait, const Covector& p,
                          int steps = kDefaultSteps);

/// Body velocity component along `direction` when the shape is held at r,
/// at the identity placement of the grid's body frame.
double drift_velocity(const ShapeGrid& grid, const Shape& r, const Covector& p, Direction direction);

}  // namespace gaitopt
