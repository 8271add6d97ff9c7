#pragma once

#include "gaitopt/curvature.hpp"
#include "gaitopt/simulate.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gaitopt {

/// How the curvature integrand is carried to the end of the cycle when
/// forming the displacement gradient. None treats the displacement as the plain
/// flux vector; Adjoint weights each instant by the linearized reconstruction
/// from that instant to the end and rotates into the starting frame, which
/// makes the gradient exact up to grid interpolation and quadrature.
enum class Transport { None, Adjoint };

struct SolverSettings {
  int max_iterations = 500;
  Transport transport = Transport::Adjoint;
  double kkt_tolerance = 1e-4;
  int steps = kDefaultSteps;
  /// Relative finite-difference step for the effort gradient.
  double fd_step = 1e-5;
  double min_period = kMinPeriod;

  void validate() const;
};

struct Problem {
  const ShapeGrid* grid = nullptr;
  Direction direction = Direction::X;
  /// Signed momentum along `direction`.
  double momentum = 0.0;
  double effort_bound = 1.0;
  SolverSettings settings;
  std::optional<Gait> initial;

  Covector momentum_covector() const;
  /// Throws std::invalid_argument on a missing grid, a y direction, a
  /// nonpositive effort bound or bad settings.
  void validate() const;
};

/// Spatial momentum aligned with a fiber direction.
Covector aligned_momentum(Direction direction, double magnitude);

/// Net displacement along the problem direction for one cycle (exact integration).
double displacement(const Problem& problem, const Gait& gait);
double average_velocity(const Problem& problem, const Gait& gait);

/// Geometric gradient of the (x, y, theta) displacement with respect to
/// Gait::parameters(), from the curvature evaluated along the integrated
/// trajectory (split into normal and binormal parts of the lifted gait) plus
/// the drift at the end of the lifted gait.
Eigen::Matrix<double, 3, kGaitParameters> displacement_jacobian(const ShapeGrid& grid, const Gait& gait,
                                                                const Covector& p, const Trajectory& trajectory,
                                                                Transport transport = Transport::Adjoint);

GaitVector displacement_gradient(const Problem& problem, const Gait& gait);
/// Gradient of displacement / T.
GaitVector velocity_gradient(const Problem& problem, const Gait& gait);
/// Central differences of average_effort.
GaitVector effort_gradient(const Problem& problem, const Gait& gait);

enum class SolveStatus { Converged, MaxIterations, Stalled, Infeasible };
std::string to_string(SolveStatus s);

struct SolveResult {
  Gait gait = Gait::point({});
  GaitOutcome outcome;
  /// Average velocity along the problem direction.
  double velocity = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::Infeasible;
  double kkt_residual = 0.0;
  double multiplier = 0.0;
};

/// Period at which the gait's average effort meets `bound` from below, never
/// below min_period. Returns nullopt when no period up to a large cap is feasible.
std::optional<double> feasible_period(const ShapeGrid& grid, const Gait& gait, const Covector& p, double bound,
                                      int steps = kDefaultSteps, double min_period = kMinPeriod);

/// Default starting gait: a radius-0.5 circle about the local extremum of the
/// kinematic curvature along `direction` nearest the straight shape (0, 0),
/// oriented to move forward.
Gait default_initial_gait(const ShapeGrid& grid, Direction direction);

/// Maximizes average velocity along the direction subject to average
/// effort <= bound and T >= min_period (augmented Lagrangian with a projected
/// L-BFGS inner loop).
SolveResult solve(const Problem& problem);

struct Baselines {
  double kinematic = 0.0;
  double momentum = 0.0;
  /// Period the kinematic gait is replayed at under the effort bound.
  double kinematic_period = 0.0;
};

/// Minimum-inertia shape for a direction in the grid's frame.
Shape momentum_gait_shape(const ShapeGrid& grid, Direction direction);

/// Kinematic baseline: the p = 0 optimum replayed at momentum p, slowed if
/// needed so the effort bound still holds.
double baseline_kinematic(const ShapeGrid& grid, Direction direction, double momentum, const Gait& kinematic_gait,
                          double effort_bound = 1.0, int steps = kDefaultSteps, double* period = nullptr);
/// Momentum baseline: drift at the minimum-inertia shape.
double baseline_momentum(const ShapeGrid& grid, Direction direction, double momentum);

/// Momentum at which the momentum baseline overtakes the kinematic one.
double crossover_momentum(const ShapeGrid& grid, Direction direction, const Gait& kinematic_gait,
                          double effort_bound = 1.0, int steps = kDefaultSteps);

struct SweepLevel {
  double momentum = 0.0;
  SolveResult result;
  double amplitude = 0.0;
  Baselines baselines;
  /// "continuation", "momentum" or "kinematic": the start that won.
  std::string seed;
};

struct SweepResult {
  Direction direction = Direction::X;
  double crossover = 0.0;
  Gait kinematic_gait = Gait::point({});
  std::vector<SweepLevel> levels;
};

/// levels evenly spaced from 0 to 4 times the crossover momentum.
std::vector<double> default_levels(double crossover, int count = 12);

/// Continuation over ascending momentum levels starting at 0. If `levels` is
/// empty, `level_count` default levels are used.
SweepResult sweep(const ShapeGrid& grid, Direction direction, std::vector<double> levels,
                  const SolverSettings& settings = {}, double effort_bound = 1.0, int level_count = 12);

struct CirclePoint {
  double radius = 0.0;
  double momentum = 0.0;
  double period = 0.0;
  double velocity_total = 0.0;
  double velocity_kinematic = 0.0;
  double velocity_momentum = 0.0;
  /// velocity_momentum / |p| (0 when p = 0).
  double momentum_normalized = 0.0;
};

/// Circles of radius R centered at tangent - (R, R) / sqrt(2), so that they
/// touch `tangent` on the alpha1 = alpha2 line, paced uniformly with the period
/// set by the effort bound. Each circle runs in the direction that turns
/// positively at p = 0. Rotation only.
std::vector<CirclePoint> circle_sweep(const ShapeGrid& grid, const std::vector<double>& radii,
                                      const std::vector<double>& momenta, const Shape& tangent,
                                      double effort_bound = 1.0, int steps = kDefaultSteps);

}  // namespace gaitopt
