#include "gaitopt/optimize.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gaitopt {

namespace {

constexpr double kPeriodCap = 1e4;

struct Values {
  double velocity = 0.0;
  double effort = 0.0;
  double displacement = 0.0;
};

Values values(const Problem& pr, const Gait& gait, Trajectory* keep = nullptr) {
  Trajectory traj = integrate_gait(*pr.grid, gait, pr.momentum_covector(), GroupElement::identity(),
                                   pr.settings.steps);
  const GaitOutcome o = outcome(traj);
  Values v;
  v.displacement = o.displacement[static_cast<int>(pr.direction)];
  v.velocity = v.displacement / gait.period();
  v.effort = o.effort;
  if (keep) *keep = std::move(traj);
  return v;
}

GaitVector velocity_gradient_from(const Problem& pr, const Gait& gait, const Trajectory& traj, double disp) {
  const auto J = displacement_jacobian(*pr.grid, gait, pr.momentum_covector(), traj, pr.settings.transport);
  const double T = gait.period();
  GaitVector g = J.row(static_cast<int>(pr.direction)).transpose() / T;
  g[kPeriodIndex] -= disp / (T * T);
  return g;
}

double effort_at(const Problem& pr, const GaitVector& z) {
  return average_effort(*pr.grid, Gait::from_parameters(z), pr.momentum_covector(), pr.settings.steps);
}

GaitVector project(GaitVector z, double min_period) {
  z[kPeriodIndex] = std::max(z[kPeriodIndex], min_period);
  return z;
}

// Augmented Lagrangian for maximizing v subject to h = E / c - 1 <= 0.
struct Merit {
  double phi = 0.0;
  GaitVector grad = GaitVector::Zero();
  Values val;
  GaitVector gv = GaitVector::Zero();
  GaitVector gh = GaitVector::Zero();
};

double penalty(double h, double lambda, double rho) {
  const double t = std::max(0.0, lambda + rho * h);
  return (t * t - lambda * lambda) / (2.0 * rho);
}

// Effort need not fall monotonically as a gait slows (holding torques grow
// with the time spent away from the minimum-inertia shape), so an infeasible
// start is repaired by a scan instead of bisection. The gait is pulled toward
// the minimum-inertia point in small steps, trying periods near its own; the
// first pull with a feasible period wins, taking its fastest period. If that
// fails, the whole period range is scanned in larger steps.
std::optional<Gait> repair_start(const Problem& pr, const Gait& start) {
  const SolverSettings& st = pr.settings;
  const Shape point = momentum_gait_shape(*pr.grid, pr.direction);
  const GaitVector z0 = start.parameters();
  GaitVector target = GaitVector::Zero();
  target[0] = z0[0] + wrap_angle(point.alpha1 - z0[0]);
  target[kCoeffsPerJoint] = z0[kCoeffsPerJoint] + wrap_angle(point.alpha2 - z0[kCoeffsPerJoint]);
  target[kPeriodIndex] = z0[kPeriodIndex];

  auto scan = [&](const std::vector<double>& pulls, const std::vector<double>& periods, bool first_wins) {
    std::optional<std::pair<double, Gait>> best;
    for (double s : pulls) {
      const Gait blended = Gait::from_parameters(z0 + s * (target - z0));
      for (double T : periods) {
        if (T < st.min_period) continue;
        const Gait g = blended.with_period(T);
        const Values v = values(pr, g);
        if (v.effort <= pr.effort_bound && (!best || v.velocity > best->first)) best.emplace(v.velocity, g);
      }
      if (best && first_wins) break;
    }
    return best;
  };

  std::vector<double> near, all, fine, coarse;
  for (int k = -8; k <= 8; ++k) near.push_back(start.period() * std::pow(2.0, k / 8.0));
  for (int k = 0; k < 48; ++k) all.push_back(st.min_period * std::pow(kPeriodCap / st.min_period, k / 47.0));
  for (int k = 0; k <= 50; ++k) fine.push_back(k / 50.0);
  for (int k = 0; k <= 10; ++k) coarse.push_back(k / 10.0);

  auto best = scan(fine, near, true);
  if (!best) best = scan(coarse, all, false);
  if (!best) return std::nullopt;
  return best->second;
}

}  // namespace

void SolverSettings::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("solver.max_iterations must be >= 1");
  if (!(kkt_tolerance > 0.0)) throw std::invalid_argument("solver.kkt_tolerance must be positive");
  if (steps < kMinSteps) throw std::invalid_argument("solver.steps must be >= 16");
  if (!(fd_step > 0.0 && fd_step < 1e-2)) throw std::invalid_argument("solver.fd_step must lie in (0, 0.01)");
  if (!(min_period > 0.0)) throw std::invalid_argument("solver.min_period must be positive");
}

Covector aligned_momentum(Direction direction, double magnitude) {
  Covector p;
  p.v[static_cast<int>(direction)] = magnitude;
  return p;
}

Covector Problem::momentum_covector() const { return aligned_momentum(direction, momentum); }

void Problem::validate() const {
  if (!grid) throw std::invalid_argument("problem: grid is required");
  if (direction == Direction::Y) throw std::invalid_argument("problem.direction must be x or theta");
  if (!std::isfinite(momentum)) throw std::invalid_argument("problem.momentum must be finite");
  if (!(effort_bound > 0.0)) throw std::invalid_argument("problem.effort_bound must be positive");
  settings.validate();
}

double displacement(const Problem& problem, const Gait& gait) { return values(problem, gait).displacement; }

double average_velocity(const Problem& problem, const Gait& gait) { return values(problem, gait).velocity; }

Eigen::Matrix<double, 3, kGaitParameters> displacement_jacobian(const ShapeGrid& grid, const Gait& gait,
                                                                const Covector& p, const Trajectory& traj,
                                                                Transport transport) {
  const int n = traj.steps;
  const std::vector<WaypointJacobian> J = coefficient_jacobian(gait, n);
  const double dt = gait.period() / n;

  // Weights W(t) = C Psi(T, t): C maps a body-frame variation at the end to
  // the reported (x, y, heading) and Psi transports the linearized
  // reconstruction chi' = L chi, L = -ad_xi - dA3/dg, from t to T.
  std::vector<Mat3> W(n + 1, Mat3::Identity());
  if (transport == Transport::Adjoint) {
    std::vector<Mat3> L(n + 1);
    for (int k = 0; k <= n; ++k) {
      const TrajectorySample& s = traj.samples[k];
      const Mat3 Minv = grid.interpolate(s.shape).Mgg_inv;
      const Vec3 q = dual_adjoint_matrix(s.pose) * p.v;
      Mat3 G;
      for (int m = 0; m < 3; ++m) G.col(m) = -Minv * (ad_matrix(AlgebraVector(Vec3(Vec3::Unit(m)))).transpose() * q);
      L[k] = -ad_matrix(s.body_velocity) - G;
    }
    const GroupElement rel = traj.samples.front().pose.inverse() * traj.samples.back().pose;
    const double c = std::cos(rel.theta), sn = std::sin(rel.theta);
    W[n] << c, -sn, 0, sn, c, 0, 0, 0, 1;
    // Backward RK4 for W' = -W L.
    for (int k = n - 1; k >= 0; --k) {
      const Mat3 Lm = 0.5 * (L[k] + L[k + 1]);
      auto f = [](const Mat3& w, const Mat3& l) -> Mat3 { return w * l; };
      const Mat3 k1 = f(W[k + 1], L[k + 1]);
      const Mat3 k2 = f(W[k + 1] + 0.5 * dt * k1, Lm);
      const Mat3 k3 = f(W[k + 1] + 0.5 * dt * k2, Lm);
      const Mat3 k4 = f(W[k + 1] + dt * k3, L[k]);
      W[k] = W[k + 1] + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }

  Eigen::Matrix<double, 3, kGaitParameters> out = Eigen::Matrix<double, 3, kGaitParameters>::Zero();
  for (int k = 0; k <= n; ++k) {
    const TrajectorySample& s = traj.samples[k];
    const double w = (k == 0 || k == n) ? 0.5 * dt : dt;
    const CCFSample D = ccf(grid, s.shape, s.pose, p);

    // Tangent, normal and binormal of the lifted gait.
    const Vec3 phidot(s.shape_velocity[0], s.shape_velocity[1], 1.0);
    const Vec3 tangent = phidot.normalized();
    Vec3 normal = Vec3(s.shape_acceleration[0], s.shape_acceleration[1], 0.0);
    normal -= normal.dot(tangent) * tangent;
    if (normal.norm() < 1e-9) {
      Eigen::Index axis;
      tangent.cwiseAbs().minCoeff(&axis);
      normal = Vec3::Unit(axis) - tangent[axis] * tangent;
    }
    normal.normalize();
    const Vec3 binormal = tangent.cross(normal);
    const Vec3 Dn = W[k] * D.apply(normal, phidot).v;
    const Vec3 Db = W[k] * D.apply(binormal, phidot).v;

    for (int j = 0; j < kGaitParameters; ++j) {
      const Vec3 dphi = J[k].block<3, 1>(0, j);
      if (dphi.isZero(0.0)) continue;
      out.col(j) += w * (dphi.dot(normal) * Dn + dphi.dot(binormal) * Db);
    }
  }

  // Boundary terms of the lifted gait: the shape connection at the start and
  // end, and the drift along tau as the end moves by dT.
  const TrajectorySample& first = traj.samples.front();
  const TrajectorySample& end = traj.samples.back();
  const LiftedConnection a0 = lifted_connection(grid, first.shape, first.pose, p);
  const LiftedConnection a1 = lifted_connection(grid, end.shape, end.pose, p);
  for (int j = 0; j < kGaitParameters; ++j) {
    const Vec3 d0 = J.front().block<3, 1>(0, j), d1 = J.back().block<3, 1>(0, j);
    const Vec3 start = d0[0] * a0.A1.v + d0[1] * a0.A2.v + d0[2] * a0.A3.v;
    const Vec3 stop = d1[0] * a1.A1.v + d1[1] * a1.A2.v + d1[2] * a1.A3.v;
    out.col(j) += W[0] * start - W[n] * stop;
  }
  return out;
}

GaitVector displacement_gradient(const Problem& problem, const Gait& gait) {
  problem.validate();
  Trajectory traj;
  values(problem, gait, &traj);
  const auto J = displacement_jacobian(*problem.grid, gait, problem.momentum_covector(), traj,
                                       problem.settings.transport);
  return J.row(static_cast<int>(problem.direction)).transpose();
}

GaitVector velocity_gradient(const Problem& problem, const Gait& gait) {
  problem.validate();
  Trajectory traj;
  const Values v = values(problem, gait, &traj);
  return velocity_gradient_from(problem, gait, traj, v.displacement);
}

GaitVector effort_gradient(const Problem& problem, const Gait& gait) {
  problem.validate();
  const GaitVector z = gait.parameters();
  GaitVector g;
  for (int j = 0; j < kGaitParameters; ++j) {
    const double h = problem.settings.fd_step * std::max(1.0, std::abs(z[j]));
    GaitVector zp = z, zm = z;
    zp[j] += h;
    zm[j] -= h;
    g[j] = (effort_at(problem, zp) - effort_at(problem, zm)) / (2.0 * h);
  }
  return g;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::Stalled: return "stalled";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

std::optional<double> feasible_period(const ShapeGrid& grid, const Gait& gait, const Covector& p, double bound,
                                      int steps, double min_period) {
  auto effort = [&](double T) { return average_effort(grid, gait.with_period(T), p, steps); };
  double T = std::max(gait.period(), min_period);
  double lo, hi;  // lo infeasible, hi feasible
  if (effort(T) > bound) {
    lo = T;
    hi = 2.0 * T;
    while (effort(hi) > bound) {
      lo = hi;
      hi *= 2.0;
      if (hi > kPeriodCap) return std::nullopt;
    }
  } else {
    hi = T;
    lo = 0.5 * T;
    while (effort(lo) <= bound) {
      hi = lo;
      if (hi <= min_period) return min_period;
      lo = std::max(0.5 * lo, min_period);
      if (lo == hi) return min_period;
    }
  }
  for (int it = 0; it < 60 && hi / lo > 1.0 + 1e-12; ++it) {
    const double mid = std::sqrt(lo * hi);
    (effort(mid) > bound ? lo : hi) = mid;
  }
  return hi;
}

Gait default_initial_gait(const ShapeGrid& grid, Direction direction) {
  const int n = grid.resolution();
  const int d = static_cast<int>(direction);
  std::vector<double> field(static_cast<std::size_t>(n) * n);
  double peak = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      field[i * n + j] = ccf(grid, grid.node_shape(i, j), GroupElement::identity(), Covector()).D12[d];
      peak = std::max(peak, std::abs(field[i * n + j]));
    }
  }
  auto at = [&](int i, int j) { return field[((i + n) % n) * n + (j + n) % n]; };
  // Strongest local extremum of the curvature closest to the straight shape.
  std::optional<std::pair<int, int>> best;
  double best_dist = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = std::abs(at(i, j));
      if (v < 0.25 * peak) continue;
      bool extremum = true;
      for (int di = -1; di <= 1 && extremum; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if ((di || dj) && std::abs(at(i + di, j + dj)) > v) {
            extremum = false;
            break;
          }
        }
      }
      if (!extremum) continue;
      const double dist = periodic_distance(grid.node_shape(i, j), {0.0, 0.0});
      if (!best || dist < best_dist - 1e-12 ||
          (dist < best_dist + 1e-12 && v > std::abs(at(best->first, best->second)))) {
        best = {i, j};
        best_dist = dist;
      }
    }
  }
  const Shape center = grid.node_shape(best->first, best->second);
  const Gait circle = Gait::circle(center, 0.5, 1.0);
  return at(best->first, best->second) >= 0.0 ? circle : circle.reversed();
}

SolveResult solve(const Problem& pr) {
  pr.validate();
  const SolverSettings& st = pr.settings;
  const double c = pr.effort_bound;
  const Covector p = pr.momentum_covector();

  Gait start = pr.initial ? *pr.initial : default_initial_gait(*pr.grid, pr.direction);
  if (start.period() < st.min_period) start = start.with_period(st.min_period);
  SolveResult res;
  if (values(pr, start).effort > c) {
    const auto repaired = repair_start(pr, start);
    if (!repaired) {
      res.gait = start;
      res.status = SolveStatus::Infeasible;
      return res;
    }
    start = *repaired;
  }

  double lambda = 0.0, rho = 10.0;
  auto merit = [&](const GaitVector& z, bool with_gradient) {
    Merit m;
    const Gait g = Gait::from_parameters(z);
    Trajectory traj;
    m.val = values(pr, g, with_gradient ? &traj : nullptr);
    const double h = m.val.effort / c - 1.0;
    m.phi = -m.val.velocity + penalty(h, lambda, rho);
    if (with_gradient) {
      m.gv = velocity_gradient_from(pr, g, traj, m.val.displacement);
      Problem q = pr;
      m.gh = effort_gradient(q, g) / c;
      m.grad = -m.gv + std::max(0.0, lambda + rho * h) * m.gh;
    }
    return m;
  };
  auto projected_step = [&](const GaitVector& z, const GaitVector& g) {
    return (project(z - g, st.min_period) - z).cwiseAbs().maxCoeff();
  };

  GaitVector z = start.parameters();
  std::optional<std::pair<double, GaitVector>> best;
  auto consider = [&](const GaitVector& zz, const Values& v) {
    if (v.effort <= c && (!best || v.velocity > best->first)) best = {v.velocity, zz};
  };

  Merit m = merit(z, true);
  consider(z, m.val);
  int iterations = 0;
  int stalls = 0;
  double kkt = std::numeric_limits<double>::infinity();
  SolveStatus status = SolveStatus::MaxIterations;
  double prev_violation = std::numeric_limits<double>::infinity();

  while (iterations < st.max_iterations) {
    // Inner loop: projected L-BFGS on the merit function.
    std::deque<std::pair<GaitVector, GaitVector>> memory;
    bool inner_stalled = false;
    while (iterations < st.max_iterations && projected_step(z, m.grad) > st.kkt_tolerance) {
      const bool at_bound = z[kPeriodIndex] <= st.min_period && m.grad[kPeriodIndex] > 0.0;
      GaitVector g = m.grad;
      if (at_bound) g[kPeriodIndex] = 0.0;

      GaitVector d = -g;
      if (!memory.empty()) {
        std::vector<double> alpha(memory.size());
        GaitVector q = g;
        for (int i = static_cast<int>(memory.size()) - 1; i >= 0; --i) {
          const auto& [s, y] = memory[i];
          alpha[i] = s.dot(q) / y.dot(s);
          q -= alpha[i] * y;
        }
        const auto& [s0, y0] = memory.back();
        q *= s0.dot(y0) / y0.dot(y0);
        for (std::size_t i = 0; i < memory.size(); ++i) {
          const auto& [s, y] = memory[i];
          const double b = y.dot(q) / y.dot(s);
          q += (alpha[i] - b) * s;
        }
        d = -q;
        if (at_bound) d[kPeriodIndex] = 0.0;
        if (d.dot(g) >= 0.0) {
          memory.clear();
          d = -g;
        }
      }

      bool accepted = false;
      for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
        double step = 1.0;
        const double cap = 0.5 / std::max(d.cwiseAbs().maxCoeff(), 1e-300);
        if (memory.empty()) step = std::min(1.0, 0.1 / std::max(d.cwiseAbs().maxCoeff(), 1e-300));
        step = std::min(step, cap);
        for (int ls = 0; ls < 30; ++ls) {
          const GaitVector zn = project(z + step * d, st.min_period);
          const Merit mn = merit(zn, false);
          if (std::isfinite(mn.phi) && mn.phi <= m.phi + 1e-4 * m.grad.dot(zn - z)) {
            const Merit mg = merit(zn, true);
            const GaitVector s = zn - z, y = mg.grad - m.grad;
            if (s.dot(y) > 1e-10 * s.norm() * y.norm()) {
              memory.emplace_back(s, y);
              if (memory.size() > 10) memory.pop_front();
            }
            z = zn;
            m = mg;
            consider(z, m.val);
            accepted = true;
            break;
          }
          step *= 0.5;
        }
        if (!accepted) {
          memory.clear();
          d = -g;
        }
      }
      ++iterations;
      if (!accepted) {
        inner_stalled = true;
        break;
      }
    }

    // Multiplier update and KKT check on the Lagrangian.
    const double h = m.val.effort / c - 1.0;
    lambda = std::max(0.0, lambda + rho * h);
    const GaitVector gl = -m.gv + lambda * m.gh;
    kkt = std::max({projected_step(z, gl), std::max(h, 0.0), std::abs(lambda * h)});
    if (kkt < st.kkt_tolerance) {
      status = SolveStatus::Converged;
      break;
    }
    const double violation = std::max(h, 0.0);
    if (violation > 0.25 * prev_violation) rho = std::min(rho * 10.0, 1e8);
    prev_violation = violation;
    stalls = inner_stalled ? stalls + 1 : 0;
    if (stalls >= 3) {
      status = SolveStatus::Stalled;
      break;
    }
    m = merit(z, true);
  }

  // Candidates: best feasible iterate and the final iterate, each also retimed
  // onto the effort bound.
  std::vector<Gait> candidates;
  if (best) candidates.push_back(Gait::from_parameters(best->second));
  candidates.push_back(Gait::from_parameters(z));
  const std::size_t base = candidates.size();
  for (std::size_t i = 0; i < base; ++i) {
    if (auto T = feasible_period(*pr.grid, candidates[i], p, c, st.steps, st.min_period)) {
      candidates.push_back(candidates[i].with_period(*T));
    }
  }
  std::optional<std::pair<double, Gait>> chosen;
  for (const Gait& g : candidates) {
    const Values v = values(pr, g);
    if (v.effort <= c && (!chosen || v.velocity > chosen->first)) chosen = {v.velocity, g};
  }
  if (!chosen) {
    res.gait = Gait::from_parameters(z);
    res.status = SolveStatus::Infeasible;
    res.iterations = iterations;
    return res;
  }
  res.gait = chosen->second;
  res.outcome = evaluate_gait(*pr.grid, res.gait, p, st.steps);
  res.velocity = res.outcome.average_velocity[static_cast<int>(pr.direction)];
  res.iterations = iterations;
  res.status = status;
  res.kkt_residual = kkt;
  res.multiplier = lambda;
  return res;
}

Shape momentum_gait_shape(const ShapeGrid& grid, Direction direction) {
  return minimum_inertia_shape(grid.model(), direction, grid.frame_field());
}

double baseline_kinematic(const ShapeGrid& grid, Direction direction, double momentum, const Gait& kinematic_gait,
                          double effort_bound, int steps, double* period) {
  const Covector p = aligned_momentum(direction, momentum);
  Gait g = kinematic_gait;
  if (average_effort(grid, g, p, steps) > effort_bound) {
    const auto T = feasible_period(grid, g, p, effort_bound, steps, std::min(kMinPeriod, g.period()));
    if (!T) {
      if (period) *period = std::numeric_limits<double>::infinity();
      return 0.0;
    }
    g = g.with_period(*T);
  }
  if (period) *period = g.period();
  return evaluate_gait(grid, g, p, steps).average_velocity[static_cast<int>(direction)];
}

double baseline_momentum(const ShapeGrid& grid, Direction direction, double momentum) {
  return drift_velocity(grid, momentum_gait_shape(grid, direction), aligned_momentum(direction, momentum),
                        direction);
}

double crossover_momentum(const ShapeGrid& grid, Direction direction, const Gait& kinematic_gait,
                          double effort_bound, int steps) {
  const double slope = baseline_momentum(grid, direction, 1.0);
  if (!(slope > 0.0)) throw std::runtime_error("crossover: momentum baseline does not increase with momentum");
  auto gap = [&](double p) {
    return baseline_momentum(grid, direction, p) -
           baseline_kinematic(grid, direction, p, kinematic_gait, effort_bound, steps);
  };
  const double v0 = baseline_kinematic(grid, direction, 0.0, kinematic_gait, effort_bound, steps);
  double lo = 0.0, hi = std::max(v0, 1e-6) / slope;
  int guard = 0;
  while (gap(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 40) throw std::runtime_error("crossover: momentum baseline never overtakes");
  }
  for (int it = 0; it < 50 && hi - lo > 1e-9 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> default_levels(double crossover, int count) {
  if (count < 2) throw std::invalid_argument("sweep needs at least two levels");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = 4.0 * crossover * i / (count - 1);
  return out;
}

SweepResult sweep(const ShapeGrid& grid, Direction direction, std::vector<double> levels,
                  const SolverSettings& settings, double effort_bound, int level_count) {
  Problem base;
  base.grid = &grid;
  base.direction = direction;
  base.effort_bound = effort_bound;
  base.settings = settings;
  base.validate();

  SweepResult out;
  out.direction = direction;
  const SolveResult kin = solve(base);
  if (kin.status == SolveStatus::Infeasible) throw std::runtime_error("sweep: p = 0 problem is infeasible");
  out.kinematic_gait = kin.gait;
  out.crossover = crossover_momentum(grid, direction, kin.gait, effort_bound, settings.steps);
  if (levels.empty()) levels = default_levels(out.crossover, level_count);
  if (levels.front() != 0.0) throw std::invalid_argument("sweep: levels must start at 0");
  if (!std::is_sorted(levels.begin(), levels.end())) throw std::invalid_argument("sweep: levels must ascend");

  const Shape point = momentum_gait_shape(grid, direction);
  Gait previous = kin.gait;
  for (double level : levels) {
    SweepLevel L;
    L.momentum = level;
    L.baselines.kinematic = baseline_kinematic(grid, direction, level, kin.gait, effort_bound, settings.steps,
                                               &L.baselines.kinematic_period);
    L.baselines.momentum = baseline_momentum(grid, direction, level);
    if (level == 0.0) {
      L.result = kin;
      L.seed = "continuation";
    } else {
      Problem pr = base;
      pr.momentum = level;
      auto attempt = [&](const Gait& seed, const char* name) {
        pr.initial = seed;
        try {
          SolveResult r = solve(pr);
          if (r.status != SolveStatus::Infeasible &&
              (L.seed.empty() || r.velocity > L.result.velocity)) {
            L.result = r;
            L.seed = name;
          }
        } catch (const std::exception&) {
        }
      };
      attempt(previous, "continuation");
      attempt(Gait::point(point), "momentum");
      const double floor = std::max(L.baselines.kinematic, L.baselines.momentum);
      if (L.seed.empty() || L.result.velocity < floor - 0.01 * std::abs(floor)) {
        attempt(kin.gait.with_period(std::isfinite(L.baselines.kinematic_period) ? L.baselines.kinematic_period
                                                                                 : kin.gait.period()),
                "kinematic");
      }
      if (L.seed.empty()) {
        L.result.status = SolveStatus::Infeasible;
        L.seed = "none";
      }
    }
    L.amplitude = amplitude(L.result.gait);
    if (L.result.status != SolveStatus::Infeasible) previous = L.result.gait;
    out.levels.push_back(std::move(L));
  }
  return out;
}

std::vector<CirclePoint> circle_sweep(const ShapeGrid& grid, const std::vector<double>& radii,
                                      const std::vector<double>& momenta, const Shape& tangent,
                                      double effort_bound, int steps) {
  const int d = static_cast<int>(Direction::Theta);
  std::vector<CirclePoint> out;
  for (double R : radii) {
    if (!(R >= 0.0)) throw std::invalid_argument("circle_sweep: radii must be nonnegative");
    const double off = R / std::numbers::sqrt2;
    Gait gait = R > 0.0 ? Gait::circle({tangent.alpha1 - off, tangent.alpha2 - off}, R, 1.0) : Gait::point(tangent);
    if (R > 0.0 && evaluate_gait(grid, gait, Covector(), steps).displacement[d] < 0.0) gait = gait.reversed();

    for (double L : momenta) {
      const Covector p = aligned_momentum(Direction::Theta, L);
      CirclePoint pt;
      pt.radius = R;
      pt.momentum = L;
      Gait g = gait;
      if (R > 0.0) {
        const auto T = feasible_period(grid, gait, p, effort_bound, steps, 1e-3);
        if (!T) {
          pt.period = std::numeric_limits<double>::infinity();
          out.push_back(pt);
          continue;
        }
        g = gait.with_period(*T);
      }
      pt.period = g.period();
      const Trajectory traj = integrate_gait(grid, g, p, GroupElement::identity(), steps);
      pt.velocity_total = outcome(traj).average_velocity[d];
      double drift = 0.0;
      const int n = traj.steps;
      for (int k = 0; k <= n; ++k) {
        const auto& s = traj.samples[k];
        const double w = (k == 0 || k == n) ? 0.5 : 1.0;
        drift += w * (grid.interpolate(s.shape).Mgg_inv * (dual_adjoint_matrix(s.pose) * p.v))[d];
      }
      pt.velocity_momentum = drift / n;
      pt.velocity_kinematic = pt.velocity_total - pt.velocity_momentum;
      pt.momentum_normalized = L != 0.0 ? pt.velocity_momentum / std::abs(L) : 0.0;
      out.push_back(pt);
    }
  }
  return out;
}

}  // namespace gaitopt
