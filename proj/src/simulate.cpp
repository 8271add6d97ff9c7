#include "gaitopt/simulate.hpp"

#include <stdexcept>

namespace gaitopt {

namespace {

struct Kinematics {
  ShapeState s;
  InertiaMatrix M;
  ConnectionSample c;
};

Kinematics kinematics(const SystemModel& model, const Gait& gait, double t) {
  Kinematics k;
  k.s = gait.evaluate(t);
  k.M = inertia_matrix(model, k.s.shape);
  k.c = local_connection(k.M);
  return k;
}

AlgebraVector body_velocity(const Kinematics& k, const GroupElement& g, const Covector& p) {
  return AlgebraVector(Vec3(-k.c.A * k.s.velocity + k.c.Mgg_inv * (dual_adjoint_matrix(g) * p.v)));
}

Vec2 torque(const SystemModel& model, const Kinematics& k, const GroupElement& g, const Covector& p) {
  const InertiaMatrix& M = k.M;
  const Mat3& Minv = k.c.Mgg_inv;
  const Vec2& rd = k.s.velocity;
  const Vec2& rdd = k.s.acceleration;
  const Mat5 dM[2] = {inertia_derivative(model, k.s.shape, 0), inertia_derivative(model, k.s.shape, 1)};
  const Mat5 Mdot = dM[0] * rd[0] + dM[1] * rd[1];

  // Body momentum q = Ad*_g p obeys qdot = ad_xi^T q.
  const Vec3 q = dual_adjoint_matrix(g) * p.v;
  const Vec3 xi = Minv * (q - M.M_gr * rd);
  const Vec3 qdot = ad_matrix(AlgebraVector(xi)).transpose() * q;
  const Vec3 xidot =
      Minv * (qdot - Mdot.topLeftCorner<3, 3>() * xi - Mdot.topRightCorner<3, 2>() * rd - M.M_gr * rdd);
  const Vec2 pr_dot = Mdot.topRightCorner<3, 2>().transpose() * xi + M.M_gr.transpose() * xidot +
                      Mdot.bottomRightCorner<2, 2>() * rd + M.M_rr * rdd;

  Eigen::Matrix<double, 5, 1> v;
  v << xi, rd;
  return pr_dot - 0.5 * Vec2(v.dot(dM[0] * v), v.dot(dM[1] * v));
}

// Middle-link frame integration. kin holds kinematics at every half step.
struct Run {
  std::vector<Kinematics> kin;
  std::vector<GroupElement> poses;
  std::vector<double> headings;
};

Run run(const SystemModel& model, const Gait& gait, const Covector& p, const GroupElement& start, double heading,
        int steps) {
  if (steps < kMinSteps) throw std::invalid_argument("integrate_gait: need at least 16 steps");
  const double dt = gait.period() / steps;
  Run r;
  r.kin.resize(2 * steps + 1);
  for (int h = 0; h <= 2 * steps; ++h) r.kin[h] = kinematics(model, gait, 0.5 * h * dt);
  r.poses.resize(steps + 1);
  r.headings.resize(steps + 1);

  GroupElement g = start;
  for (int n = 0;; ++n) {
    r.poses[n] = g;
    r.headings[n] = heading;
    if (n == steps) break;
    const Kinematics& a = r.kin[2 * n];
    const Kinematics& m = r.kin[2 * n + 1];
    const Kinematics& b = r.kin[2 * n + 2];
    const AlgebraVector k1 = body_velocity(a, g, p);
    const AlgebraVector u2 = 0.5 * dt * k1;
    const AlgebraVector k2 = dexp_inv_right(u2, body_velocity(m, g * exp(u2), p));
    const AlgebraVector u3 = 0.5 * dt * k2;
    const AlgebraVector k3 = dexp_inv_right(u3, body_velocity(m, g * exp(u3), p));
    const AlgebraVector u4 = dt * k3;
    const AlgebraVector k4 = dexp_inv_right(u4, body_velocity(b, g * exp(u4), p));
    const AlgebraVector u = (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    g = g * exp(u);
    heading += u.vtheta();
  }
  return r;
}

double trapezoid_mean(const std::vector<double>& f) {
  const int n = static_cast<int>(f.size()) - 1;
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) sum += ((k == 0 || k == n) ? 0.5 : 1.0) * f[k];
  return sum / n;
}

}  // namespace

Trajectory integrate_gait(const ShapeGrid& grid, const Gait& gait, const Covector& p, const GroupElement& g0,
                          int steps) {
  const SystemModel& model = grid.model();
  const GridSample b0 = grid.sample(gait.evaluate(0.0).shape);
  const Run r = run(model, gait, p, g0 * b0.beta.inverse(), g0.theta - b0.beta_angle, steps);

  Trajectory traj;
  traj.momentum = p;
  traj.period = gait.period();
  traj.steps = steps;
  traj.samples.resize(steps + 1);
  for (int n = 0; n <= steps; ++n) {
    const Kinematics& k = r.kin[2 * n];
    TrajectorySample& s = traj.samples[n];
    s.t = n * traj.period / steps;
    s.shape = k.s.shape;
    s.shape_velocity = k.s.velocity;
    s.shape_acceleration = k.s.acceleration;
    s.pose_original = r.poses[n];
    s.heading_original = r.headings[n];
    s.body_velocity_original = body_velocity(k, s.pose_original, p);
    Eigen::Matrix<double, 5, 1> v;
    v << s.body_velocity_original.v, s.shape_velocity;
    s.kinetic_energy = 0.5 * v.dot(k.M.full() * v);
    s.shape_momentum = k.M.M_gr.transpose() * s.body_velocity_original.v + k.M.M_rr * s.shape_velocity;
    s.force = torque(model, k, s.pose_original, p);

    const GridSample b = grid.sample(s.shape);
    s.pose = s.pose_original * b.beta;
    s.heading = s.heading_original + b.beta_angle;
    s.body_velocity = AlgebraVector(Vec3(adjoint(b.beta.inverse()) * s.body_velocity_original.v +
                                         b.grad_beta * s.shape_velocity));
  }
  return traj;
}

void actuator_forces(const SystemModel& model, Trajectory& traj) {
  for (auto& s : traj.samples) {
    Kinematics k;
    k.s = {s.shape, s.shape_velocity, s.shape_acceleration};
    k.M = inertia_matrix(model, s.shape);
    k.c = local_connection(k.M);
    s.force = torque(model, k, s.pose_original, traj.momentum);
  }
}

double average_effort(const Trajectory& traj) {
  std::vector<double> f;
  f.reserve(traj.samples.size());
  for (const auto& s : traj.samples) f.push_back(s.force.squaredNorm());
  return trapezoid_mean(f);
}

double average_effort(const ShapeGrid& grid, const Gait& gait, const Covector& p, int steps) {
  // Same run as integrate_gait without the frame-change reporting.
  const SystemModel& model = grid.model();
  const GridSample b0 = grid.sample(gait.evaluate(0.0).shape);
  const Run r = run(model, gait, p, b0.beta.inverse(), -b0.beta_angle, steps);
  std::vector<double> f(steps + 1);
  for (int n = 0; n <= steps; ++n) f[n] = torque(model, r.kin[2 * n], r.poses[n], p).squaredNorm();
  return trapezoid_mean(f);
}

GaitOutcome outcome(const Trajectory& traj) {
  const TrajectorySample& a = traj.samples.front();
  const TrajectorySample& b = traj.samples.back();
  const GroupElement rel = a.pose.inverse() * b.pose;
  GaitOutcome o;
  o.displacement = Vec3(rel.x, rel.y, b.heading - a.heading);
  o.average_velocity = o.displacement / traj.period;
  o.effort = average_effort(traj);
  return o;
}

GaitOutcome evaluate_gait(const ShapeGrid& grid, const Gait& gait, const Covector& p, int steps) {
  return outcome(integrate_gait(grid, gait, p, GroupElement::identity(), steps));
}

double drift_velocity(const ShapeGrid& grid, const Shape& r, const Covector& p, Direction direction) {
  const Vec3 xi = grid.interpolate(r).Mgg_inv * p.v;
  return xi[static_cast<int>(direction)];
}

}  // namespace gaitopt
