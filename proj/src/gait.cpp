#include "gaitopt/gait.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gaitopt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool finite_series(const JointSeries& s) {
  if (!std::isfinite(s.a0)) return false;
  for (int k = 0; k < kFourierOrder; ++k) {
    if (!std::isfinite(s.a[k]) || !std::isfinite(s.b[k])) return false;
  }
  return true;
}

}  // namespace

Gait::Gait(std::array<JointSeries, 2> joints, double period) : joints_(joints), period_(period) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw std::invalid_argument("gait period must be positive and finite");
  }
  for (const auto& s : joints_) {
    if (!finite_series(s)) throw std::invalid_argument("gait coefficients must be finite");
  }
}

Gait Gait::point(const Shape& at, double period) {
  std::array<JointSeries, 2> j{};
  j[0].a0 = at.alpha1;
  j[1].a0 = at.alpha2;
  return Gait(j, period);
}

Gait Gait::circle(const Shape& center, double radius, double period) {
  std::array<JointSeries, 2> j{};
  j[0].a0 = center.alpha1;
  j[0].a[0] = radius;
  j[1].a0 = center.alpha2;
  j[1].b[0] = radius;
  return Gait(j, period);
}

Gait Gait::from_parameters(const GaitVector& z) {
  std::array<JointSeries, 2> j{};
  for (int d = 0; d < 2; ++d) {
    const int o = d * kCoeffsPerJoint;
    j[d].a0 = z[o];
    for (int k = 0; k < kFourierOrder; ++k) {
      j[d].a[k] = z[o + 1 + k];
      j[d].b[k] = z[o + 1 + kFourierOrder + k];
    }
  }
  return Gait(j, z[kPeriodIndex]);
}

GaitVector Gait::parameters() const {
  GaitVector z;
  for (int d = 0; d < 2; ++d) {
    const int o = d * kCoeffsPerJoint;
    z[o] = joints_[d].a0;
    for (int k = 0; k < kFourierOrder; ++k) {
      z[o + 1 + k] = joints_[d].a[k];
      z[o + 1 + kFourierOrder + k] = joints_[d].b[k];
    }
  }
  z[kPeriodIndex] = period_;
  return z;
}

ShapeState Gait::evaluate(double t) const {
  ShapeState out;
  double q[2], qd[2], qdd[2];
  for (int d = 0; d < 2; ++d) {
    const auto& s = joints_[d];
    q[d] = s.a0;
    qd[d] = 0.0;
    qdd[d] = 0.0;
    for (int k = 0; k < kFourierOrder; ++k) {
      const double w = kTwoPi * (k + 1) / period_;
      const double c = std::cos(w * t), sn = std::sin(w * t);
      q[d] += s.a[k] * c + s.b[k] * sn;
      qd[d] += w * (-s.a[k] * sn + s.b[k] * c);
      qdd[d] += -w * w * (s.a[k] * c + s.b[k] * sn);
    }
  }
  out.shape = {q[0], q[1]};
  out.velocity = {qd[0], qd[1]};
  out.acceleration = {qdd[0], qdd[1]};
  return out;
}

Gait Gait::with_period(double period) const { return Gait(joints_, period); }

Gait Gait::reversed() const {
  // alpha(T - t): cosine terms unchanged, sine terms flip sign.
  std::array<JointSeries, 2> j = joints_;
  for (auto& s : j) {
    for (auto& b : s.b) b = -b;
  }
  return Gait(j, period_);
}

std::vector<Waypoint> to_waypoints(const Gait& gait, int n) {
  if (n < kMinWaypoints) throw std::invalid_argument("to_waypoints: need at least 32 intervals");
  std::vector<Waypoint> w(n + 1);
  const double T = gait.period();
  for (int k = 0; k <= n; ++k) {
    // Exact closure: the last sample reuses the phase of the first.
    const double t = (k == n) ? T : k * T / n;
    const ShapeState s = gait.evaluate(k == n ? 0.0 : t);
    w[k].time = t;
    w[k].tau = t;
    w[k].shape = s.shape;
    w[k].velocity = s.velocity;
    w[k].acceleration = s.acceleration;
  }
  return w;
}

std::vector<WaypointJacobian> coefficient_jacobian(const Gait& gait, int n) {
  if (n < kMinWaypoints) throw std::invalid_argument("coefficient_jacobian: need at least 32 intervals");
  const double T = gait.period();
  std::vector<WaypointJacobian> out(n + 1);
  for (int k = 0; k <= n; ++k) {
    WaypointJacobian& J = out[k];
    J.setZero();
    const double t = k * T / n;
    const double dt_dT = static_cast<double>(k) / n;
    const ShapeState s = gait.evaluate(t);
    for (int d = 0; d < 2; ++d) {
      const int o = d * kCoeffsPerJoint;
      const auto& js = gait.joints()[d];
      J(d, o) = 1.0;
      // d(alpha)/dT and d(alphadot)/dT at fixed t, from the basis frequency.
      double dq_dT = 0.0, dqd_dT = 0.0;
      for (int m = 0; m < kFourierOrder; ++m) {
        const double w = kTwoPi * (m + 1) / T;
        const double c = std::cos(w * t), sn = std::sin(w * t);
        J(d, o + 1 + m) = c;
        J(d, o + 1 + kFourierOrder + m) = sn;
        J(3 + d, o + 1 + m) = -w * sn;
        J(3 + d, o + 1 + kFourierOrder + m) = w * c;
        const double dw_dT = -w / T;
        const double dphase = dw_dT * t;
        dq_dT += (-js.a[m] * sn + js.b[m] * c) * dphase;
        dqd_dT += dw_dT * (-js.a[m] * sn + js.b[m] * c) + w * (-js.a[m] * c - js.b[m] * sn) * dphase;
      }
      // Basis dependence plus the shift of the sample time t_k = k T / n.
      J(d, kPeriodIndex) = dq_dT + s.velocity[d] * dt_dT;
      J(3 + d, kPeriodIndex) = dqd_dT + s.acceleration[d] * dt_dT;
    }
    J(2, kPeriodIndex) = dt_dT;
  }
  return out;
}

double amplitude(const Gait& gait) {
  double sum = 0.0;
  for (const auto& s : gait.joints()) {
    for (int k = 0; k < kFourierOrder; ++k) sum += 0.5 * (s.a[k] * s.a[k] + s.b[k] * s.b[k]);
  }
  return std::sqrt(sum);
}

void to_json(nlohmann::json& j, const Gait& gait) {
  nlohmann::json joints = nlohmann::json::array();
  for (const auto& s : gait.joints()) {
    nlohmann::json row = nlohmann::json::array();
    row.push_back(s.a0);
    for (double a : s.a) row.push_back(a);
    for (double b : s.b) row.push_back(b);
    joints.push_back(row);
  }
  j = nlohmann::json{{"joints", joints}, {"period", gait.period()}};
}

Gait gait_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("gait: expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "joints" && key != "period") throw std::invalid_argument("gait: unknown key '" + key + "'");
  }
  if (!j.contains("joints") || !j.contains("period")) {
    throw std::invalid_argument("gait: 'joints' and 'period' are required");
  }
  const auto& joints = j.at("joints");
  if (!joints.is_array() || joints.size() != 2) {
    throw std::invalid_argument("gait.joints: expected two coefficient rows");
  }
  if (!j.at("period").is_number()) throw std::invalid_argument("gait.period: expected a number");
  std::array<JointSeries, 2> s{};
  for (int d = 0; d < 2; ++d) {
    const auto& row = joints[d];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(kCoeffsPerJoint)) {
      throw std::invalid_argument("gait.joints[" + std::to_string(d) +
                                  "]: expected 9 numbers [a0, a1..a4, b1..b4]");
    }
    for (const auto& v : row) {
      if (!v.is_number()) throw std::invalid_argument("gait.joints: coefficients must be numbers");
    }
    s[d].a0 = row[0].get<double>();
    for (int k = 0; k < kFourierOrder; ++k) {
      s[d].a[k] = row[1 + k].get<double>();
      s[d].b[k] = row[1 + kFourierOrder + k].get<double>();
    }
  }
  return Gait(s, j.at("period").get<double>());
}

}  // namespace gaitopt
