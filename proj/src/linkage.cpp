#include "gaitopt/linkage.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gaitopt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_positive(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

// Left-trivialized shape velocity of link i per unit joint rate (constant in r).
std::array<Mat32, 3> shape_columns(const SystemModel& model) {
  const auto& L = model.links();
  std::array<Mat32, 3> s;
  for (auto& m : s) m.setZero();
  s[0].col(0) << 0.0, L[0].length / 2.0, -1.0;
  s[2].col(1) << 0.0, L[2].length / 2.0, 1.0;
  return s;
}

}  // namespace

Direction parse_direction(const std::string& s) {
  if (s == "x") return Direction::X;
  if (s == "y") return Direction::Y;
  if (s == "theta") return Direction::Theta;
  throw std::invalid_argument("direction must be one of x, y, theta (got '" + s + "')");
}

std::string to_string(Direction d) {
  switch (d) {
    case Direction::X: return "x";
    case Direction::Y: return "y";
    case Direction::Theta: return "theta";
  }
  return "?";
}

void LinkGeometry::validate() const {
  if (!(length > 0.0)) throw std::invalid_argument("link length must be > 0");
  if (!(aspect_ratio > 0.0 && aspect_ratio <= 1.0)) {
    throw std::invalid_argument("link aspect_ratio must lie in (0, 1]");
  }
  if (!(body_density >= 0.0)) throw std::invalid_argument("body_density must be >= 0");
  if (!(fluid_density >= 0.0)) throw std::invalid_argument("fluid_density must be >= 0");
}

Mat3 link_inertia(const LinkGeometry& geom) {
  constexpr double pi = std::numbers::pi;
  const double a = geom.length / 2.0;
  const double b = a * geom.aspect_ratio;
  const double m = geom.body_density * pi * a * b;
  const double J = m * (a * a + b * b) / 4.0;
  const double rho = geom.fluid_density;
  const double m_ax = rho * pi * b * b;
  const double m_ay = rho * pi * a * a;
  const double d = a * a - b * b;
  const double J_a = rho * (pi / 8.0) * d * d;
  return Vec3(m + m_ax, m + m_ay, J + J_a).asDiagonal();
}

SystemModel::SystemModel(std::string name, std::array<LinkGeometry, 3> links)
    : name_(std::move(name)), links_(links) {
  for (int i = 0; i < 3; ++i) {
    links_[i].validate();
    inertia_[i] = gaitopt::link_inertia(links_[i]);
  }
}

SystemModel SystemModel::swimmer() {
  const LinkGeometry link{1.0, 0.1, 1.0, 1.0};
  return SystemModel("swimmer", {link, link, link});
}

SystemModel SystemModel::snake() {
  const LinkGeometry arm{1.0, 0.1, 1.0, 0.0};
  const LinkGeometry center{2.0, 0.1, 1.0, 0.0};
  return SystemModel("snake", {arm, center, arm});
}

SystemModel SystemModel::preset(const std::string& name) {
  if (name == "swimmer") return swimmer();
  if (name == "snake") return snake();
  throw std::invalid_argument("unknown system preset '" + name + "' (expected swimmer or snake)");
}

bool SystemModel::has_fluid() const {
  for (const auto& l : links_) {
    if (l.fluid_density > 0.0) return true;
  }
  return false;
}

std::array<GroupElement, 3> forward_kinematics(const SystemModel& model, const Shape& r) {
  const auto& L = model.links();
  const double h0 = L[0].length / 2.0, h1 = L[1].length / 2.0, h2 = L[2].length / 2.0;
  return {GroupElement(-h1 - h0 * std::cos(r.alpha1), h0 * std::sin(r.alpha1), -r.alpha1),
          GroupElement::identity(),
          GroupElement(h1 + h2 * std::cos(r.alpha2), h2 * std::sin(r.alpha2), r.alpha2)};
}

std::array<Mat35, 3> link_jacobians(const SystemModel& model, const Shape& r) {
  const auto frames = forward_kinematics(model, r);
  const auto cols = shape_columns(model);
  std::array<Mat35, 3> J;
  for (int i = 0; i < 3; ++i) {
    J[i].leftCols<3>() = adjoint(frames[i].inverse());
    J[i].rightCols<2>() = cols[i];
  }
  return J;
}

Mat5 InertiaMatrix::full() const {
  Mat5 m;
  m.topLeftCorner<3, 3>() = M_gg;
  m.topRightCorner<3, 2>() = M_gr;
  m.bottomLeftCorner<2, 3>() = M_gr.transpose();
  m.bottomRightCorner<2, 2>() = M_rr;
  return m;
}

InertiaMatrix InertiaMatrix::from_full(const Mat5& m) {
  InertiaMatrix out;
  out.M_gg = m.topLeftCorner<3, 3>();
  out.M_gr = m.topRightCorner<3, 2>();
  out.M_rr = m.bottomRightCorner<2, 2>();
  return out;
}

InertiaMatrix inertia_matrix(const SystemModel& model, const Shape& r) {
  const auto J = link_jacobians(model, r);
  Mat5 M = Mat5::Zero();
  for (int i = 0; i < 3; ++i) {
    M.noalias() += J[i].transpose() * model.link_inertia(i) * J[i];
  }
  M = 0.5 * (M + M.transpose());
  if (Eigen::LLT<Mat5>(M).info() != Eigen::Success) {
    throw std::runtime_error("inertia_matrix: generalized inertia is not positive definite");
  }
  return InertiaMatrix::from_full(M);
}

Mat5 inertia_derivative(const SystemModel& model, const Shape& r, int k) {
  const auto J = link_jacobians(model, r);
  const auto cols = shape_columns(model);
  Mat5 dM = Mat5::Zero();
  for (int i = 0; i < 3; ++i) {
    const AlgebraVector eta(cols[i].col(k));
    Mat35 dJ = Mat35::Zero();
    dJ.leftCols<3>() = -ad_matrix(eta) * J[i].leftCols<3>();
    const Mat35 mJ = model.link_inertia(i) * J[i];
    dM.noalias() += dJ.transpose() * mJ;
  }
  return dM + dM.transpose();
}

Mat3 locked_inertia_in_frame(const Mat3& M_gg, const GroupElement& beta) {
  const Mat3 ad = adjoint(beta);
  return ad.transpose() * M_gg * ad;
}

Vec2 mass_center(const SystemModel& model, const Shape& r) {
  const auto frames = forward_kinematics(model, r);
  Vec2 sum = Vec2::Zero();
  double total = 0.0;
  for (int i = 0; i < 3; ++i) {
    // Mass plus the mean of the two added masses.
    const double w = 0.5 * (model.link_inertia(i)(0, 0) + model.link_inertia(i)(1, 1));
    sum += w * Vec2(frames[i].x, frames[i].y);
    total += w;
  }
  return sum / total;
}

FrameField centered_frame(const SystemModel& model) {
  return [&model](const Shape& r) {
    const Vec2 c = mass_center(model, r);
    return GroupElement(c[0], c[1], 0.0);
  };
}

Shape minimum_inertia_shape(const SystemModel& model, Direction direction,
                            const FrameField& frame, int scan_resolution) {
  const FrameField beta = frame ? frame : centered_frame(model);
  const int d = static_cast<int>(direction);
  auto entry = [&](double a1, double a2) {
    const Shape r{a1, a2};
    return locked_inertia_in_frame(inertia_matrix(model, r).M_gg, beta(r))(d, d);
  };

  const double h = kTwoPi / scan_resolution;
  double best = std::numeric_limits<double>::infinity();
  Vec2 x(0.0, 0.0);
  for (int i = 0; i < scan_resolution; ++i) {
    for (int j = 0; j < scan_resolution; ++j) {
      const double v = entry(i * h, j * h);
      if (v < best) {
        best = v;
        x = {i * h, j * h};
      }
    }
  }

  // Compass search around the best node.
  double step = h;
  const std::array<Vec2, 4> dirs{Vec2(1, 0), Vec2(-1, 0), Vec2(0, 1), Vec2(0, -1)};
  while (step > 1e-10) {
    bool moved = false;
    for (const auto& dir : dirs) {
      const Vec2 trial = x + step * dir;
      const double v = entry(trial[0], trial[1]);
      if (v < best) {
        best = v;
        x = trial;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
  return {wrap_positive(x[0]), wrap_positive(x[1])};
}

double periodic_distance(const Shape& a, const Shape& b) {
  const double d1 = std::abs(wrap_angle(a.alpha1 - b.alpha1));
  const double d2 = std::abs(wrap_angle(a.alpha2 - b.alpha2));
  return std::hypot(d1, d2);
}

}  // namespace gaitopt
