#include "gaitopt/connection.hpp"

#include <Eigen/LU>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace gaitopt {

namespace {

// Original-frame channels.
constexpr int kOrigA = 0, kOrigMinv = 6, kOrigMgg = 12, kOrigChannels = 18;
// Analysis-frame channels.
constexpr int kA = 0, kMinv = 6, kLocked = 12, kBeta = 18, kGradBeta = 21, kCurl = 27,
              kdMinv1 = 30, kdMinv2 = 36, kChannels = 42;

constexpr std::array<std::pair<int, int>, 6> kSym{{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

void put_sym(PeriodicField& f, int i, int j, int c0, const Mat3& m) {
  for (int k = 0; k < 6; ++k) f.at(i, j, c0 + k) = m(kSym[k].first, kSym[k].second);
}

Mat3 get_sym(const double* v) {
  Mat3 m;
  for (int k = 0; k < 6; ++k) {
    m(kSym[k].first, kSym[k].second) = v[k];
    m(kSym[k].second, kSym[k].first) = v[k];
  }
  return m;
}

Mat3 get_sym(const PeriodicField& f, int i, int j, int c0) {
  double v[6];
  for (int k = 0; k < 6; ++k) v[k] = f.at(i, j, c0 + k);
  return get_sym(v);
}

void put_32(PeriodicField& f, int i, int j, int c0, const Mat32& m) {
  for (int k = 0; k < 6; ++k) f.at(i, j, c0 + k) = m(k % 3, k / 3);
}

Mat32 get_32(const double* v) {
  Mat32 m;
  for (int k = 0; k < 6; ++k) m(k % 3, k / 3) = v[k];
  return m;
}

Mat32 get_32(const PeriodicField& f, int i, int j, int c0) {
  double v[6];
  for (int k = 0; k < 6; ++k) v[k] = f.at(i, j, c0 + k);
  return get_32(v);
}

using Complex = std::complex<double>;

// In-place 2D DFT of an n x n row-major array.
void fft2(std::vector<Complex>& data, int n, bool inverse) {
  Eigen::FFT<double> fft;
  std::vector<Complex> in(n), out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) in[j] = data[i * n + j];
    inverse ? fft.inv(out, in) : fft.fwd(out, in);
    for (int j = 0; j < n; ++j) data[i * n + j] = out[j];
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) in[i] = data[i * n + j];
    inverse ? fft.inv(out, in) : fft.fwd(out, in);
    for (int i = 0; i < n; ++i) data[i * n + j] = out[i];
  }
}

}  // namespace

ConnectionSample local_connection(const InertiaMatrix& M) {
  ConnectionSample s;
  const double scale = M.M_gg.norm();
  if (!(std::abs(M.M_gg.determinant()) > 1e-14 * scale * scale * scale)) {
    throw std::runtime_error("local_connection: locked inertia is singular");
  }
  s.Mgg_inv = M.M_gg.inverse();
  s.Mgg_inv = 0.5 * (s.Mgg_inv + s.Mgg_inv.transpose()).eval();
  s.A = s.Mgg_inv * M.M_gr;
  return s;
}

ConnectionSample local_connection(const SystemModel& model, const Shape& r) {
  return local_connection(inertia_matrix(model, r));
}

Mat3 momentum_distribution(const ConnectionSample& sample, const GroupElement& g) {
  return sample.Mgg_inv * dual_adjoint_matrix(g);
}

ConnectionSample transform_connection(const ConnectionSample& sample, const GroupElement& beta,
                                      const Mat32& grad_beta) {
  const Mat3 ad_inv = adjoint(beta.inverse());
  ConnectionSample out;
  out.A = ad_inv * sample.A - grad_beta;
  out.Mgg_inv = ad_inv * sample.Mgg_inv * ad_inv.transpose();
  return out;
}

PeriodicField solve_orientation_potential(const PeriodicField& a_theta, double* normal_residual) {
  const int n = a_theta.resolution();
  const double h = a_theta.spacing();
  std::vector<Complex> a1(n * n), a2(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      a1[i * n + j] = a_theta.at(i, j, 0);
      a2[i * n + j] = a_theta.at(i, j, 1);
    }
  }
  fft2(a1, n, false);
  fft2(a2, n, false);

  // Symbol of the centered 4th-order first-derivative stencil.
  auto symbol = [&](int k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    return Complex(0.0, (8.0 * std::sin(t) - std::sin(2.0 * t)) / (6.0 * h));
  };
  std::vector<Complex> theta(n * n);
  for (int k1 = 0; k1 < n; ++k1) {
    for (int k2 = 0; k2 < n; ++k2) {
      const Complex g1 = symbol(k1), g2 = symbol(k2);
      const double den = std::norm(g1) + std::norm(g2);
      const int idx = k1 * n + k2;
      theta[idx] = den > 1e-12 ? (std::conj(g1) * a1[idx] + std::conj(g2) * a2[idx]) / den : 0.0;
    }
  }
  fft2(theta, n, true);

  PeriodicField out(n, 1);
  const double pin = theta[0].real();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out.at(i, j, 0) = theta[i * n + j].real() - pin;
  }

  if (normal_residual) {
    // G^T = -G for the antisymmetric stencil.
    PeriodicField r(n, 2);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        r.at(i, j, 0) = out.derivative(0, i, j, 0) - a_theta.at(i, j, 0);
        r.at(i, j, 1) = out.derivative(1, i, j, 0) - a_theta.at(i, j, 1);
      }
    }
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double res = -r.derivative(0, i, j, 0) - r.derivative(1, i, j, 1);
        worst = std::max(worst, std::abs(res));
      }
    }
    *normal_residual = worst;
  }
  out.finalize();
  return out;
}

CoordinateTransform optimize_coordinates(const ShapeGrid& grid) {
  const int n = grid.resolution();
  PeriodicField a_theta(n, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Mat32 A = grid.original_node(i, j).A;
      a_theta.at(i, j, 0) = A(2, 0);
      a_theta.at(i, j, 1) = A(2, 1);
    }
  }
  CoordinateTransform ct;
  const PeriodicField theta = solve_orientation_potential(a_theta, &ct.normal_residual);
  ct.beta = PeriodicField(n, 3);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 c = mass_center(grid.model(), grid.node_shape(i, j));
      ct.beta.at(i, j, 0) = c[0];
      ct.beta.at(i, j, 1) = c[1];
      ct.beta.at(i, j, 2) = theta.at(i, j, 0);
    }
  }
  ct.beta.finalize();
  return ct;
}

ShapeGrid ShapeGrid::build(const SystemModel& model, int resolution, Coordinates coords) {
  ShapeGrid g;
  g.model_ = std::make_shared<const SystemModel>(model);
  g.coords_ = coords;
  g.original_ = PeriodicField(resolution, kOrigChannels);
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const InertiaMatrix M = inertia_matrix(model, g.node_shape(i, j));
      const ConnectionSample s = local_connection(M);
      put_32(g.original_, i, j, kOrigA, s.A);
      put_sym(g.original_, i, j, kOrigMinv, s.Mgg_inv);
      put_sym(g.original_, i, j, kOrigMgg, M.M_gg);
    }
  }
  g.original_.finalize();

  PeriodicField beta(resolution, 3);
  if (coords == Coordinates::MinimumPerturbation) {
    CoordinateTransform ct = optimize_coordinates(g);
    g.orientation_residual_ = ct.normal_residual;
    beta = std::move(ct.beta);
  }

  g.analysis_ = PeriodicField(resolution, kChannels);
  auto& f = g.analysis_;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const GroupElement b(beta.at(i, j, 0), beta.at(i, j, 1), beta.at(i, j, 2));
      const double c = std::cos(b.theta), s = std::sin(b.theta);
      Mat32 grad;
      for (int k = 0; k < 2; ++k) {
        const double dx = beta.derivative(k, i, j, 0), dy = beta.derivative(k, i, j, 1);
        grad.col(k) << c * dx + s * dy, -s * dx + c * dy, beta.derivative(k, i, j, 2);
      }
      const ConnectionSample s_new = transform_connection(g.original_node(i, j), b, grad);
      put_32(f, i, j, kA, s_new.A);
      put_sym(f, i, j, kMinv, s_new.Mgg_inv);
      put_sym(f, i, j, kLocked, locked_inertia_in_frame(g.original_locked_inertia(i, j), b));
      f.at(i, j, kBeta + 0) = beta.at(i, j, 0);
      f.at(i, j, kBeta + 1) = beta.at(i, j, 1);
      f.at(i, j, kBeta + 2) = beta.at(i, j, 2);
      put_32(f, i, j, kGradBeta, grad);
    }
  }
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      for (int r = 0; r < 3; ++r) {
        f.at(i, j, kCurl + r) = f.derivative(0, i, j, kA + 3 + r) - f.derivative(1, i, j, kA + r);
      }
      for (int k = 0; k < 6; ++k) {
        f.at(i, j, kdMinv1 + k) = f.derivative(0, i, j, kMinv + k);
        f.at(i, j, kdMinv2 + k) = f.derivative(1, i, j, kMinv + k);
      }
    }
  }
  f.finalize();
  return g;
}

Shape ShapeGrid::node_shape(int i, int j) const {
  const double h = spacing();
  return {i * h, j * h};
}

ConnectionSample ShapeGrid::original_node(int i, int j) const {
  return {get_32(original_, i, j, kOrigA), get_sym(original_, i, j, kOrigMinv)};
}

Mat3 ShapeGrid::original_locked_inertia(int i, int j) const { return get_sym(original_, i, j, kOrigMgg); }

ConnectionSample ShapeGrid::node(int i, int j) const {
  return {get_32(analysis_, i, j, kA), get_sym(analysis_, i, j, kMinv)};
}

Mat3 ShapeGrid::locked_inertia_node(int i, int j) const { return get_sym(analysis_, i, j, kLocked); }

GroupElement ShapeGrid::beta_node(int i, int j) const {
  return {analysis_.at(i, j, kBeta), analysis_.at(i, j, kBeta + 1), analysis_.at(i, j, kBeta + 2)};
}

ConnectionSample ShapeGrid::interpolate(const Shape& r) const { return sample(r).connection; }

GridSample ShapeGrid::sample(const Shape& r) const {
  std::array<double, kChannels> v;
  analysis_.sample(r, v);
  GridSample s;
  s.connection.A = get_32(&v[kA]);
  s.connection.Mgg_inv = get_sym(&v[kMinv]);
  s.locked_inertia = get_sym(&v[kLocked]);
  s.beta = GroupElement(v[kBeta], v[kBeta + 1], v[kBeta + 2]);
  s.beta_angle = v[kBeta + 2];
  s.grad_beta = get_32(&v[kGradBeta]);
  s.curl_A = Vec3(v[kCurl], v[kCurl + 1], v[kCurl + 2]);
  s.dMinv[0] = get_sym(&v[kdMinv1]);
  s.dMinv[1] = get_sym(&v[kdMinv2]);
  return s;
}

GroupElement ShapeGrid::beta(const Shape& r) const {
  std::array<double, kChannels> v;
  analysis_.sample(r, v);
  return {v[kBeta], v[kBeta + 1], v[kBeta + 2]};
}

FrameField ShapeGrid::frame_field() const {
  return [this](const Shape& r) { return beta(r); };
}

}  // namespace gaitopt
