#include "gaitopt/periodic_field.hpp"

#include "gaitopt/linkage.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gaitopt {

PeriodicField::PeriodicField(int resolution, int channels)
    : n_(resolution),
      channels_(channels),
      h_(2.0 * std::numbers::pi / resolution),
      values_(static_cast<std::size_t>(resolution) * resolution * channels, 0.0) {
  if (resolution < 8) throw std::invalid_argument("PeriodicField: resolution must be >= 8");
  if (channels < 1) throw std::invalid_argument("PeriodicField: need at least one channel");
}

std::size_t PeriodicField::index(int i, int j, int c) const {
  return (static_cast<std::size_t>(wrap(i)) * n_ + wrap(j)) * channels_ + c;
}

double PeriodicField::derivative(int axis, int i, int j, int c) const {
  auto f = [&](int k) { return axis == 0 ? at(i + k, j, c) : at(i, j + k, c); };
  return (-f(2) + 8.0 * f(1) - 8.0 * f(-1) + f(-2)) / (12.0 * h_);
}

void PeriodicField::finalize() {
  const std::size_t size = values_.size();
  d1_.assign(size, 0.0);
  d2_.assign(size, 0.0);
  d12_.assign(size, 0.0);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      for (int c = 0; c < channels_; ++c) {
        d1_[index(i, j, c)] = derivative(0, i, j, c);
        d2_[index(i, j, c)] = derivative(1, i, j, c);
      }
    }
  }
  // Cross derivative: 4th-order stencil along alpha2 applied to d/dalpha1.
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      for (int c = 0; c < channels_; ++c) {
        auto f = [&](int k) { return d1_[index(i, j + k, c)]; };
        d12_[index(i, j, c)] = (-f(2) + 8.0 * f(1) - 8.0 * f(-1) + f(-2)) / (12.0 * h_);
      }
    }
  }
  finalized_ = true;
}

void PeriodicField::sample(const Shape& r, std::span<double> out) const {
  if (!finalized_) throw std::logic_error("PeriodicField::sample before finalize()");
  const double s1 = r.alpha1 / h_, s2 = r.alpha2 / h_;
  const double f1 = std::floor(s1), f2 = std::floor(s2);
  const int i0 = static_cast<int>(f1), j0 = static_cast<int>(f2);
  const double u = s1 - f1, v = s2 - f2;

  // Cubic Hermite basis: value weights (corner 0, 1), slope weights (corner 0, 1).
  auto basis = [](double t, std::array<double, 2>& val, std::array<double, 2>& slope) {
    const double t2 = t * t, t3 = t2 * t;
    val = {2 * t3 - 3 * t2 + 1, -2 * t3 + 3 * t2};
    slope = {t3 - 2 * t2 + t, t3 - t2};
  };
  std::array<double, 2> vu, su, vv, sv;
  basis(u, vu, su);
  basis(v, vv, sv);

  for (int c = 0; c < channels_; ++c) out[c] = 0.0;
  for (int p = 0; p < 2; ++p) {
    for (int q = 0; q < 2; ++q) {
      const std::size_t base = index(i0 + p, j0 + q, 0);
      const double w0 = vu[p] * vv[q];
      const double w1 = su[p] * vv[q] * h_;
      const double w2 = vu[p] * sv[q] * h_;
      const double w3 = su[p] * sv[q] * h_ * h_;
      for (int c = 0; c < channels_; ++c) {
        out[c] += w0 * values_[base + c] + w1 * d1_[base + c] + w2 * d2_[base + c] +
                  w3 * d12_[base + c];
      }
    }
  }
}

double PeriodicField::sample(const Shape& r, int c) const {
  std::vector<double> out(channels_);
  sample(r, out);
  return out[c];
}

}  // namespace gaitopt
