#pragma once

#include <span>
#include <vector>

namespace gaitopt {

struct Shape;

/// Multi-channel scalar field sampled on a uniform N x N grid over [0, 2pi)^2
/// with periodic wraparound. Node (i, j) sits at (i h, j h), h = 2pi / N.
///
/// Derivatives use centered 4th-order stencils; off-node values come from a
/// C1 bicubic Hermite patch whose nodal slopes are those stencils.
class PeriodicField {
 public:
  PeriodicField() = default;
  PeriodicField(int resolution, int channels);

  int resolution() const { return n_; }
  int channels() const { return channels_; }
  double spacing() const { return h_; }

  double& at(int i, int j, int c) { return values_[index(i, j, c)]; }
  double at(int i, int j, int c) const { return values_[index(i, j, c)]; }

  /// Centered 4th-order derivative along alpha1 (axis 0) or alpha2 (axis 1).
  double derivative(int axis, int i, int j, int c) const;

  /// Rebuilds the Hermite slope tables; call after writing node values.
  void finalize();
  bool finalized() const { return finalized_; }

  /// Interpolates every channel at r into out (size == channels()).
  void sample(const Shape& r, std::span<double> out) const;
  double sample(const Shape& r, int c) const;

 private:
  std::size_t index(int i, int j, int c) const;
  int wrap(int i) const { return ((i % n_) + n_) % n_; }

  int n_ = 0;
  int channels_ = 0;
  double h_ = 0.0;
  bool finalized_ = false;
  std::vector<double> values_;
  std::vector<double> d1_;
  std::vector<double> d2_;
  std::vector<double> d12_;
};

}  // namespace gaitopt
