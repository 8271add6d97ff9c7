#pragma once

#include "gaitopt/linkage.hpp"
#include "gaitopt/periodic_field.hpp"

#include <memory>

namespace gaitopt {

/// Local connection and cached inverse locked inertia at one shape.
/// Reconstruction: xi = -A rdot + Mgg_inv Ad*_g p.
struct ConnectionSample {
  Mat32 A = Mat32::Zero();
  Mat3 Mgg_inv = Mat3::Zero();
};

ConnectionSample local_connection(const SystemModel& model, const Shape& r);
ConnectionSample local_connection(const InertiaMatrix& M);

/// A_p(r, g) = Mgg_inv Ad*_g: spatial momentum to drift body velocity.
Mat3 momentum_distribution(const ConnectionSample& sample, const GroupElement& g);

/// Re-expresses a sample in the frame beta (relative to the original body
/// frame). grad_beta holds the body-frame shape derivatives beta^-1 d(beta)/d(alpha_k)
/// as columns.
ConnectionSample transform_connection(const ConnectionSample& sample, const GroupElement& beta,
                                      const Mat32& grad_beta);

/// Body-frame choice for a ShapeGrid.
enum class Coordinates { Original, MinimumPerturbation };

/// Grid-sampled frame change beta(r) = (weighted mass center, mean orientation).
struct CoordinateTransform {
  PeriodicField beta;            // channels: x, y, theta
  double normal_residual = 0.0;  // max |G^T (G theta - A_theta)| of the orientation solve
};

/// Orientation potential minimizing sum over nodes of |G theta - A_theta|^2,
/// where G is the centered 4th-order periodic gradient and a_theta holds the two
/// theta-row components of the connection as channels 0, 1. The constant mode
/// is pinned by theta(0, 0) = 0.
PeriodicField solve_orientation_potential(const PeriodicField& a_theta, double* normal_residual = nullptr);

/// Everything a query at one shape needs, interpolated in the grid's frame.
struct GridSample {
  ConnectionSample connection;
  Mat3 locked_inertia = Mat3::Zero();
  GroupElement beta;
  double beta_angle = 0.0;  // orientation potential, not wrapped
  Mat32 grad_beta = Mat32::Zero();  // beta^-1 d(beta)/d(alpha_k)
  Vec3 curl_A = Vec3::Zero();       // d(A_2)/d(alpha1) - d(A_1)/d(alpha2)
  Mat3 dMinv[2] = {Mat3::Zero(), Mat3::Zero()};
};

/// Immutable grid of connection data over the periodic shape torus.
class ShapeGrid {
 public:
  static ShapeGrid build(const SystemModel& model, int resolution = 64,
                         Coordinates coords = Coordinates::MinimumPerturbation);

  const SystemModel& model() const { return *model_; }
  int resolution() const { return original_.resolution(); }
  double spacing() const { return original_.spacing(); }
  Coordinates coordinates() const { return coords_; }
  Shape node_shape(int i, int j) const;

  /// Original-frame sample at a node (no interpolation).
  ConnectionSample original_node(int i, int j) const;
  Mat3 original_locked_inertia(int i, int j) const;
  /// Analysis-frame sample at a node.
  ConnectionSample node(int i, int j) const;
  Mat3 locked_inertia_node(int i, int j) const;
  GroupElement beta_node(int i, int j) const;

  ConnectionSample interpolate(const Shape& r) const;
  GridSample sample(const Shape& r) const;
  GroupElement beta(const Shape& r) const;

  double orientation_residual() const { return orientation_residual_; }

  /// Frame field suitable for minimum_inertia_shape.
  FrameField frame_field() const;

 private:
  std::shared_ptr<const SystemModel> model_;
  Coordinates coords_ = Coordinates::MinimumPerturbation;
  PeriodicField original_;  // A (6), Minv (6), M_gg (6)
  PeriodicField analysis_;  // see kChannel* in connection.cpp
  double orientation_residual_ = 0.0;
};

/// Builds the minimum-perturbation frame change from the original-frame data
/// of a grid: translation to the weighted mass center and rotation by the
/// least-squares orientation potential.
CoordinateTransform optimize_coordinates(const ShapeGrid& grid);

/// Convenience wrapper over ShapeGrid::interpolate.
inline ConnectionSample interpolate(const ShapeGrid& grid, const Shape& r) { return grid.interpolate(r); }

}  // namespace gaitopt
