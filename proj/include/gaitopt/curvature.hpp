#pragma once

#include "gaitopt/connection.hpp"
#include "gaitopt/gait.hpp"

#include <span>
#include <vector>

namespace gaitopt {

/// Connection on the lifted base (alpha1, alpha2, tau) at a fixed fiber point:
/// xi = -(A1 alpha1dot + A2 alpha2dot + A3 taudot).
struct LiftedConnection {
  AlgebraVector A1, A2, A3;

  AlgebraVector reconstruct(const Vec3& phidot) const {
    return -(phidot[0] * A1 + phidot[1] * A2 + phidot[2] * A3);
  }
};

/// A3 = -Mgg_inv Ad*_g p, in the grid's body frame.
LiftedConnection lifted_connection(const ShapeGrid& grid, const Shape& r, const GroupElement& g,
                                   const Covector& p);

/// Constraint curvature on the lifted base. Components are body-frame
/// velocities per unit area (x, y, theta).
struct CCFSample {
  AlgebraVector D12, D1t, D2t;

  /// D(u, v) for lifted tangent vectors u, v = (dalpha1, dalpha2, dtau).
  AlgebraVector apply(const Vec3& u, const Vec3& v) const;
};

CCFSample ccf(const ShapeGrid& grid, const Shape& r, const GroupElement& g, const Covector& p);

/// Node-by-node curvature at a fixed fiber point, indexed i * n + j.
std::vector<CCFSample> ccf_grid_snapshot(const ShapeGrid& grid, const Covector& p,
                                         const GroupElement& g = GroupElement::identity());

/// Estimate of the net (x, y, theta) displacement of one cycle from the
/// curvature flux through the ruled surface spanned from the start shape,
/// plus the drift along the time line at the start shape. `poses` holds the
/// body placement at uniformly spaced times over [0, T], first and last
/// included; its size sets the time quadrature (at least 3).
Vec3 flux_estimate(const ShapeGrid& grid, const Gait& gait, const Covector& p,
                   std::span<const GroupElement> poses);

}  // namespace gaitopt
