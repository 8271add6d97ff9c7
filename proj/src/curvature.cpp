#include "gaitopt/curvature.hpp"

#include <array>
#include <stdexcept>

namespace gaitopt {

namespace {

// d(A3)/dg along v at fixed shape: -Minv ad_v^T q with q = Ad*_g p.
Vec3 fiber_derivative(const Mat3& Minv, const Vec3& q, const AlgebraVector& v) {
  return -Minv * (ad_matrix(v).transpose() * q);
}

// 8-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 8> kGLNodes{0.019855071751231856, 0.10166676129318664, 0.2372337950418355,
                                         0.4082826787521751,   0.5917173212478249,  0.7627662049581645,
                                         0.8983332387068134,   0.9801449282487681};
constexpr std::array<double, 8> kGLWeights{0.05061426814518813, 0.11119051722668724, 0.15685332293894363,
                                           0.18134189168918100, 0.18134189168918100, 0.15685332293894363,
                                           0.11119051722668724, 0.05061426814518813};

}  // namespace

LiftedConnection lifted_connection(const ShapeGrid& grid, const Shape& r, const GroupElement& g,
                                   const Covector& p) {
  const ConnectionSample s = grid.interpolate(r);
  LiftedConnection c;
  c.A1 = AlgebraVector(Vec3(s.A.col(0)));
  c.A2 = AlgebraVector(Vec3(s.A.col(1)));
  c.A3 = AlgebraVector(Vec3(-s.Mgg_inv * (dual_adjoint_matrix(g) * p.v)));
  return c;
}

AlgebraVector CCFSample::apply(const Vec3& u, const Vec3& v) const {
  return (u[0] * v[1] - u[1] * v[0]) * D12 + (u[0] * v[2] - u[2] * v[0]) * D1t +
         (u[1] * v[2] - u[2] * v[1]) * D2t;
}

CCFSample ccf(const ShapeGrid& grid, const Shape& r, const GroupElement& g, const Covector& p) {
  const GridSample s = grid.sample(r);
  const Mat3& Minv = s.connection.Mgg_inv;
  const AlgebraVector A1(Vec3(s.connection.A.col(0)));
  const AlgebraVector A2(Vec3(s.connection.A.col(1)));
  const Vec3 q = dual_adjoint_matrix(g) * p.v;
  const AlgebraVector A3(Vec3(-Minv * q));

  CCFSample d;
  d.D12 = AlgebraVector(Vec3(-s.curl_A)) + lie_bracket(A1, A2);
  const AlgebraVector* Ak[2] = {&A1, &A2};
  AlgebraVector* Dk[2] = {&d.D1t, &d.D2t};
  for (int k = 0; k < 2; ++k) {
    const Vec3 dA3 = -s.dMinv[k] * q;
    *Dk[k] = AlgebraVector(Vec3(-dA3 + fiber_derivative(Minv, q, *Ak[k]))) + lie_bracket(*Ak[k], A3);
  }
  return d;
}

std::vector<CCFSample> ccf_grid_snapshot(const ShapeGrid& grid, const Covector& p, const GroupElement& g) {
  const int n = grid.resolution();
  std::vector<CCFSample> out(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out[i * n + j] = ccf(grid, grid.node_shape(i, j), g, p);
  }
  return out;
}

Vec3 flux_estimate(const ShapeGrid& grid, const Gait& gait, const Covector& p,
                   std::span<const GroupElement> poses) {
  if (poses.size() < 3) throw std::invalid_argument("flux_estimate: need at least 3 pose samples");
  const int nt = static_cast<int>(poses.size()) - 1;
  const double T = gait.period();
  const double dt = T / nt;
  const Vec2 r0 = gait.evaluate(0.0).shape.vec();

  Vec3 total = Vec3::Zero();
  for (int k = 0; k <= nt; ++k) {
    const double w = (k == 0 || k == nt) ? 0.5 * dt : dt;
    const double t = k * dt;
    const ShapeState st = gait.evaluate(t);
    const Vec2 chord = st.shape.vec() - r0;
    const GroupElement& g = poses[k];

    Vec3 inner = Vec3::Zero();
    // Surface term: D(d/ds, d/dt) with d/ds = (chord, 0), d/dt = (s rdot, 1).
    if (chord.squaredNorm() > 0.0) {
      for (std::size_t q = 0; q < kGLNodes.size(); ++q) {
        const double s = kGLNodes[q];
        const Shape r = Shape::from(r0 + s * chord);
        const CCFSample d = ccf(grid, r, g, p);
        const Vec3 u(chord[0], chord[1], 0.0);
        const Vec3 v(s * st.velocity[0], s * st.velocity[1], 1.0);
        inner += kGLWeights[q] * d.apply(u, v).v;
      }
    }
    // Time line at the start shape.
    const LiftedConnection a = lifted_connection(grid, Shape::from(r0), g, p);
    inner += -a.A3.v;
    total += w * inner;
  }
  return total;
}

}  // namespace gaitopt
