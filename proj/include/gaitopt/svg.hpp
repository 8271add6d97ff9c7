#pragma once

#include "gaitopt/optimize.hpp"

#include <string>
#include <vector>

namespace gaitopt {

struct Segment {
  Vec2 a, b;
};

/// Marching squares on a lattice of values f[i * ny + j] at x0 + i dx,
/// y0 + j dy. Saddle cells are resolved by the cell-center average.
std::vector<Segment> contour_segments(const std::vector<double>& f, int nx, int ny, double x0, double y0, double dx,
                                      double dy, double level);

/// Square plot of the shape torus window [c - pi, c + pi]^2.
class ShapePlot {
 public:
  ShapePlot(const Shape& center, int pixels = 600);

  /// Contours of the kinematic curvature D12 along `direction` (p = 0,
  /// g = identity); red positive, blue negative.
  void add_curvature_contours(const ShapeGrid& grid, Direction direction, int levels = 12);
  /// Arrows of -A for one direction at every `stride`-th grid node.
  void add_connection_arrows(const ShapeGrid& grid, Direction direction, int stride = 4);
  /// Gait locus; stroke width is inversely proportional to shape speed.
  void add_gait(const Gait& gait, const std::string& color, int samples = 240);
  void add_marker(const Shape& r, const std::string& color, const std::string& label);

  std::string str(const std::string& title) const;

 private:
  Vec2 to_pixels(const Vec2& a) const;
  /// Periodic image of `a` closest to the window center.
  Vec2 fold(const Vec2& a) const;

  Shape center_;
  int pixels_;
  std::vector<std::string> body_;
};

struct Series {
  std::string name;
  std::string color;
  std::vector<double> y;
};

/// Minimal line chart sharing one x axis.
std::string line_chart(const std::string& title, const std::string& x_label, const std::vector<double>& x,
                       const std::vector<Series>& series);

}  // namespace gaitopt
