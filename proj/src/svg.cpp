#include "gaitopt/svg.hpp"

#include "gaitopt/curvature.hpp"
#include "gaitopt/io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gaitopt {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

Vec2 lerp_edge(const Vec2& p, const Vec2& q, double fp, double fq, double level) {
  const double t = (fq == fp) ? 0.5 : (level - fp) / (fq - fp);
  return p + std::clamp(t, 0.0, 1.0) * (q - p);
}

}  // namespace

std::vector<Segment> contour_segments(const std::vector<double>& f, int nx, int ny, double x0, double y0, double dx,
                                      double dy, double level) {
  std::vector<Segment> out;
  auto at = [&](int i, int j) { return f[i * ny + j]; };
  for (int i = 0; i + 1 < nx; ++i) {
    for (int j = 0; j + 1 < ny; ++j) {
      // Corners counterclockwise from (i, j).
      const Vec2 P[4] = {{x0 + i * dx, y0 + j * dy},
                         {x0 + (i + 1) * dx, y0 + j * dy},
                         {x0 + (i + 1) * dx, y0 + (j + 1) * dy},
                         {x0 + i * dx, y0 + (j + 1) * dy}};
      const double F[4] = {at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
      int code = 0;
      for (int k = 0; k < 4; ++k) code |= (F[k] > level ? 1 : 0) << k;
      if (code == 0 || code == 15) continue;
      auto edge = [&](int e) { return lerp_edge(P[e], P[(e + 1) % 4], F[e], F[(e + 1) % 4], level); };
      std::vector<int> crossing;
      for (int e = 0; e < 4; ++e) {
        const bool a = F[e] > level, b = F[(e + 1) % 4] > level;
        if (a != b) crossing.push_back(e);
      }
      if (crossing.size() == 2) {
        out.push_back({edge(crossing[0]), edge(crossing[1])});
      } else if (crossing.size() == 4) {
        const bool center_above = 0.25 * (F[0] + F[1] + F[2] + F[3]) > level;
        // Cut off the two corners whose side differs from the center.
        if (center_above == ((code & 1) != 0)) {
          out.push_back({edge(0), edge(1)});
          out.push_back({edge(2), edge(3)});
        } else {
          out.push_back({edge(3), edge(0)});
          out.push_back({edge(1), edge(2)});
        }
      }
    }
  }
  return out;
}

ShapePlot::ShapePlot(const Shape& center, int pixels) : center_(center), pixels_(pixels) {}

Vec2 ShapePlot::to_pixels(const Vec2& a) const {
  const double s = pixels_ / (2.0 * kPi);
  return {(a[0] - center_.alpha1 + kPi) * s, pixels_ - (a[1] - center_.alpha2 + kPi) * s};
}

Vec2 ShapePlot::fold(const Vec2& a) const {
  return {center_.alpha1 + wrap_angle(a[0] - center_.alpha1), center_.alpha2 + wrap_angle(a[1] - center_.alpha2)};
}

void ShapePlot::add_curvature_contours(const ShapeGrid& grid, Direction direction, int levels) {
  const int n = grid.resolution();
  const double h = grid.spacing();
  const std::vector<CCFSample> ccf = ccf_grid_snapshot(grid, Covector());
  const int d = static_cast<int>(direction);
  // Window lattice starting at the node nearest the lower-left corner.
  const int i0 = static_cast<int>(std::lround((center_.alpha1 - kPi) / h));
  const int j0 = static_cast<int>(std::lround((center_.alpha2 - kPi) / h));
  const int m = n + 1;
  std::vector<double> f(m * m);
  double lo = 0.0, hi = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const int a = ((i0 + i) % n + n) % n, b = ((j0 + j) % n + n) % n;
      f[i * m + j] = ccf[a * n + b].D12.v[d];
      lo = std::min(lo, f[i * m + j]);
      hi = std::max(hi, f[i * m + j]);
    }
  }
  const double peak = std::max(-lo, hi);
  if (!(peak > 0.0)) return;
  std::ostringstream os;
  os << "<g fill=\"none\" stroke-width=\"1\">\n";
  for (int k = 1; k <= levels; ++k) {
    for (int sign : {-1, 1}) {
      const double level = sign * peak * (k - 0.5) / levels;
      const auto segs = contour_segments(f, m, m, i0 * h, j0 * h, h, h, level);
      if (segs.empty()) continue;
      const double shade = 0.25 + 0.75 * k / levels;
      const std::string color = sign > 0 ? "rgb(" + std::to_string(int(255 * shade)) + ",60,60)"
                                         : "rgb(60,60," + std::to_string(int(255 * shade)) + ")";
      os << "<path stroke=\"" << color << "\" d=\"";
      for (const auto& s : segs) {
        const Vec2 a = to_pixels(s.a), b = to_pixels(s.b);
        os << 'M' << fmt(a[0]) << ' ' << fmt(a[1]) << 'L' << fmt(b[0]) << ' ' << fmt(b[1]);
      }
      os << "\"/>\n";
    }
  }
  os << "</g>\n";
  body_.push_back(os.str());
}

void ShapePlot::add_connection_arrows(const ShapeGrid& grid, Direction direction, int stride) {
  const int n = grid.resolution();
  const int d = static_cast<int>(direction);
  double longest = 0.0;
  for (int i = 0; i < n; i += stride)
    for (int j = 0; j < n; j += stride) longest = std::max(longest, grid.node(i, j).A.row(d).norm());
  if (!(longest > 0.0)) return;
  const double scale = 0.9 * stride * grid.spacing() / longest;
  std::ostringstream os;
  os << "<g stroke=\"#333\" fill=\"#333\" stroke-width=\"1\">\n";
  for (int i = 0; i < n; i += stride) {
    for (int j = 0; j < n; j += stride) {
      const Vec2 v = -scale * grid.node(i, j).A.row(d).transpose();
      const Vec2 tail = fold(grid.node_shape(i, j).vec());
      const Vec2 a = to_pixels(tail), b = to_pixels(tail + v);
      const Vec2 u = b - a;
      if (u.norm() < 1.0) continue;
      const Vec2 e = u.normalized(), w(-e[1], e[0]);
      const double head = std::min(5.0, 0.4 * u.norm());
      const Vec2 l = b - head * e + 0.5 * head * w, r = b - head * e - 0.5 * head * w;
      os << "<line x1=\"" << fmt(a[0]) << "\" y1=\"" << fmt(a[1]) << "\" x2=\"" << fmt(b[0]) << "\" y2=\""
         << fmt(b[1]) << "\"/><polygon points=\"" << fmt(b[0]) << ',' << fmt(b[1]) << ' ' << fmt(l[0]) << ','
         << fmt(l[1]) << ' ' << fmt(r[0]) << ',' << fmt(r[1]) << "\"/>\n";
    }
  }
  os << "</g>\n";
  body_.push_back(os.str());
}

void ShapePlot::add_gait(const Gait& gait, const std::string& color, int samples) {
  std::vector<Vec2> pts(samples + 1);
  std::vector<double> speed(samples + 1);
  double mean = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const ShapeState s = gait.evaluate(gait.period() * k / samples);
    pts[k] = s.shape.vec();
    speed[k] = s.velocity.norm();
    if (k < samples) mean += speed[k] / samples;
  }
  // Shift the whole locus by one lattice vector so its center is in view.
  const Vec2 c(gait.joints()[0].a0, gait.joints()[1].a0);
  const Vec2 shift = fold(c) - c;
  std::ostringstream os;
  os << "<g stroke=\"" << color << "\" stroke-linecap=\"round\" fill=\"none\">\n";
  for (int k = 0; k < samples; ++k) {
    const double v = 0.5 * (speed[k] + speed[k + 1]);
    const double width = mean > 0.0 ? std::clamp(3.0 * mean / std::max(v, 1e-9), 0.75, 9.0) : 3.0;
    const Vec2 a = to_pixels(pts[k] + shift), b = to_pixels(pts[k + 1] + shift);
    os << "<line x1=\"" << fmt(a[0]) << "\" y1=\"" << fmt(a[1]) << "\" x2=\"" << fmt(b[0]) << "\" y2=\""
       << fmt(b[1]) << "\" stroke-width=\"" << fmt(width) << "\"/>\n";
  }
  os << "</g>\n";
  body_.push_back(os.str());
}

void ShapePlot::add_marker(const Shape& r, const std::string& color, const std::string& label) {
  const Vec2 a = to_pixels(fold(r.vec()));
  std::ostringstream os;
  os << "<circle cx=\"" << fmt(a[0]) << "\" cy=\"" << fmt(a[1]) << "\" r=\"5\" fill=\"" << color
     << "\"/><text x=\"" << fmt(a[0] + 8) << "\" y=\"" << fmt(a[1] - 8) << "\" font-size=\"12\">" << escape(label)
     << "</text>\n";
  body_.push_back(os.str());
}

std::string ShapePlot::str(const std::string& title) const {
  const int margin = 40;
  const int size = pixels_ + 2 * margin;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << margin << "\" y=\"24\" font-size=\"14\">" << escape(title) << "</text>\n"
     << "<g transform=\"translate(" << margin << ',' << margin << ")\">\n"
     << "<rect width=\"" << pixels_ << "\" height=\"" << pixels_ << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (const auto& b : body_) os << b;
  os << "<text x=\"" << pixels_ / 2 << "\" y=\"" << pixels_ + 28 << "\" font-size=\"12\">alpha1 in ["
     << fmt(center_.alpha1 - kPi) << ", " << fmt(center_.alpha1 + kPi) << "]</text>\n"
     << "<text x=\"-30\" y=\"" << pixels_ / 2 << "\" font-size=\"12\" transform=\"rotate(-90 -30 " << pixels_ / 2
     << ")\">alpha2</text>\n"
     << "</g>\n</svg>\n";
  return os.str();
}

std::string line_chart(const std::string& title, const std::string& x_label, const std::vector<double>& x,
                       const std::vector<Series>& series) {
  const int w = 640, h = 420, left = 60, right = 150, top = 40, bottom = 50;
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (!x.empty()) {
    x0 = *std::min_element(x.begin(), x.end());
    x1 = *std::max_element(x.begin(), x.end());
  }
  bool first = true;
  for (const auto& s : series) {
    for (double y : s.y) {
      if (!std::isfinite(y)) continue;
      y0 = first ? y : std::min(y0, y);
      y1 = first ? y : std::max(y1, y);
      first = false;
    }
  }
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 <= y0) y1 = y0 + 1.0;
  const double pw = w - left - right, ph = h - top - bottom;
  auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + ph - (v - y0) / (y1 - y0) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">" << escape(title) << "</text>\n"
     << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
    os << "<text x=\"" << fmt(px(xv) - 12) << "\" y=\"" << h - bottom + 18 << "\" font-size=\"11\">"
       << format_number(std::round(xv * 1e4) / 1e4) << "</text>\n"
       << "<text x=\"4\" y=\"" << fmt(py(yv) + 4) << "\" font-size=\"11\">"
       << format_number(std::round(yv * 1e4) / 1e4) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 - 30 << "\" y=\"" << h - 10 << "\" font-size=\"12\">" << escape(x_label)
     << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    os << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << s.color << "\" points=\"";
    for (std::size_t i = 0; i < std::min(x.size(), s.y.size()); ++i) {
      if (std::isfinite(s.y[i])) os << fmt(px(x[i])) << ',' << fmt(py(s.y[i])) << ' ';
    }
    os << "\"/>\n<text x=\"" << w - right + 10 << "\" y=\"" << top + 16 * (k + 1) << "\" font-size=\"12\" fill=\""
       << s.color << "\">" << escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace gaitopt
