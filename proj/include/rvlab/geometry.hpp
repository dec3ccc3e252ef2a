#pragma once

// Planar convex-polygon routines backing the Polytope element: hull,
// support function, Steiner point, mean width, intrinsic volumes.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace rvlab::geom {

using Point2 = std::array<double, 2>;

inline double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

inline double dot(const Point2& a, const Point2& b) { return a[0] * b[0] + a[1] * b[1]; }

inline double norm(const Point2& a) { return std::hypot(a[0], a[1]); }

/// Andrew's monotone chain. Output is counter-clockwise, starts at the
/// lexicographically smallest point, and drops collinear points. Degenerate
/// inputs give one vertex (all equal) or the two extreme points (collinear).
inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 2) return pts;

  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

inline double area(std::span<const Point2> poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    twice += a[0] * b[1] - a[1] * b[0];
  }
  return 0.5 * std::abs(twice);
}

/// Boundary length; a segment counts both sides, so perimeter = 2 * length.
inline double perimeter(std::span<const Point2> poly) {
  if (poly.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    total += std::hypot(b[0] - a[0], b[1] - a[1]);
  }
  return total;
}

inline double support(std::span<const Point2> poly, const Point2& u) {
  double h = -std::numeric_limits<double>::infinity();
  for (const auto& v : poly) h = std::max(h, dot(u, v));
  return h;
}

inline double distance_to_segment(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 ab{b[0] - a[0], b[1] - a[1]};
  const Point2 ap{p[0] - a[0], p[1] - a[1]};
  const double len2 = dot(ab, ab);
  double s = len2 > 0.0 ? dot(ap, ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::hypot(ap[0] - s * ab[0], ap[1] - s * ab[1]);
}

/// Signed slack of p against every edge of a CCW polygon; >= 0 inside.
inline double min_edge_slack(std::span<const Point2> poly, const Point2& p) {
  double slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    slack = std::min(slack, cross(a, b, p) / len);
  }
  return slack;
}

/// Euclidean distance from p to the polygon (zero inside).
inline double distance(std::span<const Point2> poly, const Point2& p) {
  if (poly.empty()) return std::numeric_limits<double>::infinity();
  if (poly.size() == 1) return std::hypot(poly[0][0] - p[0], poly[0][1] - p[1]);
  if (poly.size() >= 3 && min_edge_slack(poly, p) >= 0.0) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    d = std::min(d, distance_to_segment(p, poly[i], poly[(i + 1) % poly.size()]));
  }
  return d;
}

inline bool contains(std::span<const Point2> poly, const Point2& p, double tol) {
  return distance(poly, p) <= tol;
}

/// Radius of the largest origin-centred disk inside the polygon; zero when the
/// origin is not an interior point.
inline double inscribed_radius(std::span<const Point2> poly) {
  if (poly.size() < 3) return 0.0;
  return std::max(0.0, min_edge_slack(poly, Point2{0.0, 0.0}));
}

/// Steiner point from the external angles at the vertices:
/// s(K) = sum_v (external angle at v / 2 pi) v.
/// Exact evaluation of the sphere integral for polygons.
inline Point2 steiner_point_exact(std::span<const Point2> poly) {
  if (poly.size() == 1) return poly[0];
  if (poly.size() == 2) return {0.5 * (poly[0][0] + poly[1][0]), 0.5 * (poly[0][1] + poly[1][1])};
  Point2 s{0.0, 0.0};
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& prev = poly[(i + n - 1) % n];
    const auto& cur = poly[i];
    const auto& next = poly[(i + 1) % n];
    const double a_in = std::atan2(cur[1] - prev[1], cur[0] - prev[0]);
    const double a_out = std::atan2(next[1] - cur[1], next[0] - cur[0]);
    double turn = a_out - a_in;
    while (turn < 0.0) turn += 2.0 * std::numbers::pi;
    while (turn >= 2.0 * std::numbers::pi) turn -= 2.0 * std::numbers::pi;
    const double w = turn / (2.0 * std::numbers::pi);
    s[0] += w * cur[0];
    s[1] += w * cur[1];
  }
  return s;
}

/// Steiner point by the rectangle (periodic trapezoid) rule on `directions`
/// equally spaced unit vectors: s = (1/pi) * (2 pi / N) * sum h(u_j) u_j.
inline Point2 steiner_point_quadrature(std::span<const Point2> poly, std::size_t directions = 720) {
  Point2 s{0.0, 0.0};
  const double step = 2.0 * std::numbers::pi / static_cast<double>(directions);
  for (std::size_t j = 0; j < directions; ++j) {
    const double th = step * static_cast<double>(j);
    const Point2 u{std::cos(th), std::sin(th)};
    const double h = support(poly, u);
    s[0] += h * u[0];
    s[1] += h * u[1];
  }
  const double scale = step / std::numbers::pi;
  return {s[0] * scale, s[1] * scale};
}

/// Mean width normalised by the circle length: (1 / 2 pi) * integral of h.
/// Equals perimeter / (2 pi) for convex polygons.
inline double mean_width_quadrature(std::span<const Point2> poly, std::size_t directions = 720) {
  const double step = 2.0 * std::numbers::pi / static_cast<double>(directions);
  double total = 0.0;
  for (std::size_t j = 0; j < directions; ++j) {
    const double th = step * static_cast<double>(j);
    total += support(poly, Point2{std::cos(th), std::sin(th)});
  }
  return total / static_cast<double>(directions);
}

inline double mean_width_exact(std::span<const Point2> poly) {
  return perimeter(poly) / (2.0 * std::numbers::pi);
}

}  // namespace rvlab::geom
