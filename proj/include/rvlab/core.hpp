#pragma once

// Carrier spaces (vectors, truncated sequences, grid functions, finite point
// configurations, polytopes) and the scalings T_t acting on them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "rvlab/error.hpp"
#include "rvlab/geometry.hpp"

namespace rvlab {

namespace detail {

inline void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) fail(ErrorCode::InvalidElement, std::string(what) + " has a non-finite entry");
  }
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::vector<double> values) : values_(std::move(values)) {
    detail::require_finite(values_, "Vector");
  }
  Vector(std::initializer_list<double> values) : Vector(std::vector<double>(values)) {}

  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> values_;
};

/// Element of R^infinity stored by its first m coordinates; the rest are zero.
class Sequence {
 public:
  Sequence() = default;
  explicit Sequence(std::vector<double> values) : values_(std::move(values)) {
    detail::require_finite(values_, "Sequence");
  }
  Sequence(std::initializer_list<double> values) : Sequence(std::vector<double>(values)) {}

  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::size_t truncation() const { return values_.size(); }
  [[nodiscard]] double at(std::size_t i) const { return i < values_.size() ? values_[i] : 0.0; }

  friend bool operator==(const Sequence&, const Sequence&) = default;

 private:
  std::vector<double> values_;
};

/// Piecewise-linear function on [lo, hi] given by its values on a uniform grid.
class GridFunction {
 public:
  GridFunction() : GridFunction(0.0, 1.0, {0.0, 0.0}) {}
  GridFunction(double lo, double hi, std::vector<double> values)
      : lo_(lo), hi_(hi), values_(std::move(values)) {
    require(std::isfinite(lo_) && std::isfinite(hi_) && lo_ < hi_, ErrorCode::InvalidElement,
            "GridFunction domain must be a finite interval with lo < hi");
    require(values_.size() >= 2, ErrorCode::InvalidElement, "GridFunction needs at least 2 grid values");
    detail::require_finite(values_, "GridFunction");
  }

  [[nodiscard]] double lo() const { return lo_; }
  [[nodiscard]] double hi() const { return hi_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] double step() const { return (hi_ - lo_) / static_cast<double>(values_.size() - 1); }
  [[nodiscard]] double node(std::size_t i) const {
    return i + 1 == values_.size() ? hi_ : lo_ + step() * static_cast<double>(i);
  }

  /// Linear interpolation; u is clamped to the domain.
  [[nodiscard]] double at(double u) const {
    const double pos = (std::clamp(u, lo_, hi_) - lo_) / step();
    const auto i = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * values_[i] + w * values_[i + 1];
  }

  friend bool operator==(const GridFunction&, const GridFunction&) = default;

 private:
  double lo_;
  double hi_;
  std::vector<double> values_;
};

struct WeightedPoint {
  std::vector<double> location;
  std::size_t multiplicity = 1;

  friend bool operator==(const WeightedPoint&, const WeightedPoint&) = default;
};

/// Finite counting measure: support points with multiplicities.
class PointConfig {
 public:
  PointConfig() = default;
  explicit PointConfig(std::vector<WeightedPoint> points) : points_(std::move(points)) {
    for (const auto& p : points_) {
      require(p.multiplicity >= 1, ErrorCode::InvalidElement, "PointConfig multiplicity must be >= 1");
      require(p.location.size() == points_.front().location.size(), ErrorCode::InvalidElement,
              "PointConfig points must share one dimension");
      detail::require_finite(p.location, "PointConfig location");
    }
  }

  [[nodiscard]] const std::vector<WeightedPoint>& points() const { return points_; }
  [[nodiscard]] bool empty() const { return points_.empty(); }
  [[nodiscard]] std::size_t dim() const { return points_.empty() ? 0 : points_.front().location.size(); }
  [[nodiscard]] std::size_t total_count() const {
    std::size_t n = 0;
    for (const auto& p : points_) n += p.multiplicity;
    return n;
  }

  friend bool operator==(const PointConfig&, const PointConfig&) = default;

 private:
  std::vector<WeightedPoint> points_;
};

/// Convex polytope kept as its vertex list. In dimensions 1 and 2 the vertices
/// are replaced by the hull on construction (2-d: counter-clockwise, starting at
/// the lexicographically smallest vertex). Higher dimensions only drop
/// duplicate vertices.
class Polytope {
 public:
  Polytope() : Polytope(std::vector<std::vector<double>>{{0.0}}) {}
  explicit Polytope(std::vector<std::vector<double>> vertices) {
    require(!vertices.empty(), ErrorCode::InvalidElement, "Polytope needs at least one vertex");
    dim_ = vertices.front().size();
    require(dim_ >= 1, ErrorCode::InvalidElement, "Polytope vertices must have dimension >= 1");
    for (const auto& v : vertices) {
      require(v.size() == dim_, ErrorCode::InvalidElement, "Polytope vertices must share one dimension");
      detail::require_finite(v, "Polytope vertex");
    }
    if (dim_ == 1) {
      auto [mn, mx] = std::minmax_element(vertices.begin(), vertices.end());
      vertices_ = {*mn};
      if ((*mx)[0] != (*mn)[0]) vertices_.push_back(*mx);
    } else if (dim_ == 2) {
      std::vector<geom::Point2> pts;
      pts.reserve(vertices.size());
      for (const auto& v : vertices) pts.push_back({v[0], v[1]});
      for (const auto& p : geom::convex_hull(std::move(pts))) vertices_.push_back({p[0], p[1]});
    } else {
      std::sort(vertices.begin(), vertices.end());
      vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
      vertices_ = std::move(vertices);
    }
  }

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] const std::vector<std::vector<double>>& vertices() const { return vertices_; }

  /// Vertices as planar points; 1-d polytopes are embedded on the first axis.
  [[nodiscard]] std::vector<geom::Point2> planar() const {
    require(dim_ <= 2, ErrorCode::DimensionMismatch, "planar view needs a polytope in dimension <= 2");
    std::vector<geom::Point2> out;
    out.reserve(vertices_.size());
    for (const auto& v : vertices_) out.push_back({v[0], dim_ == 2 ? v[1] : 0.0});
    return out;
  }

  /// Multiply (or divide) every vertex by c > 0. Positive scaling preserves
  /// the hull order, so no re-hulling happens.
  [[nodiscard]] Polytope scaled(double c, bool divide = false) const {
    Polytope out = *this;
    for (auto& v : out.vertices_)
      for (auto& x : v) x = divide ? x / c : x * c;
    return out;
  }

  friend bool operator==(const Polytope&, const Polytope&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::vector<double>> vertices_;
};

using Element = std::variant<Vector, Sequence, GridFunction, PointConfig, Polytope>;

enum class ElementKind { Vector, Sequence, GridFunction, PointConfig, Polytope };

inline ElementKind kind_of(const Element& x) { return static_cast<ElementKind>(x.index()); }

inline const char* kind_name(ElementKind k) {
  switch (k) {
    case ElementKind::Vector: return "vector";
    case ElementKind::Sequence: return "sequence";
    case ElementKind::GridFunction: return "grid_function";
    case ElementKind::PointConfig: return "point_config";
    case ElementKind::Polytope: return "polytope";
  }
  return "unknown";
}

/// All numeric coordinates in storage order (point locations and polytope
/// vertices concatenated). Multiplicities are not included.
inline std::vector<double> flatten(const Element& x) {
  return std::visit(
      [](const auto& e) -> std::vector<double> {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, PointConfig>) {
          std::vector<double> out;
          for (const auto& p : e.points()) out.insert(out.end(), p.location.begin(), p.location.end());
          return out;
        } else if constexpr (std::is_same_v<T, Polytope>) {
          std::vector<double> out;
          for (const auto& v : e.vertices()) out.insert(out.end(), v.begin(), v.end());
          return out;
        } else {
          auto v = e.values();
          return {v.begin(), v.end()};
        }
      },
      x);
}

/// Largest absolute coordinate, used as the size in relative tolerances.
inline double coordinate_size(const Element& x) { return detail::max_abs(flatten(x)); }

/// Sup distance between two elements of the same kind and shape; +inf when the
/// kinds or shapes differ (including different multiplicities).
inline double element_distance(const Element& a, const Element& b) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (a.index() != b.index()) return inf;
  if (const auto* pa = std::get_if<PointConfig>(&a)) {
    const auto& pb = std::get<PointConfig>(b);
    if (pa->points().size() != pb.points().size()) return inf;
    for (std::size_t i = 0; i < pa->points().size(); ++i) {
      if (pa->points()[i].multiplicity != pb.points()[i].multiplicity) return inf;
    }
  }
  if (const auto* ga = std::get_if<GridFunction>(&a)) {
    const auto& gb = std::get<GridFunction>(b);
    if (ga->lo() != gb.lo() || ga->hi() != gb.hi()) return inf;
  }
  const auto fa = flatten(a);
  const auto fb = flatten(b);
  if (fa.size() != fb.size()) return inf;
  double d = 0.0;
  for (std::size_t i = 0; i < fa.size(); ++i) d = std::max(d, std::abs(fa[i] - fb[i]));
  return d;
}

/// n x d row-major block of vectors. Large samples of vector-valued elements
/// live here so that no per-sample allocation happens.
class VectorBatch {
 public:
  VectorBatch() = default;
  VectorBatch(std::size_t n, std::size_t dim) : dim_(dim), data_(n * dim, 0.0) {}

  [[nodiscard]] std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  [[nodiscard]] std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  [[nodiscard]] const std::vector<double>& data() const { return data_; }
  [[nodiscard]] Vector element(std::size_t i) const {
    auto r = row(i);
    return Vector(std::vector<double>(r.begin(), r.end()));
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

enum class ScalingKind {
  Linear,
  PowerWeights,
  InverseLinear,
  ComponentSubset,
  LogShift,
  AffineInverse,
  FunctionValues,
  Uplifted,
  SetLinear,
  MinShift,
};

/// Descriptor of a group action t -> T_t. Every variant is jointly continuous
/// in (t, x) and satisfies T_t T_s = T_{ts}, T_1 = id.
class ScalingSpec {
 public:
  ScalingSpec() = default;

  static ScalingSpec linear() { return ScalingSpec(ScalingKind::Linear); }
  /// T_t x = (t^{a_1} x_1, ..., t^{a_d} x_d).
  static ScalingSpec power_weights(std::vector<double> exponents) {
    for (double a : exponents) require(std::isfinite(a), ErrorCode::BadParameters, "power_weights exponents must be finite");
    ScalingSpec s(ScalingKind::PowerWeights);
    s.params_ = std::move(exponents);
    return s;
  }
  /// T_t x = x / t.
  static ScalingSpec inverse_linear() { return ScalingSpec(ScalingKind::InverseLinear); }
  /// Linear scaling of the listed coordinates only (0-based), others fixed.
  static ScalingSpec component_subset(std::vector<std::size_t> indices) {
    ScalingSpec s(ScalingKind::ComponentSubset);
    s.indices_ = std::move(indices);
    return s;
  }
  /// T_t y = y + log t, coordinatewise.
  static ScalingSpec log_shift() { return ScalingSpec(ScalingKind::LogShift); }
  /// T_t y = a + (y - a) / t.
  static ScalingSpec affine_inverse(double anchor) {
    require(std::isfinite(anchor), ErrorCode::BadParameters, "affine_inverse anchor must be finite");
    ScalingSpec s(ScalingKind::AffineInverse);
    s.params_ = {anchor};
    return s;
  }
  static ScalingSpec function_values() { return ScalingSpec(ScalingKind::FunctionValues); }
  /// Acts on each support point of a point configuration through `base`.
  static ScalingSpec uplifted(ScalingSpec base) {
    ScalingSpec s(ScalingKind::Uplifted);
    s.base_ = std::make_shared<const ScalingSpec>(std::move(base));
    return s;
  }
  static ScalingSpec set_linear() { return ScalingSpec(ScalingKind::SetLinear); }
  /// T_t x = x + (t - 1) min(x) (1, ..., 1); scales the minimum coordinate.
  static ScalingSpec min_shift() { return ScalingSpec(ScalingKind::MinShift); }

  [[nodiscard]] ScalingKind kind() const { return kind_; }
  [[nodiscard]] const std::vector<double>& exponents() const { return params_; }
  [[nodiscard]] const std::vector<std::size_t>& indices() const { return indices_; }
  [[nodiscard]] double anchor() const { return params_.empty() ? 0.0 : params_.front(); }
  [[nodiscard]] const ScalingSpec& base() const {
    require(base_ != nullptr, ErrorCode::BadParameters, "scaling has no base");
    return *base_;
  }

  [[nodiscard]] bool acts_on(ElementKind k) const {
    switch (kind_) {
      case ScalingKind::Linear:
        return k != ElementKind::PointConfig;
      case ScalingKind::InverseLinear:
        return k == ElementKind::Vector || k == ElementKind::Sequence || k == ElementKind::GridFunction;
      case ScalingKind::PowerWeights:
      case ScalingKind::ComponentSubset:
      case ScalingKind::LogShift:
      case ScalingKind::AffineInverse:
      case ScalingKind::MinShift:
        return k == ElementKind::Vector;
      case ScalingKind::FunctionValues: return k == ElementKind::GridFunction;
      case ScalingKind::Uplifted: return k == ElementKind::PointConfig;
      case ScalingKind::SetLinear: return k == ElementKind::Polytope;
    }
    return false;
  }

  /// Applies T_t (or T_{1/t} when inverse) in place to a coordinate vector.
  /// Only meaningful for variants acting on vectors.
  void act_on_coords(double t, bool inverse, std::span<double> x) const {
    switch (kind_) {
      case ScalingKind::Linear:
      case ScalingKind::FunctionValues:
      case ScalingKind::SetLinear:
        for (auto& v : x) v = inverse ? v / t : v * t;
        return;
      case ScalingKind::InverseLinear:
        for (auto& v : x) v = inverse ? v * t : v / t;
        return;
      case ScalingKind::PowerWeights:
        require(x.size() == params_.size(), ErrorCode::DimensionMismatch,
                "power_weights has " + std::to_string(params_.size()) + " exponents, element has " +
                    std::to_string(x.size()) + " coordinates");
        for (std::size_t i = 0; i < x.size(); ++i) x[i] *= std::pow(t, inverse ? -params_[i] : params_[i]);
        return;
      case ScalingKind::ComponentSubset:
        for (auto i : indices_) {
          require(i < x.size(), ErrorCode::DimensionMismatch, "component_subset index out of range");
          x[i] = inverse ? x[i] / t : x[i] * t;
        }
        return;
      case ScalingKind::LogShift: {
        const double shift = std::log(t);
        for (auto& v : x) v = inverse ? v - shift : v + shift;
        return;
      }
      case ScalingKind::AffineInverse: {
        const double a = anchor();
        for (auto& v : x) v = inverse ? a + (v - a) * t : a + (v - a) / t;
        return;
      }
      case ScalingKind::MinShift: {
        if (x.empty()) return;
        const double m = *std::min_element(x.begin(), x.end());
        const double shift = inverse ? -(t - 1.0) * m / t : (t - 1.0) * m;
        for (auto& v : x) v += shift;
        return;
      }
      case ScalingKind::Uplifted:
        base().act_on_coords(t, inverse, x);
        return;
    }
  }

  friend bool operator==(const ScalingSpec& a, const ScalingSpec& b) {
    if (a.kind_ != b.kind_ || a.params_ != b.params_ || a.indices_ != b.indices_) return false;
    if ((a.base_ == nullptr) != (b.base_ == nullptr)) return false;
    return a.base_ == nullptr || *a.base_ == *b.base_;
  }

 private:
  explicit ScalingSpec(ScalingKind k) : kind_(k) {}

  ScalingKind kind_ = ScalingKind::Linear;
  std::vector<double> params_;
  std::vector<std::size_t> indices_;
  std::shared_ptr<const ScalingSpec> base_;
};

namespace detail {

inline Element act(const ScalingSpec& s, double t, const Element& x, bool inverse) {
  require(t > 0.0 && std::isfinite(t), ErrorCode::NonpositiveScale, "scale t must be positive and finite");
  require(s.acts_on(kind_of(x)), ErrorCode::IncompatibleVariant,
          std::string("scaling cannot act on ") + kind_name(kind_of(x)));
  if (t == 1.0) return x;
  return std::visit(
      [&](const auto& e) -> Element {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Vector> || std::is_same_v<T, Sequence>) {
          std::vector<double> v(e.values().begin(), e.values().end());
          s.act_on_coords(t, inverse, v);
          return T(std::move(v));
        } else if constexpr (std::is_same_v<T, GridFunction>) {
          std::vector<double> v(e.values().begin(), e.values().end());
          s.act_on_coords(t, inverse, v);
          return GridFunction(e.lo(), e.hi(), std::move(v));
        } else if constexpr (std::is_same_v<T, PointConfig>) {
          auto pts = e.points();
          for (auto& p : pts) s.act_on_coords(t, inverse, p.location);
          return PointConfig(std::move(pts));
        } else {
          return e.scaled(t, inverse);
        }
      },
      x);
}

}  // namespace detail

/// T_t x.
inline Element apply_scaling(const ScalingSpec& s, double t, const Element& x) { return detail::act(s, t, x, false); }

/// T_{1/t} x, computed from the closed-form inverse of each variant.
inline Element invert_scaling(const ScalingSpec& s, double t, const Element& x) { return detail::act(s, t, x, true); }

}  // namespace rvlab
