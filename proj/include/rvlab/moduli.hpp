#pragma once

// Moduli (nonnegative 1-homogeneous functionals), ideals generated by them,
// and the construction of a modulus from a semicone membership oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rvlab/core.hpp"
#include "rvlab/geometry.hpp"
#include "rvlab/grammar.hpp"

namespace rvlab {

enum class ModulusKind {
  Norm,
  MaxAbsCoord,
  MinAbsCoord,
  CoordAbs,
  BetaStar,
  BetaMin,
  SupAbs,
  InfAbs,
  ValueAt,
  Oscillation,
  KthLargestPoint,
  SetSup,
  SetInf,
  InscribedRadius,
  IntrinsicVolumeRoot,
  MeanWidth,
  QuotientRange,
  MaxOf,
  MinOf,
  KthLargestAbs,
  LinearForm,
  CoordIfAxis,
  Scaled,
};

class Modulus {
 public:
  Modulus() = default;

  /// l_p norm, p in (0, inf]; p < 1 gives the (homogeneous) quasi-norm.
  static Modulus norm(double p) {
    require(p > 0.0, ErrorCode::BadParameters, "norm order p must be positive");
    return Modulus(ModulusKind::Norm, p);
  }
  static Modulus max_abs() { return Modulus(ModulusKind::MaxAbsCoord); }
  static Modulus min_abs() { return Modulus(ModulusKind::MinAbsCoord); }
  /// |x_i|, 0-based index.
  static Modulus coord_abs(std::size_t i) {
    Modulus m(ModulusKind::CoordAbs);
    m.index_ = i;
    return m;
  }
  /// max(x1^b x2^(1-b), x1^(1-b) x2^b) on |x|, b in [0, 1/2].
  static Modulus beta_star(double beta) {
    require(beta >= 0.0 && beta <= 0.5, ErrorCode::BadParameters, "beta must lie in [0, 1/2]");
    return Modulus(ModulusKind::BetaStar, beta);
  }
  /// min(x1^b x2^(1-b), x1^(1-b) x2^b) on |x|, b in [0, 1/2].
  static Modulus beta_min(double beta) {
    require(beta >= 0.0 && beta <= 0.5, ErrorCode::BadParameters, "beta must lie in [0, 1/2]");
    return Modulus(ModulusKind::BetaMin, beta);
  }
  static Modulus sup_abs() { return Modulus(ModulusKind::SupAbs); }
  static Modulus inf_abs() { return Modulus(ModulusKind::InfAbs); }
  static Modulus value_at(double u0) {
    require(std::isfinite(u0), ErrorCode::BadParameters, "value_at point must be finite");
    return Modulus(ModulusKind::ValueAt, u0);
  }
  /// sup |x(u) - x(v)| over |u - v| <= eps.
  static Modulus oscillation(double eps) {
    require(eps >= 0.0 && std::isfinite(eps), ErrorCode::BadParameters, "oscillation eps must be >= 0");
    return Modulus(ModulusKind::Oscillation, eps);
  }
  /// k-th largest inner value over the support points, counted with
  /// multiplicity; 0 when the configuration has fewer than k points.
  static Modulus kth_largest_point(std::size_t k, Modulus inner) {
    require(k >= 1, ErrorCode::BadParameters, "kth_largest_point needs k >= 1");
    Modulus m(ModulusKind::KthLargestPoint);
    m.index_ = k;
    m.children_ = {std::move(inner)};
    return m;
  }
  static Modulus set_sup() { return Modulus(ModulusKind::SetSup); }
  static Modulus set_inf() { return Modulus(ModulusKind::SetInf); }
  static Modulus inscribed_radius() { return Modulus(ModulusKind::InscribedRadius); }
  /// V_i(K)^{1/i} for i in {1, 2}.
  static Modulus intrinsic_volume_root(std::size_t i) {
    require(i == 1 || i == 2, ErrorCode::BadParameters, "intrinsic_volume_root needs i in {1, 2}");
    Modulus m(ModulusKind::IntrinsicVolumeRoot);
    m.index_ = i;
    return m;
  }
  static Modulus mean_width() { return Modulus(ModulusKind::MeanWidth); }
  /// (sup x - inf x) / 2.
  static Modulus quotient_range() { return Modulus(ModulusKind::QuotientRange); }
  static Modulus max_of(std::vector<Modulus> parts) {
    require(!parts.empty(), ErrorCode::BadParameters, "max_of needs at least one modulus");
    Modulus m(ModulusKind::MaxOf);
    m.children_ = std::move(parts);
    return m;
  }
  static Modulus min_of(std::vector<Modulus> parts) {
    require(!parts.empty(), ErrorCode::BadParameters, "min_of needs at least one modulus");
    Modulus m(ModulusKind::MinOf);
    m.children_ = std::move(parts);
    return m;
  }
  /// k-th largest |x_i|; generates the k-th product ideal over coordinates.
  static Modulus kth_largest_abs(std::size_t k) {
    require(k >= 1, ErrorCode::BadParameters, "kth_largest_abs needs k >= 1");
    Modulus m(ModulusKind::KthLargestAbs);
    m.index_ = k;
    return m;
  }
  /// max(0, <w, x>).
  static Modulus linear_form(std::vector<double> w) {
    require(!w.empty(), ErrorCode::BadParameters, "linear_form needs weights");
    Modulus m(ModulusKind::LinearForm);
    m.weights_ = std::move(w);
    return m;
  }
  /// |x_i| when every other coordinate is exactly zero, else 0. Homogeneous but
  /// discontinuous.
  static Modulus coord_if_axis(std::size_t i) {
    Modulus m(ModulusKind::CoordIfAxis);
    m.index_ = i;
    return m;
  }
  static Modulus scaled(double c, Modulus inner) {
    require(c > 0.0 && std::isfinite(c), ErrorCode::BadParameters, "scaled needs c > 0");
    Modulus m(ModulusKind::Scaled, c);
    m.children_ = {std::move(inner)};
    return m;
  }

  [[nodiscard]] ModulusKind kind() const { return kind_; }
  [[nodiscard]] double param() const { return param_; }
  [[nodiscard]] std::size_t index() const { return index_; }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
  [[nodiscard]] const std::vector<Modulus>& children() const { return children_; }

  /// True when the modulus can be evaluated on a plain coordinate vector.
  [[nodiscard]] bool on_coords() const {
    switch (kind_) {
      case ModulusKind::Norm:
      case ModulusKind::MaxAbsCoord:
      case ModulusKind::MinAbsCoord:
      case ModulusKind::CoordAbs:
      case ModulusKind::BetaStar:
      case ModulusKind::BetaMin:
      case ModulusKind::KthLargestAbs:
      case ModulusKind::LinearForm:
      case ModulusKind::CoordIfAxis:
        return true;
      case ModulusKind::MaxOf:
      case ModulusKind::MinOf:
      case ModulusKind::Scaled:
        return std::all_of(children_.begin(), children_.end(), [](const Modulus& c) { return c.on_coords(); });
      default:
        return false;
    }
  }

  /// Evaluation on a finite vector.
  [[nodiscard]] double eval_coords(std::span<const double> x) const {
    switch (kind_) {
      case ModulusKind::Norm: {
        if (std::isinf(param_)) return detail::max_abs(x);
        if (param_ == 2.0) {
          double s = 0.0;
          for (double v : x) s += v * v;
          return std::sqrt(s);
        }
        if (param_ == 1.0) {
          double s = 0.0;
          for (double v : x) s += std::abs(v);
          return s;
        }
        // Factor out the max to avoid overflow in |x|^p.
        const double m = detail::max_abs(x);
        if (m == 0.0) return 0.0;
        double s = 0.0;
        for (double v : x) s += std::pow(std::abs(v) / m, param_);
        return m * std::pow(s, 1.0 / param_);
      }
      case ModulusKind::MaxAbsCoord: return detail::max_abs(x);
      case ModulusKind::MinAbsCoord: {
        if (x.empty()) return 0.0;
        double m = std::abs(x[0]);
        for (double v : x) m = std::min(m, std::abs(v));
        return m;
      }
      case ModulusKind::CoordAbs: return index_ < x.size() ? std::abs(x[index_]) : 0.0;
      case ModulusKind::BetaStar:
      case ModulusKind::BetaMin: {
        require(x.size() == 2, ErrorCode::DimensionMismatch, "beta moduli act on R^2");
        const double a = std::abs(x[0]);
        const double b = std::abs(x[1]);
        const double u = mixed_power(a, b, param_);
        const double v = mixed_power(b, a, param_);
        return kind_ == ModulusKind::BetaStar ? std::max(u, v) : std::min(u, v);
      }
      case ModulusKind::KthLargestAbs: {
        if (x.size() < index_) return 0.0;
        std::vector<double> a(x.size());
        std::transform(x.begin(), x.end(), a.begin(), [](double v) { return std::abs(v); });
        std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(index_ - 1), a.end(), std::greater<>());
        return a[index_ - 1];
      }
      case ModulusKind::LinearForm: {
        require(x.size() == weights_.size(), ErrorCode::DimensionMismatch, "linear_form dimension mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += weights_[i] * x[i];
        return std::max(0.0, s);
      }
      case ModulusKind::CoordIfAxis: {
        if (index_ >= x.size()) return 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
          if (i != index_ && x[i] != 0.0) return 0.0;
        return std::abs(x[index_]);
      }
      case ModulusKind::MaxOf: {
        double m = 0.0;
        for (const auto& c : children_) m = std::max(m, c.eval_coords(x));
        return m;
      }
      case ModulusKind::MinOf: {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& c : children_) m = std::min(m, c.eval_coords(x));
        return m;
      }
      case ModulusKind::Scaled: return param_ * children_.front().eval_coords(x);
      default:
        fail(ErrorCode::IncompatibleVariant, describe() + " cannot be evaluated on a vector");
    }
  }

  [[nodiscard]] double operator()(const Element& x) const { return eval(x); }

  [[nodiscard]] double eval(const Element& x) const {
    switch (kind_) {
      case ModulusKind::MaxOf: {
        double m = 0.0;
        for (const auto& c : children_) m = std::max(m, c.eval(x));
        return m;
      }
      case ModulusKind::MinOf: {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& c : children_) m = std::min(m, c.eval(x));
        return m;
      }
      case ModulusKind::Scaled: return param_ * children_.front().eval(x);
      default: break;
    }
    if (const auto* v = std::get_if<Vector>(&x)) {
      if (on_coords()) return eval_coords(v->values());
    } else if (const auto* s = std::get_if<Sequence>(&x)) {
      return eval_sequence(*s);
    } else if (const auto* g = std::get_if<GridFunction>(&x)) {
      return eval_grid(*g);
    } else if (const auto* p = std::get_if<PointConfig>(&x)) {
      return eval_points(*p);
    } else if (const auto* k = std::get_if<Polytope>(&x)) {
      return eval_polytope(*k);
    }
    incompatible(x);
  }

  [[nodiscard]] std::string describe() const {
    auto join = [&](std::string name) {
      name += "(";
      for (std::size_t i = 0; i < children_.size(); ++i) name += (i ? ", " : "") + children_[i].describe();
      return name + ")";
    };
    switch (kind_) {
      case ModulusKind::Norm: return "norm(" + format_number(param_) + ")";
      case ModulusKind::MaxAbsCoord: return "max_abs";
      case ModulusKind::MinAbsCoord: return "min_abs";
      case ModulusKind::CoordAbs: return "coord_abs(" + std::to_string(index_) + ")";
      case ModulusKind::BetaStar: return "beta_star(" + format_number(param_) + ")";
      case ModulusKind::BetaMin: return "beta_min(" + format_number(param_) + ")";
      case ModulusKind::SupAbs: return "sup_abs";
      case ModulusKind::InfAbs: return "inf_abs";
      case ModulusKind::ValueAt: return "value_at(" + format_number(param_) + ")";
      case ModulusKind::Oscillation: return "oscillation(" + format_number(param_) + ")";
      case ModulusKind::KthLargestPoint:
        return "kth_largest_point(" + std::to_string(index_) + ", " + children_.front().describe() + ")";
      case ModulusKind::SetSup: return "set_sup";
      case ModulusKind::SetInf: return "set_inf";
      case ModulusKind::InscribedRadius: return "inscribed_radius";
      case ModulusKind::IntrinsicVolumeRoot: return "intrinsic_volume_root(" + std::to_string(index_) + ")";
      case ModulusKind::MeanWidth: return "mean_width";
      case ModulusKind::QuotientRange: return "quotient_range";
      case ModulusKind::MaxOf: return join("max_of");
      case ModulusKind::MinOf: return join("min_of");
      case ModulusKind::KthLargestAbs: return "kth_largest_abs(" + std::to_string(index_) + ")";
      case ModulusKind::LinearForm: {
        std::string s = "linear_form(";
        for (std::size_t i = 0; i < weights_.size(); ++i) s += (i ? ", " : "") + format_number(weights_[i]);
        return s + ")";
      }
      case ModulusKind::CoordIfAxis: return "coord_if_axis(" + std::to_string(index_) + ")";
      case ModulusKind::Scaled: return "scaled(" + format_number(param_) + ", " + children_.front().describe() + ")";
    }
    return "?";
  }

  friend bool operator==(const Modulus&, const Modulus&) = default;

 private:
  explicit Modulus(ModulusKind k, double p = 0.0) : kind_(k), param_(p) {}

  static double mixed_power(double a, double b, double beta) {
    if (beta == 0.0) return b;
    if (a == 0.0 || b == 0.0) return 0.0;
    return std::pow(a, beta) * std::pow(b, 1.0 - beta);
  }

  [[noreturn]] void incompatible(const Element& x) const {
    fail(ErrorCode::IncompatibleVariant, describe() + " cannot be evaluated on " + kind_name(kind_of(x)));
  }

  [[nodiscard]] double eval_sequence(const Sequence& s) const {
    switch (kind_) {
      case ModulusKind::Norm:
      case ModulusKind::MaxAbsCoord:
      case ModulusKind::CoordAbs:
      case ModulusKind::KthLargestAbs:
      case ModulusKind::CoordIfAxis:
        return eval_coords(s.values());
      case ModulusKind::MinAbsCoord:
        return 0.0;  // coordinates beyond the truncation are zero
      default:
        incompatible(s);
    }
  }

  [[nodiscard]] double eval_grid(const GridFunction& g) const {
    const auto v = g.values();
    switch (kind_) {
      case ModulusKind::SupAbs: return detail::max_abs(v);
      case ModulusKind::InfAbs: {
        double m = std::abs(v[0]);
        for (std::size_t i = 0; i < v.size(); ++i) {
          m = std::min(m, std::abs(v[i]));
          if (i > 0 && ((v[i - 1] < 0.0 && v[i] > 0.0) || (v[i - 1] > 0.0 && v[i] < 0.0))) return 0.0;
        }
        return m;
      }
      case ModulusKind::ValueAt:
        require(param_ >= g.lo() && param_ <= g.hi(), ErrorCode::BadParameters, "value_at point outside the domain");
        return std::abs(g.at(param_));
      case ModulusKind::Oscillation: return oscillation_exact(g, param_);
      case ModulusKind::QuotientRange: {
        auto [mn, mx] = std::minmax_element(v.begin(), v.end());
        return 0.5 * (*mx - *mn);
      }
      default:
        incompatible(g);
    }
  }

  [[nodiscard]] double eval_points(const PointConfig& p) const {
    switch (kind_) {
      case ModulusKind::KthLargestPoint: {
        const auto k = index_;
        if (p.total_count() < k) return 0.0;
        std::vector<std::pair<double, std::size_t>> vals;
        vals.reserve(p.points().size());
        for (const auto& pt : p.points()) vals.emplace_back(children_.front().eval_coords(pt.location), pt.multiplicity);
        std::sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        std::size_t seen = 0;
        for (const auto& [value, mult] : vals) {
          seen += mult;
          if (seen >= k) return value;
        }
        return 0.0;
      }
      case ModulusKind::SetSup: {
        double m = 0.0;
        for (const auto& pt : p.points()) m = std::max(m, Modulus::norm(2).eval_coords(pt.location));
        return m;
      }
      case ModulusKind::SetInf: {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& pt : p.points()) m = std::min(m, Modulus::norm(2).eval_coords(pt.location));
        return m;
      }
      default:
        incompatible(p);
    }
  }

  [[nodiscard]] double eval_polytope(const Polytope& k) const {
    switch (kind_) {
      case ModulusKind::SetSup: {
        double m = 0.0;
        for (const auto& v : k.vertices()) m = std::max(m, Modulus::norm(2).eval_coords(v));
        return m;
      }
      case ModulusKind::SetInf: {
        if (k.dim() > 2) {
          require(k.vertices().size() == 1, ErrorCode::DimensionMismatch,
                  "set_inf is implemented for polytopes in dimension <= 2");
          return Modulus::norm(2).eval_coords(k.vertices().front());
        }
        const auto pts = k.planar();
        if (pts.size() == 2) return geom::distance_to_segment({0.0, 0.0}, pts[0], pts[1]);
        return geom::distance(pts, {0.0, 0.0});
      }
      case ModulusKind::InscribedRadius: return geom::inscribed_radius(k.planar());
      case ModulusKind::IntrinsicVolumeRoot: {
        const auto pts = k.planar();
        if (index_ == 1) return 0.5 * geom::perimeter(pts);
        return std::sqrt(geom::area(pts));
      }
      case ModulusKind::MeanWidth: return geom::mean_width_exact(k.planar());
      default:
        incompatible(k);
    }
  }

  /// Exact on piecewise-linear functions: with eps rounded down to a multiple
  /// k of the grid step, the supremum is attained at node pairs at most k
  /// apart, so it is the largest max-min over windows of k+1 nodes.
  static double oscillation_exact(const GridFunction& g, double eps) {
    const auto v = g.values();
    const auto k = static_cast<std::size_t>(std::floor(eps / g.step() + 1e-9));
    if (k == 0) return 0.0;
    if (k + 1 >= v.size()) {
      auto [mn, mx] = std::minmax_element(v.begin(), v.end());
      return *mx - *mn;
    }
    std::deque<std::size_t> hi, lo;
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      while (!hi.empty() && v[hi.back()] <= v[i]) hi.pop_back();
      while (!lo.empty() && v[lo.back()] >= v[i]) lo.pop_back();
      hi.push_back(i);
      lo.push_back(i);
      if (hi.front() + k < i) hi.pop_front();
      if (lo.front() + k < i) lo.pop_front();
      best = std::max(best, v[hi.front()] - v[lo.front()]);
    }
    return best;
  }

  ModulusKind kind_ = ModulusKind::MaxAbsCoord;
  double param_ = 0.0;
  std::size_t index_ = 0;
  std::vector<double> weights_;
  std::vector<Modulus> children_;
};

inline double eval_modulus(const Modulus& m, const Element& x) { return m.eval(x); }

/// Scaling under which m is 1-homogeneous on elements of kind k.
inline ScalingSpec paired_scaling(const Modulus&, ElementKind k) {
  switch (k) {
    case ElementKind::Vector:
    case ElementKind::Sequence:
      return ScalingSpec::linear();
    case ElementKind::GridFunction: return ScalingSpec::function_values();
    case ElementKind::PointConfig: return ScalingSpec::uplifted(ScalingSpec::linear());
    case ElementKind::Polytope: return ScalingSpec::set_linear();
  }
  return ScalingSpec::linear();
}

inline Modulus parse_modulus(const Term& t) {
  const auto& n = t.name;
  auto children = [&](std::size_t from) {
    std::vector<Modulus> out;
    for (std::size_t i = from; i < t.args.size(); ++i) out.push_back(parse_modulus(term_child(t, i)));
    return out;
  };
  if (n == "norm") return term_arity(t, 1), Modulus::norm(term_number(t, 0));
  if (n == "max_abs") return term_arity(t, 0), Modulus::max_abs();
  if (n == "min_abs") return term_arity(t, 0), Modulus::min_abs();
  if (n == "coord_abs") return term_arity(t, 1), Modulus::coord_abs(term_index(t, 0));
  if (n == "beta_star") return term_arity(t, 1), Modulus::beta_star(term_number(t, 0));
  if (n == "beta_min") return term_arity(t, 1), Modulus::beta_min(term_number(t, 0));
  if (n == "sup_abs") return term_arity(t, 0), Modulus::sup_abs();
  if (n == "inf_abs") return term_arity(t, 0), Modulus::inf_abs();
  if (n == "value_at") return term_arity(t, 1), Modulus::value_at(term_number(t, 0));
  if (n == "oscillation") return term_arity(t, 1), Modulus::oscillation(term_number(t, 0));
  if (n == "kth_largest_point")
    return term_arity(t, 2), Modulus::kth_largest_point(term_index(t, 0), parse_modulus(term_child(t, 1)));
  if (n == "set_sup") return term_arity(t, 0), Modulus::set_sup();
  if (n == "set_inf") return term_arity(t, 0), Modulus::set_inf();
  if (n == "inscribed_radius") return term_arity(t, 0), Modulus::inscribed_radius();
  if (n == "intrinsic_volume_root") return term_arity(t, 1), Modulus::intrinsic_volume_root(term_index(t, 0));
  if (n == "mean_width") return term_arity(t, 0), Modulus::mean_width();
  if (n == "quotient_range") return term_arity(t, 0), Modulus::quotient_range();
  if (n == "max_of") return Modulus::max_of(children(0));
  if (n == "min_of") return Modulus::min_of(children(0));
  if (n == "kth_largest_abs") return term_arity(t, 1), Modulus::kth_largest_abs(term_index(t, 0));
  if (n == "linear_form") {
    std::vector<double> w;
    for (std::size_t i = 0; i < t.args.size(); ++i) w.push_back(term_number(t, i));
    return Modulus::linear_form(std::move(w));
  }
  if (n == "coord_if_axis") return term_arity(t, 1), Modulus::coord_if_axis(term_index(t, 0));
  if (n == "scaled") return term_arity(t, 2), Modulus::scaled(term_number(t, 0), parse_modulus(term_child(t, 1)));
  fail(ErrorCode::Config, "unknown modulus '" + n + "'");
}

inline Modulus parse_modulus(std::string_view text) { return parse_modulus(parse_term(text)); }

inline ScalingSpec parse_scaling(const Term& t) {
  const auto& n = t.name;
  if (n == "linear") return term_arity(t, 0), ScalingSpec::linear();
  if (n == "power_weights") {
    std::vector<double> a;
    for (std::size_t i = 0; i < t.args.size(); ++i) a.push_back(term_number(t, i));
    return ScalingSpec::power_weights(std::move(a));
  }
  if (n == "inverse_linear") return term_arity(t, 0), ScalingSpec::inverse_linear();
  if (n == "component_subset") {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < t.args.size(); ++i) idx.push_back(term_index(t, i));
    return ScalingSpec::component_subset(std::move(idx));
  }
  if (n == "log_shift") return term_arity(t, 0), ScalingSpec::log_shift();
  if (n == "affine_inverse") return term_arity(t, 1), ScalingSpec::affine_inverse(term_number(t, 0));
  if (n == "function_values") return term_arity(t, 0), ScalingSpec::function_values();
  if (n == "uplifted") return term_arity(t, 1), ScalingSpec::uplifted(parse_scaling(term_child(t, 0)));
  if (n == "set_linear") return term_arity(t, 0), ScalingSpec::set_linear();
  if (n == "min_shift") return term_arity(t, 0), ScalingSpec::min_shift();
  fail(ErrorCode::Config, "unknown scaling '" + n + "'");
}

inline ScalingSpec parse_scaling(std::string_view text) { return parse_scaling(parse_term(text)); }

inline std::string describe(const ScalingSpec& s) {
  auto list = [](const auto& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) out += ", ";
      if constexpr (std::is_same_v<std::decay_t<decltype(xs[i])>, double>)
        out += format_number(xs[i]);
      else
        out += std::to_string(xs[i]);
    }
    return out;
  };
  switch (s.kind()) {
    case ScalingKind::Linear: return "linear";
    case ScalingKind::PowerWeights: return "power_weights(" + list(s.exponents()) + ")";
    case ScalingKind::InverseLinear: return "inverse_linear";
    case ScalingKind::ComponentSubset: return "component_subset(" + list(s.indices()) + ")";
    case ScalingKind::LogShift: return "log_shift";
    case ScalingKind::AffineInverse: return "affine_inverse(" + format_number(s.anchor()) + ")";
    case ScalingKind::FunctionValues: return "function_values";
    case ScalingKind::Uplifted: return "uplifted(" + describe(s.base()) + ")";
    case ScalingKind::SetLinear: return "set_linear";
    case ScalingKind::MinShift: return "min_shift";
  }
  return "?";
}

/// Ideal given by generating moduli: a set is bounded when the pointwise max
/// of the (derived) generators is bounded below on it. Product and graph
/// structures derive generators from per-coordinate moduli.
class IdealSpec {
 public:
  enum class Structure { Plain, Product, Graph };

  explicit IdealSpec(std::vector<Modulus> generators) : generators_(std::move(generators)) {
    require(!generators_.empty(), ErrorCode::BadParameters, "ideal needs at least one generator");
  }

  /// k-th product ideal: bounded through some k-subset of the coordinate moduli.
  static IdealSpec product(std::vector<Modulus> coords, std::size_t k) {
    IdealSpec s(std::move(coords));
    require(k >= 1 && k <= s.generators_.size(), ErrorCode::BadParameters, "product order k out of range");
    s.structure_ = Structure::Product;
    s.order_ = k;
    return s;
  }

  /// Graph product: node i contributes min over its closed neighbourhood.
  static IdealSpec graph(std::vector<Modulus> coords, std::vector<std::vector<std::size_t>> adjacency) {
    IdealSpec s(std::move(coords));
    require(adjacency.size() == s.generators_.size(), ErrorCode::DimensionMismatch,
            "adjacency list must have one entry per coordinate modulus");
    for (const auto& nb : adjacency)
      for (auto j : nb) require(j < s.generators_.size(), ErrorCode::BadParameters, "adjacency index out of range");
    s.structure_ = Structure::Graph;
    s.adjacency_ = std::move(adjacency);
    return s;
  }

  [[nodiscard]] Structure structure() const { return structure_; }
  [[nodiscard]] const std::vector<Modulus>& generators() const { return generators_; }
  [[nodiscard]] std::size_t order() const { return order_; }
  [[nodiscard]] const std::vector<std::vector<std::size_t>>& adjacency() const { return adjacency_; }

  /// Explicit generator family; product ideals enumerate all k-subsets.
  [[nodiscard]] std::vector<Modulus> derived_generators() const {
    if (structure_ == Structure::Plain) return generators_;
    std::vector<Modulus> out;
    if (structure_ == Structure::Graph) {
      for (std::size_t i = 0; i < generators_.size(); ++i) {
        std::vector<Modulus> group{generators_[i]};
        for (auto j : adjacency_[i])
          if (j != i) group.push_back(generators_[j]);
        out.push_back(Modulus::min_of(std::move(group)));
      }
      return out;
    }
    const auto m = generators_.size();
    std::vector<bool> pick(m, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(order_), true);
    do {
      std::vector<Modulus> group;
      for (std::size_t i = 0; i < m; ++i)
        if (pick[i]) group.push_back(generators_[i]);
      out.push_back(Modulus::min_of(std::move(group)));
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return out;
  }

  /// max over derived generators at x.
  [[nodiscard]] double threshold(const Element& x) const {
    if (structure_ == Structure::Product) {
      // max over k-subsets of the min equals the k-th largest value.
      std::vector<double> v;
      v.reserve(generators_.size());
      for (const auto& g : generators_) v.push_back(g.eval(x));
      std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(order_ - 1), v.end(), std::greater<>());
      return v[order_ - 1];
    }
    double best = 0.0;
    for (const auto& g : derived_generators()) best = std::max(best, g.eval(x));
    return best;
  }

 private:
  std::vector<Modulus> generators_;
  Structure structure_ = Structure::Plain;
  std::size_t order_ = 0;
  std::vector<std::vector<std::size_t>> adjacency_;
};

inline double ideal_threshold(const IdealSpec& spec, const Element& x) { return spec.threshold(x); }

struct SemiconeOptions {
  int max_iterations = 200;
  double rel_tol = 1e-12;
};

/// tau(x) = sup{t > 0 : T_{1/t} x in V} for an open semicone V given by its
/// membership oracle. Brackets from t = 1 by doubling/halving, then bisects.
/// Returns 0 when no probed t works and +inf when every probed t works.
inline double modulus_from_semicone(const std::function<bool(const Element&)>& member, const Element& x,
                                    const ScalingSpec& s, SemiconeOptions opt = {}) {
  auto in = [&](double t) { return member(invert_scaling(s, t, x)); };
  constexpr int max_steps = 1100;  // 2^±1100 covers the double range
  double lo = 0.0;
  double hi = 0.0;
  if (in(1.0)) {
    lo = 1.0;
    hi = 2.0;
    int steps = 0;
    while (in(hi)) {
      lo = hi;
      hi *= 2.0;
      if (++steps > max_steps || !std::isfinite(hi)) return std::numeric_limits<double>::infinity();
    }
  } else {
    hi = 1.0;
    lo = 0.5;
    int steps = 0;
    // For large x, T_{1/t} x overflows before t underflows; no element is left
    // to probe past that point.
    for (;;) {
      try {
        if (in(lo)) break;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidElement) return 0.0;
        throw;
      }
      hi = lo;
      lo *= 0.5;
      if (++steps > max_steps || lo == 0.0) return 0.0;
    }
  }
  require(in(0.5 * lo) && !in(2.0 * hi), ErrorCode::NonMonotoneOracle,
          "membership is not monotone along the orbit near the bracket");
  for (int i = 0; i < opt.max_iterations && hi - lo > opt.rel_tol * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (in(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct DominationResult {
  bool dominates = false;
  double witness_ratio = 0.0;  ///< sup over samples of m1 / m2
  std::size_t witness_index = 0;
  std::size_t samples = 0;
  std::string note = "Monte Carlo evidence over a finite sample, not a proof";
};

/// Searches sup m1(x) / m2(x) over n sampled elements. m1 is reported as
/// dominated by m2 (m1 <= c m2) when the ratio stays finite and <= cap.
template <class Sampler>
DominationResult check_domination(const Modulus& m1, const Modulus& m2, Sampler&& sampler, std::size_t n,
                                  double cap = 1e6) {
  require(n >= 1, ErrorCode::BadParameters, "check_domination needs n >= 1");
  DominationResult r;
  r.samples = n;
  for (std::size_t i = 0; i < n; ++i) {
    const Element x = sampler(i);
    const double a = m1.eval(x);
    const double b = m2.eval(x);
    if (a == 0.0) continue;
    const double ratio = b == 0.0 ? std::numeric_limits<double>::infinity() : a / b;
    if (ratio > r.witness_ratio) {
      r.witness_ratio = ratio;
      r.witness_index = i;
    }
  }
  r.dominates = std::isfinite(r.witness_ratio) && r.witness_ratio <= cap;
  return r;
}

}  // namespace rvlab
