#pragma once

// Discrete tail measures mu = (sigma x theta_alpha) pushed through the polar
// map, with sector evaluation, pushforward by homogeneous maps, change of the
// reference modulus and assembly from per-coordinate parts.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "rvlab/core.hpp"
#include "rvlab/moduli.hpp"

namespace rvlab {

struct Atom {
  Element location;
  double weight = 0.0;
};

inline constexpr double kSphereTol = 1e-9;
inline constexpr double kMergeTol = 1e-9;

/// Finite discrete measure on the sphere {reference = 1}.
class SpectralMeasure {
 public:
  SpectralMeasure(std::vector<Atom> atoms, Modulus reference) : atoms_(std::move(atoms)), reference_(std::move(reference)) {
    require(!atoms_.empty(), ErrorCode::BadParameters, "spectral measure needs at least one atom");
    for (const auto& a : atoms_) {
      require(std::isfinite(a.weight) && a.weight > 0.0, ErrorCode::BadParameters, "atom weights must be positive and finite");
      const double r = reference_.eval(a.location);
      require(std::abs(r - 1.0) <= kSphereTol, ErrorCode::BadParameters,
              "atom off the unit sphere of " + reference_.describe() + " (value " + format_number(r) + ")");
    }
  }

  [[nodiscard]] const std::vector<Atom>& atoms() const { return atoms_; }
  [[nodiscard]] const Modulus& reference() const { return reference_; }
  [[nodiscard]] double total_weight() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight;
    return s;
  }

 private:
  std::vector<Atom> atoms_;
  Modulus reference_;
};

class TailMeasure {
 public:
  TailMeasure(double alpha, SpectralMeasure spectral, ScalingSpec scaling)
      : alpha_(alpha), spectral_(std::move(spectral)), scaling_(std::move(scaling)) {
    require(alpha_ > 0.0 && std::isfinite(alpha_), ErrorCode::BadParameters, "alpha must be positive");
  }

  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] const SpectralMeasure& spectral() const { return spectral_; }
  [[nodiscard]] const ScalingSpec& scaling() const { return scaling_; }
  [[nodiscard]] const Modulus& reference() const { return spectral_.reference(); }

 private:
  double alpha_;
  SpectralMeasure spectral_;
  ScalingSpec scaling_;
};

using DirectionPredicate = std::function<bool(const Element&)>;

/// theta_alpha((s, inf)) = s^{-alpha}.
inline double theta_tail(double alpha, double s) {
  require(alpha > 0.0, ErrorCode::BadParameters, "theta_tail needs alpha > 0");
  require(s > 0.0, ErrorCode::BadParameters, "theta_tail needs s > 0");
  return std::isinf(s) ? 0.0 : std::pow(s, -alpha);
}

/// theta_alpha((s, t]), t may be +inf.
inline double theta_interval(double alpha, double s, double t) {
  require(s < t, ErrorCode::InvalidInterval, "need s < t");
  return theta_tail(alpha, s) - theta_tail(alpha, t);
}

/// mu(A x (s, t]) = sigma(A) (s^{-alpha} - t^{-alpha}).
inline double sector_mass(const TailMeasure& mu, const DirectionPredicate& directions, double s, double t) {
  require(s > 0.0 && s < t, ErrorCode::InvalidInterval, "sector needs 0 < s < t");
  double w = 0.0;
  for (const auto& a : mu.spectral().atoms())
    if (directions(a.location)) w += a.weight;
  return w == 0.0 ? 0.0 : w * theta_interval(mu.alpha(), s, t);
}

inline bool all_directions(const Element&) { return true; }

/// Sorts atoms lexicographically and merges locations within kMergeTol,
/// summing weights.
inline std::vector<Atom> merge_atoms(std::vector<Atom> atoms) {
  std::vector<std::pair<std::vector<double>, std::size_t>> keys;
  keys.reserve(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    auto k = flatten(atoms[i].location);
    k.insert(k.begin(), static_cast<double>(atoms[i].location.index()));
    keys.emplace_back(std::move(k), i);
  }
  std::sort(keys.begin(), keys.end());
  std::vector<Atom> out;
  for (const auto& [key, i] : keys) {
    if (!out.empty() && element_distance(out.back().location, atoms[i].location) <= kMergeTol) {
      out.back().weight += atoms[i].weight;
    } else {
      out.push_back(std::move(atoms[i]));
    }
  }
  return out;
}

using HomogeneousMap = std::function<Element(const Element&)>;

/// Image of mu under a homogeneous map f. Atom u goes to T_{1/c} f(u) with
/// weight w c^alpha where c = target(f(u)); atoms with c = 0 are dropped.
inline TailMeasure pushforward(const TailMeasure& mu, const HomogeneousMap& f, const Modulus& target,
                               const ScalingSpec& target_scaling) {
  std::vector<Atom> out;
  for (const auto& a : mu.spectral().atoms()) {
    const Element fu = f(a.location);
    for (double t : {0.5, 2.0, 3.7}) {
      const Element lhs = f(apply_scaling(mu.scaling(), t, a.location));
      const Element rhs = apply_scaling(target_scaling, t, fu);
      const double d = element_distance(lhs, rhs);
      require(d <= 1e-6 * (1.0 + coordinate_size(rhs)), ErrorCode::NonMorphism,
              "map does not commute with the scalings at t = " + format_number(t));
    }
    const double c = target.eval(fu);
    require(std::isfinite(c), ErrorCode::InfiniteModulus, "target modulus is infinite on an image atom");
    if (c <= 0.0) continue;
    out.push_back({invert_scaling(target_scaling, c, fu), a.weight * std::pow(c, mu.alpha())});
  }
  if (out.empty()) fail(ErrorCode::TrivialPushforward, "every atom maps to the zero set of the target modulus");
  return TailMeasure(mu.alpha(), SpectralMeasure(merge_atoms(std::move(out)), target), target_scaling);
}

/// Same, with the target scaling paired to the image kind.
inline TailMeasure pushforward(const TailMeasure& mu, const HomogeneousMap& f, const Modulus& target) {
  const Element probe = f(mu.spectral().atoms().front().location);
  return pushforward(mu, f, target, paired_scaling(target, kind_of(probe)));
}

/// Re-expresses mu on the sphere of ell: atom u goes to T_{1/ell(u)} u with
/// weight w ell(u)^alpha; atoms with ell(u) = 0 are dropped.
inline TailMeasure change_modulus(const TailMeasure& mu, const Modulus& ell) {
  std::vector<Atom> out;
  for (const auto& a : mu.spectral().atoms()) {
    const double c = ell.eval(a.location);
    require(std::isfinite(c), ErrorCode::InfiniteModulus,
            "new modulus is infinite on an atom; its ideal is not contained in the reference ideal");
    if (c <= 0.0) continue;
    out.push_back({invert_scaling(mu.scaling(), c, a.location), a.weight * std::pow(c, mu.alpha())});
  }
  if (out.empty()) fail(ErrorCode::TrivialResult, "new modulus vanishes on every atom");
  return TailMeasure(mu.alpha(), SpectralMeasure(merge_atoms(std::move(out)), ell), mu.scaling());
}

/// Atom of a measure whose radial part is theta_alpha restricted to (lo, hi].
struct SegmentAtom {
  Element direction;
  double weight = 0.0;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

/// Discrete polar measure with radially truncated atoms; the output of
/// assemble_from_marginals, referenced to the max-abs modulus.
class SegmentMeasure {
 public:
  SegmentMeasure(double alpha, Modulus reference, std::vector<SegmentAtom> atoms)
      : alpha_(alpha), reference_(std::move(reference)), atoms_(std::move(atoms)) {}

  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] const Modulus& reference() const { return reference_; }
  [[nodiscard]] const std::vector<SegmentAtom>& atoms() const { return atoms_; }

  /// Mass of {direction in A, radius in (s, t]}.
  [[nodiscard]] double mass(const DirectionPredicate& directions, double s, double t) const {
    require(s >= 0.0 && s < t, ErrorCode::InvalidInterval, "need 0 <= s < t");
    double m = 0.0;
    for (const auto& a : atoms_) {
      const double lo = std::max(s, a.lo);
      const double hi = std::min(t, a.hi);
      if (lo < hi && directions(a.direction)) m += a.weight * theta_interval(alpha_, lo, hi);
    }
    return m;
  }

  [[nodiscard]] double total() const { return mass(all_directions, 0.0, std::numeric_limits<double>::infinity()); }

 private:
  double alpha_;
  Modulus reference_;
  std::vector<SegmentAtom> atoms_;
};

/// mu(. n {tau_max > a}) = sum_i mu_i(. n {|x_i| > a} n {max_{j<i} |x_j| <= a})
/// for parts mu_i on R^d with linear scaling. On the ray {r u}, part i covers
/// r in (a/|u_i|, a/max_{j<i}|u_j|].
inline SegmentMeasure assemble_from_marginals(const std::vector<TailMeasure>& parts, double a) {
  require(a > 0.0, ErrorCode::BadParameters, "assembly level a must be positive");
  require(!parts.empty(), ErrorCode::DimensionMismatch, "assembly needs one part per coordinate");
  const std::size_t d = parts.size();
  const double alpha = parts.front().alpha();
  const auto tau_max = Modulus::max_abs();
  std::vector<SegmentAtom> out;
  for (std::size_t i = 0; i < d; ++i) {
    const auto& part = parts[i];
    require(part.alpha() == alpha, ErrorCode::BadParameters, "all parts must share the tail index");
    require(part.scaling().kind() == ScalingKind::Linear, ErrorCode::IncompatibleVariant,
            "assembly needs the linear scaling");
    for (const auto& atom : part.spectral().atoms()) {
      const auto* v = std::get_if<Vector>(&atom.location);
      require(v != nullptr && v->size() == d, ErrorCode::DimensionMismatch,
              "part " + std::to_string(i) + " has an atom outside R^" + std::to_string(d));
      const auto u = v->values();
      const double ui = std::abs(u[i]);
      if (ui == 0.0) continue;
      double prior = 0.0;
      for (std::size_t j = 0; j < i; ++j) prior = std::max(prior, std::abs(u[j]));
      const double c = tau_max.eval_coords(u);
      const double lo = c * a / ui;
      const double hi = prior == 0.0 ? std::numeric_limits<double>::infinity() : c * a / prior;
      if (!(lo < hi)) continue;
      std::vector<double> dir(u.begin(), u.end());
      for (auto& x : dir) x /= c;
      out.push_back({Vector(std::move(dir)), atom.weight * std::pow(c, alpha), lo, hi});
    }
  }
  return SegmentMeasure(alpha, tau_max, std::move(out));
}

}  // namespace rvlab
