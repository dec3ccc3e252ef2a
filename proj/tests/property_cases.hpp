#pragma once

// Random elements and the scaling and modulus cases shared by the property
// tests and the acceptance suite.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "rvlab/rvlab.hpp"

namespace rvlab::props {

inline Vector vec(std::initializer_list<double> v) { return Vector(std::vector<double>(v)); }

inline std::vector<double> coords(const Element& x) { return flatten(x); }

inline double norm_of(const Element& x) { return coordinate_size(x); }

// Random elements for property tests, drawn from a fixed std::mt19937_64.
struct Randoms {
  std::mt19937_64 eng{20240611};

  double unif(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
  double scale() { return std::exp(unif(-3.0, 3.0)); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng); }

  std::vector<double> values(std::size_t d, double lo = -5.0, double hi = 5.0) {
    std::vector<double> v(d);
    for (auto& x : v) x = unif(lo, hi);
    return v;
  }
  Vector vector(std::size_t d) { return Vector(values(d)); }
  Vector positive(std::size_t d) { return Vector(values(d, 0.01, 10.0)); }
  GridFunction grid() { return GridFunction(0.0, 1.0, values(33)); }
  PointConfig points(std::size_t dim = 2) {
    std::vector<WeightedPoint> pts;
    const auto m = 1 + index(6);
    for (std::size_t i = 0; i < m; ++i) pts.push_back({values(dim), 1 + index(3)});
    return PointConfig(std::move(pts));
  }
  Polytope polygon(double lo = -5.0, double hi = 5.0) {
    std::vector<std::vector<double>> vs;
    const auto m = 3 + index(10);
    for (std::size_t i = 0; i < m; ++i) vs.push_back(values(2, lo, hi));
    return Polytope(std::move(vs));
  }
};

struct ScalingCase {
  const char* name;
  ScalingSpec s;
  std::function<Element(Randoms&)> draw;
};

inline std::vector<ScalingCase> scaling_cases() {
  return {
      {"linear", ScalingSpec::linear(), [](Randoms& r) -> Element { return r.vector(3); }},
      {"linear_sequence", ScalingSpec::linear(), [](Randoms& r) -> Element { return Sequence(r.values(5)); }},
      {"linear_polytope", ScalingSpec::linear(), [](Randoms& r) -> Element { return r.polygon(); }},
      {"power_weights", ScalingSpec::power_weights({1, -1, 0.5}), [](Randoms& r) -> Element { return r.vector(3); }},
      {"inverse_linear", ScalingSpec::inverse_linear(), [](Randoms& r) -> Element { return r.vector(2); }},
      {"component_subset", ScalingSpec::component_subset({0, 2}), [](Randoms& r) -> Element { return r.vector(3); }},
      {"log_shift", ScalingSpec::log_shift(), [](Randoms& r) -> Element { return r.vector(2); }},
      {"affine_inverse", ScalingSpec::affine_inverse(1.5), [](Randoms& r) -> Element { return r.vector(2); }},
      {"function_values", ScalingSpec::function_values(), [](Randoms& r) -> Element { return r.grid(); }},
      {"uplifted", ScalingSpec::uplifted(ScalingSpec::power_weights({1, 2})),
       [](Randoms& r) -> Element { return r.points(); }},
      {"set_linear", ScalingSpec::set_linear(), [](Randoms& r) -> Element { return r.polygon(); }},
      {"min_shift", ScalingSpec::min_shift(), [](Randoms& r) -> Element { return r.vector(3); }},
  };
}

struct ModulusCase {
  Modulus m;
  std::function<Element(Randoms&)> draw;
};

inline std::vector<ModulusCase> modulus_cases() {
  auto v2 = [](Randoms& r) -> Element { return r.vector(2); };
  auto p2 = [](Randoms& r) -> Element { return r.positive(2); };
  auto seq = [](Randoms& r) -> Element { return Sequence(r.values(6)); };
  auto grid = [](Randoms& r) -> Element { return r.grid(); };
  auto pts = [](Randoms& r) -> Element { return r.points(); };
  auto poly = [](Randoms& r) -> Element { return r.polygon(); };
  return {
      {Modulus::norm(2), v2},
      {Modulus::norm(1), v2},
      {Modulus::norm(0.5), v2},
      {Modulus::norm(3), v2},
      {Modulus::max_abs(), v2},
      {Modulus::min_abs(), v2},
      {Modulus::coord_abs(1), v2},
      {Modulus::beta_star(0.3), p2},
      {Modulus::beta_min(0.3), p2},
      {Modulus::beta_star(0.5), v2},
      {Modulus::kth_largest_abs(2), v2},
      {Modulus::linear_form({0.5, 2.0}), v2},
      {Modulus::coord_if_axis(0), v2},
      {Modulus::max_of({Modulus::coord_abs(0), Modulus::scaled(2.0, Modulus::coord_abs(1))}), v2},
      {Modulus::min_of({Modulus::norm(2), Modulus::beta_min(0.25)}), v2},
      {Modulus::max_abs(), seq},
      {Modulus::kth_largest_abs(3), seq},
      {Modulus::sup_abs(), grid},
      {Modulus::inf_abs(), grid},
      {Modulus::value_at(0.3), grid},
      {Modulus::oscillation(0.2), grid},
      {Modulus::quotient_range(), grid},
      {Modulus::kth_largest_point(2, Modulus::norm(2)), pts},
      {Modulus::set_sup(), pts},
      {Modulus::set_inf(), pts},
      {Modulus::set_sup(), poly},
      {Modulus::set_inf(), poly},
      {Modulus::inscribed_radius(), poly},
      {Modulus::intrinsic_volume_root(1), poly},
      {Modulus::intrinsic_volume_root(2), poly},
      {Modulus::mean_width(), poly},
  };
}

}  // namespace rvlab::props
