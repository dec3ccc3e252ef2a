#pragma once

// Seeded generators of regularly varying random elements. Element i of a
// batch is drawn from its own Philox stream (seed, i), so batches are
// prefix-stable and independent of the thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "rvlab/core.hpp"
#include "rvlab/parallel.hpp"
#include "rvlab/random.hpp"
#include "rvlab/tailmeasure.hpp"

namespace rvlab {

class GeneratorSpec;
using GeneratorPtr = std::shared_ptr<const GeneratorSpec>;

namespace gen {

/// P{X > x} = x^{-alpha}, x >= 1.
struct Pareto {
  double alpha = 1.0;
};
/// d i.i.d. Pareto(alpha) coordinates.
struct ParetoIID {
  double alpha = 1.0;
  std::size_t dim = 2;
};
/// T_R U with P{R > r} = r^{-alpha} (r >= 1) and U drawn from the
/// normalised spectral atoms.
struct SpectralRV {
  std::shared_ptr<const TailMeasure> tail;
};
/// xi(u) = V1 u + V2 (1 - u) on [0, 1] with V1, V2 i.i.d. Pareto(alpha).
struct BrokenLine {
  double alpha = 1.0;
  std::size_t grid = 257;
};
/// xi(u) = y_0 + y_1 u + ... + y_d u^d on [0, 1], y from a vector generator.
struct RandomPolynomial {
  GeneratorPtr coefficients;
  std::size_t grid = 257;
};
/// Sequence of Pareto(alpha) values; shared = one value repeated.
struct ParetoSequence {
  double alpha = 1.0;
  std::size_t length = 8;
  bool shared = false;
};
/// X_i = max_j w_j Z_{i-j} with i.i.d. Pareto(alpha) innovations Z.
struct MovingMax {
  double alpha = 1.0;
  std::size_t length = 8;
  std::vector<double> weights{1.0, 1.0};
};
/// m i.i.d. points from a vector generator.
struct BinomialPP {
  std::size_t m = 1;
  GeneratorPtr point;
};
/// Poisson(mean) many i.i.d. points from a vector generator; the intensity
/// measure is mean * law(point) and is finite.
struct PoissonPP {
  double mean = 1.0;
  GeneratorPtr point;
};
/// Points of a ground process, each extended by an independent scalar mark
/// as its last coordinate.
struct MarkedPP {
  GeneratorPtr ground;
  GeneratorPtr mark;
};
struct Kernel {
  enum class Shape { Triangle, Epanechnikov };
  Shape shape = Shape::Triangle;
  double width = 1.0;

  [[nodiscard]] double operator()(double x) const {
    const double r = std::abs(x) / width;
    if (r >= 1.0) return 0.0;
    return shape == Shape::Triangle ? 1.0 - r : 1.0 - r * r;
  }
};
/// zeta(u) = sum mark_i f(u - y_i) on a grid over [lo, hi].
struct ShotNoise {
  GeneratorPtr marked;
  Kernel kernel;
  double lo = 0.0;
  double hi = 1.0;
  std::size_t grid = 257;
};
/// Convex hull of m i.i.d. planar points.
struct ConvexHull {
  std::size_t m = 3;
  GeneratorPtr point;
};
/// Disk B_r(c) as an inscribed regular polygon.
struct RandomBall {
  GeneratorPtr center;
  GeneratorPtr radius;
  std::size_t vertices = 64;
};
/// Ellipse with semiaxes from a planar vector generator, as a polygon.
struct Ellipse {
  GeneratorPtr semiaxes;
  std::size_t vertices = 64;
};
/// eta + (xi - 1)(1, 1) where xi is Pareto(alpha) and eta lies on
/// {min = 1}: eta = (1, 1 + spread E) or its mirror, E standard exponential.
struct ScalingMinPair {
  double alpha = 1.0;
  double spread = 1.0;
};
/// zeta (eta, 1) + (1 - zeta)(sqrt(eta), 0), zeta fair Bernoulli, eta Pareto(alpha).
struct DombryRibatet {
  double alpha = 1.0;
};
/// a - 1/xi with xi Pareto(alpha).
struct ReflectedPareto {
  double alpha = 1.0;
  double endpoint = 0.0;
};
/// log xi with xi Pareto(alpha).
struct LogPareto {
  double alpha = 1.0;
};
/// Triangular spike of height V (Pareto) and half-width `width` centred at a
/// uniform position.
struct RandomSpike {
  double alpha = 1.0;
  double width = 0.05;
  std::size_t grid = 257;
};
/// Constant function xi(u) = V on [0, 1], V Pareto(alpha).
struct ConstantFunction {
  double alpha = 1.0;
  std::size_t grid = 257;
};
struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};
struct Normal {
  double mean = 0.0;
  double sd = 1.0;
};
/// c times the draw of another generator (linear scaling).
struct ScaledBy {
  double factor = 1.0;
  GeneratorPtr inner;
};

}  // namespace gen

class GeneratorSpec {
 public:
  using Variant =
      std::variant<gen::Pareto, gen::ParetoIID, gen::SpectralRV, gen::BrokenLine, gen::RandomPolynomial,
                   gen::ParetoSequence, gen::MovingMax, gen::BinomialPP, gen::PoissonPP, gen::MarkedPP, gen::ShotNoise,
                   gen::ConvexHull, gen::RandomBall, gen::Ellipse, gen::ScalingMinPair, gen::DombryRibatet,
                   gen::ReflectedPareto, gen::LogPareto, gen::RandomSpike, gen::ConstantFunction, gen::Uniform,
                   gen::Normal, gen::ScaledBy>;

  template <class T>
  GeneratorSpec(T v) : v_(std::move(v)) {  // NOLINT(google-explicit-constructor)
    validate();
  }

  [[nodiscard]] const Variant& variant() const { return v_; }

  /// Kind of element produced by draw().
  [[nodiscard]] ElementKind element_kind() const {
    return std::visit(
        [](const auto& g) -> ElementKind {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, gen::BrokenLine> || std::is_same_v<T, gen::RandomPolynomial> ||
                        std::is_same_v<T, gen::ShotNoise> || std::is_same_v<T, gen::RandomSpike> ||
                        std::is_same_v<T, gen::ConstantFunction>)
            return ElementKind::GridFunction;
          else if constexpr (std::is_same_v<T, gen::ParetoSequence> || std::is_same_v<T, gen::MovingMax>)
            return ElementKind::Sequence;
          else if constexpr (std::is_same_v<T, gen::BinomialPP> || std::is_same_v<T, gen::PoissonPP> ||
                             std::is_same_v<T, gen::MarkedPP>)
            return ElementKind::PointConfig;
          else if constexpr (std::is_same_v<T, gen::ConvexHull> || std::is_same_v<T, gen::RandomBall> ||
                             std::is_same_v<T, gen::Ellipse>)
            return ElementKind::Polytope;
          else if constexpr (std::is_same_v<T, gen::SpectralRV>)
            return kind_of(g.tail->spectral().atoms().front().location);
          else if constexpr (std::is_same_v<T, gen::ScaledBy>)
            return g.inner->element_kind();
          else
            return ElementKind::Vector;
        },
        v_);
  }

  /// Dimension of the produced vectors; 0 for non-vector kinds.
  [[nodiscard]] std::size_t vector_dim() const {
    if (element_kind() != ElementKind::Vector) return 0;
    return std::visit(
        [](const auto& g) -> std::size_t {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, gen::ParetoIID>)
            return g.dim;
          else if constexpr (std::is_same_v<T, gen::SpectralRV>)
            return std::get<Vector>(g.tail->spectral().atoms().front().location).size();
          else if constexpr (std::is_same_v<T, gen::ScalingMinPair> || std::is_same_v<T, gen::DombryRibatet>)
            return 2;
          else if constexpr (std::is_same_v<T, gen::ScaledBy>)
            return g.inner->vector_dim();
          else
            return 1;
        },
        v_);
  }

  [[nodiscard]] bool is_scalar() const { return vector_dim() == 1; }

 private:
  void validate() const;

  Variant v_;
};

namespace detail {

inline void check_alpha(double alpha) {
  require(alpha > 0.0 && std::isfinite(alpha), ErrorCode::BadParameters, "generator alpha must be positive");
}

inline void check_child(const GeneratorPtr& g, const char* what) {
  require(g != nullptr, ErrorCode::BadParameters, std::string(what) + " generator missing");
}

inline void check_vector_child(const GeneratorPtr& g, const char* what, std::size_t dim = 0) {
  check_child(g, what);
  const auto d = g->vector_dim();
  require(d > 0, ErrorCode::BadParameters, std::string(what) + " generator must produce vectors");
  if (dim > 0) require(d == dim, ErrorCode::BadParameters, std::string(what) + " generator has the wrong dimension");
}

}  // namespace detail

inline void GeneratorSpec::validate() const {
  std::visit(
      [](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        using namespace detail;
        if constexpr (std::is_same_v<T, gen::Pareto> || std::is_same_v<T, gen::DombryRibatet> ||
                      std::is_same_v<T, gen::LogPareto> || std::is_same_v<T, gen::ReflectedPareto>) {
          check_alpha(g.alpha);
        } else if constexpr (std::is_same_v<T, gen::ParetoIID>) {
          check_alpha(g.alpha);
          require(g.dim >= 1, ErrorCode::BadParameters, "dim must be >= 1");
        } else if constexpr (std::is_same_v<T, gen::SpectralRV>) {
          require(g.tail != nullptr, ErrorCode::BadParameters, "spectral generator needs a tail measure");
        } else if constexpr (std::is_same_v<T, gen::BrokenLine> || std::is_same_v<T, gen::ConstantFunction>) {
          check_alpha(g.alpha);
          require(g.grid >= 2, ErrorCode::BadParameters, "grid must be >= 2");
        } else if constexpr (std::is_same_v<T, gen::RandomPolynomial>) {
          check_vector_child(g.coefficients, "coefficient");
          require(g.grid >= 2, ErrorCode::BadParameters, "grid must be >= 2");
        } else if constexpr (std::is_same_v<T, gen::ParetoSequence>) {
          check_alpha(g.alpha);
          require(g.length >= 1, ErrorCode::BadParameters, "length must be >= 1");
        } else if constexpr (std::is_same_v<T, gen::MovingMax>) {
          check_alpha(g.alpha);
          require(g.length >= 1 && !g.weights.empty(), ErrorCode::BadParameters, "moving max needs length and weights");
          for (double w : g.weights) require(w >= 0.0, ErrorCode::BadParameters, "moving max weights must be >= 0");
        } else if constexpr (std::is_same_v<T, gen::BinomialPP>) {
          check_vector_child(g.point, "point");
        } else if constexpr (std::is_same_v<T, gen::PoissonPP>) {
          require(g.mean >= 0.0 && std::isfinite(g.mean), ErrorCode::BadParameters, "Poisson mean must be finite");
          check_vector_child(g.point, "point");
        } else if constexpr (std::is_same_v<T, gen::MarkedPP>) {
          check_child(g.ground, "ground");
          require(g.ground->element_kind() == ElementKind::PointConfig, ErrorCode::BadParameters,
                  "ground generator must produce point configurations");
          check_vector_child(g.mark, "mark", 1);
        } else if constexpr (std::is_same_v<T, gen::ShotNoise>) {
          check_child(g.marked, "marked");
          require(g.marked->element_kind() == ElementKind::PointConfig, ErrorCode::BadParameters,
                  "shot noise needs a marked point process");
          require(g.kernel.width > 0.0 && g.lo < g.hi && g.grid >= 2, ErrorCode::BadParameters, "bad shot noise grid");
        } else if constexpr (std::is_same_v<T, gen::ConvexHull>) {
          require(g.m >= 1, ErrorCode::BadParameters, "hull needs m >= 1");
          check_vector_child(g.point, "point", 2);
        } else if constexpr (std::is_same_v<T, gen::RandomBall>) {
          check_vector_child(g.center, "center", 2);
          check_vector_child(g.radius, "radius", 1);
          require(g.vertices >= 3, ErrorCode::BadParameters, "ball polygon needs >= 3 vertices");
        } else if constexpr (std::is_same_v<T, gen::Ellipse>) {
          check_vector_child(g.semiaxes, "semiaxes", 2);
          require(g.vertices >= 4, ErrorCode::BadParameters, "ellipse polygon needs >= 4 vertices");
        } else if constexpr (std::is_same_v<T, gen::ScalingMinPair>) {
          check_alpha(g.alpha);
          require(g.spread >= 0.0, ErrorCode::BadParameters, "spread must be >= 0");
        } else if constexpr (std::is_same_v<T, gen::RandomSpike>) {
          check_alpha(g.alpha);
          require(g.width > 0.0 && g.grid >= 2, ErrorCode::BadParameters, "bad spike parameters");
        } else if constexpr (std::is_same_v<T, gen::Uniform>) {
          require(g.lo < g.hi, ErrorCode::BadParameters, "uniform needs lo < hi");
        } else if constexpr (std::is_same_v<T, gen::Normal>) {
          require(g.sd > 0.0, ErrorCode::BadParameters, "normal needs sd > 0");
        } else if constexpr (std::is_same_v<T, gen::ScaledBy>) {
          check_child(g.inner, "inner");
          require(g.factor > 0.0, ErrorCode::BadParameters, "scale factor must be positive");
        }
      },
      v_);
}

template <class T>
GeneratorPtr make_generator(T v) {
  return std::make_shared<const GeneratorSpec>(std::move(v));
}

inline Element draw(const GeneratorSpec& g, Stream& rng);

/// Fills `out` (length vector_dim()) for vector-valued generators.
inline void draw_vector(const GeneratorSpec& spec, Stream& rng, std::span<double> out) {
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, gen::Pareto>) {
          out[0] = rng.pareto(g.alpha);
        } else if constexpr (std::is_same_v<T, gen::ParetoIID>) {
          for (auto& x : out) x = rng.pareto(g.alpha);
        } else if constexpr (std::is_same_v<T, gen::SpectralRV>) {
          const auto& atoms = g.tail->spectral().atoms();
          const double r = rng.pareto(g.tail->alpha());
          double pick = rng.uniform() * g.tail->spectral().total_weight();
          std::size_t k = 0;
          while (k + 1 < atoms.size() && pick >= atoms[k].weight) pick -= atoms[k++].weight;
          const auto u = std::get<Vector>(atoms[k].location).values();
          std::copy(u.begin(), u.end(), out.begin());
          g.tail->scaling().act_on_coords(r, false, out);
        } else if constexpr (std::is_same_v<T, gen::ScalingMinPair>) {
          const double xi = rng.pareto(g.alpha);
          const double e = 1.0 + g.spread * rng.exponential();
          const bool flip = rng.uniform() < 0.5;
          out[0] = (flip ? e : 1.0) + (xi - 1.0);
          out[1] = (flip ? 1.0 : e) + (xi - 1.0);
        } else if constexpr (std::is_same_v<T, gen::DombryRibatet>) {
          const double eta = rng.pareto(g.alpha);
          if (rng.uniform() < 0.5) {
            out[0] = eta;
            out[1] = 1.0;
          } else {
            out[0] = std::sqrt(eta);
            out[1] = 0.0;
          }
        } else if constexpr (std::is_same_v<T, gen::ReflectedPareto>) {
          out[0] = g.endpoint - 1.0 / rng.pareto(g.alpha);
        } else if constexpr (std::is_same_v<T, gen::LogPareto>) {
          out[0] = rng.exponential() / g.alpha;  // log of Pareto(alpha)
        } else if constexpr (std::is_same_v<T, gen::Uniform>) {
          out[0] = g.lo + (g.hi - g.lo) * rng.uniform();
        } else if constexpr (std::is_same_v<T, gen::Normal>) {
          out[0] = boost::random::normal_distribution<double>(g.mean, g.sd)(rng);
        } else if constexpr (std::is_same_v<T, gen::ScaledBy>) {
          draw_vector(*g.inner, rng, out);
          for (auto& x : out) x *= g.factor;
        } else {
          fail(ErrorCode::IncompatibleVariant, "generator does not produce vectors");
        }
      },
      spec.variant());
}

/// Fast path for scalar generators.
inline double draw_scalar(const GeneratorSpec& spec, Stream& rng) {
  if (const auto* p = std::get_if<gen::Pareto>(&spec.variant())) return rng.pareto(p->alpha);
  double x = 0.0;
  draw_vector(spec, rng, std::span<double>(&x, 1));
  return x;
}

/// zeta(u) = sum_i mult_i * mark_i * f(u - y_i) on `grid` nodes of [lo, hi];
/// points are (y, mark) with the mark as last coordinate.
inline GridFunction shot_noise_path(const PointConfig& marked, const gen::Kernel& kernel, double lo, double hi,
                                    std::size_t grid) {
  require(grid >= 2 && lo < hi, ErrorCode::BadParameters, "bad shot noise grid");
  std::vector<double> values(grid, 0.0);
  if (!marked.empty()) {
    require(marked.dim() >= 2, ErrorCode::DimensionMismatch, "marked points need (location, mark)");
    const double h = (hi - lo) / static_cast<double>(grid - 1);
    for (const auto& p : marked.points()) {
      const double y = p.location.front();
      const double mark = p.location.back() * static_cast<double>(p.multiplicity);
      for (std::size_t j = 0; j < grid; ++j) values[j] += mark * kernel(lo + h * static_cast<double>(j) - y);
    }
  }
  return GridFunction(lo, hi, std::move(values));
}

namespace detail {

inline std::vector<double> draw_point(const GeneratorSpec& g, Stream& rng) {
  std::vector<double> v(g.vector_dim());
  draw_vector(g, rng, v);
  return v;
}

inline std::vector<double> uniform_grid_values(std::size_t grid, auto&& f) {
  std::vector<double> v(grid);
  for (std::size_t j = 0; j < grid; ++j) v[j] = f(static_cast<double>(j) / static_cast<double>(grid - 1));
  return v;
}

inline Polytope polygon(std::size_t n, auto&& point_at_angle) {
  std::vector<std::vector<double>> vs;
  vs.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    const auto p = point_at_angle(th);
    vs.push_back({p[0], p[1]});
  }
  return Polytope(std::move(vs));
}

}  // namespace detail

inline Element draw(const GeneratorSpec& spec, Stream& rng) {
  if (spec.element_kind() == ElementKind::Vector) return Vector(detail::draw_point(spec, rng));
  return std::visit(
      [&](const auto& g) -> Element {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, gen::SpectralRV>) {
          const auto& atoms = g.tail->spectral().atoms();
          const double r = rng.pareto(g.tail->alpha());
          double pick = rng.uniform() * g.tail->spectral().total_weight();
          std::size_t k = 0;
          while (k + 1 < atoms.size() && pick >= atoms[k].weight) pick -= atoms[k++].weight;
          return apply_scaling(g.tail->scaling(), r, atoms[k].location);
        } else if constexpr (std::is_same_v<T, gen::BrokenLine>) {
          const double v1 = rng.pareto(g.alpha);
          const double v2 = rng.pareto(g.alpha);
          return GridFunction(0.0, 1.0, detail::uniform_grid_values(g.grid, [&](double u) { return v1 * u + v2 * (1.0 - u); }));
        } else if constexpr (std::is_same_v<T, gen::RandomPolynomial>) {
          const auto c = detail::draw_point(*g.coefficients, rng);
          return GridFunction(0.0, 1.0, detail::uniform_grid_values(g.grid, [&](double u) {
                                double s = 0.0;
                                for (std::size_t j = c.size(); j-- > 0;) s = s * u + c[j];
                                return s;
                              }));
        } else if constexpr (std::is_same_v<T, gen::RandomSpike>) {
          const double v = rng.pareto(g.alpha);
          const double centre = rng.uniform();
          return GridFunction(0.0, 1.0, detail::uniform_grid_values(g.grid, [&](double u) {
                                return v * std::max(0.0, 1.0 - std::abs(u - centre) / g.width);
                              }));
        } else if constexpr (std::is_same_v<T, gen::ConstantFunction>) {
          const double v = rng.pareto(g.alpha);
          return GridFunction(0.0, 1.0, std::vector<double>(g.grid, v));
        } else if constexpr (std::is_same_v<T, gen::ParetoSequence>) {
          std::vector<double> v(g.length);
          if (g.shared) {
            std::fill(v.begin(), v.end(), rng.pareto(g.alpha));
          } else {
            for (auto& x : v) x = rng.pareto(g.alpha);
          }
          return Sequence(std::move(v));
        } else if constexpr (std::is_same_v<T, gen::MovingMax>) {
          const std::size_t q = g.weights.size();
          std::vector<double> z(g.length + q - 1);
          for (auto& x : z) x = rng.pareto(g.alpha);
          std::vector<double> v(g.length, 0.0);
          for (std::size_t i = 0; i < g.length; ++i)
            for (std::size_t j = 0; j < q; ++j) v[i] = std::max(v[i], g.weights[j] * z[i + q - 1 - j]);
          return Sequence(std::move(v));
        } else if constexpr (std::is_same_v<T, gen::BinomialPP>) {
          std::vector<WeightedPoint> pts;
          pts.reserve(g.m);
          for (std::size_t i = 0; i < g.m; ++i) pts.push_back({detail::draw_point(*g.point, rng), 1});
          return PointConfig(std::move(pts));
        } else if constexpr (std::is_same_v<T, gen::PoissonPP>) {
          std::size_t n = 0;
          if (g.mean > 0.0) n = static_cast<std::size_t>(boost::random::poisson_distribution<long, double>(g.mean)(rng));
          std::vector<WeightedPoint> pts;
          pts.reserve(n);
          for (std::size_t i = 0; i < n; ++i) pts.push_back({detail::draw_point(*g.point, rng), 1});
          return PointConfig(std::move(pts));
        } else if constexpr (std::is_same_v<T, gen::MarkedPP>) {
          auto ground = std::get<PointConfig>(draw(*g.ground, rng)).points();
          for (auto& p : ground) p.location.push_back(draw_scalar(*g.mark, rng));
          return PointConfig(std::move(ground));
        } else if constexpr (std::is_same_v<T, gen::ShotNoise>) {
          const auto marked = std::get<PointConfig>(draw(*g.marked, rng));
          return shot_noise_path(marked, g.kernel, g.lo, g.hi, g.grid);
        } else if constexpr (std::is_same_v<T, gen::ConvexHull>) {
          std::vector<std::vector<double>> pts;
          pts.reserve(g.m);
          for (std::size_t i = 0; i < g.m; ++i) pts.push_back(detail::draw_point(*g.point, rng));
          return Polytope(std::move(pts));
        } else if constexpr (std::is_same_v<T, gen::RandomBall>) {
          const auto c = detail::draw_point(*g.center, rng);
          const double r = std::abs(draw_scalar(*g.radius, rng));
          return detail::polygon(g.vertices, [&](double th) {
            return std::array<double, 2>{c[0] + r * std::cos(th), c[1] + r * std::sin(th)};
          });
        } else if constexpr (std::is_same_v<T, gen::Ellipse>) {
          const auto ax = detail::draw_point(*g.semiaxes, rng);
          return detail::polygon(g.vertices, [&](double th) {
            return std::array<double, 2>{std::abs(ax[0]) * std::cos(th), std::abs(ax[1]) * std::sin(th)};
          });
        } else if constexpr (std::is_same_v<T, gen::ScaledBy>) {
          return apply_scaling(paired_scaling(Modulus::max_abs(), g.inner->element_kind()), g.factor, draw(*g.inner, rng));
        } else {
          fail(ErrorCode::IncompatibleVariant, "unreachable generator branch");
        }
      },
      spec.variant());
}

/// sample(gen, seed, n): element i drawn from stream (seed, i).
inline std::vector<Element> sample(const GeneratorSpec& g, std::uint64_t seed, std::size_t n) {
  require(n >= 1, ErrorCode::BadParameters, "sample size must be >= 1");
  std::vector<Element> out(n);
  parallel_for(n, [&](std::size_t i) {
    Stream rng(seed, i);
    out[i] = draw(g, rng);
  });
  return out;
}

/// Same stream layout as sample(), stored contiguously.
inline VectorBatch sample_vectors(const GeneratorSpec& g, std::uint64_t seed, std::size_t n) {
  require(n >= 1, ErrorCode::BadParameters, "sample size must be >= 1");
  const auto d = g.vector_dim();
  require(d > 0, ErrorCode::IncompatibleVariant, "generator does not produce vectors");
  VectorBatch out(n, d);
  parallel_for(n, [&](std::size_t i) {
    Stream rng(seed, i);
    draw_vector(g, rng, out.row(i));
  });
  return out;
}

inline std::vector<double> sample_scalars(const GeneratorSpec& g, std::uint64_t seed, std::size_t n) {
  require(n >= 1, ErrorCode::BadParameters, "sample size must be >= 1");
  require(g.is_scalar(), ErrorCode::IncompatibleVariant, "generator is not scalar");
  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t i) {
    Stream rng(seed, i);
    out[i] = draw_scalar(g, rng);
  });
  return out;
}

namespace eta {

/// eta_x = W for every x.
struct Independent {
  GeneratorPtr w;
};
/// With y = x^{1/power}: eta_x = y^{-1} sum_{i <= floor y} zeta_i, zeta_i
/// exponential with mean a. The sum is drawn exactly as Gamma(floor y, a).
struct LlnAverage {
  double a = 1.0;
  double power = 1.0;
};
/// With y = x^{1/power}: eta_x = y^{-1/2} sum_{i <= floor y} zeta_i, zeta_i
/// centred normal with sd sigma, drawn exactly as N(0, sigma^2 floor y).
struct CltAverage {
  double sigma = 1.0;
  double power = 1.0;
};

}  // namespace eta

using EtaFamily = std::variant<eta::Independent, eta::LlnAverage, eta::CltAverage>;

/// Draws eta_x given the scalar x.
inline double draw_eta(const EtaFamily& family, double x, Stream& rng) {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, eta::Independent>) {
          return draw_scalar(*f.w, rng);
        } else {
          const double y = f.power == 1.0 ? x : std::pow(x, 1.0 / f.power);
          const double k = std::floor(y);
          if (k < 1.0) return 0.0;
          if constexpr (std::is_same_v<T, eta::LlnAverage>) {
            return boost::random::gamma_distribution<double>(k, f.a)(rng) / y;
          } else {
            return boost::random::normal_distribution<double>(0.0, f.sigma * std::sqrt(k))(rng) / std::sqrt(y);
          }
        }
      },
      family);
}

inline void validate_eta(const EtaFamily& family) {
  std::visit(
      [](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, eta::Independent>) {
          require(f.w != nullptr && f.w->is_scalar(), ErrorCode::BadParameters, "eta generator must be scalar");
        } else if constexpr (std::is_same_v<T, eta::LlnAverage>) {
          require(f.a > 0.0 && f.power > 0.0, ErrorCode::BadParameters, "LLN family needs a > 0 and power > 0");
        } else {
          require(f.sigma > 0.0 && f.power > 0.0, ErrorCode::BadParameters, "CLT family needs sigma > 0 and power > 0");
        }
      },
      family);
}

/// Pairs (xi_i, eta_{xi_i}) with eta drawn conditionally on xi from the same
/// per-element stream. xi must be scalar.
inline std::vector<std::pair<double, double>> sample_pair_with_covariate(const GeneratorSpec& xi,
                                                                         const EtaFamily& family,
                                                                         std::uint64_t seed, std::size_t n) {
  require(n >= 1, ErrorCode::BadParameters, "sample size must be >= 1");
  require(xi.is_scalar(), ErrorCode::BadParameters, "covariate pairs need a scalar xi");
  validate_eta(family);
  std::vector<std::pair<double, double>> out(n);
  parallel_for(n, [&](std::size_t i) {
    Stream rng(seed, i);
    const double x = draw_scalar(xi, rng);
    out[i] = {x, draw_eta(family, x, rng)};
  });
  return out;
}

}  // namespace rvlab
