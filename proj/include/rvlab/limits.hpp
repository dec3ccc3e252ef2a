#pragma once

// Monte Carlo verifiers for limit theorems: maxima under transformed
// scalings, void probabilities and Poisson counts of rescaled samples, the
// generalised Breiman lemma, Janossy-based regular variation of point
// processes and regular variation of set functionals.

#include <algorithm>
#include <cmath>
#include <cstdint>
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
#include "rvlab/estimators.hpp"
#include "rvlab/geometry.hpp"
#include "rvlab/moduli.hpp"
#include "rvlab/parallel.hpp"
#include "rvlab/random.hpp"
#include "rvlab/samplers.hpp"

namespace rvlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Binomial standard error of a frequency p over m trials.
inline double binomial_se(double p, double m) { return std::sqrt(std::max(p * (1.0 - p), 0.0) / m); }

// ---------------------------------------------------------------------------
// Norming constants

enum class NormingRule { ClosedForm, PilotQuantile, Fixed };

struct Norming {
  NormingRule rule = NormingRule::ClosedForm;
  double value = 0.0;          ///< used by Fixed
  std::size_t pilot_size = 0;  ///< 0: 1000 n, clamped to [1e5, 2e7]

  static Norming closed_form() { return {}; }
  static Norming pilot(std::size_t size = 0) { return {NormingRule::PilotQuantile, 0.0, size}; }
  static Norming fixed(double a) { return {NormingRule::Fixed, a, 0}; }
};

inline const char* norming_rule_name(NormingRule r) {
  switch (r) {
    case NormingRule::ClosedForm: return "closed_form";
    case NormingRule::PilotQuantile: return "pilot_quantile";
    case NormingRule::Fixed: return "fixed";
  }
  return "?";
}

namespace detail {

/// a_n = inf{t : P{tau > t} <= 1/n} from a pilot sample of modulus values:
/// the (floor(m / n) + 1)-th largest value.
inline double pilot_norming(std::vector<double> values, std::size_t n) {
  const std::size_t m = values.size();
  const std::size_t k = m / n;
  require(k >= 1 && k < m, ErrorCode::BadNormingRule,
          "pilot sample of " + std::to_string(m) + " is too small for n = " + std::to_string(n));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end(), std::greater<>());
  const double a = values[k];
  require(a > 0.0 && std::isfinite(a), ErrorCode::BadNormingRule,
          "pilot quantile " + format_number(a) + " is not a positive finite number");
  return a;
}

inline std::size_t pilot_size(const Norming& rule, std::size_t n) {
  if (rule.pilot_size != 0) return rule.pilot_size;
  const double m = std::clamp(1000.0 * static_cast<double>(n), 1e5, 2e7);
  return static_cast<std::size_t>(m);
}

/// (1 - 1/n) quantile of max_i Z_i for d i.i.d. Pareto(alpha) coordinates.
inline double pareto_max_quantile(double alpha, std::size_t d, std::size_t n) {
  const double q = -std::expm1(std::log1p(-1.0 / static_cast<double>(n)) / static_cast<double>(d));
  return std::pow(q, -1.0 / alpha);
}

}  // namespace detail

/// a_n for the vector generator `g` under the modulus `tau`. Closed forms
/// cover Pareto scalars (any modulus that is |x| on R) and i.i.d. Pareto
/// vectors under the max-abs modulus, optionally scaled by ScaledBy.
inline double norming_constant(const GeneratorSpec& g, const Modulus& tau, std::size_t n, const Norming& rule,
                               std::uint64_t seed) {
  require(n >= 1, ErrorCode::BadParameters, "n must be >= 1");
  switch (rule.rule) {
    case NormingRule::Fixed:
      require(rule.value > 0.0 && std::isfinite(rule.value), ErrorCode::BadNormingRule,
              "fixed a_n must be positive and finite");
      return rule.value;
    case NormingRule::PilotQuantile: {
      const auto pilot = sample_vectors(g, derive_seed(seed, "pilot"), detail::pilot_size(rule, n));
      return detail::pilot_norming(modulus_values(pilot, tau), n);
    }
    case NormingRule::ClosedForm: break;
  }
  double factor = 1.0;
  const GeneratorSpec* base = &g;
  while (const auto* s = std::get_if<gen::ScaledBy>(&base->variant())) {
    factor *= std::abs(s->factor);
    base = s->inner.get();
  }
  const double x1 = 1.0;
  if (const auto* p = std::get_if<gen::Pareto>(&base->variant())) {
    require(tau.on_coords() && tau.eval_coords(std::span<const double>(&x1, 1)) == 1.0, ErrorCode::BadNormingRule,
            "closed-form a_n for a Pareto scalar needs a modulus equal to |x|");
    return factor * std::pow(static_cast<double>(n), 1.0 / p->alpha);
  }
  if (const auto* p = std::get_if<gen::ParetoIID>(&base->variant())) {
    require(tau == Modulus::max_abs() || (p->dim == 1 && tau.on_coords()), ErrorCode::BadNormingRule,
            "closed-form a_n for i.i.d. Pareto vectors is available for the max-abs modulus only");
    return factor * detail::pareto_max_quantile(p->alpha, p->dim, n);
  }
  fail(ErrorCode::BadNormingRule, "no closed-form a_n for this generator; use the pilot quantile rule");
}

// ---------------------------------------------------------------------------
// Maximum domains of attraction

enum class MdaFamily { Frechet, Weibull, Gumbel };

inline const char* mda_family_name(MdaFamily f) {
  switch (f) {
    case MdaFamily::Frechet: return "frechet";
    case MdaFamily::Weibull: return "weibull";
    case MdaFamily::Gumbel: return "gumbel";
  }
  return "?";
}

/// Limit family of T_{1/a_n} max_{i <= n} X_i. The transform is the scaling
/// under which X is regularly varying: linear (Frechet), y -> a + (y - a)/t
/// (Weibull, endpoint a) or y -> y + log t (Gumbel).
struct MdaSpec {
  MdaFamily family = MdaFamily::Frechet;
  double alpha = 1.0;
  double endpoint = 0.0;
  ScalingSpec transform = ScalingSpec::linear();
  Norming norming;

  static MdaSpec frechet(double alpha) { return {MdaFamily::Frechet, alpha, 0.0, ScalingSpec::linear(), {}}; }
  static MdaSpec weibull(double alpha, double endpoint) {
    return {MdaFamily::Weibull, alpha, endpoint, ScalingSpec::affine_inverse(endpoint), {}};
  }
  static MdaSpec gumbel(double alpha) { return {MdaFamily::Gumbel, alpha, 0.0, ScalingSpec::log_shift(), {}}; }

  void validate() const {
    require(alpha > 0.0 && std::isfinite(alpha), ErrorCode::BadParameters, "MDA alpha must be positive");
    const auto k = transform.kind();
    const bool ok = (family == MdaFamily::Frechet && k == ScalingKind::Linear) ||
                    (family == MdaFamily::Weibull && k == ScalingKind::AffineInverse && transform.anchor() == endpoint) ||
                    (family == MdaFamily::Gumbel && k == ScalingKind::LogShift);
    require(ok, ErrorCode::IncompatibleVariant,
            std::string("transform ") + describe(transform) + " does not match the " + mda_family_name(family) +
                " family");
  }

  /// Modulus of X under the transform: x, 1/(a - x) or e^x.
  [[nodiscard]] double modulus(double x) const {
    switch (family) {
      case MdaFamily::Frechet: return std::max(x, 0.0);
      case MdaFamily::Weibull: return x < endpoint ? 1.0 / (endpoint - x) : kInf;
      case MdaFamily::Gumbel: return std::exp(x);
    }
    return 0.0;
  }

  /// Limit CDF at a probe: x for Frechet (P{z <= x}), y for Weibull
  /// (P{a_n (max - a) <= -y}), u for Gumbel (P{max - log a_n <= u}).
  [[nodiscard]] double target(double probe) const {
    switch (family) {
      case MdaFamily::Frechet: return probe > 0.0 ? std::exp(-std::pow(probe, -alpha)) : 0.0;
      case MdaFamily::Weibull: return probe >= 0.0 ? std::exp(-std::pow(probe, alpha)) : 1.0;
      case MdaFamily::Gumbel: return std::exp(-std::exp(-alpha * probe));
    }
    return 0.0;
  }

  /// Upper bound b with {probe event} = {T_{1/a_n} max <= b}.
  [[nodiscard]] double event_bound(double probe) const {
    return family == MdaFamily::Weibull ? endpoint - probe : probe;
  }
};

struct MdaRow {
  std::size_t n = 0;
  double a_n = 0.0;
  double probe = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  double target = 0.0;
  double z = 0.0;
};

struct MdaTable {
  MdaSpec spec;
  std::size_t reps = 0;
  std::vector<MdaRow> rows;
  std::vector<std::pair<std::size_t, double>> sup_deviation;  ///< per n
  double max_abs_z = 0.0;
};

namespace detail {

/// max of n draws of a scalar generator from one stream. Pareto-based
/// generators are increasing functions of 1/u, so only the smallest uniform
/// is tracked.
inline double max_of_draws(const GeneratorSpec& g, Stream& rng, std::size_t n) {
  auto min_uniform = [&] {
    double u = 1.0;
    for (std::size_t i = 0; i < n; ++i) u = std::min(u, rng.uniform());
    return u;
  };
  auto pareto_at = [](double u, double a) { return a == 1.0 ? 1.0 / u : std::pow(u, -1.0 / a); };
  if (const auto* p = std::get_if<gen::Pareto>(&g.variant())) return pareto_at(min_uniform(), p->alpha);
  if (const auto* p = std::get_if<gen::ReflectedPareto>(&g.variant()))
    return p->endpoint - 1.0 / pareto_at(min_uniform(), p->alpha);
  if (const auto* p = std::get_if<gen::LogPareto>(&g.variant())) return -std::log(min_uniform()) / p->alpha;
  double m = -kInf;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, draw_scalar(g, rng));
  return m;
}

}  // namespace detail

/// Empirical CDF of T_{1/a_n} max_{i <= n} X_i over `reps` independent
/// repetitions for each n, against the limit law at the probes.
inline MdaTable mda_check(const GeneratorSpec& g, const MdaSpec& spec, const std::vector<std::size_t>& n_ladder,
                          std::size_t reps, std::uint64_t seed, const std::vector<double>& probes) {
  spec.validate();
  require(g.is_scalar(), ErrorCode::IncompatibleVariant, "MDA check needs a scalar generator");
  require(reps >= 1 && !n_ladder.empty() && !probes.empty(), ErrorCode::BadParameters,
          "MDA check needs reps >= 1 and nonempty n and probe ladders");
  MdaTable table{spec, reps, {}, {}, 0.0};
  for (std::size_t n : n_ladder) {
    require(n >= 1, ErrorCode::BadParameters, "n must be >= 1");
    double a_n = 0.0;
    if (spec.norming.rule == NormingRule::PilotQuantile) {
      const auto pilot = sample_scalars(g, derive_seed(seed, "pilot"), detail::pilot_size(spec.norming, n));
      std::vector<double> tau(pilot.size());
      std::transform(pilot.begin(), pilot.end(), tau.begin(), [&](double x) { return spec.modulus(x); });
      a_n = detail::pilot_norming(std::move(tau), n);
    } else if (spec.norming.rule == NormingRule::Fixed) {
      a_n = norming_constant(g, Modulus::max_abs(), n, spec.norming, seed);
    } else {
      // The closed form is the Pareto quantile n^{1/alpha} for generators whose
      // transform modulus is exactly Pareto(alpha).
      const auto& v = g.variant();
      double ga = 0.0;
      if (spec.family == MdaFamily::Frechet) {
        if (const auto* p = std::get_if<gen::Pareto>(&v)) ga = p->alpha;
      } else if (spec.family == MdaFamily::Weibull) {
        if (const auto* p = std::get_if<gen::ReflectedPareto>(&v); p && p->endpoint == spec.endpoint) ga = p->alpha;
      } else if (const auto* p = std::get_if<gen::LogPareto>(&v)) {
        ga = p->alpha;
      }
      require(ga > 0.0, ErrorCode::BadNormingRule,
              std::string("no closed-form a_n for this generator under the ") + mda_family_name(spec.family) +
                  " transform; use the pilot quantile rule");
      require(ga == spec.alpha, ErrorCode::BadParameters, "generator alpha differs from the MDA alpha");
      a_n = std::pow(static_cast<double>(n), 1.0 / ga);
    }

    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(n));
    std::vector<double> z(reps);
    parallel_for(reps, [&](std::size_t r) {
      Stream rng(s, r);
      double m = detail::max_of_draws(g, rng, n);
      spec.transform.act_on_coords(a_n, true, std::span<double>(&m, 1));
      z[r] = m;
    });
    std::sort(z.begin(), z.end());
    double sup_dev = 0.0;
    for (double q : probes) {
      const double bound = spec.event_bound(q);
      const auto count = std::upper_bound(z.begin(), z.end(), bound) - z.begin();
      const double p = static_cast<double>(count) / static_cast<double>(reps);
      const double target = spec.target(q);
      const double se = binomial_se(target, static_cast<double>(reps));
      MdaRow row{n, a_n, q, p, binomial_se(p, static_cast<double>(reps)), target, 0.0};
      row.z = se > 0.0 ? (p - target) / se : (p == target ? 0.0 : kInf);
      table.max_abs_z = std::max(table.max_abs_z, std::abs(row.z));
      sup_dev = std::max(sup_dev, std::abs(p - target));
      table.rows.push_back(row);
    }
    table.sup_deviation.emplace_back(n, sup_dev);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Void probabilities and Poisson counts

/// A = {x : s < tau(x) <= t, direction in D} for the polar decomposition
/// under (tau, scaling); `target` is mu(A).
struct PolarRect {
  std::string name;
  Modulus tau = Modulus::max_abs();
  double s = 1.0;
  double t = kInf;
  CoordPredicate direction;  ///< empty: every direction
  ScalingSpec scaling = ScalingSpec::linear();
  double target = 0.0;
};

/// mu(A) for a discrete tail measure whose reference modulus is A's.
inline double polar_rect_mass(const TailMeasure& mu, const PolarRect& a) {
  require(mu.reference() == a.tau, ErrorCode::BadParameters, "rectangle modulus differs from the tail measure's");
  DirectionPredicate pred = all_directions;
  if (a.direction) {
    pred = [&a](const Element& u) {
      const auto* v = std::get_if<Vector>(&u);
      return v != nullptr && a.direction(v->values());
    };
  }
  return sector_mass(mu, pred, a.s, a.t);
}

struct CountTable {
  std::size_t n = 0;
  double a_n = 0.0;
  std::size_t reps = 0;
  std::vector<std::string> names;
  std::vector<double> targets;
  std::vector<std::uint32_t> counts;  ///< reps x sets, row-major
};

/// counts[r][j] = #{i <= n : T_{1/a_n} xi_i in A_j} for replicate r.
inline CountTable probe_set_counts(const GeneratorSpec& g, const std::vector<PolarRect>& sets, std::size_t n,
                              const Norming& norming, std::size_t reps, std::uint64_t seed) {
  require(!sets.empty(), ErrorCode::BadParameters, "need at least one probe set");
  require(reps >= 1 && n >= 1, ErrorCode::BadParameters, "need n >= 1 and reps >= 1");
  const auto d = g.vector_dim();
  require(d > 0, ErrorCode::IncompatibleVariant, "probe-set counts need a vector generator");
  for (const auto& a : sets) {
    require(a.s >= 0.0 && a.s < a.t, ErrorCode::InvalidInterval, "probe set " + a.name + " needs 0 <= s < t");
    require(a.tau.on_coords(), ErrorCode::IncompatibleVariant, "probe set " + a.name + " needs a vector modulus");
  }
  CountTable out;
  out.n = n;
  out.reps = reps;
  out.a_n = norming_constant(g, sets.front().tau, n, norming, seed);
  for (const auto& a : sets) {
    out.names.push_back(a.name);
    out.targets.push_back(a.target);
  }
  const std::size_t r_sets = sets.size();
  out.counts.assign(reps * r_sets, 0);
  const std::uint64_t s = derive_seed(seed, "counts");
  const bool scalar_pareto = std::holds_alternative<gen::Pareto>(g.variant());
  bool shared_tau = true;
  double min_s = kInf;
  for (const auto& a : sets) {
    shared_tau = shared_tau && a.tau == sets.front().tau;
    min_s = std::min(min_s, a.s);
  }
  parallel_chunks(
      reps,
      [&](std::size_t b, std::size_t e, std::size_t) {
        std::vector<double> x(d), dir(d);
        for (std::size_t r = b; r < e; ++r) {
          Stream rng(s, r);
          auto* row = &out.counts[r * r_sets];
          for (std::size_t i = 0; i < n; ++i) {
            if (scalar_pareto) {
              x[0] = draw_scalar(g, rng);
            } else {
              draw_vector(g, rng, x);
            }
            // Sets sharing the first modulus reuse its value; points below every
            // lower radius are skipped.
            const double rad0 = sets.front().tau.eval_coords(x) / out.a_n;
            if (shared_tau && !(rad0 > min_s)) continue;
            for (std::size_t j = 0; j < r_sets; ++j) {
              const auto& a = sets[j];
              const double rad = shared_tau ? rad0 : a.tau.eval_coords(x) / out.a_n;
              if (!(rad > a.s && rad <= a.t)) continue;
              if (a.direction) {
                std::copy(x.begin(), x.end(), dir.begin());
                a.scaling.act_on_coords(rad * out.a_n, true, dir);
                if (!a.direction(dir)) continue;
              }
              ++row[j];
            }
          }
        }
      },
      std::max<std::size_t>(1, kChunk / std::max<std::size_t>(1, n)));
  return out;
}

struct VoidRow {
  std::size_t n = 0;
  double a_n = 0.0;
  std::string set;
  double frequency = 0.0;
  double std_error = 0.0;
  double target = 0.0;  ///< e^{-mu(A)}
  double z = 0.0;
};

/// Void frequencies of one count table against e^{-mu(A)}.
inline std::vector<VoidRow> void_rows(const CountTable& table) {
  std::vector<VoidRow> rows;
  const std::size_t r_sets = table.names.size();
  const double m = static_cast<double>(table.reps);
  for (std::size_t j = 0; j < r_sets; ++j) {
    std::size_t empty = 0;
    for (std::size_t r = 0; r < table.reps; ++r) empty += table.counts[r * r_sets + j] == 0 ? 1 : 0;
    VoidRow row{table.n, table.a_n, table.names[j], static_cast<double>(empty) / m, 0.0, std::exp(-table.targets[j]),
                0.0};
    row.std_error = binomial_se(row.frequency, m);
    const double se = binomial_se(row.target, m);
    row.z = se > 0.0 ? (row.frequency - row.target) / se : (row.frequency == row.target ? 0.0 : kInf);
    rows.push_back(row);
  }
  return rows;
}

/// Frequency of {T_{1/a_n}{xi_1..xi_n} misses A} against e^{-mu(A)} for each
/// probe set and n.
inline std::vector<VoidRow> void_probability_check(const GeneratorSpec& g, const std::vector<PolarRect>& sets,
                                                   const std::vector<std::size_t>& n_ladder, const Norming& norming,
                                                   std::size_t reps, std::uint64_t seed) {
  std::vector<VoidRow> rows;
  for (std::size_t n : n_ladder) {
    auto part = void_rows(probe_set_counts(g, sets, n, norming, reps, derive_seed(seed, static_cast<std::uint64_t>(n))));
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

inline double poisson_pmf(double mean, std::size_t k) {
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(k) * std::log(mean) - mean - std::lgamma(static_cast<double>(k) + 1.0));
}

struct CountLaw {
  std::string set;
  double target_mean = 0.0;
  double mean = 0.0;
  std::vector<double> empirical;  ///< P{N = k}, k = 0..10
  std::vector<double> poisson;
  double total_variation = 0.0;   ///< (1/2) sum_{k <= 10} |empirical - poisson|
};

struct CountCovariance {
  std::size_t i = 0;
  std::size_t j = 0;
  double covariance = 0.0;
  double std_error = 0.0;
};

struct PoissonCountReport {
  std::size_t n = 0;
  double a_n = 0.0;
  std::size_t reps = 0;
  std::vector<CountLaw> laws;
  std::vector<CountCovariance> covariances;
};

inline constexpr std::size_t kMaxCount = 10;

/// Law of N_n(A_j) = #{i : T_{1/a_n} xi_i in A_j} against Poisson(mu(A_j)),
/// and the pairwise count covariances (zero in the Poisson limit for
/// disjoint sets).
inline PoissonCountReport count_law_report(const CountTable& table) {
  const std::size_t r_sets = table.names.size();
  const std::size_t reps = table.reps;
  const double m = static_cast<double>(reps);
  PoissonCountReport rep{table.n, table.a_n, reps, {}, {}};
  std::vector<double> means(r_sets, 0.0);
  for (std::size_t j = 0; j < r_sets; ++j) {
    CountLaw law;
    law.set = table.names[j];
    law.target_mean = table.targets[j];
    law.empirical.assign(kMaxCount + 1, 0.0);
    for (std::size_t r = 0; r < reps; ++r) {
      const auto c = table.counts[r * r_sets + j];
      means[j] += c;
      if (c <= kMaxCount) law.empirical[c] += 1.0;
    }
    means[j] /= m;
    law.mean = means[j];
    for (std::size_t k = 0; k <= kMaxCount; ++k) {
      law.empirical[k] /= m;
      law.poisson.push_back(poisson_pmf(law.target_mean, k));
      law.total_variation += 0.5 * std::abs(law.empirical[k] - law.poisson[k]);
    }
    rep.laws.push_back(std::move(law));
  }
  for (std::size_t i = 0; i < r_sets; ++i) {
    for (std::size_t j = i + 1; j < r_sets; ++j) {
      double c = 0.0, c2 = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        const double v = (table.counts[r * r_sets + i] - means[i]) * (table.counts[r * r_sets + j] - means[j]);
        c += v;
        c2 += v * v;
      }
      const double cov = c / m;
      const double var = std::max(c2 / m - cov * cov, 0.0);
      rep.covariances.push_back({i, j, cov, std::sqrt(var / m)});
    }
  }
  return rep;
}

inline PoissonCountReport poisson_limit_counts(const GeneratorSpec& g, const std::vector<PolarRect>& sets,
                                               std::size_t n, const Norming& norming, std::size_t reps,
                                               std::uint64_t seed) {
  return count_law_report(probe_set_counts(g, sets, n, norming, reps, seed));
}

// ---------------------------------------------------------------------------
// Generalised Breiman lemma

struct BreimanOptions {
  std::vector<double> t_ladder{20.0, 50.0};
  std::size_t n = 10'000'000;
  std::size_t k = 0;                   ///< Hill k for |Y|; 0: default_k(n)
  std::size_t w_samples = 1'000'000;   ///< Monte Carlo draws of the limit W
  double delta = 0.5;                  ///< moment order alpha + delta
  std::vector<double> moment_x{1.0, 10.0, 100.0, 1e3, 1e4};
  std::size_t moment_samples = 100'000;
};

struct BreimanRow {
  double t = 0.0;
  double estimate = 0.0;  ///< t^alpha P{|Y| > t}
  double std_error = 0.0;
  double target = 0.0;    ///< c E|W|^alpha
  double target_std_error = 0.0;
  double z = 0.0;
};

struct MomentProbe {
  double x = 0.0;
  double moment = 0.0;     ///< mean of |eta_x|^{alpha + delta}
  double tail_index = kInf;  ///< Hill index of |eta_x|; inf when bounded or constant
};

struct BreimanReport {
  double alpha = 0.0;
  double constant = 1.0;  ///< c in P{xi > t} ~ c t^{-alpha}
  std::vector<BreimanRow> rows;
  HillEstimate hill;
  double positive_fraction = 0.0;  ///< share of Y > 0 among |Y| > max t
  double positive_std_error = 0.0;
  double positive_target = 0.0;    ///< E[|W|^alpha 1{W > 0}] / E|W|^alpha
  std::vector<MomentProbe> moments;
  bool moment_ok = true;
  std::vector<std::string> warnings;
};

namespace detail {

/// Draw of the limit W of eta_x as x -> infinity.
inline double draw_eta_limit(const EtaFamily& family, Stream& rng) {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, eta::Independent>) {
          return draw_scalar(*f.w, rng);
        } else if constexpr (std::is_same_v<T, eta::LlnAverage>) {
          return f.a;
        } else {
          return boost::random::normal_distribution<double>(0.0, f.sigma)(rng);
        }
      },
      family);
}

}  // namespace detail

/// Y = xi eta_xi for a Pareto xi and a covariate family eta_x -> W: the tail
/// constant lim t^alpha P{|Y| > t} against c E|W|^alpha (W by Monte Carlo),
/// the Hill index of |Y|, the sign balance of the limiting spectral law and
/// a moment diagnostic for sup_x E|eta_x|^{alpha + delta}.
inline BreimanReport breiman_verify(const GeneratorSpec& xi, const EtaFamily& family, const BreimanOptions& opt,
                                    std::uint64_t seed) {
  validate_eta(family);
  require(!opt.t_ladder.empty() && opt.n >= 10, ErrorCode::BadParameters, "Breiman check needs t levels and n >= 10");
  BreimanReport rep;
  {
    double factor = 1.0;
    const GeneratorSpec* base = &xi;
    while (const auto* s = std::get_if<gen::ScaledBy>(&base->variant())) {
      require(s->factor > 0.0, ErrorCode::BadParameters, "xi must be nonnegative");
      factor *= s->factor;
      base = s->inner.get();
    }
    const auto* p = std::get_if<gen::Pareto>(&base->variant());
    require(p != nullptr, ErrorCode::BadParameters, "xi must be a (scaled) Pareto variable");
    rep.alpha = p->alpha;
    rep.constant = std::pow(factor, p->alpha);
  }
  const double alpha = rep.alpha;

  std::vector<double> ys(opt.n);
  const auto pairs_seed = derive_seed(seed, "pairs");
  parallel_for(opt.n, [&](std::size_t i) {
    Stream rng(pairs_seed, i);
    const double x = draw_scalar(xi, rng);
    ys[i] = x * draw_eta(family, x, rng);
  });

  // c E|W|^alpha and E[|W|^alpha 1{W > 0}] by Monte Carlo on W.
  const bool deterministic_w = std::holds_alternative<eta::LlnAverage>(family);
  const std::size_t wn = deterministic_w ? 1 : opt.w_samples;
  struct Acc {
    double s = 0.0, s2 = 0.0, pos = 0.0;
  };
  const auto w_seed = derive_seed(seed, "limit");
  const auto acc = parallel_reduce(
      wn, Acc{},
      [&](std::size_t b, std::size_t e) {
        Acc a;
        for (std::size_t i = b; i < e; ++i) {
          Stream rng(w_seed, i);
          const double w = detail::draw_eta_limit(family, rng);
          const double v = std::pow(std::abs(w), alpha);
          a.s += v;
          a.s2 += v * v;
          if (w > 0.0) a.pos += v;
        }
        return a;
      },
      [](Acc a, const Acc& b) {
        a.s += b.s;
        a.s2 += b.s2;
        a.pos += b.pos;
        return a;
      });
  const double wm = static_cast<double>(wn);
  const double ew = acc.s / wm;
  const double ew_se = wn > 1 ? std::sqrt(std::max(acc.s2 / wm - ew * ew, 0.0) / wm) : 0.0;
  rep.positive_target = ew > 0.0 ? acc.pos / acc.s : 0.0;
  require(ew > 0.0, ErrorCode::TrivialResult, "the limit W vanishes almost surely");

  std::vector<double> abs_y(opt.n);
  std::transform(ys.begin(), ys.end(), abs_y.begin(), [](double y) { return std::abs(y); });
  const double nd = static_cast<double>(opt.n);
  for (double t : opt.t_ladder) {
    require(t > 0.0, ErrorCode::BadParameters, "t levels must be positive");
    const auto c = static_cast<double>(std::count_if(abs_y.begin(), abs_y.end(), [t](double v) { return v > t; }));
    const double p = c / nd;
    const double ta = std::pow(t, alpha);
    BreimanRow row{t, ta * p, ta * binomial_se(p, nd), rep.constant * ew, rep.constant * ew_se, 0.0};
    const double se = std::hypot(row.std_error, row.target_std_error);
    row.z = se > 0.0 ? (row.estimate - row.target) / se : 0.0;
    rep.rows.push_back(row);
  }
  {
    const double t_top = *std::max_element(opt.t_ladder.begin(), opt.t_ladder.end());
    std::size_t ex = 0, pos = 0;
    for (double y : ys) {
      if (std::abs(y) > t_top) {
        ++ex;
        if (y > 0.0) ++pos;
      }
    }
    if (ex > 0) {
      rep.positive_fraction = static_cast<double>(pos) / static_cast<double>(ex);
      rep.positive_std_error = binomial_se(rep.positive_fraction, static_cast<double>(ex));
    }
  }
  rep.hill = estimate_tail_index(std::move(abs_y), opt.k == 0 ? default_k(opt.n) : opt.k);

  // sup_x E|eta_x|^{alpha + delta} over the probed x, with a Hill check that
  // the moment is finite.
  const double order = alpha + opt.delta;
  for (std::size_t q = 0; q < opt.moment_x.size(); ++q) {
    const double x = opt.moment_x[q];
    std::vector<double> v(opt.moment_samples);
    const auto ms = derive_seed(derive_seed(seed, "moment"), static_cast<std::uint64_t>(q));
    parallel_for(v.size(), [&](std::size_t i) {
      Stream rng(ms, i);
      v[i] = std::abs(draw_eta(family, x, rng));
    });
    MomentProbe mp{x, 0.0, kInf};
    for (double a : v) mp.moment += std::pow(a, order);
    mp.moment /= static_cast<double>(v.size());
    try {
      mp.tail_index = estimate_tail_index(v, default_k(v.size())).alpha_hat;
    } catch (const Error&) {
      // all top values equal: bounded support
    }
    if (!std::isfinite(mp.moment) || mp.tail_index <= order) {
      rep.moment_ok = false;
      rep.warnings.push_back(std::string(error_code_name(ErrorCode::MomentDiagnosticFailed)) + ": at x = " +
                             format_number(x) + " the Hill index of |eta_x| is " + format_number(mp.tail_index) +
                             ", not above alpha + delta = " + format_number(order));
    }
    rep.moments.push_back(mp);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Janossy-based regular variation of point processes

/// f evaluated on the rescaled single point T_{1/t} x of T_t B.
struct JanossyProbe {
  std::string name;
  std::function<double(std::span<const double>)> f;
  double target = 0.0;  ///< integral of f over B against the tail measure
};

struct JanossyOptions {
  Modulus base = Modulus::max_abs();  ///< B = {base > 1}
  ScalingSpec scaling = ScalingSpec::linear();
  std::vector<double> t_ladder;
  std::function<double(double)> g;
  std::size_t n = 100'000;
};

struct JanossyRow {
  double t = 0.0;
  std::string probe;
  double estimate = 0.0;  ///< g(t) E[f(T_{1/t} x); eta(T_t B) = 1]
  double std_error = 0.0;
  double target = 0.0;
  double z = 0.0;
};

struct TwoPointRow {
  double t = 0.0;
  double value = 0.0;  ///< g(t) P{eta(T_t B) >= 2}
  double std_error = 0.0;
};

struct JanossyReport {
  std::vector<JanossyRow> rows;
  std::vector<TwoPointRow> two_point;
  std::vector<double> skipped_levels;  ///< no sample with exactly one point in T_t B
  bool converges = false;  ///< |z| <= 4 for every probe at the top level
  bool two_point_decays = false;
  bool regularly_varying = false;
};

/// Checks the two conditions for regular variation of a finite point process
/// on the ideal of configurations with a point in some T_t B: convergence of
/// g(t) times the first Janossy measure of T_t B, and g(t) P{eta(T_t B) >= 2} -> 0.
inline JanossyReport janossy_rv_check(const GeneratorSpec& pp, const std::vector<JanossyProbe>& probes,
                                      const JanossyOptions& opt, std::uint64_t seed) {
  require(pp.element_kind() == ElementKind::PointConfig, ErrorCode::IncompatibleVariant,
          "Janossy check needs a point process generator");
  require(opt.g != nullptr && !opt.t_ladder.empty(), ErrorCode::BadParameters, "Janossy check needs g and a t ladder");
  const auto configs = sample(pp, seed, opt.n);
  const double nd = static_cast<double>(opt.n);
  JanossyReport rep;
  for (double t : opt.t_ladder) {
    std::size_t singles = 0, multi = 0;
    std::vector<double> sum(probes.size(), 0.0), sum2(probes.size(), 0.0);
    std::vector<double> buf;
    for (const auto& e : configs) {
      const auto& pc = std::get<PointConfig>(e);
      std::size_t inside = 0;
      const WeightedPoint* single = nullptr;
      for (const auto& p : pc.points()) {
        if (opt.base.eval_coords(p.location) > t) {
          inside += p.multiplicity;
          single = &p;
        }
      }
      if (inside >= 2) ++multi;
      if (inside != 1) continue;
      ++singles;
      buf = single->location;
      opt.scaling.act_on_coords(t, true, buf);
      for (std::size_t j = 0; j < probes.size(); ++j) {
        const double v = probes[j].f(buf);
        sum[j] += v;
        sum2[j] += v * v;
      }
    }
    const double gt = opt.g(t);
    const double p2 = static_cast<double>(multi) / nd;
    rep.two_point.push_back({t, gt * p2, gt * binomial_se(p2, nd)});
    if (singles == 0) {
      rep.skipped_levels.push_back(t);
      continue;
    }
    for (std::size_t j = 0; j < probes.size(); ++j) {
      const double mean = sum[j] / nd;
      const double var = std::max(sum2[j] / nd - mean * mean, 0.0);
      JanossyRow row{t, probes[j].name, gt * mean, gt * std::sqrt(var / nd), probes[j].target, 0.0};
      row.z = row.std_error > 0.0 ? (row.estimate - row.target) / row.std_error
                                  : (row.estimate == row.target ? 0.0 : kInf);
      rep.rows.push_back(row);
    }
  }
  if (!rep.rows.empty()) {
    const double t_top = rep.rows.back().t;
    rep.converges = std::all_of(rep.rows.begin(), rep.rows.end(),
                                [&](const JanossyRow& r) { return r.t != t_top || std::abs(r.z) <= 4.0; });
  }
  if (!rep.two_point.empty()) {
    const auto& first = rep.two_point.front();
    const auto& last = rep.two_point.back();
    rep.two_point_decays = last.value == 0.0 || last.value < first.value;
  }
  rep.regularly_varying = rep.converges && rep.two_point_decays;
  return rep;
}

// ---------------------------------------------------------------------------
// Functionals of random convex polygons

enum class SetFunctional { SetSup, Steiner, MeanWidth, VolumeRoot, IntrinsicVolumes, InscribedRadius };

inline const char* set_functional_name(SetFunctional f) {
  switch (f) {
    case SetFunctional::SetSup: return "set_sup";
    case SetFunctional::Steiner: return "steiner";
    case SetFunctional::MeanWidth: return "mean_width";
    case SetFunctional::VolumeRoot: return "volume_root";
    case SetFunctional::IntrinsicVolumes: return "intrinsic_volumes";
    case SetFunctional::InscribedRadius: return "inscribed_radius";
  }
  return "?";
}

struct FunctionalReport {
  std::string name;
  HillEstimate hill;
  double mean = 0.0;
  std::string comment;
};

struct SetPipelineReport {
  std::vector<FunctionalReport> functionals;
  std::size_t polygons = 0;
  std::size_t steiner_outside = 0;       ///< exact Steiner point outside K
  std::size_t quadrature_outside = 0;    ///< quadrature point farther than its error bound
  double max_quadrature_error = 0.0;     ///< |quadrature - exact| / perimeter
  std::size_t homogeneity_failures = 0;  ///< h_{cK}(u) != c h_K(u), c = 2
};

namespace detail {

inline const Polytope& planar_polytope(const Element& e) {
  const auto* k = std::get_if<Polytope>(&e);
  require(k != nullptr, ErrorCode::IncompatibleVariant, "set functionals need polytopes");
  require(k->dim() == 2, ErrorCode::DimensionMismatch, "set functionals are implemented for planar polytopes");
  return *k;
}

}  // namespace detail

/// Support function, Steiner point (by quadrature on `directions` unit
/// vectors), mean width, area and perimeter functionals of each polygon with
/// a Hill estimate per functional. Also counts Steiner points outside K and
/// failures of h_{2K} = 2 h_K on the direction grid.
inline SetPipelineReport set_functional_pipeline(std::span<const Element> sets,
                                                 const std::vector<SetFunctional>& functionals, std::size_t k = 0,
                                                 std::size_t directions = 720) {
  require(!sets.empty(), ErrorCode::InsufficientData, "no polytopes");
  require(directions >= 8, ErrorCode::BadParameters, "need at least 8 directions");
  const std::size_t n = sets.size();
  const std::size_t kk = k == 0 ? default_k(n) : k;
  SetPipelineReport rep;
  rep.polygons = n;

  std::vector<geom::Point2> dirs(directions);
  for (std::size_t j = 0; j < directions; ++j) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(directions);
    dirs[j] = {std::cos(th), std::sin(th)};
  }
  const double step = 2.0 * std::numbers::pi / static_cast<double>(directions);

  std::vector<std::vector<geom::Point2>> polys(n);
  for (std::size_t i = 0; i < n; ++i) polys[i] = detail::planar_polytope(sets[i]).planar();

  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = polys[i];
    const auto exact = geom::steiner_point_exact(p);
    const auto quad = geom::steiner_point_quadrature(p, directions);
    const double per = geom::perimeter(p);
    const double scale = std::max({per, geom::norm(exact), 1.0});
    if (!geom::contains(p, exact, 1e-12 * scale)) ++rep.steiner_outside;
    const double err = std::hypot(quad[0] - exact[0], quad[1] - exact[1]);
    if (per > 0.0) rep.max_quadrature_error = std::max(rep.max_quadrature_error, err / per);
    if (!geom::contains(p, quad, per * step * step + 1e-12 * scale)) ++rep.quadrature_outside;
    std::vector<geom::Point2> doubled(p);
    for (auto& v : doubled) v = {2.0 * v[0], 2.0 * v[1]};
    for (const auto& u : dirs) {
      if (geom::support(doubled, u) != 2.0 * geom::support(p, u)) {
        ++rep.homogeneity_failures;
        break;
      }
    }
  }

  auto report = [&](std::string name, std::vector<double> v) {
    FunctionalReport fr;
    fr.name = std::move(name);
    fr.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    try {
      fr.hill = estimate_tail_index(std::move(v), kk);
    } catch (const Error& e) {
      fr.comment = e.what();
    }
    rep.functionals.push_back(std::move(fr));
  };
  std::vector<double> v(n);
  for (auto f : functionals) {
    switch (f) {
      case SetFunctional::SetSup:
        for (std::size_t i = 0; i < n; ++i) {
          double m = 0.0;
          for (const auto& q : polys[i]) m = std::max(m, geom::norm(q));
          v[i] = m;
        }
        report("set_sup", v);
        break;
      case SetFunctional::Steiner:
        for (std::size_t i = 0; i < n; ++i) v[i] = geom::norm(geom::steiner_point_quadrature(polys[i], directions));
        report("steiner", v);
        break;
      case SetFunctional::MeanWidth:
        for (std::size_t i = 0; i < n; ++i) v[i] = geom::mean_width_quadrature(polys[i], directions);
        report("mean_width", v);
        break;
      case SetFunctional::VolumeRoot:
        for (std::size_t i = 0; i < n; ++i) v[i] = std::sqrt(geom::area(polys[i]));
        report("volume_root", v);
        break;
      case SetFunctional::IntrinsicVolumes:
        for (std::size_t i = 0; i < n; ++i) v[i] = 0.5 * geom::perimeter(polys[i]);
        report("intrinsic_volume_1", v);
        for (std::size_t i = 0; i < n; ++i) v[i] = geom::area(polys[i]);
        report("intrinsic_volume_2", v);
        break;
      case SetFunctional::InscribedRadius:
        for (std::size_t i = 0; i < n; ++i) {
          v[i] = geom::inscribed_radius(polys[i]);
          require(v[i] > 0.0, ErrorCode::DegeneratePolytope,
                  "polygon " + std::to_string(i) + " does not contain the origin in its interior");
        }
        report("inscribed_radius", v);
        break;
    }
  }
  return rep;
}

struct SteinerTailRow {
  double t = 0.0;
  double steiner = 0.0;  ///< P{|s(K)| > t}
  double hull = 0.0;     ///< P{|K| > 2t}
  double std_error = 0.0;
  double z = 0.0;
};

/// For hulls of i.i.d. regularly varying points the Steiner point has the
/// tail of the point map x -> x/2: P{|s(K)| > t} ~ P{|K| > 2t}.
inline std::vector<SteinerTailRow> steiner_tail_check(std::span<const Element> sets,
                                                      const std::vector<double>& t_ladder,
                                                      std::size_t directions = 720) {
  const std::size_t n = sets.size();
  require(n > 0, ErrorCode::InsufficientData, "no polytopes");
  std::vector<double> s(n), k(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = detail::planar_polytope(sets[i]).planar();
    s[i] = geom::norm(geom::steiner_point_quadrature(p, directions));
    double m = 0.0;
    for (const auto& q : p) m = std::max(m, geom::norm(q));
    k[i] = m;
  }
  std::vector<SteinerTailRow> rows;
  const double nd = static_cast<double>(n);
  for (double t : t_ladder) {
    std::size_t cs = 0, ck = 0, both = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool a = s[i] > t;
      const bool b = k[i] > 2.0 * t;
      cs += a;
      ck += b;
      both += a && b;
    }
    SteinerTailRow r{t, static_cast<double>(cs) / nd, static_cast<double>(ck) / nd, 0.0, 0.0};
    // Var of the difference of two dependent indicators' means.
    const double pb = static_cast<double>(both) / nd;
    const double var = r.steiner * (1 - r.steiner) + r.hull * (1 - r.hull) - 2.0 * (pb - r.steiner * r.hull);
    r.std_error = std::sqrt(std::max(var, 0.0) / nd);
    r.z = r.std_error > 0.0 ? (r.steiner - r.hull) / r.std_error : 0.0;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace rvlab
