#pragma once

// Tail-index estimation, polar decomposition, empirical spectral and tail
// measures, hidden regular variation ladders and conditional-limit tables.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rvlab/core.hpp"
#include "rvlab/moduli.hpp"
#include "rvlab/parallel.hpp"
#include "rvlab/tailmeasure.hpp"

namespace rvlab {

struct PolarSample {
  Element direction;
  double radius = 0.0;
};

/// (T_{1/tau(x)} x, tau(x)).
inline PolarSample polar_decompose(const Modulus& tau, const ScalingSpec& s, const Element& x) {
  const double r = tau.eval(x);
  require(r != 0.0, ErrorCode::ZeroModulus, "polar decomposition of an element with zero modulus");
  require(std::isfinite(r), ErrorCode::InfiniteModulus, "polar decomposition of an element with infinite modulus");
  return {invert_scaling(s, r, x), r};
}

struct HillEstimate {
  double alpha_hat = 0.0;
  double std_error = 0.0;
  double threshold = 0.0;  ///< X_(k+1)
  std::size_t k = 0;
};

/// k = floor(n^0.7), clamped to [2, n - 1].
inline std::size_t default_k(std::size_t n) {
  auto k = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 0.7)));
  return std::clamp<std::size_t>(k, 2, n > 2 ? n - 1 : 2);
}

namespace detail {

/// Moves the k+1 largest values to the front, sorted descending.
inline void top_sorted(std::vector<double>& v, std::size_t k1) {
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k1 - 1), v.end(), std::greater<>());
  std::sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k1), std::greater<>());
}

inline HillEstimate hill_on_sorted(std::span<const double> top, std::size_t k) {
  const double xk1 = top[k];
  require(xk1 > 0.0, ErrorCode::InsufficientData, "order statistic X_(k+1) must be positive");
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += std::log(top[i] / xk1);
  require(s > 0.0, ErrorCode::InsufficientData, "all top-k log-spacings are zero");
  const double a = static_cast<double>(k) / s;
  return {a, a / std::sqrt(static_cast<double>(k)), xk1, k};
}

}  // namespace detail

/// Hill estimator over the top k order statistics:
/// alpha_hat = k / sum_{i<=k} log(X_(i) / X_(k+1)), std_error = alpha_hat / sqrt(k).
inline HillEstimate estimate_tail_index(std::vector<double> radii, std::size_t k) {
  const std::size_t n = radii.size();
  require(k >= 2 && k < n, ErrorCode::InsufficientData,
          "Hill estimator needs 2 <= k < n (k = " + std::to_string(k) + ", n = " + std::to_string(n) + ")");
  detail::top_sorted(radii, k + 1);
  return detail::hill_on_sorted(radii, k);
}

inline HillEstimate estimate_tail_index(std::span<const double> radii, std::size_t k) {
  return estimate_tail_index(std::vector<double>(radii.begin(), radii.end()), k);
}

struct EstimatorReport {
  double alpha_hat = 0.0;
  double alpha_stderr = 0.0;
  double threshold_used = 0.0;
  std::size_t n_exceedances = 0;
  std::optional<SpectralMeasure> spectral_atoms;
  std::vector<std::pair<std::string, double>> diagnostics;
  std::uint64_t seed = 0;
  std::size_t n = 0;
};

/// Empirical spectral measure: directions of the exceedances of tau above
/// `threshold`, each with weight 1 / (number of exceedances).
inline SpectralMeasure empirical_spectral(std::span<const Element> samples, const Modulus& tau, const ScalingSpec& s,
                                          double threshold, std::size_t min_exceedances = 50) {
  std::vector<Element> dirs;
  for (const auto& x : samples) {
    const double r = tau.eval(x);
    if (r > threshold && std::isfinite(r)) dirs.push_back(invert_scaling(s, r, x));
  }
  require(dirs.size() >= min_exceedances, ErrorCode::InsufficientExceedances,
          std::to_string(dirs.size()) + " exceedances above " + format_number(threshold) + ", need " +
              std::to_string(min_exceedances));
  const double w = 1.0 / static_cast<double>(dirs.size());
  std::vector<Atom> atoms;
  atoms.reserve(dirs.size());
  for (auto& d : dirs) atoms.push_back({std::move(d), w});
  return SpectralMeasure(std::move(atoms), tau);
}

inline SpectralMeasure empirical_spectral(const VectorBatch& samples, const Modulus& tau, const ScalingSpec& s,
                                          double threshold, std::size_t min_exceedances = 50) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double r = tau.eval_coords(samples.row(i));
    if (r > threshold && std::isfinite(r)) idx.push_back(i);
  }
  require(idx.size() >= min_exceedances, ErrorCode::InsufficientExceedances,
          std::to_string(idx.size()) + " exceedances above " + format_number(threshold) + ", need " +
              std::to_string(min_exceedances));
  const double w = 1.0 / static_cast<double>(idx.size());
  std::vector<Atom> atoms;
  atoms.reserve(idx.size());
  for (auto i : idx) {
    auto row = samples.row(i);
    std::vector<double> v(row.begin(), row.end());
    s.act_on_coords(tau.eval_coords(row), true, v);
    atoms.push_back({Vector(std::move(v)), w});
  }
  return SpectralMeasure(std::move(atoms), tau);
}

/// Total weight of the atoms whose location satisfies `pred`.
inline double spectral_weight(const SpectralMeasure& sm, const DirectionPredicate& pred) {
  double w = 0.0;
  for (const auto& a : sm.atoms())
    if (pred(a.location)) w += a.weight;
  return w;
}

using ElementPredicate = std::function<bool(const Element&)>;
using CoordPredicate = std::function<bool(std::span<const double>)>;

/// g(t) (1/n) #{i : T_{1/t} xi_i in B}.
inline double empirical_tail_mass(std::span<const Element> samples, const ElementPredicate& indicator, double t,
                                  double g_of_t, const ScalingSpec& s) {
  require(g_of_t > 0.0, ErrorCode::BadParameters, "g(t) must be positive");
  require(!samples.empty(), ErrorCode::InsufficientData, "no samples");
  std::size_t count = 0;
  for (const auto& x : samples)
    if (indicator(invert_scaling(s, t, x))) ++count;
  return g_of_t * static_cast<double>(count) / static_cast<double>(samples.size());
}

inline double empirical_tail_mass(const VectorBatch& samples, const CoordPredicate& indicator, double t, double g_of_t,
                                  const ScalingSpec& s) {
  require(g_of_t > 0.0, ErrorCode::BadParameters, "g(t) must be positive");
  require(samples.size() > 0, ErrorCode::InsufficientData, "no samples");
  const auto count = parallel_reduce(
      samples.size(), std::size_t{0},
      [&](std::size_t b, std::size_t e) {
        std::size_t c = 0;
        std::vector<double> buf(samples.dim());
        for (std::size_t i = b; i < e; ++i) {
          auto r = samples.row(i);
          std::copy(r.begin(), r.end(), buf.begin());
          s.act_on_coords(t, true, buf);
          if (indicator(buf)) ++c;
        }
        return c;
      },
      std::plus<>());
  return g_of_t * static_cast<double>(count) / static_cast<double>(samples.size());
}

/// Modulus values over a batch, computed in parallel.
inline std::vector<double> modulus_values(const VectorBatch& samples, const Modulus& tau) {
  std::vector<double> out(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) { out[i] = tau.eval_coords(samples.row(i)); });
  return out;
}

inline std::vector<double> modulus_values(std::span<const Element> samples, const Modulus& tau) {
  std::vector<double> out(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) { out[i] = tau.eval(samples[i]); });
  return out;
}

namespace detail {

/// Solves A x = b for symmetric positive definite A (Cholesky), in place.
inline std::vector<double> spd_solve(std::vector<double> a, std::vector<double> b, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    require(d > 0.0, ErrorCode::InsufficientData, "covariance matrix is not positive definite");
    const double l = std::sqrt(d);
    a[j * n + j] = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = v / l;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= a[i * n + k] * b[k];
    b[i] = v / a[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double v = b[i];
    for (std::size_t k = i + 1; k < n; ++k) v -= a[k * n + i] * b[k];
    b[i] = v / a[i * n + i];
  }
  return b;
}

}  // namespace detail

struct LogCorrectionFit {
  double slope = 0.0;           ///< coefficient of log t
  double loglog = 0.0;          ///< coefficient of log log t
  double loglog_stderr = 0.0;
  bool flagged = false;         ///< |loglog| > 3 std_error
  std::size_t points = 0;
};

/// Generalised least squares fit of log S_hat(t) = b0 + b1 log t + b2 log log t
/// on log-spaced thresholds between X_(k) and X_(m_min), where `top` holds the
/// largest order statistics in descending order. The covariance of the
/// nested survival estimates, Cov(log S_i, log S_j) = 1/N_i - 1/n for
/// t_i <= t_j, is used in full.
inline LogCorrectionFit fit_log_correction(std::span<const double> top, std::size_t n, std::size_t k,
                                           std::size_t m_min = 100, std::size_t points = 24) {
  LogCorrectionFit fit;
  m_min = std::min(m_min, k / 4);
  require(m_min >= 10 && top.size() >= k, ErrorCode::InsufficientData, "too few order statistics for a log fit");
  const double t_lo = top[k - 1];
  const double t_hi = top[m_min - 1];
  require(t_lo > 1.0 && t_hi > t_lo, ErrorCode::InsufficientData, "log fit needs thresholds above 1");
  std::vector<double> t(points), y(points), cnt(points);
  for (std::size_t j = 0; j < points; ++j) {
    t[j] = t_lo * std::pow(t_hi / t_lo, static_cast<double>(j) / static_cast<double>(points - 1));
    // count of values strictly above t[j]
    const auto it = std::partition_point(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k),
                                         [&](double v) { return v > t[j]; });
    cnt[j] = static_cast<double>(it - top.begin());
    y[j] = std::log(cnt[j] / static_cast<double>(n));
  }
  std::vector<double> sigma(points * points);
  for (std::size_t i = 0; i < points; ++i)
    for (std::size_t j = 0; j < points; ++j) sigma[i * points + j] = 1.0 / cnt[std::min(i, j)] - 1.0 / static_cast<double>(n);
  // X^T Sigma^{-1} X and X^T Sigma^{-1} y via solves against columns.
  std::array<std::vector<double>, 3> cols;
  for (auto& c : cols) c.resize(points);
  for (std::size_t j = 0; j < points; ++j) {
    cols[0][j] = 1.0;
    cols[1][j] = std::log(t[j]);
    cols[2][j] = std::log(std::log(t[j]));
  }
  std::array<std::vector<double>, 3> sinv_cols;
  for (int c = 0; c < 3; ++c) sinv_cols[c] = detail::spd_solve(sigma, cols[c], points);
  std::vector<double> xtx(9), xty(3);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b)
      for (std::size_t j = 0; j < points; ++j) xtx[a * 3 + b] += cols[a][j] * sinv_cols[b][j];
    for (std::size_t j = 0; j < points; ++j) xty[a] += sinv_cols[a][j] * y[j];
  }
  const auto beta = detail::spd_solve(xtx, xty, 3);
  const auto e2 = detail::spd_solve(xtx, {0.0, 0.0, 1.0}, 3);
  fit.slope = beta[1];
  fit.loglog = beta[2];
  fit.loglog_stderr = std::sqrt(e2[2]);
  fit.flagged = std::abs(fit.loglog) > 3.0 * fit.loglog_stderr;
  fit.points = points;
  return fit;
}

enum class LadderClass { Same, Hidden, NotRV };

inline const char* ladder_class_name(LadderClass c) {
  switch (c) {
    case LadderClass::Same: return "same";
    case LadderClass::Hidden: return "hidden";
    case LadderClass::NotRV: return "not_rv";
  }
  return "?";
}

struct LadderEntry {
  Modulus modulus;
  HillEstimate hill;
  LadderClass classification = LadderClass::Same;
  std::optional<LogCorrectionFit> log_fit;
  std::string comment;
};

/// Tail indices of tau(xi) along a ladder of moduli, each classified against
/// the first entry: same index, strictly larger (hidden regular variation), or
/// not regularly varying within the diagnostics (estimation failed, or an
/// index significantly smaller than the reference).
/// `fit_count` sets how many order statistics feed the log-correction fit
/// (0: the Hill k). Wider windows gain power against log factors but also
/// react to ordinary second-order terms.
inline std::vector<LadderEntry> hidden_rv_ladder(const std::vector<std::function<std::vector<double>()>>& values,
                                                 const std::vector<Modulus>& ladder, std::size_t k,
                                                 std::size_t fit_count = 0) {
  require(!ladder.empty() && ladder.size() == values.size(), ErrorCode::BadParameters, "ladder must be nonempty");
  std::vector<LadderEntry> out;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    LadderEntry e{ladder[i], {}, LadderClass::Same, std::nullopt, ""};
    auto v = values[i]();
    const auto n = v.size();
    try {
      require(k >= 2 && k < n, ErrorCode::InsufficientData, "need 2 <= k < n");
      const std::size_t kf = std::min(fit_count == 0 ? k : fit_count, n - 1);
      detail::top_sorted(v, std::max(k, kf) + 1);
      e.hill = detail::hill_on_sorted(v, k);
      try {
        e.log_fit = fit_log_correction(std::span<const double>(v.data(), kf + 1), n, kf);
      } catch (const Error&) {
      }
    } catch (const Error& err) {
      e.classification = LadderClass::NotRV;
      e.comment = err.what();
      out.push_back(std::move(e));
      continue;
    }
    if (i > 0 && out.front().classification != LadderClass::NotRV) {
      const auto& ref = out.front().hill;
      const double se = std::hypot(ref.std_error, e.hill.std_error);
      const double diff = e.hill.alpha_hat - ref.alpha_hat;
      if (diff > 3.0 * se) {
        e.classification = LadderClass::Hidden;
        e.comment = "index larger than reference";
      } else if (diff < -3.0 * se) {
        e.classification = LadderClass::NotRV;
        e.comment = "index smaller than on the larger ideal";
      } else {
        e.comment = "same index as reference";
      }
    } else {
      e.comment = i == 0 ? "reference" : "reference not regularly varying";
    }
    if (e.log_fit && e.log_fit->flagged) e.comment += "; slowly varying log correction";
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<LadderEntry> hidden_rv_ladder(const VectorBatch& samples, const std::vector<Modulus>& ladder,
                                                 std::size_t k, std::size_t fit_count = 0) {
  std::vector<std::function<std::vector<double>()>> values;
  for (const auto& m : ladder) values.emplace_back([&samples, m] { return modulus_values(samples, m); });
  return hidden_rv_ladder(values, ladder, k, fit_count);
}

inline std::vector<LadderEntry> hidden_rv_ladder(std::span<const Element> samples, const std::vector<Modulus>& ladder,
                                                 std::size_t k, std::size_t fit_count = 0) {
  std::vector<std::function<std::vector<double>()>> values;
  for (const auto& m : ladder) values.emplace_back([samples, m] { return modulus_values(samples, m); });
  return hidden_rv_ladder(values, ladder, k, fit_count);
}

struct ProbeLevel {
  double t = 0.0;
  std::size_t exceedances = 0;
  std::vector<double> frequency;
  std::vector<double> std_error;
  double sup_change = 0.0;  ///< sup over probes of |change| from the previous level
};

struct ConditionalLimitTable {
  std::vector<std::string> probe_names;
  std::vector<ProbeLevel> levels;
  HillEstimate tau_index;
  HillEstimate ell_index;
  bool index_mismatch = false;
};

using ProbeFn = std::function<bool(std::size_t i, double t)>;

namespace detail {

/// Shared engine: ell(i), tau(i) give modulus values of sample i and
/// probes[j](i, t) tests T_{1/t} xi_i against probe j.
inline ConditionalLimitTable conditional_limit_core(std::size_t n, const std::vector<double>& ell,
                                                    const std::vector<double>& tau, const std::vector<ProbeFn>& probes,
                                                    std::vector<std::string> names, const std::vector<double>& t_ladder,
                                                    std::size_t min_exceedances) {
  require(!t_ladder.empty(), ErrorCode::BadParameters, "t ladder must be nonempty");
  ConditionalLimitTable table;
  table.probe_names = std::move(names);
  for (double t : t_ladder) {
    ProbeLevel lvl;
    lvl.t = t;
    std::vector<std::size_t> hits(probes.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(ell[i] > t)) continue;
      ++lvl.exceedances;
      for (std::size_t j = 0; j < probes.size(); ++j)
        if (probes[j](i, t)) ++hits[j];
    }
    require(lvl.exceedances >= min_exceedances, ErrorCode::InsufficientExceedances,
            "level t = " + format_number(t) + " has " + std::to_string(lvl.exceedances) + " exceedances, need " +
                std::to_string(min_exceedances));
    const double m = static_cast<double>(lvl.exceedances);
    for (auto h : hits) {
      const double p = static_cast<double>(h) / m;
      lvl.frequency.push_back(p);
      lvl.std_error.push_back(std::sqrt(p * (1.0 - p) / m));
    }
    if (!table.levels.empty()) {
      const auto& prev = table.levels.back();
      for (std::size_t j = 0; j < probes.size(); ++j)
        lvl.sup_change = std::max(lvl.sup_change, std::abs(lvl.frequency[j] - prev.frequency[j]));
    }
    table.levels.push_back(std::move(lvl));
  }
  auto positive = [](const std::vector<double>& v) {
    std::vector<double> p;
    for (double x : v)
      if (x > 0.0 && std::isfinite(x)) p.push_back(x);
    return p;
  };
  try {
    auto pt = positive(tau);
    auto pe = positive(ell);
    table.tau_index = estimate_tail_index(pt, default_k(pt.size()));
    table.ell_index = estimate_tail_index(pe, default_k(pe.size()));
    table.index_mismatch = std::abs(table.tau_index.alpha_hat - table.ell_index.alpha_hat) >
                           4.0 * std::hypot(table.tau_index.std_error, table.ell_index.std_error);
  } catch (const Error&) {
  }
  return table;
}

}  // namespace detail

/// Law of T_{1/t} xi given ell(xi) > t on probe sets, per level of t_ladder,
/// with the largest change between consecutive levels. Also compares the
/// tail indices of tau(xi) and of ell(xi) on {ell > 0}.
inline ConditionalLimitTable conditional_limit_test(const VectorBatch& samples, const Modulus& tau, const Modulus& ell,
                                                    const std::vector<double>& t_ladder,
                                                    const std::vector<std::pair<std::string, CoordPredicate>>& probes,
                                                    const ScalingSpec& s, std::size_t min_exceedances = 50) {
  const auto ell_v = modulus_values(samples, ell);
  const auto tau_v = modulus_values(samples, tau);
  std::vector<ProbeFn> fns;
  std::vector<std::string> names;
  for (const auto& [name, pred] : probes) {
    names.push_back(name);
    fns.emplace_back([&samples, &s, p = pred](std::size_t i, double t) {
      auto r = samples.row(i);
      std::vector<double> buf(r.begin(), r.end());
      s.act_on_coords(t, true, buf);
      return p(buf);
    });
  }
  return detail::conditional_limit_core(samples.size(), ell_v, tau_v, fns, std::move(names), t_ladder, min_exceedances);
}

inline ConditionalLimitTable conditional_limit_test(std::span<const Element> samples, const Modulus& tau,
                                                    const Modulus& ell, const std::vector<double>& t_ladder,
                                                    const std::vector<std::pair<std::string, ElementPredicate>>& probes,
                                                    const ScalingSpec& s, std::size_t min_exceedances = 50) {
  const auto ell_v = modulus_values(samples, ell);
  const auto tau_v = modulus_values(samples, tau);
  std::vector<ProbeFn> fns;
  std::vector<std::string> names;
  for (const auto& [name, pred] : probes) {
    names.push_back(name);
    fns.emplace_back([samples, &s, p = pred](std::size_t i, double t) { return p(invert_scaling(s, t, samples[i])); });
  }
  return detail::conditional_limit_core(samples.size(), ell_v, tau_v, fns, std::move(names), t_ladder, min_exceedances);
}

struct TailProcessRow {
  double t = 0.0;
  long lag = 0;
  double x = 0.0;            ///< probe level
  double probability = 0.0;  ///< P{|xi_lag| / t > x given |xi_0| > t}
  double std_error = 0.0;
  std::size_t anchors = 0;
};

/// Empirical law of (xi_{-h}, ..., xi_h) / t given |xi_0| > t, reported as
/// exceedance probabilities of each lag over the probe levels `xs`. Every
/// position j with h <= j < m - h serves as an anchor (stationarity). The
/// std_error is the binomial one and ignores dependence between anchors.
inline std::vector<TailProcessRow> tail_process_estimate(std::span<const Element> sequences,
                                                         const std::vector<double>& t_ladder, std::size_t max_lag,
                                                         const std::vector<double>& xs,
                                                         std::size_t min_exceedances = 50) {
  std::vector<TailProcessRow> rows;
  for (double t : t_ladder) {
    std::size_t anchors = 0;
    const std::size_t lags = 2 * max_lag + 1;
    std::vector<std::size_t> hits(lags * xs.size(), 0);
    for (const auto& e : sequences) {
      const auto* s = std::get_if<Sequence>(&e);
      require(s != nullptr, ErrorCode::IncompatibleVariant, "tail process needs sequences");
      const auto v = s->values();
      require(v.size() >= lags, ErrorCode::BadParameters, "sequences are shorter than 2 * max_lag + 1");
      for (std::size_t j = max_lag; j + max_lag < v.size(); ++j) {
        if (!(std::abs(v[j]) > t)) continue;
        ++anchors;
        for (std::size_t l = 0; l < lags; ++l) {
          const double y = std::abs(v[j + l - max_lag]) / t;
          for (std::size_t q = 0; q < xs.size(); ++q)
            if (y > xs[q]) ++hits[l * xs.size() + q];
        }
      }
    }
    require(anchors >= min_exceedances, ErrorCode::InsufficientExceedances,
            "level t = " + format_number(t) + " has " + std::to_string(anchors) + " anchors");
    for (std::size_t l = 0; l < lags; ++l) {
      for (std::size_t q = 0; q < xs.size(); ++q) {
        const double p = static_cast<double>(hits[l * xs.size() + q]) / static_cast<double>(anchors);
        rows.push_back({t, static_cast<long>(l) - static_cast<long>(max_lag), xs[q], p,
                        std::sqrt(p * (1.0 - p) / static_cast<double>(anchors)), anchors});
      }
    }
  }
  return rows;
}

struct FidiIndex {
  std::vector<double> grid;
  HillEstimate hill;
};

struct OscillationCell {
  double eps = 0.0;
  double eps_effective = 0.0;  ///< eps rounded down to a grid multiple
  double t = 0.0;
  double value = 0.0;          ///< g(t) P_hat{osc_eps > t delta}
  double std_error = 0.0;
};

struct FunctionDiagnostic {
  std::vector<FidiIndex> fidi;
  std::vector<OscillationCell> oscillation;
  bool decays = false;  ///< smallest-eps value <= half the largest-eps value at the top t level
};

/// (i) Hill index of max_{u in gamma} |xi(u)| per grid gamma; (ii) the table
/// g(t) P{osc_eps(xi) > t delta} over the (eps, t) ladder and a decay verdict
/// in eps at the largest t.
inline FunctionDiagnostic function_rv_diagnostic(std::span<const Element> samples,
                                                 const std::vector<std::vector<double>>& gamma_grids,
                                                 std::vector<double> eps_ladder, double delta,
                                                 const std::vector<double>& t_ladder,
                                                 const std::function<double(double)>& g) {
  require(!samples.empty(), ErrorCode::InsufficientData, "no samples");
  require(!eps_ladder.empty() && !t_ladder.empty(), ErrorCode::BadParameters, "eps and t ladders must be nonempty");
  std::vector<const GridFunction*> fs;
  for (const auto& e : samples) {
    const auto* f = std::get_if<GridFunction>(&e);
    require(f != nullptr, ErrorCode::IncompatibleVariant, "function diagnostic needs grid functions");
    fs.push_back(f);
  }
  const auto n = fs.size();
  FunctionDiagnostic out;
  for (const auto& grid : gamma_grids) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      double m = 0.0;
      for (double u : grid) {
        require(u >= fs[i]->lo() && u <= fs[i]->hi(), ErrorCode::BadParameters, "grid point outside the domain");
        m = std::max(m, std::abs(fs[i]->at(u)));
      }
      v[i] = m;
    }
    out.fidi.push_back({grid, estimate_tail_index(std::move(v), default_k(n))});
  }
  std::sort(eps_ladder.begin(), eps_ladder.end());
  for (double eps : eps_ladder) {
    const auto osc = Modulus::oscillation(eps);
    std::vector<double> w(n);
    parallel_for(n, [&](std::size_t i) { w[i] = osc.eval(*fs[i]); });
    const double h = fs.front()->step();
    const double eff = std::floor(eps / h + 1e-9) * h;
    for (double t : t_ladder) {
      const auto c = static_cast<double>(std::count_if(w.begin(), w.end(), [&](double x) { return x > t * delta; }));
      const double p = c / static_cast<double>(n);
      const double gt = g(t);
      out.oscillation.push_back({eps, eff, t, gt * p, gt * std::sqrt(p * (1.0 - p) / static_cast<double>(n))});
    }
  }
  const double t_top = *std::max_element(t_ladder.begin(), t_ladder.end());
  double small = 0.0, large = 0.0;
  for (const auto& c : out.oscillation) {
    if (c.t != t_top) continue;
    if (c.eps == eps_ladder.front()) small = c.value;
    if (c.eps == eps_ladder.back()) large = c.value;
  }
  out.decays = small <= 0.5 * large || (small == 0.0 && large == 0.0);
  return out;
}

}  // namespace rvlab
