#pragma once

// Experiment configs -> analyses -> reports. A config names a generator, an
// analysis kind with its parameters, the sample size and the seed; running it
// yields a JSON report (results, verdicts, config hash, seed, version) and a
// CSV trace. Everything is a pure function of the config.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rvlab/config.hpp"
#include "rvlab/estimators.hpp"
#include "rvlab/io.hpp"
#include "rvlab/limits.hpp"
#include "rvlab/moduli.hpp"
#include "rvlab/parallel.hpp"
#include "rvlab/samplers.hpp"
#include "rvlab/tailmeasure.hpp"

#ifndef RVLAB_VERSION
#define RVLAB_VERSION "0.0.0"
#endif

namespace rvlab {

inline constexpr const char* kReportSchema = "rvlab-report/1";
inline constexpr const char* kVersion = RVLAB_VERSION;

namespace detail {

inline std::string message_without_code(const Error& e) {
  std::string msg = e.what();
  const auto prefix = std::string(error_code_name(e.code())) + ": ";
  if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
  return msg;
}

/// Runs f and prefixes library errors with the config key they came from.
template <class F>
auto with_key(const std::string& key, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    const auto msg = message_without_code(e);
    if (msg.rfind(key + ":", 0) == 0 || msg.rfind(key + ".", 0) == 0) throw;
    throw Error(e.code(), key + ": " + msg);
  }
}

inline void check_keys(const ConfigNode& c, const std::vector<std::string>& allowed) {
  for (const auto& item : c.json().items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) c.error(item.key(), "unknown key");
  }
}

inline std::optional<double> optional_number(const ConfigNode& c, const std::string& key) {
  if (!c.has(key)) return std::nullopt;
  return c.number(key);
}

inline std::vector<std::vector<double>> number_rows(const ConfigNode& c, const std::string& key) {
  if (!c.has(key)) c.error(key, "missing required array of arrays");
  const auto& v = c.json().at(key);
  if (!v.is_array() || v.empty()) c.error(key, "expected a nonempty array of arrays");
  std::vector<std::vector<double>> out;
  for (const auto& row : v) {
    if (!row.is_array()) c.error(key, "expected an array of arrays of numbers");
    std::vector<double> r;
    for (const auto& x : row) {
      if (!x.is_number()) c.error(key, "expected an array of arrays of numbers");
      r.push_back(x.get<double>());
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<std::size_t> counts_of(const ConfigNode& c, const std::string& key, std::vector<std::size_t> fallback) {
  if (!c.has(key)) return fallback;
  std::vector<std::size_t> out;
  for (double x : c.numbers(key)) {
    if (!(x >= 1.0 && x == std::floor(x))) c.error(key, "expected positive integers");
    out.push_back(static_cast<std::size_t>(x));
  }
  if (out.empty()) c.error(key, "must not be empty");
  return out;
}

inline Modulus modulus_at(const ConfigNode& c, const std::string& key, const std::string& fallback) {
  const auto text = c.string(key, fallback);
  return with_key(c.key_path(key), [&] { return parse_modulus(text); });
}

inline Modulus modulus_at(const ConfigNode& c, const std::string& key) {
  const auto text = c.string(key);
  return with_key(c.key_path(key), [&] { return parse_modulus(text); });
}

inline std::vector<Modulus> moduli_at(const ConfigNode& c, const std::string& key) {
  std::vector<Modulus> out;
  for (const auto& text : c.strings(key)) out.push_back(with_key(c.key_path(key), [&] { return parse_modulus(text); }));
  if (out.empty()) c.error(key, "must not be empty");
  return out;
}

inline ScalingSpec scaling_at(const ConfigNode& c, const std::string& key, const std::string& fallback) {
  const auto text = c.string(key, fallback);
  return with_key(c.key_path(key), [&] { return parse_scaling(text); });
}

inline std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

/// Non-finite numbers become strings so that dumps round-trip.
inline Json sanitize(const Json& j) {
  if (j.is_number_float()) return json_number(j.get<double>());
  if (j.is_array()) {
    Json out = Json::array();
    for (const auto& x : j) out.push_back(sanitize(x));
    return out;
  }
  if (j.is_object()) {
    Json out = Json::object();
    for (const auto& item : j.items()) out[item.key()] = sanitize(item.value());
    return out;
  }
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Generators and tail measures from config tables

inline TailMeasure parse_tail_measure(const ConfigNode& c) {
  const double alpha = c.number("alpha");
  const auto ref = detail::modulus_at(c, "reference", "max_abs");
  const auto sc = detail::scaling_at(c, "scaling", "linear");
  const auto rows = detail::number_rows(c, "atoms");
  const auto w = c.numbers("weights");
  if (w.size() != rows.size()) c.error("weights", "needs one weight per atom");
  const bool normalize = c.boolean("normalize", true);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Element u = detail::with_key(c.key_path("atoms"), [&] { return Element(Vector(rows[i])); });
    const double r = detail::with_key(c.key_path("atoms"), [&] { return ref.eval(u); });
    if (!(r > 0.0 && std::isfinite(r))) c.error("atoms", "atom " + std::to_string(i) + " has reference modulus 0 or inf");
    atoms.push_back({normalize ? invert_scaling(sc, r, u) : u, w[i]});
  }
  return detail::with_key(c.path(), [&] { return TailMeasure(alpha, SpectralMeasure(std::move(atoms), ref), sc); });
}

namespace detail {

inline const std::vector<std::pair<std::string, std::vector<std::string>>>& generator_keys() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> keys = {
      {"pareto", {"alpha"}},
      {"pareto_iid", {"alpha", "dim"}},
      {"spectral_rv", {"alpha", "reference", "scaling", "atoms", "weights", "normalize"}},
      {"broken_line", {"alpha", "grid"}},
      {"random_polynomial", {"coefficients", "grid"}},
      {"pareto_sequence", {"alpha", "length", "shared"}},
      {"moving_max", {"alpha", "length", "weights"}},
      {"binomial_pp", {"m", "point"}},
      {"poisson_pp", {"mean", "point"}},
      {"marked_pp", {"ground", "mark"}},
      {"shot_noise", {"marked", "kernel", "width", "lo", "hi", "grid"}},
      {"convex_hull", {"m", "point"}},
      {"random_ball", {"center", "radius", "vertices"}},
      {"ellipse", {"semiaxes", "vertices"}},
      {"scaling_min_pair", {"alpha", "spread"}},
      {"dombry_ribatet", {"alpha"}},
      {"reflected_pareto", {"alpha", "endpoint"}},
      {"log_pareto", {"alpha"}},
      {"random_spike", {"alpha", "width", "grid"}},
      {"constant_function", {"alpha", "grid"}},
      {"uniform", {"lo", "hi"}},
      {"normal", {"mean", "sd"}},
      {"scaled", {"factor", "inner"}},
  };
  return keys;
}

}  // namespace detail

inline std::vector<std::string> generator_types() {
  std::vector<std::string> out;
  for (const auto& [name, keys] : detail::generator_keys()) out.push_back(name);
  return out;
}

/// Generator from a config table {type = ..., parameters, nested child tables}.
inline GeneratorPtr parse_generator(const ConfigNode& c) {
  const auto type = c.string("type");
  const auto& table = detail::generator_keys();
  const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == type; });
  if (it == table.end()) c.error("type", "unknown generator type '" + type + "'");
  auto allowed = it->second;
  allowed.push_back("type");
  detail::check_keys(c, allowed);

  auto alpha = [&] { return c.number("alpha", 1.0); };
  auto grid = [&] { return static_cast<std::size_t>(c.count("grid", 257)); };
  auto child = [&](const char* key) { return parse_generator(c.child(key)); };
  return detail::with_key(c.path(), [&]() -> GeneratorPtr {
    if (type == "pareto") return make_generator(gen::Pareto{alpha()});
    if (type == "pareto_iid") return make_generator(gen::ParetoIID{alpha(), c.count("dim", 2)});
    if (type == "spectral_rv") return make_generator(gen::SpectralRV{std::make_shared<const TailMeasure>(parse_tail_measure(c))});
    if (type == "broken_line") return make_generator(gen::BrokenLine{alpha(), grid()});
    if (type == "random_polynomial") return make_generator(gen::RandomPolynomial{child("coefficients"), grid()});
    if (type == "pareto_sequence")
      return make_generator(gen::ParetoSequence{alpha(), c.count("length", 8), c.boolean("shared", false)});
    if (type == "moving_max")
      return make_generator(gen::MovingMax{alpha(), c.count("length", 8), c.numbers("weights", {1.0, 1.0})});
    if (type == "binomial_pp") return make_generator(gen::BinomialPP{c.count("m", 1), child("point")});
    if (type == "poisson_pp") return make_generator(gen::PoissonPP{c.number("mean", 1.0), child("point")});
    if (type == "marked_pp") return make_generator(gen::MarkedPP{child("ground"), child("mark")});
    if (type == "shot_noise") {
      gen::Kernel k;
      const auto shape = c.string("kernel", "triangle");
      if (shape == "triangle") {
        k.shape = gen::Kernel::Shape::Triangle;
      } else if (shape == "epanechnikov") {
        k.shape = gen::Kernel::Shape::Epanechnikov;
      } else {
        c.error("kernel", "expected \"triangle\" or \"epanechnikov\"");
      }
      k.width = c.number("width", 1.0);
      return make_generator(gen::ShotNoise{child("marked"), k, c.number("lo", 0.0), c.number("hi", 1.0), grid()});
    }
    if (type == "convex_hull") return make_generator(gen::ConvexHull{c.count("m", 3), child("point")});
    if (type == "random_ball") return make_generator(gen::RandomBall{child("center"), child("radius"), c.count("vertices", 64)});
    if (type == "ellipse") return make_generator(gen::Ellipse{child("semiaxes"), c.count("vertices", 64)});
    if (type == "scaling_min_pair") return make_generator(gen::ScalingMinPair{alpha(), c.number("spread", 1.0)});
    if (type == "dombry_ribatet") return make_generator(gen::DombryRibatet{alpha()});
    if (type == "reflected_pareto") return make_generator(gen::ReflectedPareto{alpha(), c.number("endpoint", 0.0)});
    if (type == "log_pareto") return make_generator(gen::LogPareto{alpha()});
    if (type == "random_spike") return make_generator(gen::RandomSpike{alpha(), c.number("width", 0.05), grid()});
    if (type == "constant_function") return make_generator(gen::ConstantFunction{alpha(), grid()});
    if (type == "uniform") return make_generator(gen::Uniform{c.number("lo", 0.0), c.number("hi", 1.0)});
    if (type == "normal") return make_generator(gen::Normal{c.number("mean", 0.0), c.number("sd", 1.0)});
    return make_generator(gen::ScaledBy{c.number("factor"), child("inner")});
  });
}

/// Tail index of the generators whose index is a parameter.
inline std::optional<double> generator_alpha(const GeneratorSpec& g) {
  return std::visit(
      [](const auto& x) -> std::optional<double> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (requires { x.alpha; }) {
          return x.alpha;
        } else if constexpr (std::is_same_v<T, gen::SpectralRV>) {
          return x.tail->alpha();
        } else if constexpr (std::is_same_v<T, gen::ScaledBy>) {
          return generator_alpha(*x.inner);
        } else {
          return std::nullopt;
        }
      },
      g.variant());
}

inline TailMeasure scale_weights(const TailMeasure& mu, double c) {
  std::vector<Atom> atoms = mu.spectral().atoms();
  for (auto& a : atoms) a.weight *= c;
  return TailMeasure(mu.alpha(), SpectralMeasure(std::move(atoms), mu.reference()), mu.scaling());
}

/// Tail measure of xi with g(t) = t^alpha for the generators where it is
/// known in closed form: Pareto, i.i.d. Pareto, SpectralRV (total mass 1)
/// and linear rescalings of these.
inline std::optional<TailMeasure> limit_tail_measure(const GeneratorSpec& g) {
  const auto lin = ScalingSpec::linear();
  if (const auto* p = std::get_if<gen::Pareto>(&g.variant()))
    return TailMeasure(p->alpha, SpectralMeasure({{Vector{1.0}, 1.0}}, Modulus::max_abs()), lin);
  if (const auto* p = std::get_if<gen::ParetoIID>(&g.variant())) {
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < p->dim; ++i) {
      std::vector<double> e(p->dim, 0.0);
      e[i] = 1.0;
      atoms.push_back({Vector(std::move(e)), 1.0});
    }
    return TailMeasure(p->alpha, SpectralMeasure(std::move(atoms), Modulus::max_abs()), lin);
  }
  if (const auto* p = std::get_if<gen::SpectralRV>(&g.variant()))
    return scale_weights(*p->tail, 1.0 / p->tail->spectral().total_weight());
  if (const auto* p = std::get_if<gen::ScaledBy>(&g.variant())) {
    auto inner = limit_tail_measure(*p->inner);
    if (!inner || inner->scaling().kind() != ScalingKind::Linear) return std::nullopt;
    return scale_weights(*inner, std::pow(p->factor, inner->alpha()));
  }
  return std::nullopt;
}

/// mu re-expressed on the sphere of tau and scaled to mu{tau > 1} = 1: the
/// limit of n P{T_{1/a_n} xi in .} when P{tau(xi) > a_n} ~ 1/n.
inline TailMeasure unit_tail_measure(const TailMeasure& mu, const Modulus& tau) {
  const auto on_tau = mu.reference() == tau ? mu : change_modulus(mu, tau);
  return scale_weights(on_tau, 1.0 / on_tau.spectral().total_weight());
}

/// P{tau(xi) > t} for xi a pair of i.i.d. Pareto(1) coordinates and t >= 1,
/// for the max, min and the two beta families. With m = log min ~ Exp(2) and
/// D = log max - log min ~ Exp(1) independent, log tau_b = m + b D and
/// log tau*_b = m + (1 - b) D, which gives the forms below (all equal 1 at t = 1).
inline std::optional<double> pareto_pair_survival(const Modulus& tau, double t) {
  if (!(t >= 1.0)) return std::nullopt;
  const double b = tau.param();
  const double t2 = 1.0 / (t * t);
  auto max_tail = [&] { return 2.0 / t - t2; };
  auto half_tail = [&] { return t2 * (1.0 + 2.0 * std::log(t)); };
  switch (tau.kind()) {
    case ModulusKind::MaxAbsCoord: return max_tail();
    case ModulusKind::MinAbsCoord: return t2;
    case ModulusKind::BetaMin:
      if (b == 0.0) return t2;
      if (b == 0.5) return half_tail();
      return (t2 - 2.0 * b * std::pow(t, -1.0 / b)) / (1.0 - 2.0 * b);
    case ModulusKind::BetaStar:
      if (b == 0.0) return max_tail();
      if (b == 0.5) return half_tail();
      return ((2.0 - 2.0 * b) * std::pow(t, -1.0 / (1.0 - b)) - t2) / (1.0 - 2.0 * b);
    default: return std::nullopt;
  }
}

/// tau(xi_i) for i < n, element i drawn from stream (seed, i); no batch is kept.
inline std::vector<double> modulus_sample(const GeneratorSpec& g, const Modulus& tau, std::uint64_t seed, std::size_t n) {
  require(n >= 1, ErrorCode::BadParameters, "sample size must be >= 1");
  std::vector<double> out(n);
  const auto d = g.vector_dim();
  if (d > 0 && tau.on_coords()) {
    parallel_chunks(n, [&](std::size_t b, std::size_t e, std::size_t) {
      std::vector<double> x(d);
      for (std::size_t i = b; i < e; ++i) {
        Stream rng(seed, i);
        draw_vector(g, rng, x);
        out[i] = tau.eval_coords(x);
      }
    });
  } else {
    parallel_for(n, [&](std::size_t i) {
      Stream rng(seed, i);
      out[i] = tau.eval(draw(g, rng));
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Analyses

struct AnalysisOutput {
  Json results = Json::object();
  std::vector<Verdict> verdicts;
  std::vector<TraceRow> trace;
  std::vector<std::string> warnings;
};

using AnalysisRun = std::function<AnalysisOutput()>;

struct ExperimentSetup {
  ConfigNode root;
  ConfigNode analysis;
  GeneratorPtr generator;  ///< null when the config has no [generator] table
  std::uint64_t seed = 0;
  std::size_t n = 0;
};

namespace detail {

inline std::string t_level(double t) { return "t=" + format_number(t); }

inline const GeneratorSpec& need_generator(const ExperimentSetup& s) {
  if (!s.generator) s.root.error("generator", "missing table (this analysis samples a generator)");
  return *s.generator;
}

inline GeneratorPtr vector_generator(const ExperimentSetup& s) {
  const auto& g = need_generator(s);
  if (g.vector_dim() == 0) s.root.error("generator", "this analysis needs a vector-valued generator");
  return s.generator;
}

inline std::size_t need_reps(const ExperimentSetup& s) {
  const auto r = s.root.count("reps");
  if (r < 1) s.root.error("reps", "must be >= 1");
  return r;
}

inline std::string default_modulus(const ExperimentSetup& s) { return s.root.string("modulus", "max_abs"); }
inline std::string default_scaling(const ExperimentSetup& s) { return s.root.string("scaling", "linear"); }

inline double alpha_param(const ExperimentSetup& s, const std::string& key) {
  if (s.analysis.has(key)) return s.analysis.number(key);
  if (s.generator) {
    if (auto a = generator_alpha(*s.generator)) return *a;
  }
  s.analysis.error(key, "missing (the generator has no tail index parameter)");
}

inline Json hill_json(const HillEstimate& h) { return to_json(h); }

/// Probe sets {m(x) > level} on coordinate vectors.
inline std::vector<std::pair<std::string, Modulus>> probe_moduli(const ConfigNode& c, std::vector<double>& levels) {
  std::vector<std::pair<std::string, Modulus>> out;
  if (!c.has("probe_moduli")) return out;
  const auto ms = moduli_at(c, "probe_moduli");
  levels = c.numbers("probe_levels");
  if (levels.size() != ms.size()) c.error("probe_levels", "needs one level per probe modulus");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (!ms[i].on_coords()) c.error("probe_moduli", ms[i].describe() + " is not a vector modulus");
    out.emplace_back(ms[i].describe() + " > " + format_number(levels[i]), ms[i]);
  }
  return out;
}

/// Polar rectangles {s < tau <= t, direction in cone} from parallel arrays
/// set_s, set_t, set_cone and cones = [[coordinate, lo, hi], ...]; the
/// direction is T_{1/tau(x)} x.
inline std::vector<PolarRect> polar_rects(const ConfigNode& c, const Modulus& tau, const ScalingSpec& sc) {
  const auto s = c.numbers("set_s");
  if (s.empty()) c.error("set_s", "must not be empty");
  const auto t = c.numbers("set_t", std::vector<double>(s.size(), kInf));
  if (t.size() != s.size()) c.error("set_t", "needs one entry per set_s entry");
  std::vector<std::vector<double>> cones;
  if (c.has("cones")) cones = number_rows(c, "cones");
  for (const auto& cone : cones)
    if (cone.size() != 3 || cone[0] < 0.0 || cone[0] != std::floor(cone[0]))
      c.error("cones", "each cone is [coordinate, lo, hi] with a 0-based coordinate");
  const auto which = c.numbers("set_cone", std::vector<double>(s.size(), -1.0));
  if (which.size() != s.size()) c.error("set_cone", "needs one entry per set_s entry");
  std::vector<PolarRect> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0.0 && s[i] < t[i])) c.error("set_s", "set " + std::to_string(i) + " needs 0 < s < t");
    PolarRect r;
    r.tau = tau;
    r.s = s[i];
    r.t = t[i];
    r.scaling = sc;
    r.name = "(" + format_number(s[i]) + ", " + format_number(t[i]) + "]";
    if (which[i] >= 0.0) {
      const auto j = static_cast<std::size_t>(which[i]);
      if (j >= cones.size() || which[i] != std::floor(which[i])) c.error("set_cone", "no cone " + format_number(which[i]));
      const auto coord = static_cast<std::size_t>(cones[j][0]);
      const double lo = cones[j][1], hi = cones[j][2];
      r.direction = [coord, lo, hi](std::span<const double> u) {
        return coord < u.size() && std::abs(u[coord]) >= lo && std::abs(u[coord]) <= hi;
      };
      r.name += " x {|u_" + std::to_string(coord) + "| in [" + format_number(lo) + ", " + format_number(hi) + "]}";
    }
    out.push_back(std::move(r));
  }
  return out;
}

/// Targets mu(A) of probe sets: explicit set_targets, or the normalised limit
/// measure of the generator when known.
inline void fill_rect_targets(const ExperimentSetup& s, std::vector<PolarRect>& rects, const Norming& norming) {
  const auto& c = s.analysis;
  if (c.has("set_targets")) {
    const auto m = c.numbers("set_targets");
    if (m.size() != rects.size()) c.error("set_targets", "needs one mass per set");
    for (std::size_t i = 0; i < rects.size(); ++i) rects[i].target = m[i];
    return;
  }
  if (norming.rule == NormingRule::Fixed) c.error("set_targets", "required with a fixed norming constant");
  const auto mu = limit_tail_measure(need_generator(s));
  if (!mu) c.error("set_targets", "required: the generator's tail measure has no closed form here");
  const auto unit = with_key(c.key_path("modulus"), [&] { return unit_tail_measure(*mu, rects.front().tau); });
  for (auto& r : rects) r.target = polar_rect_mass(unit, r);
}

inline Norming norming_at(const ConfigNode& c) {
  const auto rule = c.string("norming", "closed_form");
  if (rule == "closed_form") return Norming::closed_form();
  if (rule == "pilot_quantile") return Norming::pilot(c.count("pilot_size", 0));
  if (rule == "fixed") {
    const double a = c.number("norming_value");
    if (!(a > 0.0)) c.error("norming_value", "must be positive");
    return Norming::fixed(a);
  }
  c.error("norming", "expected closed_form, pilot_quantile or fixed");
}

inline Verdict bound_verdict(std::string claim, double estimate, double target, double tolerance) {
  return {std::move(claim), estimate, target, tolerance, std::abs(estimate - target) <= tolerance};
}

}  // namespace detail

inline AnalysisRun prepare_tail_index(const ExperimentSetup& s) {
  const auto& a = s.analysis;
  detail::check_keys(a, {"kind", "modulus", "k", "target_alpha", "z"});
  const auto g = s.generator;
  detail::need_generator(s);
  const auto tau = detail::modulus_at(a, "modulus", detail::default_modulus(s));
  const std::size_t k = a.count("k", 0);
  const auto target = detail::optional_number(a, "target_alpha");
  const double z = a.number("z", 4.0);
  const auto seed = s.seed;
  const auto n = s.n;
  return [=] {
    AnalysisOutput out;
    const auto v = modulus_sample(*g, tau, seed, n);
    const std::size_t kk = k == 0 ? default_k(n) : k;
    const auto h = estimate_tail_index(std::span<const double>(v), kk);
    out.results["modulus"] = tau.describe();
    out.results["hill"] = to_json(h);
    Json plot = Json::array();
    for (double f : {0.25, 0.5, 1.0, 2.0}) {
      const auto kf = static_cast<std::size_t>(f * static_cast<double>(kk));
      if (kf < 2 || kf >= n) continue;
      const auto hf = estimate_tail_index(std::span<const double>(v), kf);
      plot.push_back(to_json(hf));
      out.trace.push_back({"k=" + std::to_string(kf), "alpha_hat", hf.alpha_hat, hf.std_error});
    }
    out.results["hill_plot"] = std::move(plot);
    if (target) out.verdicts.push_back(z_verdict("tail index of " + tau.describe(), h.alpha_hat, *target, h.std_error, z));
    return out;
  };
}

inline AnalysisRun prepare_spectral(const ExperimentSetup& s) {
  const auto& a = s.analysis;
  detail::check_keys(a, {"kind", "modulus", "scaling", "quantile", "target_alpha", "min_exceedances", "z"});
  const auto g = detail::vector_generator(s);
  const auto tau = detail::modulus_at(a, "modulus", detail::default_modulus(s));
  if (!tau.on_coords()) a.error("modulus", "needs a vector modulus");
  const auto sc = detail::scaling_at(a, "scaling", detail::default_scaling(s));
  const double q = a.number("quantile", 0.999);
  if (!(q > 0.0 && q < 1.0)) a.error("quantile", "must lie in (0, 1)");
  auto target = detail::optional_number(a, "target_alpha");
  const auto mu = limit_tail_measure(*g);
  if (!target && mu) target = mu->alpha();
  std::optional<TailMeasure> unit;
  if (mu) unit = detail::with_key(a.key_path("modulus"), [&] { return unit_tail_measure(*mu, tau); });
  const std::size_t min_ex = a.count("min_exceedances", 50);
  const double z = a.number("z", 4.0);
  const auto seed = s.seed;
  const auto n = s.n;
  return [=] {
    AnalysisOutput out;
    const auto batch = sample_vectors(*g, seed, n);
    auto v = modulus_values(batch, tau);
    auto sorted = v;
    const auto qi = std::min(n - 1, static_cast<std::size_t>(std::floor(q * static_cast<double>(n))));
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(qi), sorted.end());
    const double threshold = sorted[qi];
    const auto sm = empirical_spectral(batch, tau, sc, threshold, min_ex);
    const auto m = static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](double x) { return x > threshold; }));
    const auto h = estimate_tail_index(std::move(v), m);
    out.results["modulus"] = tau.describe();
    out.results["scaling"] = describe(sc);
    out.results["threshold"] = threshold;
    out.results["exceedances"] = m;
    out.results["hill"] = to_json(h);
    out.results["empirical_atoms"] = sm.atoms().size();
    if (target)
      out.verdicts.push_back(z_verdict("tail index of " + tau.describe() + " above the " + format_number(q) + " quantile",
                                       h.alpha_hat, *target, h.std_error, z));
    if (unit) {
      // Empirical directions are attributed to the nearest limit atom.
      const auto& truth = unit->spectral().atoms();
      std::vector<double> w(truth.size(), 0.0);
      for (const auto& e : sm.atoms()) {
        std::size_t best = 0;
        double bd = kInf;
        for (std::size_t i = 0; i < truth.size(); ++i) {
          const double d = element_distance(e.location, truth[i].location);
          if (d < bd) {
            bd = d;
            best = i;
          }
        }
        w[best] += e.weight;
      }
      Json rows = Json::array();
      for (std::size_t i = 0; i < truth.size(); ++i) {
        const double se = binomial_se(truth[i].weight, static_cast<double>(m));
        rows.push_back({{"atom", to_json(truth[i].location)}, {"target", truth[i].weight}, {"estimate", w[i]}, {"stderr", se}});
        out.trace.push_back({"atom=" + std::to_string(i), "spectral_weight", w[i], se});
        out.verdicts.push_back(z_verdict("spectral weight of atom " + std::to_string(i), w[i], truth[i].weight, se, z));
      }
      out.results["atoms"] = std::move(rows);
    }
    return out;
  };
}

inline AnalysisRun prepare_hidden_ladder(const ExperimentSetup& s) {
  const auto& a = s.analysis;
  detail::check_keys(a, {"kind", "ladder", "k", "fit_count", "expected_indices", "index_tolerance", "t_probes",
                         "closed_form", "z"});
  const auto g = s.generator;
  detail::need_generator(s);
  const auto ladder = detail::moduli_at(a, "ladder");
  const std::size_t k = a.count("k", 0);
  const std::size_t fit_count = a.count("fit_count", 0);
  const auto expected = a.numbers("expected_indices", {});
  if (expected.size() > ladder.size()) a.error("expected_indices", "longer than the ladder");
  const double rel_tol = a.number("index_tolerance", 0.07);
  const auto t_probes = a.numbers("t_probes", {5.0, 10.0, 20.0});
  const auto cf = a.string("closed_form", "auto");
  if (cf != "auto" && cf != "none") a.error("closed_form", "expected \"auto\" or \"none\"");
  const auto* pp = std::get_if<gen::ParetoIID>(&g->variant());
  const bool pair = cf == "auto" && pp != nullptr && pp->alpha == 1.0 && pp->dim == 2;
  const double z = a.number("z", 4.0);
  const auto seed = s.seed;
  const auto n = s.n;
  return [=] {
    AnalysisOutput out;
    const std::size_t kk = k == 0 ? default_k(n) : k;
    Json survival = Json::array();
    std::vector<std::function<std::vector<double>()>> fns;
    for (std::size_t j = 0; j < ladder.size(); ++j) {
      fns.emplace_back([&, j] {
        auto v = modulus_sample(*g, ladder[j], seed, n);
        if (!pair) return v;
        for (double t : t_probes) {
          const auto target = pareto_pair_survival(ladder[j], t);
          if (!target) continue;
          const auto c = static_cast<double>(std::count_if(v.begin(), v.end(), [&](double x) { return x > t; }));
          const double p = c / static_cast<double>(n);
          const double se = binomial_se(*target, static_cast<double>(n));
          const auto name = ladder[j].describe();
          survival.push_back({{"modulus", name}, {"t", t}, {"empirical", p}, {"target", *target}, {"stderr", se}});
          out.trace.push_back({detail::t_level(t), "P{" + name + " > t}", p, binomial_se(p, static_cast<double>(n))});
          out.verdicts.push_back(z_verdict("P{" + name + " > " + format_number(t) + "}", p, *target, se, z));
        }
        return v;
      });
    }
    const auto entries = hidden_rv_ladder(fns, ladder, kk, fit_count);
    Json rows = Json::array();
    for (std::size_t j = 0; j < entries.size(); ++j) {
      const auto& e = entries[j];
      Json row = {{"modulus", e.modulus.describe()},
                  {"hill", to_json(e.hill)},
                  {"class", ladder_class_name(e.classification)},
                  {"comment", e.comment}};
      if (e.log_fit)
        row["log_fit"] = {{"slope", json_number(e.log_fit->slope)},
                          {"loglog", json_number(e.log_fit->loglog)},
                          {"loglog_stderr", json_number(e.log_fit->loglog_stderr)},
                          {"flagged", e.log_fit->flagged},
                          {"points", e.log_fit->points}};
      rows.push_back(std::move(row));
      out.trace.push_back({e.modulus.describe(), "alpha_hat", e.hill.alpha_hat, e.hill.std_error});
      if (j < expected.size())
        out.verdicts.push_back(detail::bound_verdict("tail index of " + e.modulus.describe() + " within " +
                                                         format_number(std::round(rel_tol * 1e8) / 1e6) + "% of " +
                                                         format_number(expected[j]),
                                                     e.hill.alpha_hat, expected[j], rel_tol * expected[j]));
    }
    out.results["k"] = kk;
    out.results["ladder"] = std::move(rows);
    out.results["survival"] = std::move(survival);
    return out;
  };
}

inline AnalysisRun prepare_conditional_limit(const ExperimentSetup& s) {
  const auto& a = s.analysis;
  detail::check_keys(a, {"kind", "tau", "ell", "scaling", "t_ladder", "probe_moduli", "probe_levels", "ratio_levels",
                         "ratio_index", "expect_index_mismatch", "min_exceedances", "z"});
  const auto g = detail::vector_generator(s);
  const auto tau = detail::modulus_at(a, "tau", detail::default_modulus(s));
  const auto ell = detail::modulus_at(a, "ell");
  if (!tau.on_coords() || !ell.on_coords()) a.error("ell", "tau and ell must be vector moduli");
  const auto sc = detail::scaling_at(a, "scaling", detail::default_scaling(s));
  const auto t_ladder = a.numbers("t_ladder");
  if (t_ladder.empty()) a.error("t_ladder", "must not be empty");
  std::vector<double> levels;
  const auto probes = detail::probe_moduli(a, levels);
  const auto ratio_levels = a.numbers("ratio_levels", {});
  const auto ratio_index = detail::optional_number(a, "ratio_index");
  if (!ratio_levels.empty() && !ratio_index) a.error("ratio_index", "required with ratio_levels");
  const std::optional<bool> expect_mismatch =
      a.has("expect_index_mismatch") ? std::optional<bool>(a.boolean("expect_index_mismatch", false)) : std::nullopt;
  const std::size_t min_ex = a.count("min_exceedances", 50);
  const double z = a.number("z", 4.0);
  const auto seed = s.seed;
  const auto n = s.n;
  return [=] {
    AnalysisOutput out;
    const auto batch = sample_vectors(*g, seed, n);
    std::vector<std::pair<std::string, CoordPredicate>> preds;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      preds.emplace_back(probes[i].first, [m = probes[i].second, c = levels[i]](std::span<const double> x) {
        return m.eval_coords(x) > c;
      });
    }
    const auto table = conditional_limit_test(batch, tau, ell, t_ladder, preds, sc, min_ex);
    Json lv = Json::array();
    for (const auto& l : table.levels) {
      lv.push_back({{"t", l.t},
                    {"exceedances", l.exceedances},
                    {"frequency", l.frequency},
                    {"stderr", l.std_error},
                    {"sup_change", l.sup_change}});
      for (std::size_t j = 0; j < table.probe_names.size(); ++j)
        out.trace.push_back({detail::t_level(l.t), table.probe_names[j], l.frequency[j], l.std_error[j]});
    }
    out.results["probes"] = table.probe_names;
    out.results["levels"] = std::move(lv);
    out.results["tau"] = {{"modulus", tau.describe()}, {"hill", to_json(table.tau_index)}};
    out.results["ell"] = {{"modulus", ell.describe()}, {"hill", to_json(table.ell_index)}};
    out.results["index_mismatch"] = table.index_mismatch;
    if (expect_mismatch)
      out.verdicts.push_back({"tail indices of tau and ell differ", table.index_mismatch ? 1.0 : 0.0,
                              *expect_mismatch ? 1.0 : 0.0, 0.0, table.index_mismatch == *expect_mismatch});
    if (!ratio_levels.empty()) {
      const auto ev = modulus_values(batch, ell);
      Json ratios = Json::array();
      for (double t : t_ladder) {
        const auto m = static_cast<double>(std::count_if(ev.begin(), ev.end(), [&](double x) { return x > t; }));
        if (m < static_cast<double>(min_ex)) throw Error(ErrorCode::InsufficientExceedances, "analysis.t_ladder: level " + format_number(t) + " has too few exceedances of ell");
        for (double r : ratio_levels) {
          const auto h = static_cast<double>(std::count_if(ev.begin(), ev.end(), [&](double x) { return x > r * t; }));
          const double p = h / m;
          const double target = std::pow(r, -*ratio_index);
          const double se = binomial_se(target, m);
          ratios.push_back({{"t", t}, {"a", r}, {"ratio", p}, {"target", target}, {"stderr", se}});
          out.trace.push_back({detail::t_level(t), "P{ell > " + format_number(r) + "t | ell > t}", p, binomial_se(p, m)});
          out.verdicts.push_back(z_verdict("exceedance ratio of ell at a = " + format_number(r) + ", t = " + format_number(t),
                                           p, target, se, z));
        }
      }
      out.results["ratios"] = std::move(ratios);
    }
    return out;
  };
}

/// Limit of P{|X_h| / t > x given X_0 > t} for a moving maximum of Pareto(alpha)
/// innovations: one large innovation enters X_0 through weight w_j with
/// probability w_j^alpha / sum w^alpha and X_h through w_{j+h}.
inline double moving_max_tail_process(const std::vector<double>& w, double alpha, long h, double x) {
  double total = 0.0;
  for (double v : w) total += std::pow(v, alpha);
  double p = 0.0;
  const auto J = static_cast<long>(w.size());
  for (long j = 0; j < J; ++j) {
    if (w[static_cast<std::size_t>(j)] == 0.0) continue;
    const double pj = std::pow(w[static_cast<std::size_t>(j)], alpha) / total;
    const long jh = j + h;
    if (jh < 0 || jh >= J) continue;
    const double ratio = w[static_cast<std::size_t>(jh)] / w[static_cast<std::size_t>(j)];
    if (ratio <= 0.0) continue;
    p += pj * std::min(1.0, std::pow(ratio / x, alpha));
  }
  return p;
}

inline AnalysisRun prepare_tail_process(const ExperimentSetup& s) {
  const auto& a = s.analysis;
  detail::check_keys(a, {"kind", "t_ladder", "max_lag", "xs", "min_exceedances", "z"});
  const auto g = s.generator;
  if (detail::need_generator(s).element_kind() != ElementKind::Sequence)
    s.root.error("generator", "tail_process needs a sequence generator");
  const auto t_ladder = a.numbers("t_ladder");
  if (t_ladder.empty()) a.error("t_ladder", "must not be empty");
  const std::size_t max_lag = a.count("max_lag", 2);
  const auto xs = a.numbers("xs", {0.5, 1.0, 2.0});
  const std::size_t min_ex = a.count("min_exceedances", 50);
  const double z = a.number("z", 4.0);
  const auto seed = s.seed;
  const auto n = s.n;
  return [=] {
    AnalysisOutput out;
    const auto seqs = sample(*g, seed, n);
    const auto rows = tail_process_estimate(seqs, t_ladder, max_lag, xs, min_ex);
    const auto* mm = std::get_if<gen::MovingMax>(&g->variant());
    const double t_top = *std::max_element(t_ladder.begin(), t_ladder.end());
    Json table = Json::array();
    for (const auto& r : rows) {
      Json row = {{"t", r.t}, {"lag", r.lag}, {"x", r.x}, {"probability", r.probability}, {"stderr", r.std_error},
                  {"anchors", r.anchors}};
      out.trace.push_back({detail::t_level(r.t), "P{|X_" + std::to_string(r.lag) + "|/t > " + format_number(r.x) + "}",
                           r.probability, r.std_error});
      if (mm) {
        const double target = moving_max_tail_process(mm->weights, mm->alpha, r.lag, r.x);
        row["target"] = target;
        if (r.t == t_top)
          out.verdicts.push_back(z_verdict("tail process at lag " + std::to_string(r.lag) + ", x = " + format_number(r.x),
                                           r.probability, target, std::max(r.std_error, binomial_se(target, static_cast<double>(r.anchors))), z));
      }
      table.push_back(std::move(row));
    }
    out.results["rows"] = std::move(table);
    if (mm) out.results["note"] = "stderr treats anchors as independent";
    return out;
  };
}

inline AnalysisRun prepare_function_diag(const ExperimentSetup& s) {
  const auto& a = s.analysis;
  detail::check_keys(a, {"kind", "gamma_grids", "eps_ladder", "delta", "t_ladder", "g_alpha", "target_alpha",
                         "expect_decay", "z"});
  const auto g = s.generator;
  if (detail::need_generator(s).element_kind() != ElementKind::GridFunction)
    s.root.error("generator", "function_diag needs a function-valued generator");
  const auto grids = detail::number_rows(a, "gamma_grids");
  const auto eps = a.numbers("eps_ladder");
  const double delta = a.number("delta", 1.0);
  const auto t_ladder = a.numbers("t_ladder");
  if (eps.empty() || t_ladder.empty()) a.error("eps_ladder", "eps and t ladders must be nonempty");
  const double g_alpha = detail::alpha_param(s, "g_alpha");
  const auto target = detail::optional_number(a, "target_alpha");
  const std::optional<bool> expect_decay =
      a.has("expect_decay") ? std::optional<bool>(a.boolean("expect_decay", false)) : std::nullopt;
  const double z = a.number("z", 4.0);
  const auto seed = s.seed;
  const auto n = s.n;
  return [=] {
    AnalysisOutput out;
    const auto fs = sample(*g, seed, n);
    const auto diag =
        function_rv_diagnostic(fs, grids, eps, delta, t_ladder, [g_alpha](double t) { return std::pow(t, g_alpha); });
    Json fidi = Json::array();
    for (std::size_t i = 0; i < diag.fidi.size(); ++i) {
      const auto& f = diag.fidi[i];
      fidi.push_back({{"grid", f.grid}, {"hill", to_json(f.hill)}});
      out.trace.push_back({"grid=" + std::to_string(i), "alpha_hat", f.hill.alpha_hat, f.hill.std_error});
      if (target)
        out.verdicts.push_back(z_verdict("finite-dimensional tail index on grid " + std::to_string(i), f.hill.alpha_hat,
                                         *target, f.hill.std_error, z));
    }
    Json osc = Json::array();
    for (const auto& c : diag.oscillation) {
      osc.push_back({{"eps", c.eps}, {"eps_effective", c.eps_effective}, {"t", c.t}, {"value", c.value},
                     {"stderr", c.std_error}});
      out.trace.push_back({detail::t_level(c.t), "g(t)P{osc_" + format_number(c.eps) + " > t delta}", c.value, c.std_error});
    }
    out.results["fidi"] = std::move(fidi);
    out.results["oscillation"] = std::move(osc);
    out.results["decays"] = diag.decays;
    if (expect_decay)
      out.verdicts.push_back({"oscillation term decays in eps", diag.decays ? 1.0 : 0.0, *expect_decay ? 1.0 : 0.0, 0.0,
                              diag.decays == *expect_decay});
    return out;
  };
}

inline AnalysisRun prepare_mda(const ExperimentSetup& s) {
  const auto& a = s.analysis;
  detail::check_keys(a, {"kind", "family", "alpha", "endpoint", "norming", "norming_value", "pilot_size", "n_ladder",
                         "probes", "z"});
  const auto g = s.generator;
  if (!detail::need_generator(s).is_scalar()) s.root.error("generator", "mda needs a scalar generator");
  const double alpha = detail::alpha_param(s, "alpha");
  const auto family = a.string("family");
  MdaSpec spec;
  if (family == "frechet") {
    spec = MdaSpec::frechet(alpha);
  } else if (family == "weibull") {
    double endpoint = 0.0;
    if (a.has("endpoint")) {
      endpoint = a.number("endpoint");
    } else if (const auto* rp = std::get_if<gen::ReflectedPareto>(&g->variant())) {
      endpoint = rp->endpoint;
    }
    spec = MdaSpec::weibull(alpha, endpoint);
  } else if (family == "gumbel") {
    spec = MdaSpec::gumbel(alpha);
  } else {
    a.error("family", "expected frechet, weibull or gumbel");
  }
  spec.norming = detail::norming_at(a);
  const auto n_ladder = detail::counts_of(a, "n_ladder", {s.n});
  const auto reps = detail::need_reps(s);
  const auto probes = a.numbers("probes");
  if (probes.empty()) a.error("probes", "must not be empty");
  const double z = a.number("z", 4.0);
  const auto seed = s.seed;
  return [=] {
    AnalysisOutput out;
    const auto table = mda_check(*g, spec, n_ladder, reps, seed, probes);
    Json rows = Json::array();
    for (const auto& r : table.rows) {
      rows.push_back({{"n", r.n}, {"a_n", r.a_n}, {"probe", r.probe}, {"empirical", r.empirical},
                      {"stderr", r.std_error}, {"target", r.target}, {"z", json_number(r.z)}});
      out.trace.push_back({"n=" + std::to_string(r.n), "P{probe " + format_number(r.probe) + "}", r.empirical, r.std_error});
      out.verdicts.push_back(z_verdict(std::string(mda_family_name(spec.family)) + " limit at probe " +
                                           format_number(r.probe) + ", n = " + std::to_string(r.n),
                                       r.empirical, r.target, binomial_se(r.target, static_cast<double>(reps)), z));
    }
    Json sup = Json::array();
    for (const auto& [nn, d] : table.sup_deviation) sup.push_back({{"n", nn}, {"sup_deviation", d}});
    out.results["family"] = mda_family_name(spec.family);
    out.results["alpha"] = spec.alpha;
    out.results["transform"] = describe(spec.transform);
    out.results["norming"] = norming_rule_name(spec.norming.rule);
    out.results["reps"] = reps;
    out.results["rows"] = std::move(rows);
    out.results["sup_deviation"] = std::move(sup);
    out.results["max_abs_z"] = json_number(table.max_abs_z);
    return out;
  };
}

namespace detail {

struct CountPlan {
  GeneratorPtr g;
  std::vector<PolarRect> rects;
  Norming norming;
  std::size_t reps = 0;
};

inline CountPlan count_plan(const ExperimentSetup& s) {
  const auto& a = s.analysis;
  CountPlan p;
  p.g = vector_generator(s);
  const auto tau = modulus_at(a, "modulus", default_modulus(s));
  if (!tau.on_coords()) a.error("modulus", "needs a vector modulus");
  p.rects = polar_rects(a, tau, scaling_at(a, "scaling", default_scaling(s)));
  p.norming = norming_at(a);
  fill_rect_targets(s, p.rects, p.norming);
  p.reps = need_reps(s);
  return p;
}

inline Json count_law_json(const CountLaw& law) {
  return {{"set", law.set},
          {"target_mean", law.target_mean},
          {"mean", law.mean},
          {"empirical", law.empirical},
          {"poisson", law.poisson},
          {"total_variation", law.total_variation}};
}

}  // namespace detail

inline AnalysisRun prepare_void_prob(const ExperimentSetup& s) {
  const auto& a = s.analysis;
  detail::check_keys(a, {"kind", "modulus", "scaling", "set_s", "set_t", "set_cone", "cones", "set_targets", "norming",
                         "norming_value", "pilot_size", "count_law_set", "tv_tolerance", "z"});
  const auto plan = detail::count_plan(s);
  std::optional<std::size_t> law_set;
  if (a.has("count_law_set")) {
    law_set = a.count("count_law_set");
    if (*law_set >= plan.rects.size()) a.error("count_law_set", "no such set (0-based)");
  }
  const double tv_tol = a.number("tv_tolerance", 0.01);
  const double z = a.number("z", 4.0);
  const auto seed = s.seed;
  const auto n = s.n;
  return [=] {
    AnalysisOutput out;
    const auto table = probe_set_counts(*plan.g, plan.rects, n, plan.norming, plan.reps, seed);
    const auto rows = void_rows(table);
    Json jr = Json::array();
    for (const auto& r : rows) {
      jr.push_back({{"set", r.set}, {"frequency", r.frequency}, {"stderr", r.std_error}, {"target", r.target},
                    {"z", json_number(r.z)}});
      out.trace.push_back({r.set, "void_frequency", r.frequency, r.std_error});
      out.verdicts.push_back(z_verdict("void probability of " + r.set, r.frequency, r.target,
                                       binomial_se(r.target, static_cast<double>(plan.reps)), z));
    }
    out.results["n"] = n;
    out.results["a_n"] = table.a_n;
    out.results["reps"] = plan.reps;
    out.results["norming"] = norming_rule_name(plan.norming.rule);
    out.results["void"] = std::move(jr);
    if (law_set) {
      const auto rep = count_law_report(table);
      const auto& law = rep.laws[*law_set];
      out.results["count_law"] = detail::count_law_json(law);
      for (std::size_t k = 0; k < law.empirical.size(); ++k)
        out.trace.push_back({law.set, "P{N=" + std::to_string(k) + "}", law.empirical[k],
                             binomial_se(law.empirical[k], static_cast<double>(plan.reps))});
      out.verdicts.push_back({"total variation to Poisson(" + format_number(law.target_mean) + ") on 0..10 for " + law.set,
                              law.total_variation, 0.0, tv_tol, law.total_variation <= tv_tol});
    }
    return out;
  };
}

inline AnalysisRun prepare_poisson_counts(const ExperimentSetup& s) {
  const auto& a = s.analysis;
  detail::check_keys(a, {"kind", "modulus", "scaling", "set_s", "set_t", "set_cone", "cones", "set_targets", "norming",
                         "norming_value", "pilot_size", "tv_tolerance", "z"});
  const auto plan = detail::count_plan(s);
  const double tv_tol = a.number("tv_tolerance", 0.01);
  const double z = a.number("z", 4.0);
  const auto seed = s.seed;
  const auto n = s.n;
  return [=] {
    AnalysisOutput out;
    const auto rep = count_law_report(probe_set_counts(*plan.g, plan.rects, n, plan.norming, plan.reps, seed));
    Json laws = Json::array();
    for (const auto& law : rep.laws) {
      laws.push_back(detail::count_law_json(law));
      out.trace.push_back({law.set, "mean_count", law.mean, std::nan("")});
      out.trace.push_back({law.set, "total_variation", law.total_variation, std::nan("")});
      out.verdicts.push_back({"total variation to Poisson(" + format_number(law.target_mean) + ") on 0..10 for " + law.set,
                              law.total_variation, 0.0, tv_tol, law.total_variation <= tv_tol});
    }
    Json cov = Json::array();
    for (const auto& c : rep.covariances) {
      cov.push_back({{"i", c.i}, {"j", c.j}, {"covariance", c.covariance}, {"stderr", c.std_error}});
      // Counts of disjoint sets are asymptotically independent.
      const bool disjoint = !(plan.rects[c.i].s < plan.rects[c.j].t && plan.rects[c.j].s < plan.rects[c.i].t) &&
                            !plan.rects[c.i].direction && !plan.rects[c.j].direction;
      if (disjoint)
        out.verdicts.push_back(z_verdict("covariance of counts " + std::to_string(c.i) + " and " + std::to_string(c.j),
                                         c.covariance, 0.0, c.std_error, z));
    }
    out.results["n"] = rep.n;
    out.results["a_n"] = rep.a_n;
    out.results["reps"] = rep.reps;
    out.results["laws"] = std::move(laws);
    out.results["covariances"] = std::move(cov);
    return out;
  };
}

inline AnalysisRun prepare_breiman(const ExperimentSetup& s) {
  const auto& a = s.analysis;
  detail::check_keys(a, {"kind", "eta", "t_ladder", "k", "w_samples", "delta", "moment_x", "moment_samples",
                         "expected_index", "index_tolerance", "check_constant", "check_sign", "z"});
  const auto g = s.generator;
  if (!detail::need_generator(s).is_scalar()) s.root.error("generator", "breiman needs a scalar xi");
  const auto ec = a.child("eta");
  const auto kind = ec.string("kind");
  EtaFamily family;
  if (kind == "independent") {
    detail::check_keys(ec, {"kind", "w"});
    family = eta::Independent{parse_generator(ec.child("w"))};
  } else if (kind == "lln") {
    detail::check_keys(ec, {"kind", "a", "power"});
    family = eta::LlnAverage{ec.number("a", 1.0), ec.number("power", 1.0)};
  } else if (kind == "clt") {
    detail::check_keys(ec, {"kind", "sigma", "power"});
    family = eta::CltAverage{ec.number("sigma", 1.0), ec.number("power", 1.0)};
  } else {
    ec.error("kind", "expected independent, lln or clt");
  }
  detail::with_key(ec.path(), [&] {
    validate_eta(family);
    return 0;
  });
  BreimanOptions opt;
  opt.t_ladder = a.numbers("t_ladder", opt.t_ladder);
  opt.n = s.n;
  opt.k = a.count("k", 0);
  opt.w_samples = a.count("w_samples", opt.w_samples);
  opt.delta = a.number("delta", opt.delta);
  opt.moment_x = a.numbers("moment_x", opt.moment_x);
  opt.moment_samples = a.count("moment_samples", opt.moment_samples);
  const auto expected = detail::optional_number(a, "expected_index");
  const double rel_tol = a.number("index_tolerance", 0.07);
  const bool check_constant = a.boolean("check_constant", true);
  const bool check_sign = a.boolean("check_sign", false);
  const double z = a.number("z", 4.0);
  const auto seed = s.seed;
  return [=] {
    AnalysisOutput out;
    const auto rep = breiman_verify(*g, family, opt, seed);
    Json rows = Json::array();
    for (const auto& r : rep.rows) {
      rows.push_back({{"t", r.t}, {"estimate", r.estimate}, {"stderr", r.std_error}, {"target", r.target},
                      {"target_stderr", r.target_std_error}, {"z", json_number(r.z)}});
      out.trace.push_back({detail::t_level(r.t), "t^alpha P{|Y|>t}", r.estimate, r.std_error});
      if (check_constant)
        out.verdicts.push_back(z_verdict("tail constant at t = " + format_number(r.t), r.estimate, r.target,
                                         std::hypot(r.std_error, r.target_std_error), z));
    }
    Json moments = Json::array();
    for (const auto& m : rep.moments) {
      moments.push_back({{"x", m.x}, {"moment", json_number(m.moment)}, {"tail_index", json_number(m.tail_index)}});
      out.trace.push_back({"x=" + format_number(m.x), "E|eta_x|^(alpha+delta)", m.moment, std::nan("")});
    }
    out.results["alpha"] = rep.alpha;
    out.results["constant"] = rep.constant;
    out.results["rows"] = std::move(rows);
    out.results["hill"] = to_json(rep.hill);
    out.results["positive_fraction"] = {
        {"estimate", rep.positive_fraction}, {"stderr", rep.positive_std_error}, {"target", rep.positive_target}};
    out.results["moments"] = std::move(moments);
    out.results["moment_ok"] = rep.moment_ok;
    out.trace.push_back({"top", "hill_alpha", rep.hill.alpha_hat, rep.hill.std_error});
    if (expected)
      out.verdicts.push_back(detail::bound_verdict("tail index of Y within " + format_number(std::round(rel_tol * 1e8) / 1e6) + "% of " +
                                                       format_number(*expected),
                                                   rep.hill.alpha_hat, *expected, rel_tol * *expected));
    if (check_sign)
      out.verdicts.push_back(z_verdict("share of positive Y among large |Y|", rep.positive_fraction, rep.positive_target,
                                       rep.positive_std_error, z));
    out.warnings = rep.warnings;
    return out;
  };
}

inline AnalysisRun prepare_janossy(const ExperimentSetup& s) {
  const auto& a = s.analysis;
  detail::check_keys(a, {"kind", "base", "scaling", "t_ladder", "g_alpha", "probe_moduli", "probe_levels",
                         "probe_targets", "z"});
  const auto g = s.generator;
  if (detail::need_generator(s).element_kind() != ElementKind::PointConfig)
    s.root.error("generator", "janossy needs a point-process generator");
  JanossyOptions opt;
  opt.base = detail::modulus_at(a, "base", "max_abs");
  if (!opt.base.on_coords()) a.error("base", "needs a vector modulus");
  opt.scaling = detail::scaling_at(a, "scaling", detail::default_scaling(s));
  opt.t_ladder = a.numbers("t_ladder");
  if (opt.t_ladder.empty()) a.error("t_ladder", "must not be empty");
  const double g_alpha = detail::alpha_param(s, "g_alpha");
  opt.g = [g_alpha](double t) { return std::pow(t, g_alpha); };
  opt.n = s.n;
  std::vector<double> levels;
  const auto pm = detail::probe_moduli(a, levels);
  if (pm.empty()) a.error("probe_moduli", "janossy needs at least one probe");
  const auto targets = a.numbers("probe_targets", std::vector<double>(pm.size(), 0.0));
  if (targets.size() != pm.size()) a.error("probe_targets", "needs one target per probe");
  const bool has_targets = a.has("probe_targets");
  std::vector<JanossyProbe> probes;
  for (std::size_t i = 0; i < pm.size(); ++i)
    probes.push_back({pm[i].first,
                      [m = pm[i].second, c = levels[i]](std::span<const double> x) { return m.eval_coords(x) > c ? 1.0 : 0.0; },
                      targets[i]});
  const double z = a.number("z", 4.0);
  const auto seed = s.seed;
  return [=] {
    AnalysisOutput out;
    const auto rep = janossy_rv_check(*g, probes, opt, seed);
    Json rows = Json::array();
    const double t_top = rep.rows.empty() ? 0.0 : rep.rows.back().t;
    for (const auto& r : rep.rows) {
      rows.push_back({{"t", r.t}, {"probe", r.probe}, {"estimate", r.estimate}, {"stderr", r.std_error},
                      {"target", r.target}, {"z", json_number(r.z)}});
      out.trace.push_back({detail::t_level(r.t), r.probe, r.estimate, r.std_error});
      if (has_targets && r.t == t_top)
        out.verdicts.push_back(z_verdict("first Janossy measure on " + r.probe, r.estimate, r.target, r.std_error, z));
    }
    Json two = Json::array();
    for (const auto& r : rep.two_point) {
      two.push_back({{"t", r.t}, {"value", r.value}, {"stderr", r.std_error}});
      out.trace.push_back({detail::t_level(r.t), "g(t)P{eta(T_t B)>=2}", r.value, r.std_error});
    }
    out.results["rows"] = std::move(rows);
    out.results["two_point"] = std::move(two);
    out.results["skipped_levels"] = rep.skipped_levels;
    out.results["converges"] = rep.converges;
    out.results["two_point_decays"] = rep.two_point_decays;
    out.results["regularly_varying"] = rep.regularly_varying;
    out.verdicts.push_back({"two-point term decays", rep.two_point_decays ? 1.0 : 0.0, 1.0, 0.0, rep.two_point_decays});
    for (double t : rep.skipped_levels) out.warnings.push_back("level " + format_number(t) + " skipped: no single-point samples");
    return out;
  };
}

inline AnalysisRun prepare_set_pipeline(const ExperimentSetup& s) {
  const auto& a = s.analysis;
  detail::check_keys(a, {"kind", "functionals", "k", "directions", "target_alpha", "steiner_t_ladder", "z"});
  const auto g = s.generator;
  if (detail::need_generator(s).element_kind() != ElementKind::Polytope)
    s.root.error("generator", "set_pipeline needs a polytope generator");
  std::vector<SetFunctional> fs;
  for (const auto& name : a.strings("functionals")) {
    bool found = false;
    for (auto f : {SetFunctional::SetSup, SetFunctional::Steiner, SetFunctional::MeanWidth, SetFunctional::VolumeRoot,
                   SetFunctional::IntrinsicVolumes, SetFunctional::InscribedRadius}) {
      if (name == set_functional_name(f)) {
        fs.push_back(f);
        found = true;
      }
    }
    if (!found) a.error("functionals", "unknown functional '" + name + "'");
  }
  const std::size_t k = a.count("k", 0);
  const std::size_t directions = a.count("directions", 720);
  const auto target = detail::optional_number(a, "target_alpha");
  const auto steiner_t = a.numbers("steiner_t_ladder", {});
  const double z = a.number("z", 4.0);
  const auto seed = s.seed;
  const auto n = s.n;
  return [=] {
    AnalysisOutput out;
    const auto sets = sample(*g, seed, n);
    const auto rep = set_functional_pipeline(sets, fs, k, directions);
    Json fr = Json::array();
    for (const auto& f : rep.functionals) {
      fr.push_back({{"name", f.name}, {"hill", to_json(f.hill)}, {"mean", json_number(f.mean)}, {"comment", f.comment}});
      out.trace.push_back({f.name, "alpha_hat", f.hill.alpha_hat, f.hill.std_error});
      if (target && f.hill.k > 0)
        out.verdicts.push_back(z_verdict("tail index of " + f.name, f.hill.alpha_hat, *target, f.hill.std_error, z));
    }
    out.results["functionals"] = std::move(fr);
    out.results["polygons"] = rep.polygons;
    out.results["steiner_outside"] = rep.steiner_outside;
    out.results["quadrature_outside"] = rep.quadrature_outside;
    out.results["max_quadrature_error"] = rep.max_quadrature_error;
    out.results["homogeneity_failures"] = rep.homogeneity_failures;
    auto zero = [&](const char* claim, std::size_t v) {
      out.verdicts.push_back({claim, static_cast<double>(v), 0.0, 0.0, v == 0});
    };
    zero("Steiner points inside K", rep.steiner_outside);
    zero("quadrature Steiner points within their error bound", rep.quadrature_outside);
    zero("support function homogeneity h_{2K} = 2 h_K", rep.homogeneity_failures);
    if (!steiner_t.empty()) {
      Json st = Json::array();
      for (const auto& r : steiner_tail_check(sets, steiner_t, directions)) {
        st.push_back({{"t", r.t}, {"steiner", r.steiner}, {"hull", r.hull}, {"stderr", r.std_error}, {"z", json_number(r.z)}});
        out.trace.push_back({detail::t_level(r.t), "P{|s(K)|>t} - P{|K|>2t}", r.steiner - r.hull, r.std_error});
      }
      out.results["steiner_tail"] = std::move(st);
    }
    return out;
  };
}

inline AnalysisRun prepare_change_modulus(const ExperimentSetup& s) {
  const auto& a = s.analysis;
  detail::check_keys(a, {"kind", "measure", "random_atoms", "dim", "alpha", "ell", "t_ladder", "z"});
  const auto seed = s.seed;
  const auto n = s.n;
  const auto t_ladder = a.numbers("t_ladder", {});
  const double z = a.number("z", 4.0);
  // Either an explicit [analysis.measure] table or random atoms in the
  // positive orthant of R^dim on the max-abs sphere.
  std::optional<TailMeasure> given;
  std::size_t random_atoms = 0, dim = 0;
  double alpha = 1.0;
  if (a.has("measure")) {
    given = parse_tail_measure(a.child("measure"));
  } else {
    random_atoms = a.count("random_atoms");
    dim = a.count("dim", 3);
    alpha = a.number("alpha", 1.5);
    if (random_atoms < 1 || dim < 1) a.error("random_atoms", "need at least one atom and dim >= 1");
  }
  const auto ell_text = a.string("ell", "random_linear");
  std::optional<Modulus> ell;
  if (ell_text != "random_linear") ell = detail::modulus_at(a, "ell");
  return [=] {
    AnalysisOutput out;
    Stream rng(derive_seed(seed, "measure"), 0);
    auto mu = given;
    if (!mu) {
      std::vector<Atom> atoms;
      for (std::size_t i = 0; i < random_atoms; ++i) {
        std::vector<double> u(dim);
        for (auto& x : u) x = 0.1 + 0.9 * rng.uniform();
        const double m = *std::max_element(u.begin(), u.end());
        for (auto& x : u) x /= m;
        atoms.push_back({Vector(std::move(u)), 0.5 + rng.uniform()});
      }
      mu = TailMeasure(alpha, SpectralMeasure(std::move(atoms), Modulus::max_abs()), ScalingSpec::linear());
    }
    auto l = ell;
    if (!l) {
      const auto d = flatten(mu->spectral().atoms().front().location).size();
      std::vector<double> w(d);
      for (auto& x : w) x = 0.2 + 0.8 * rng.uniform();
      l = Modulus::linear_form(std::move(w));
    }
    const auto changed = change_modulus(*mu, *l);
    const double lhs = sector_mass(changed, all_directions, 1.0, kInf);
    double rhs = 0.0, max_l = 0.0;
    for (const auto& at : mu->spectral().atoms()) {
      const double c = l->eval(at.location);
      max_l = std::max(max_l, c);
      rhs += at.weight * std::pow(c, mu->alpha());
    }
    out.results["measure"] = to_json(*mu);
    out.results["ell"] = l->describe();
    out.results["changed"] = to_json(changed);
    out.results["identity"] = {{"sector_mass", lhs}, {"sum", rhs}, {"difference", lhs - rhs}};
    out.verdicts.push_back(detail::bound_verdict("mass of {ell > 1} after the change of modulus equals sum w ell(u)^alpha",
                                                 lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs))));
    out.trace.push_back({"identity", "sector_mass", lhs, std::nan("")});
    if (!t_ladder.empty()) {
      // xi = R U with P{R > r} = r^{-alpha} and U from the normalised atoms, so
      // W t^alpha P{ell(xi) > t} = sum w ell(u)^alpha once t >= max ell(u).
      const auto g = make_generator(gen::SpectralRV{std::make_shared<const TailMeasure>(*mu)});
      const auto v = modulus_sample(*g, *l, derive_seed(seed, "simulation"), n);
      const double total = mu->spectral().total_weight();
      Json sim = Json::array();
      for (double t : t_ladder) {
        if (t < max_l) out.warnings.push_back("t = " + format_number(t) + " is below max ell(u); the identity is only asymptotic there");
        const auto c = static_cast<double>(std::count_if(v.begin(), v.end(), [&](double x) { return x > t; }));
        const double p = c / static_cast<double>(n);
        const double f = total * std::pow(t, mu->alpha());
        const double est = f * p;
        const double se = f * binomial_se(rhs / f, static_cast<double>(n));
        sim.push_back({{"t", t}, {"estimate", est}, {"target", rhs}, {"stderr", se}});
        out.trace.push_back({detail::t_level(t), "W t^alpha P{ell(xi)>t}", est, f * binomial_se(p, static_cast<double>(n))});
        out.verdicts.push_back(z_verdict("simulated mass of {ell > t} at t = " + format_number(t), est, rhs, se, z));
      }
      out.results["simulation"] = std::move(sim);
    }
    return out;
  };
}

inline AnalysisRun prepare_assembly(const ExperimentSetup& s) {
  const auto& a = s.analysis;
  detail::check_keys(a, {"kind", "a", "level", "set_s", "set_t", "set_cone", "cones", "z"});
  const auto g = detail::vector_generator(s);
  const double level_a = a.number("a", 1.0);
  if (!(level_a > 0.0)) a.error("a", "must be positive");
  const double level = a.number("level");
  if (!(level > 0.0)) a.error("level", "must be positive");
  const auto mu = limit_tail_measure(*g);
  if (!mu || mu->scaling().kind() != ScalingKind::Linear)
    s.root.error("generator", "assembly needs a generator with a closed-form tail measure");
  const auto tau_max = Modulus::max_abs();
  auto rects = detail::polar_rects(a, tau_max, ScalingSpec::linear());
  for (const auto& r : rects)
    if (r.s < level_a) a.error("set_s", "probe sets must lie in {tau_max > a}");
  const std::size_t d = g->vector_dim();
  const double z = a.number("z", 4.0);
  const auto seed = s.seed;
  const auto n = s.n;
  return [=] {
    AnalysisOutput out;
    // Part i: the tail measure on the ideal of |x_i|, i.e. mu re-expressed on {|x_i| = 1}.
    std::vector<TailMeasure> parts;
    for (std::size_t i = 0; i < d; ++i) parts.push_back(change_modulus(*mu, Modulus::coord_abs(i)));
    const auto seg = assemble_from_marginals(parts, level_a);
    const auto direct = mu->reference() == tau_max ? *mu : change_modulus(*mu, tau_max);
    out.verdicts.push_back(detail::bound_verdict("assembled mass of {tau_max > a} equals the direct mass",
                                                 seg.total(), sector_mass(direct, all_directions, level_a, kInf),
                                                 1e-12 * std::max(1.0, seg.total())));
    // Direct empirical tail measure: level^alpha P{T_{1/level} xi in A}.
    std::vector<std::size_t> hits(rects.size(), 0);
    const auto batch = sample_vectors(*g, seed, n);
    std::vector<double> dir(d);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = batch.row(i);
      const double r = tau_max.eval_coords(x);
      const double rad = r / level;
      if (!(rad > level_a)) continue;
      for (std::size_t j = 0; j < d; ++j) dir[j] = x[j] / r;
      for (std::size_t j = 0; j < rects.size(); ++j) {
        const auto& A = rects[j];
        if (rad > A.s && rad <= A.t && (!A.direction || A.direction(dir))) ++hits[j];
      }
    }
    const double ga = std::pow(level, mu->alpha());
    Json rows = Json::array();
    for (std::size_t j = 0; j < rects.size(); ++j) {
      const auto& A = rects[j];
      DirectionPredicate pred = all_directions;
      if (A.direction)
        pred = [&A](const Element& u) { return A.direction(std::get<Vector>(u).values()); };
      const double target = seg.mass(pred, A.s, A.t);
      const double p = static_cast<double>(hits[j]) / static_cast<double>(n);
      const double est = ga * p;
      const double se = ga * binomial_se(std::max(target / ga, p), static_cast<double>(n));
      rows.push_back({{"set", A.name}, {"assembled", target}, {"empirical", est}, {"stderr", se}});
      out.trace.push_back({A.name, "level^alpha P{xi/level in A}", est, ga * binomial_se(p, static_cast<double>(n))});
      out.verdicts.push_back(z_verdict("assembled mass of " + A.name, est, target, se, z));
    }
    Json atoms = Json::array();
    for (const auto& at : seg.atoms())
      atoms.push_back({{"direction", to_json(at.direction)}, {"weight", at.weight}, {"lo", json_number(at.lo)},
                       {"hi", json_number(at.hi)}});
    out.results["segments"] = std::move(atoms);
    out.results["rows"] = std::move(rows);
    out.results["level"] = level;
    return out;
  };
}

// ---------------------------------------------------------------------------
// Experiments

inline const std::vector<std::pair<std::string, AnalysisRun (*)(const ExperimentSetup&)>>& analysis_kinds() {
  static const std::vector<std::pair<std::string, AnalysisRun (*)(const ExperimentSetup&)>> kinds = {
      {"tail_index", prepare_tail_index},
      {"spectral", prepare_spectral},
      {"hidden_ladder", prepare_hidden_ladder},
      {"conditional_limit", prepare_conditional_limit},
      {"tail_process", prepare_tail_process},
      {"function_diag", prepare_function_diag},
      {"mda", prepare_mda},
      {"void_prob", prepare_void_prob},
      {"poisson_counts", prepare_poisson_counts},
      {"breiman", prepare_breiman},
      {"janossy", prepare_janossy},
      {"set_pipeline", prepare_set_pipeline},
      {"change_modulus", prepare_change_modulus},
      {"assembly", prepare_assembly},
  };
  return kinds;
}

struct Experiment {
  std::string name;
  std::string description;
  std::string analysis;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  Json config;  ///< effective config, non-finite numbers as strings
  std::uint64_t config_hash = 0;
  AnalysisRun run;
};

/// Parses and validates a config without sampling anything.
inline Experiment prepare_experiment(const Json& raw, std::optional<std::uint64_t> seed_override = std::nullopt) {
  if (!raw.is_object()) fail(ErrorCode::Config, "config must be a table");
  Json config = detail::sanitize(raw);
  if (seed_override) config["seed"] = *seed_override;
  const ConfigNode root(raw, "");
  detail::check_keys(root, {"name", "description", "seed", "n", "reps", "generator", "analysis", "modulus", "scaling"});
  Experiment e;
  e.name = root.string("name");
  if (e.name.empty() || e.name.find_first_of("/\\") != std::string::npos)
    root.error("name", "must be a nonempty file-name-safe string");
  e.description = root.string("description", "");
  e.seed = seed_override ? *seed_override : root.count("seed");
  e.n = root.count("n");
  if (e.n < 1) root.error("n", "must be >= 1");
  const auto analysis = root.child("analysis");
  e.analysis = analysis.string("kind");
  const auto& kinds = analysis_kinds();
  const auto it = std::find_if(kinds.begin(), kinds.end(), [&](const auto& k) { return k.first == e.analysis; });
  if (it == kinds.end()) analysis.error("kind", "unknown analysis '" + e.analysis + "'");
  ExperimentSetup setup{root, analysis, nullptr, e.seed, e.n};
  if (root.has("generator")) setup.generator = parse_generator(root.child("generator"));
  e.run = it->second(setup);
  e.config = std::move(config);
  e.config_hash = fnv1a(e.config.dump());
  return e;
}

struct ExperimentResult {
  Json report;
  std::string report_text;  ///< report.dump(2) plus newline
  std::string trace_csv;
  bool pass = true;
};

inline std::string report_file_name(const Experiment& e) { return e.name + ".json"; }
inline std::string trace_file_name(const Experiment& e) { return e.name + ".csv"; }

inline ExperimentResult run_experiment(const Experiment& e) {
  auto out = e.run();
  ExperimentResult r;
  Json verdicts = Json::array();
  for (const auto& v : out.verdicts) {
    verdicts.push_back(to_json(v));
    r.pass = r.pass && v.pass;
  }
  r.report = {{"schema", kReportSchema},
              {"version", kVersion},
              {"name", e.name},
              {"description", e.description},
              {"analysis", e.analysis},
              {"seed", e.seed},
              {"n", e.n},
              {"config_hash", detail::hex64(e.config_hash)},
              {"config", e.config},
              {"results", detail::sanitize(out.results)},
              {"verdicts", std::move(verdicts)},
              {"pass", r.pass},
              {"warnings", out.warnings},
              {"trace", {{"file", trace_file_name(e)}, {"schema", kTraceSchema}}}};
  r.report_text = r.report.dump(2) + "\n";
  r.trace_csv = to_csv(out.trace);
  return r;
}

// ---------------------------------------------------------------------------
// Sample dumps: one element per row (one vertex or point per row for sets and
// configurations), columns per kind.

inline std::string samples_schema(ElementKind k) { return std::string("rvlab-samples-") + element_kind_key(k) + "/1"; }

inline std::string samples_to_csv(std::span<const Element> xs) {
  require(!xs.empty(), ErrorCode::InsufficientData, "no samples");
  const auto kind = kind_of(xs.front());
  std::size_t width = 0;
  for (const auto& x : xs) {
    require(kind_of(x) == kind, ErrorCode::IncompatibleVariant, "mixed element kinds");
    std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, PointConfig>) {
            width = std::max(width, e.dim());
          } else if constexpr (std::is_same_v<T, Polytope>) {
            width = std::max(width, e.dim());
          } else {
            width = std::max(width, e.values().size());
          }
        },
        x);
  }
  std::string out;
  auto cols = [&](const char* prefix) {
    for (std::size_t j = 0; j < width; ++j) out += "," + std::string(prefix) + std::to_string(j);
    out += "\r\n";
  };
  auto values = [&](std::span<const double> v) {
    for (std::size_t j = 0; j < width; ++j) out += "," + (j < v.size() ? format_number(v[j]) : std::string());
    out += "\r\n";
  };
  switch (kind) {
    case ElementKind::Vector: out = "index"; cols("x"); break;
    case ElementKind::Sequence: out = "index"; cols("v"); break;
    case ElementKind::GridFunction: out = "index,lo,hi"; cols("v"); break;
    case ElementKind::PointConfig: out = "index,point,multiplicity"; cols("x"); break;
    case ElementKind::Polytope: out = "index,vertex"; cols("x"); break;
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto id = std::to_string(i);
    std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, GridFunction>) {
            out += id + "," + format_number(e.lo()) + "," + format_number(e.hi());
            values(e.values());
          } else if constexpr (std::is_same_v<T, PointConfig>) {
            if (e.empty()) {
              out += id + ",,0";
              values({});
            }
            for (std::size_t p = 0; p < e.points().size(); ++p) {
              out += id + "," + std::to_string(p) + "," + std::to_string(e.points()[p].multiplicity);
              values(e.points()[p].location);
            }
          } else if constexpr (std::is_same_v<T, Polytope>) {
            for (std::size_t p = 0; p < e.vertices().size(); ++p) {
              out += id + "," + std::to_string(p);
              values(e.vertices()[p]);
            }
          } else {
            out += id;
            values(e.values());
          }
        },
        xs[i]);
  }
  return out;
}

}  // namespace rvlab
