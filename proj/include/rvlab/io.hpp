#pragma once

// JSON forms of elements, tail measures and estimates; CSV traces.
//
// Element JSON: {"kind": k, "payload": p} with
//   vector        p = [x_1, ..., x_d]
//   sequence      p = {"values": [...], "truncation": m}
//   grid_function p = {"lo": a, "hi": b, "values": [...]}
//   point_config  p = [{"location": [...], "multiplicity": c}, ...]
//   polytope      p = [[...], ...]   (vertices)
// Non-finite numbers are written as the strings "inf", "-inf" and "nan".
//
// CSV traces (schema rvlab-trace/1): header level,statistic,value,stderr;
// RFC 4180 quoting, '.' decimal point, shortest round-trip numbers.

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rvlab/core.hpp"
#include "rvlab/estimators.hpp"
#include "rvlab/grammar.hpp"
#include "rvlab/moduli.hpp"
#include "rvlab/tailmeasure.hpp"

namespace rvlab {

using Json = nlohmann::json;

inline constexpr const char* kTraceSchema = "rvlab-trace/1";

/// Finite doubles as numbers, the rest as strings.
inline Json json_number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  fail(ErrorCode::Config, "expected a number, got " + j.dump());
}

inline Json json_numbers(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

inline std::vector<double> numbers_from_json(const Json& j) {
  require(j.is_array(), ErrorCode::Config, "expected an array of numbers, got " + j.dump());
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number_from_json(x));
  return out;
}

inline const char* element_kind_key(ElementKind k) {
  switch (k) {
    case ElementKind::Vector: return "vector";
    case ElementKind::Sequence: return "sequence";
    case ElementKind::GridFunction: return "grid_function";
    case ElementKind::PointConfig: return "point_config";
    case ElementKind::Polytope: return "polytope";
  }
  return "?";
}

inline Json to_json(const Element& x) {
  Json payload;
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Vector>) {
          payload = json_numbers(e.values());
        } else if constexpr (std::is_same_v<T, Sequence>) {
          payload = {{"values", json_numbers(e.values())}, {"truncation", e.truncation()}};
        } else if constexpr (std::is_same_v<T, GridFunction>) {
          payload = {{"lo", e.lo()}, {"hi", e.hi()}, {"values", json_numbers(e.values())}};
        } else if constexpr (std::is_same_v<T, PointConfig>) {
          payload = Json::array();
          for (const auto& p : e.points())
            payload.push_back({{"location", json_numbers(p.location)}, {"multiplicity", p.multiplicity}});
        } else {
          payload = Json::array();
          for (const auto& v : e.vertices()) payload.push_back(json_numbers(v));
        }
      },
      x);
  return {{"kind", element_kind_key(kind_of(x))}, {"payload", std::move(payload)}};
}

inline Element element_from_json(const Json& j) {
  require(j.is_object() && j.contains("kind") && j.contains("payload"), ErrorCode::Config,
          "element needs kind and payload");
  const auto kind = j.at("kind").get<std::string>();
  const auto& p = j.at("payload");
  if (kind == "vector") return Vector(numbers_from_json(p));
  if (kind == "sequence") return Sequence(numbers_from_json(p.at("values")));
  if (kind == "grid_function")
    return GridFunction(number_from_json(p.at("lo")), number_from_json(p.at("hi")), numbers_from_json(p.at("values")));
  if (kind == "point_config") {
    std::vector<WeightedPoint> pts;
    for (const auto& q : p) pts.push_back({numbers_from_json(q.at("location")), q.at("multiplicity").get<std::size_t>()});
    return PointConfig(std::move(pts));
  }
  if (kind == "polytope") {
    std::vector<std::vector<double>> vs;
    for (const auto& v : p) vs.push_back(numbers_from_json(v));
    return Polytope(std::move(vs));
  }
  fail(ErrorCode::Config, "unknown element kind '" + kind + "'");
}

inline Json to_json(const SpectralMeasure& s) {
  Json atoms = Json::array();
  for (const auto& a : s.atoms()) atoms.push_back({{"location", to_json(a.location)}, {"weight", a.weight}});
  return {{"reference", s.reference().describe()}, {"atoms", std::move(atoms)}};
}

inline Json to_json(const TailMeasure& mu) {
  return {{"alpha", mu.alpha()}, {"scaling", describe(mu.scaling())}, {"spectral", to_json(mu.spectral())}};
}

inline TailMeasure tail_measure_from_json(const Json& j) {
  const auto& s = j.at("spectral");
  std::vector<Atom> atoms;
  for (const auto& a : s.at("atoms")) atoms.push_back({element_from_json(a.at("location")), number_from_json(a.at("weight"))});
  return TailMeasure(number_from_json(j.at("alpha")),
                     SpectralMeasure(std::move(atoms), parse_modulus(s.at("reference").get<std::string>())),
                     parse_scaling(j.at("scaling").get<std::string>()));
}

inline Json to_json(const HillEstimate& h) {
  return {{"alpha_hat", json_number(h.alpha_hat)},
          {"stderr", json_number(h.std_error)},
          {"threshold", json_number(h.threshold)},
          {"k", h.k}};
}

inline Json to_json(const EstimatorReport& r) {
  Json j = {{"alpha_hat", json_number(r.alpha_hat)},
            {"alpha_stderr", json_number(r.alpha_stderr)},
            {"threshold_used", json_number(r.threshold_used)},
            {"n_exceedances", r.n_exceedances},
            {"seed", r.seed},
            {"n", r.n}};
  Json diag = Json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = json_number(v);
  j["diagnostics"] = std::move(diag);
  if (r.spectral_atoms) j["spectral_atoms"] = to_json(*r.spectral_atoms);
  return j;
}

/// One verdict of a verifier: estimate vs target within tolerance.
struct Verdict {
  std::string claim;
  double estimate = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline Json to_json(const Verdict& v) {
  return {{"claim", v.claim},
          {"estimate", json_number(v.estimate)},
          {"target", json_number(v.target)},
          {"tolerance", json_number(v.tolerance)},
          {"pass", v.pass}};
}

/// |estimate - target| <= z * stderr.
inline Verdict z_verdict(std::string claim, double estimate, double target, double stderr_, double z = 4.0) {
  return {std::move(claim), estimate, target, z * stderr_, std::abs(estimate - target) <= z * stderr_};
}

struct TraceRow {
  std::string level;
  std::string statistic;
  double value = 0.0;
  double std_error = std::numeric_limits<double>::quiet_NaN();
};

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_number(double x) { return std::isnan(x) ? "" : format_number(x); }

inline std::string to_csv(const std::vector<TraceRow>& rows) {
  std::string out = "level,statistic,value,stderr\r\n";
  for (const auto& r : rows)
    out += csv_field(r.level) + "," + csv_field(r.statistic) + "," + csv_number(r.value) + "," +
           csv_number(r.std_error) + "\r\n";
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::Config, "cannot write " + path);
  out << text;
  require(static_cast<bool>(out), ErrorCode::Config, "write failed for " + path);
}

}  // namespace rvlab
