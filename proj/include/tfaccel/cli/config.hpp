#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfaccel/detector.hpp"
#include "tfaccel/errors.hpp"
#include "tfaccel/numerics/quadrature.hpp"
#include "tfaccel/two_atom.hpp"

namespace tfaccel::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

/// Bad configuration; carries every violation found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : "; ") + x;
    return s;
  }
  std::vector<std::string> violations_;
};

enum class SweepParameter { Accel, Omega, Sigma, Atoms };

inline const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::Accel: return "accel";
    case SweepParameter::Omega: return "omega";
    case SweepParameter::Sigma: return "sigma";
    case SweepParameter::Atoms: return "N";
  }
  return "?";
}

struct SweepSpec {
  SweepParameter parameter = SweepParameter::Accel;
  /// Either an explicit list or a generated range.
  std::vector<double> values;
  std::optional<double> from;
  std::optional<double> to;
  std::optional<int> steps;
  std::string spacing = "log";  // "log" or "linear", for generated ranges

  /// The list of sweep values, generating the range if needed.
  std::vector<double> resolved() const {
    if (!values.empty() || !from) return values;
    const int n = steps.value_or(0);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(n, 0)));
    for (int i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      if (spacing == "log") {
        out.push_back(std::exp(std::log(*from) + t * (std::log(*to) - std::log(*from))));
      } else {
        out.push_back(*from + t * (*to - *from));
      }
    }
    if (n > 1) {
      out.front() = *from;
      out.back() = *to;
    }
    return out;
  }
};

inline const std::vector<std::string>& all_observables() {
  static const std::vector<std::string> names{"amplitudes", "concurrence", "squeezing", "witness", "sensitivity"};
  return names;
}

struct OutputSpec {
  std::string path;  // empty: stdout
  std::string format = "csv";
};

struct RunConfig {
  DetectorParams detector;
  QuadratureConfig quadrature;
  SweepSpec sweep;
  std::vector<std::string> observables = all_observables();
  int atoms = 2;
  FieldTreatment treatment = FieldTreatment::CoLocated;
  OutputSpec output;
  int workers = 1;

  bool wants(const std::string& name) const {
    return std::find(observables.begin(), observables.end(), name) != observables.end();
  }
};

/// Log-spaced acceleration grid used by the figure presets.
inline SweepSpec default_accel_sweep() {
  SweepSpec s;
  s.parameter = SweepParameter::Accel;
  s.from = 0.02;
  s.to = 10.0;
  s.steps = 101;
  s.spacing = "log";
  return s;
}

/// Every rule a RunConfig must satisfy; empty when valid.
inline std::vector<std::string> violations(const RunConfig& c) {
  std::vector<std::string> v;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) v.push_back(msg);
  };
  const auto& d = c.detector;
  check(d.coupling >= 0 && std::isfinite(d.coupling), "detector.coupling: must be finite and >= 0");
  check(d.sigma > 0 && std::isfinite(d.sigma), "detector.sigma: must be finite and > 0");
  check(d.gap > 0 && std::isfinite(d.gap), "detector.gap: must be finite and > 0");
  check(d.accel >= 0 && std::isfinite(d.accel), "detector.accel: must be finite and >= 0");
  check(d.field_mass > 0 && std::isfinite(d.field_mass), "detector.field_mass: must be finite and > 0");

  const auto& q = c.quadrature;
  check(q.rel_tol > 0, "quadrature.rel_tol: must be > 0");
  check(q.abs_tol >= 0, "quadrature.abs_tol: must be >= 0");
  check(q.max_subdivisions >= 1, "quadrature.max_subdivisions: must be >= 1");
  check(q.tau_span_sigmas >= 1, "quadrature.tau_span_sigmas: must be >= 1");
  check(!q.k_max || *q.k_max > 0, "quadrature.k_max: must be > 0 or null");
  check(q.k_tail_tol > 0, "quadrature.k_tail_tol: must be > 0");

  check(c.atoms >= 2 && c.atoms % 2 == 0, "N: must be an even integer >= 2");
  check(c.workers >= 1, "workers: must be >= 1");
  check(c.output.format == "csv" || c.output.format == "json", "output.format: must be csv or json");
  for (const auto& o : c.observables) {
    const auto& all = all_observables();
    check(std::find(all.begin(), all.end(), o) != all.end(), "observables: unknown observable '" + o + "'");
  }

  const auto& s = c.sweep;
  if (!s.values.empty() && (s.from || s.to || s.steps)) {
    v.push_back("sweep: give either values or from/to/steps, not both");
  }
  if (s.values.empty()) {
    check(s.from && s.to && s.steps, "sweep: values or from/to/steps required");
    check(s.spacing == "log" || s.spacing == "linear", "sweep.spacing: must be log or linear");
    if (s.steps) check(*s.steps >= 1, "sweep.steps: must be >= 1");
    if (s.from && s.to && s.steps && *s.steps > 1) check(*s.to > *s.from, "sweep: to must exceed from");
    if (s.from && s.spacing == "log") check(*s.from > 0, "sweep.from: must be > 0 for log spacing");
  }
  const auto vals = s.resolved();
  check(!vals.empty(), "sweep: list must be nonempty");
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (!std::isfinite(vals[i])) {
      v.push_back("sweep: values must be finite");
      break;
    }
    if (i > 0 && !(vals[i] > vals[i - 1])) {
      v.push_back("sweep: values must be strictly increasing");
      break;
    }
  }
  for (double x : vals) {
    bool ok = true;
    switch (s.parameter) {
      case SweepParameter::Accel: ok = x >= 0; break;
      case SweepParameter::Omega: ok = x > 0; break;
      case SweepParameter::Sigma: ok = x > 0; break;
      case SweepParameter::Atoms: ok = x >= 2 && std::floor(x) == x && static_cast<long long>(x) % 2 == 0; break;
    }
    if (!ok) {
      v.push_back(std::string("sweep: value out of range for ") + to_string(s.parameter));
      break;
    }
  }
  return v;
}

namespace detail {

inline void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where,
                           std::vector<std::string>& v) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) v.push_back(where + (where.empty() ? "" : ".") + key + ": unknown key");
  }
}

template <class T>
void read(const Json& obj, const char* key, T& dst, const std::string& where, std::vector<std::string>& v) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const std::exception&) {
    v.push_back(where + "." + key + ": wrong type");
  }
}

}  // namespace detail

/// Builds a RunConfig from JSON on top of `base`. Throws ConfigError.
inline RunConfig from_json(const Json& j, RunConfig base = {}) {
  std::vector<std::string> v;
  if (!j.is_object()) throw ConfigError({"config: top level must be an object"});
  detail::reject_unknown(j, {"detector", "quadrature", "sweep", "observables", "N", "treatment", "output", "workers"}, "",
                         v);
  RunConfig c = std::move(base);

  if (j.contains("detector")) {
    const auto& d = j["detector"];
    if (!d.is_object()) {
      v.push_back("detector: must be an object");
    } else {
      detail::reject_unknown(d, {"coupling", "sigma", "gap", "accel", "field_mass"}, "detector", v);
      detail::read(d, "coupling", c.detector.coupling, "detector", v);
      detail::read(d, "sigma", c.detector.sigma, "detector", v);
      detail::read(d, "gap", c.detector.gap, "detector", v);
      detail::read(d, "accel", c.detector.accel, "detector", v);
      detail::read(d, "field_mass", c.detector.field_mass, "detector", v);
    }
  }
  if (j.contains("quadrature")) {
    const auto& q = j["quadrature"];
    if (!q.is_object()) {
      v.push_back("quadrature: must be an object");
    } else {
      detail::reject_unknown(q, {"rel_tol", "abs_tol", "max_subdivisions", "tau_span_sigmas", "k_max", "k_tail_tol"},
                             "quadrature", v);
      detail::read(q, "rel_tol", c.quadrature.rel_tol, "quadrature", v);
      detail::read(q, "abs_tol", c.quadrature.abs_tol, "quadrature", v);
      detail::read(q, "max_subdivisions", c.quadrature.max_subdivisions, "quadrature", v);
      detail::read(q, "tau_span_sigmas", c.quadrature.tau_span_sigmas, "quadrature", v);
      detail::read(q, "k_tail_tol", c.quadrature.k_tail_tol, "quadrature", v);
      if (q.contains("k_max")) {
        if (q["k_max"].is_null()) {
          c.quadrature.k_max.reset();
        } else if (q["k_max"].is_number()) {
          c.quadrature.k_max = q["k_max"].get<double>();
        } else {
          v.push_back("quadrature.k_max: must be a number or null");
        }
      }
    }
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    if (!s.is_object()) {
      v.push_back("sweep: must be an object");
    } else {
      detail::reject_unknown(s, {"parameter", "values", "from", "to", "steps", "spacing"}, "sweep", v);
      SweepSpec sw;
      std::string param = "accel";
      detail::read(s, "parameter", param, "sweep", v);
      if (param == "accel") sw.parameter = SweepParameter::Accel;
      else if (param == "omega") sw.parameter = SweepParameter::Omega;
      else if (param == "sigma") sw.parameter = SweepParameter::Sigma;
      else if (param == "N") sw.parameter = SweepParameter::Atoms;
      else v.push_back("sweep.parameter: must be one of accel, omega, sigma, N");
      detail::read(s, "values", sw.values, "sweep", v);
      if (s.contains("from")) sw.from = s["from"].is_number() ? std::optional(s["from"].get<double>()) : std::nullopt;
      if (s.contains("to")) sw.to = s["to"].is_number() ? std::optional(s["to"].get<double>()) : std::nullopt;
      if (s.contains("steps")) {
        sw.steps = s["steps"].is_number_integer() ? std::optional(s["steps"].get<int>()) : std::nullopt;
        if (!sw.steps) v.push_back("sweep.steps: must be an integer");
      }
      detail::read(s, "spacing", sw.spacing, "sweep", v);
      c.sweep = sw;
    }
  }
  detail::read(j, "observables", c.observables, "config", v);
  if (j.contains("N")) {
    if (j["N"].is_number_integer()) c.atoms = j["N"].get<int>();
    else v.push_back("N: must be an integer");
  }
  if (j.contains("treatment")) {
    std::string t;
    detail::read(j, "treatment", t, "config", v);
    if (t == "colocated") c.treatment = FieldTreatment::CoLocated;
    else if (t == "distant") c.treatment = FieldTreatment::Distant;
    else v.push_back("treatment: must be colocated or distant");
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    if (!o.is_object()) {
      v.push_back("output: must be an object");
    } else {
      detail::reject_unknown(o, {"path", "format"}, "output", v);
      detail::read(o, "path", c.output.path, "output", v);
      detail::read(o, "format", c.output.format, "output", v);
    }
  }
  if (j.contains("workers")) {
    if (j["workers"].is_number_integer()) c.workers = j["workers"].get<int>();
    else v.push_back("workers: must be an integer");
  }

  if (!v.empty()) throw ConfigError(v);
  auto rest = violations(c);
  if (!rest.empty()) throw ConfigError(rest);
  return c;
}

/// Fully resolved configuration; feeding it back to from_json reproduces c.
inline Json to_json(const RunConfig& c) {
  Json j;
  j["detector"] = {{"coupling", c.detector.coupling},
                   {"sigma", c.detector.sigma},
                   {"gap", c.detector.gap},
                   {"accel", c.detector.accel},
                   {"field_mass", c.detector.field_mass}};
  j["quadrature"] = {{"rel_tol", c.quadrature.rel_tol},
                     {"abs_tol", c.quadrature.abs_tol},
                     {"max_subdivisions", c.quadrature.max_subdivisions},
                     {"tau_span_sigmas", c.quadrature.tau_span_sigmas},
                     {"k_max", c.quadrature.k_max ? Json(*c.quadrature.k_max) : Json(nullptr)},
                     {"k_tail_tol", c.quadrature.k_tail_tol}};
  j["sweep"] = {{"parameter", to_string(c.sweep.parameter)}, {"values", c.sweep.resolved()}};
  j["observables"] = c.observables;
  j["N"] = c.atoms;
  j["treatment"] = to_string(c.treatment);
  j["output"] = {{"path", c.output.path}, {"format", c.output.format}};
  j["workers"] = c.workers;
  return j;
}

}  // namespace tfaccel::cli
