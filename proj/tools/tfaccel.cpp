#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tfaccel/cli/config.hpp"
#include "tfaccel/cli/figures.hpp"
#include "tfaccel/cli/sweep.hpp"

namespace {

using namespace tfaccel;
using namespace tfaccel::cli;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitConvergence = 3;

struct Overrides {
  std::string config_path;
  std::optional<double> omega, sigma, lambda, mass, accel;
  std::optional<int> atoms;
  std::optional<std::string> treatment;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<int> workers;
  std::optional<double> rel_tol, tau_span, k_tail_tol;
  std::optional<std::string> sweep_param;
  std::vector<double> values;
  std::optional<double> from, to;
  std::optional<int> steps;
  std::optional<std::string> spacing;
};

void add_common(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config_path, "JSON run configuration");
  app.add_option("--omega", o.omega, "Detector gap");
  app.add_option("--sigma", o.sigma, "Switching width");
  app.add_option("--lambda", o.lambda, "Coupling strength");
  app.add_option("--mass", o.mass, "Field mass");
  app.add_option("--accel", o.accel, "Proper acceleration");
  app.add_option("--N", o.atoms, "Even atom number");
  app.add_option("--treatment", o.treatment, "colocated or distant");
  app.add_option("--out", o.out, "Output file (figure: output directory)");
  app.add_option("--format", o.format, "csv or json");
  app.add_option("--workers", o.workers, "Worker threads");
  app.add_option("--quad-rel-tol", o.rel_tol, "Quadrature relative tolerance");
  app.add_option("--tau-span", o.tau_span, "Proper-time half-span in units of sigma");
  app.add_option("--k-tail-tol", o.k_tail_tol, "Relative tolerance for the momentum tail");
}

void add_sweep_flags(CLI::App& app, Overrides& o) {
  app.add_option("--sweep-param", o.sweep_param, "accel, omega, sigma or N");
  app.add_option("--values", o.values, "Explicit sweep values")->delimiter(',');
  app.add_option("--from", o.from, "Range start");
  app.add_option("--to", o.to, "Range end");
  app.add_option("--steps", o.steps, "Number of range points");
  app.add_option("--spacing", o.spacing, "log or linear");
}

// Config file first, then flags on top of it; the result is validated.
RunConfig resolve(const Overrides& o) {
  Json j = Json::object();
  if (!o.config_path.empty()) {
    std::ifstream f(o.config_path);
    if (!f) throw ConfigError({"config: cannot open " + o.config_path});
    try {
      j = Json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError({std::string("config: ") + e.what()});
    }
  }
  auto set = [&](const char* group, const char* key, const auto& v) {
    if (v) j[group][key] = *v;
  };
  set("detector", "gap", o.omega);
  set("detector", "sigma", o.sigma);
  set("detector", "coupling", o.lambda);
  set("detector", "field_mass", o.mass);
  set("detector", "accel", o.accel);
  set("quadrature", "rel_tol", o.rel_tol);
  set("quadrature", "tau_span_sigmas", o.tau_span);
  set("quadrature", "k_tail_tol", o.k_tail_tol);
  set("output", "path", o.out);
  set("output", "format", o.format);
  if (o.atoms) j["N"] = *o.atoms;
  if (o.treatment) j["treatment"] = *o.treatment;
  if (o.workers) j["workers"] = *o.workers;

  const bool range_flags = o.from || o.to || o.steps || o.spacing;
  if (o.sweep_param || !o.values.empty() || range_flags) {
    Json s = j.contains("sweep") ? j["sweep"] : Json::object();
    if (o.sweep_param) s["parameter"] = *o.sweep_param;
    if (!o.values.empty()) {
      s.erase("from");
      s.erase("to");
      s.erase("steps");
      s["values"] = o.values;
    }
    if (range_flags) s.erase("values");
    if (o.from) s["from"] = *o.from;
    if (o.to) s["to"] = *o.to;
    if (o.steps) s["steps"] = *o.steps;
    if (o.spacing) s["spacing"] = *o.spacing;
    j["sweep"] = s;
  }

  RunConfig base;
  base.sweep = default_accel_sweep();
  return from_json(j, base);
}

void report_violations(const ConfigError& e) {
  std::cerr << "configuration error:\n";
  for (const auto& v : e.violations()) std::cerr << "  " << v << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twin-Fock states under uniform acceleration"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Overrides o;
  auto* amplitudes = app.add_subcommand("amplitudes", "Transition probabilities at one acceleration");
  add_common(*amplitudes, o);
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep with all requested observables");
  add_common(*sweep, o);
  add_sweep_flags(*sweep, o);
  int figure_id = 0;
  auto* figure = app.add_subcommand("figure", "Run a figure preset (1-5)");
  figure->add_option("id", figure_id, "Preset number")->required();
  add_common(*figure, o);
  auto* validate = app.add_subcommand("validate", "Check a configuration and print it resolved");
  add_common(*validate, o);
  add_sweep_flags(*validate, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*validate) {
      const RunConfig c = resolve(o);
      std::cout << to_json(c).dump(2) << '\n';
      return kExitOk;
    }
    if (*amplitudes) {
      RunConfig c = resolve(o);
      c.sweep = SweepSpec{};
      c.sweep.parameter = SweepParameter::Accel;
      c.sweep.values = {c.detector.accel};
      c.observables = {"amplitudes"};
      const auto r = run_sweep(c);
      write_outputs(c, r, std::cout);
      return kExitOk;
    }
    if (*sweep) {
      const RunConfig c = resolve(o);
      const auto r = run_sweep(c);
      write_outputs(c, r, std::cout);
      return kExitOk;
    }
    if (*figure) {
      const std::string dir = o.out.value_or("figures");
      Overrides fo = o;
      fo.out.reset();
      const RunConfig base = resolve(fo);
      for (const auto& out : run_figure(figure_id, base, dir)) {
        std::cerr << "wrote " << out.data.string() << " (" << out.result.rows.size() << " rows, "
                  << format_double(out.result.wall_seconds) << " s)\n";
        if (out.scale) {
          std::cerr << "  min dtheta_sq_eq24 = " << format_double(out.scale->min_series)
                    << ", Heisenberg term = " << format_double(out.scale->heisenberg_term)
                    << ", all above = " << (out.scale->above_heisenberg ? "yes" : "no")
                    << ", values of order 1e-6 = " << (out.scale->order_1e6_present ? "yes" : "no") << '\n';
        }
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    report_violations(e);
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConvergenceFailure& e) {
    std::cerr << "convergence failure: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
