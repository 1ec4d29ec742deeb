#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>
#include <numbers>
#include <string>
#include <vector>

#include "tfaccel/cli/config.hpp"
#include "tfaccel/cli/sweep.hpp"

namespace tfaccel::cli {

/// One branch of a figure preset: a complete run plus its output stem.
struct FigureBranch {
  std::string stem;
  RunConfig config;
};

inline std::string gap_label(double omega) {
  if (omega == 2 * std::numbers::pi) return "2pi";
  std::string s = format_double(omega);
  for (auto& ch : s) {
    if (ch == '.') ch = 'p';
  }
  return s;
}

/// Presets for figures 1 to 5. Quadrature settings, worker count and output
/// format come from `base`; physics parameters are fixed by the preset.
inline std::vector<FigureBranch> figure_branches(int id, const RunConfig& base) {
  if (id < 1 || id > 5) throw ConfigError({"figure: id must be in 1..5"});
  RunConfig c = base;
  c.detector = DetectorParams{};
  c.detector.coupling = 1.0;
  c.detector.sigma = 0.4;
  c.detector.field_mass = 1.0;
  c.sweep = default_accel_sweep();
  c.treatment = FieldTreatment::CoLocated;

  std::vector<double> gaps{0.5, 5.0};
  switch (id) {
    case 1:
      c.atoms = 2;
      c.observables = {"amplitudes", "concurrence", "squeezing"};
      break;
    case 2:
      c.atoms = 100;
      c.observables = {"amplitudes", "squeezing"};
      break;
    case 3:
      c.detector.accel = 10.0;
      c.sweep = SweepSpec{};
      c.sweep.parameter = SweepParameter::Atoms;
      for (int n = 2; n <= 40; n += 2) c.sweep.values.push_back(n);
      c.observables = {"amplitudes", "squeezing"};
      break;
    case 4:
      c.atoms = 100;
      c.observables = {"amplitudes", "sensitivity"};
      break;
    case 5:
      c.detector.sigma = 30.0;
      c.atoms = 10000;
      c.observables = {"amplitudes", "sensitivity"};
      gaps = {2 * std::numbers::pi};
      break;
  }

  std::vector<FigureBranch> out;
  for (double g : gaps) {
    RunConfig b = c;
    b.detector.gap = g;
    out.push_back({"fig" + std::to_string(id) + "_omega_" + gap_label(g), b});
  }
  return out;
}

/// Statistics the fifth preset reports next to its data.
struct ScaleReport {
  double min_series = 0.0;
  double heisenberg_term = 0.0;
  bool above_heisenberg = false;
  bool order_1e6_present = false;
};

/// The Heisenberg term 1 / (2 j (j + 1)) bounds the series estimate from
/// below. "Order 1e-6" means a value in [1e-7, 1e-5).
inline ScaleReport scale_report(const std::vector<ResultRow>& rows, int atoms) {
  ScaleReport r;
  const double j = atoms / 2.0;
  r.heisenberg_term = 1.0 / (2.0 * j * (j + 1.0));
  r.min_series = std::numeric_limits<double>::infinity();
  r.above_heisenberg = true;
  for (const auto& row : rows) {
    if (!row.dtheta_sq_eq24) continue;
    const double v = *row.dtheta_sq_eq24;
    r.min_series = std::min(r.min_series, v);
    r.above_heisenberg = r.above_heisenberg && v >= r.heisenberg_term;
    if (v >= 1e-7 && v < 1e-5) r.order_1e6_present = true;
  }
  return r;
}

inline Json to_json(const ScaleReport& r) {
  return {{"min_dtheta_sq_eq24", r.min_series},
          {"heisenberg_term", r.heisenberg_term},
          {"all_above_heisenberg_term", r.above_heisenberg},
          {"order_1e-6_present", r.order_1e6_present}};
}

struct FigureOutput {
  std::string stem;
  std::filesystem::path data;
  SweepResult result;
  std::optional<ScaleReport> scale;
};

/// Runs every branch of a preset and writes `<dir>/<stem>.<ext>` plus the
/// sidecar manifest for each.
inline std::vector<FigureOutput> run_figure(int id, const RunConfig& base, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<FigureOutput> out;
  for (auto& br : figure_branches(id, base)) {
    const auto path = dir / (br.stem + (br.config.output.format == "json" ? ".json" : ".csv"));
    br.config.output.path = path.string();
    FigureOutput fo{br.stem, path, run_sweep(br.config), std::nullopt};
    Json extra = {{"figure", id}};
    if (id == 5) {
      fo.scale = scale_report(fo.result.rows, br.config.atoms);
      extra["scale_report"] = to_json(*fo.scale);
    }
    std::ostringstream unused;
    write_outputs(br.config, fo.result, unused, extra);
    out.push_back(std::move(fo));
  }
  return out;
}

}  // namespace tfaccel::cli
