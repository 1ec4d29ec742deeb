#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "tfaccel/cli/config.hpp"
#include "tfaccel/metrology.hpp"
#include "tfaccel/twin_fock.hpp"
#include "tfaccel/two_atom.hpp"

namespace tfaccel::cli {

struct ResultRow {
  double sweep_value = 0.0;
  double eta0_sq = 0.0;
  double eta1_sq = 0.0;
  std::optional<double> concurrence;
  std::optional<double> xi_e_sq;
  std::optional<bool> witness_violated;
  std::optional<double> dtheta_sq_eq20;
  std::optional<double> dtheta_sq_eq24;
  double quad_err = 0.0;
};

inline const std::vector<std::string>& row_columns() {
  static const std::vector<std::string> cols{"sweep_value",     "eta0_sq",        "eta1_sq",
                                             "concurrence",     "xi_e_sq",        "witness_violated",
                                             "dtheta_sq_eq20", "dtheta_sq_eq24", "quad_err"};
  return cols;
}

struct SweepResult {
  std::vector<ResultRow> rows;
  double wall_seconds = 0.0;
};

/// Thrown when one sweep point fails to converge; names the point.
class SweepPointFailure : public ConvergenceFailure {
 public:
  SweepPointFailure(double value, const std::string& what)
      : ConvergenceFailure("sweep value " + format_value(value) + ": " + what) {}

 private:
  static std::string format_value(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }
};

/// Everything computed at one point, from amplitudes that are given.
inline ResultRow observables_row(double sweep_value, const TransitionAmplitudes& amps, int atoms,
                                 const RunConfig& c) {
  ResultRow r;
  r.sweep_value = sweep_value;
  r.eta0_sq = amps.eta0_sq;
  r.eta1_sq = amps.eta1_sq;
  r.quad_err = amps.err;
  if (atoms == 2 && c.wants("concurrence")) {
    r.concurrence = concurrence(evolve_pair(BipartiteInit{}, amps, c.treatment));
  }
  if (!c.wants("squeezing") && !c.wants("witness") && !c.wants("sensitivity")) return r;

  const auto dist = dicke_distribution(atoms, amps);
  const auto mo = jz_moments(dist);
  if (c.wants("squeezing")) r.xi_e_sq = tfaccel::detail::squeezing_from(mo, atoms);
  if (c.wants("witness")) r.witness_violated = witness_violated(mo, atoms);
  if (c.wants("sensitivity")) {
    const auto s = accelerated_sensitivity(dist);
    r.dtheta_sq_eq24 = s.series;
    if (s.optimal) r.dtheta_sq_eq20 = s.optimal->dtheta_sq_opt;
  }
  return r;
}

/// Evaluates every sweep point on `c.workers` threads. Rows come back in
/// sweep order whatever the scheduling. A point that fails aborts the run;
/// when several fail, the earliest in sweep order is reported.
inline SweepResult run_sweep(const RunConfig& c) {
  if (auto v = violations(c); !v.empty()) throw ConfigError(v);
  const auto t0 = std::chrono::steady_clock::now();
  const auto values = c.sweep.resolved();
  const std::size_t n = values.size();

  std::vector<ResultRow> rows(n);
  std::vector<std::exception_ptr> errors(n);

  // Sweeping N leaves the detector fixed: one amplitude computation.
  std::optional<TransitionAmplitudes> shared;
  if (c.sweep.parameter == SweepParameter::Atoms) shared = transition_amplitudes(c.detector, c.quadrature);

  auto evaluate = [&](std::size_t i) {
    const double x = values[i];
    DetectorParams p = c.detector;
    int atoms = c.atoms;
    switch (c.sweep.parameter) {
      case SweepParameter::Accel: p.accel = x; break;
      case SweepParameter::Omega: p.gap = x; break;
      case SweepParameter::Sigma: p.sigma = x; break;
      case SweepParameter::Atoms: atoms = static_cast<int>(x); break;
    }
    const auto amps = shared ? *shared : transition_amplitudes(p, c.quadrature);
    rows[i] = observables_row(x, amps, atoms, c);
  };

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        evaluate(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed.store(true);
      }
    }
  };
  const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(c.workers), std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const ConvergenceFailure& e) {
      throw SweepPointFailure(values[i], e.what());
    }
  }
  SweepResult out;
  out.rows = std::move(rows);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  const auto& cols = row_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  auto opt = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string(); };
  for (const auto& r : rows) {
    os << format_double(r.sweep_value) << ',' << format_double(r.eta0_sq) << ',' << format_double(r.eta1_sq) << ','
       << opt(r.concurrence) << ',' << opt(r.xi_e_sq) << ','
       << (r.witness_violated ? (*r.witness_violated ? "true" : "false") : "") << ',' << opt(r.dtheta_sq_eq20)
       << ',' << opt(r.dtheta_sq_eq24) << ',' << format_double(r.quad_err) << '\n';
  }
}

inline Json row_to_json(const ResultRow& r) {
  auto opt = [](const auto& x) { return x ? Json(*x) : Json(nullptr); };
  Json j;
  j["sweep_value"] = r.sweep_value;
  j["eta0_sq"] = r.eta0_sq;
  j["eta1_sq"] = r.eta1_sq;
  j["concurrence"] = opt(r.concurrence);
  j["xi_e_sq"] = opt(r.xi_e_sq);
  j["witness_violated"] = opt(r.witness_violated);
  j["dtheta_sq_eq20"] = opt(r.dtheta_sq_eq20);
  j["dtheta_sq_eq24"] = opt(r.dtheta_sq_eq24);
  j["quad_err"] = r.quad_err;
  return j;
}

inline Json make_manifest(const RunConfig& c, const SweepResult& result, const std::string& data_path) {
  Json m;
  m["tool"] = "tfaccel";
  m["version"] = kVersion;
  m["config"] = to_json(c);
  if (c.sweep.from) {
    m["sweep_generation"] = {{"from", *c.sweep.from},
                             {"to", *c.sweep.to},
                             {"steps", *c.sweep.steps},
                             {"spacing", c.sweep.spacing}};
  }
  m["pair_init"] = {{"alpha", {1.0 / std::numbers::sqrt2, 0.0}}, {"beta", {1.0 / std::numbers::sqrt2, 0.0}}};
  m["rows"] = result.rows.size();
  m["data"] = data_path;
  m["wall_time_s"] = result.wall_seconds;
  return m;
}

/// Writes the rows in the configured format plus `<path>.manifest.json`.
/// With an empty path the data goes to `os` and no sidecar is written.
inline void write_outputs(const RunConfig& c, const SweepResult& result, std::ostream& os,
                          const Json& extra_manifest = Json::object()) {
  Json manifest = make_manifest(c, result, c.output.path);
  for (const auto& [k, val] : extra_manifest.items()) manifest[k] = val;

  auto emit = [&](std::ostream& out) {
    if (c.output.format == "json") {
      Json doc;
      doc["manifest"] = manifest;
      doc["rows"] = Json::array();
      for (const auto& r : result.rows) doc["rows"].push_back(row_to_json(r));
      out << doc.dump(2) << '\n';
    } else {
      write_csv(out, result.rows);
    }
  };
  if (c.output.path.empty()) {
    emit(os);
    return;
  }
  {
    std::ofstream f(c.output.path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + c.output.path);
    emit(f);
  }
  std::ofstream mf(c.output.path + ".manifest.json", std::ios::binary);
  if (!mf) throw std::runtime_error("cannot open " + c.output.path + ".manifest.json");
  mf << manifest.dump(2) << '\n';
}

}  // namespace tfaccel::cli
