#pragma once

// Globally adaptive Gauss-Kronrod (G10/K21) integration for scalar,
// complex or other vector-space valued integrands on a finite interval.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <type_traits>
#include <vector>

#include "tfaccel/errors.hpp"

namespace tfaccel {

struct QuadratureConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-15;
  int max_subdivisions = 4000;
  /// Half-width of the proper-time window in units of the switching time.
  double tau_span_sigmas = 8.0;
  /// Momentum cutoff; empty means grow the cutoff until the tail is negligible.
  std::optional<double> k_max;
  double k_tail_tol = 1e-8;

  void validate() const {
    auto fail = [](const char* what) { throw DomainError(what); };
    if (!(rel_tol > 0)) fail("quadrature: rel_tol must be > 0");
    if (!(abs_tol >= 0)) fail("quadrature: abs_tol must be >= 0");
    if (max_subdivisions < 1) fail("quadrature: max_subdivisions must be >= 1");
    if (!(tau_span_sigmas >= 1)) fail("quadrature: tau_span_sigmas must be >= 1");
    if (k_max && !(*k_max > 0)) fail("quadrature: k_max must be > 0");
    if (!(k_tail_tol > 0)) fail("quadrature: k_tail_tol must be > 0");
  }
};

template <class T>
struct QuadratureResult {
  T value{};
  double error = 0.0;
  int subdivisions = 0;
};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& z) { return std::abs(z); }

/// Accuracy request for the adaptive driver.
struct Tolerance {
  double rel = 1e-8;
  double abs = 0.0;
  int max_subdivisions = 4000;
};

namespace detail {

// Kronrod abscissae; odd entries (1, 3, ..., 9) are the 10-point Gauss nodes.
inline constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class T>
struct Segment {
  double lo;
  double hi;
  T value;
  double error;
  double resabs;
};

template <class T, class F>
Segment<T> gauss_kronrod_21(F& f, double lo, double hi) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();

  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  std::array<T, 21> fv{};
  fv[0] = f(centre);
  for (int i = 0; i < 10; ++i) {
    const double dx = half * kKronrodNodes[static_cast<std::size_t>(i)];
    fv[1 + 2 * i] = f(centre - dx);
    fv[2 + 2 * i] = f(centre + dx);
  }

  T kronrod = kKronrodWeights[10] * fv[0];
  T gauss{};
  double resabs = kKronrodWeights[10] * magnitude(fv[0]);
  for (int i = 0; i < 10; ++i) {
    const auto w = kKronrodWeights[static_cast<std::size_t>(i)];
    const T pair = fv[1 + 2 * i] + fv[2 + 2 * i];
    kronrod = kronrod + w * pair;
    resabs += w * (magnitude(fv[1 + 2 * i]) + magnitude(fv[2 + 2 * i]));
    if (i % 2 == 1) gauss = gauss + kGaussWeights[static_cast<std::size_t>(i / 2)] * pair;
  }

  const T mean = 0.5 * kronrod;
  double resasc = kKronrodWeights[10] * magnitude(fv[0] - mean);
  for (int i = 0; i < 10; ++i) {
    resasc += kKronrodWeights[static_cast<std::size_t>(i)] *
              (magnitude(fv[1 + 2 * i] - mean) + magnitude(fv[2 + 2 * i] - mean));
  }

  const double ahalf = std::abs(half);
  double err = magnitude(kronrod - gauss) * ahalf;
  resasc *= ahalf;
  resabs *= ahalf;
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > tiny / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);

  return {lo, hi, half * kronrod, err, resabs};
}

}  // namespace detail

/// Globally adaptive integration over [breaks.front(), breaks.back()] with
/// the given interior breakpoints as the initial partition. The segment with
/// the largest error estimate is bisected until the summed estimate meets
/// max(tol.abs, tol.rel * |value|). Segments whose estimate sits at the
/// round-off floor are not refined further; in that case the returned error
/// may exceed the request but is reported honestly.
template <class F>
auto integrate_adaptive(F&& f, std::span<const double> breaks, const Tolerance& tol)
    -> QuadratureResult<std::decay_t<std::invoke_result_t<F&, double>>> {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  using Seg = detail::Segment<T>;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  if (breaks.size() < 2) throw DomainError("integrate: need at least two breakpoints");
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (!(breaks[i - 1] < breaks[i])) throw DomainError("integrate: breakpoints must increase");
  }

  auto by_error = [](const Seg& x, const Seg& y) { return x.error < y.error; };
  std::vector<Seg> heap;
  heap.reserve(breaks.size() + 64);
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    heap.push_back(detail::gauss_kronrod_21<T>(f, breaks[i - 1], breaks[i]));
  }
  std::make_heap(heap.begin(), heap.end(), by_error);

  T value{};
  double err = 0.0;
  double floor = 0.0;
  for (const auto& s : heap) {
    value = value + s.value;
    err += s.error;
    floor += 50.0 * eps * s.resabs;
  }
  // Segments too narrow to split or sitting at round-off are parked here.
  std::vector<Seg> frozen;
  double frozen_err = 0.0;

  auto finish = [&](int subdivisions) {
    std::vector<Seg> segs = heap;
    segs.insert(segs.end(), frozen.begin(), frozen.end());
    std::sort(segs.begin(), segs.end(), [](const Seg& x, const Seg& y) { return x.lo < y.lo; });
    QuadratureResult<T> out;
    for (const auto& s : segs) {
      out.value = out.value + s.value;
      out.error += s.error;
    }
    out.subdivisions = subdivisions;
    return out;
  };

  int subdivisions = 0;
  for (;;) {
    const double total_err = err + frozen_err;
    const double target = std::max(tol.abs, tol.rel * magnitude(value));
    if (total_err <= target || heap.empty() || err <= 2.0 * floor) return finish(subdivisions);
    if (subdivisions >= tol.max_subdivisions) {
      std::ostringstream msg;
      msg.precision(3);
      msg << "integrate: " << tol.max_subdivisions << " subdivisions exhausted on ["
          << breaks.front() << ", " << breaks.back() << "], error " << total_err
          << " > target " << target;
      throw ConvergenceFailure(msg.str());
    }

    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Seg worst = heap.back();
    heap.pop_back();
    err -= worst.error;
    floor -= 50.0 * eps * worst.resabs;
    const double mid = 0.5 * (worst.lo + worst.hi);
    const bool splittable =
        mid > worst.lo && mid < worst.hi &&
        (worst.hi - worst.lo) > 1e3 * eps * std::max(std::abs(worst.lo), std::abs(worst.hi));
    if (!splittable || worst.error <= 50.0 * eps * worst.resabs) {
      frozen.push_back(worst);
      frozen_err += worst.error;
      continue;
    }
    ++subdivisions;
    value = value - worst.value;
    for (const auto& part : {detail::gauss_kronrod_21<T>(f, worst.lo, mid),
                             detail::gauss_kronrod_21<T>(f, mid, worst.hi)}) {
      value = value + part.value;
      err += part.error;
      floor += 50.0 * eps * part.resabs;
      heap.push_back(part);
      std::push_heap(heap.begin(), heap.end(), by_error);
    }
    if (err < 0.0) err = 0.0;
    if (floor < 0.0) floor = 0.0;
  }
}

/// Integral of a complex-valued f over [lo, hi] with the tolerances from cfg.
template <class F>
QuadratureResult<std::complex<double>> integrate_complex(F&& f, double lo, double hi,
                                                         const QuadratureConfig& cfg) {
  if (!(lo < hi)) throw DomainError("integrate_complex: require lo < hi");
  cfg.validate();
  const std::array<double, 2> breaks{lo, hi};
  auto g = [&f](double x) -> std::complex<double> { return f(x); };
  return integrate_adaptive(g, breaks, Tolerance{cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions});
}

}  // namespace tfaccel
