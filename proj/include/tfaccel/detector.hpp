#pragma once

// Single uniformly accelerated two-level atom coupled to a massive scalar
// field in 1+1 dimensions: trajectory, Gaussian switching, first-order
// response integrals and the excitation/de-excitation weights.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "tfaccel/errors.hpp"
#include "tfaccel/numerics/quadrature.hpp"

namespace tfaccel {

/// Physical inputs for one accelerated atom, natural units (hbar = c = 1).
/// The monopole matrix element is 1; its size is carried by `coupling`.
struct DetectorParams {
  double coupling = 1.0;    // lambda
  double sigma = 0.4;       // switching time scale
  double gap = 0.5;         // Omega
  double accel = 1.0;       // proper acceleration a
  double field_mass = 1.0;  // m

  void validate() const {
    auto fail = [](const char* what) { throw DomainError(what); };
    if (!(coupling >= 0)) fail("detector: coupling must be >= 0");
    if (!(sigma > 0)) fail("detector: sigma must be > 0");
    if (!(gap > 0)) fail("detector: gap must be > 0");
    if (!(accel >= 0)) fail("detector: accel must be >= 0");
    if (!(field_mass > 0)) fail("detector: field_mass must be > 0");
    if (!std::isfinite(coupling) || !std::isfinite(sigma) || !std::isfinite(gap) ||
        !std::isfinite(accel) || !std::isfinite(field_mass)) {
      fail("detector: parameters must be finite");
    }
  }
};

struct TrajectoryPoint {
  double t = 0.0;
  double x = 0.0;
};

/// |eta_0|^2, |eta_1|^2 and the normalizations D_i = (1 + |eta_i|^2)^(-1/2).
struct TransitionAmplitudes {
  double eta0_sq = 0.0;
  double eta1_sq = 0.0;
  double d0 = 1.0;
  double d1 = 1.0;
  double err = 0.0;  // absolute quadrature error bound on either eta^2

  static TransitionAmplitudes from_weights(double eta0_sq, double eta1_sq, double err = 0.0) {
    if (!(eta0_sq >= 0) || !(eta1_sq >= 0)) throw DomainError("amplitudes: eta^2 must be >= 0");
    return {eta0_sq, eta1_sq, 1.0 / std::sqrt(1.0 + eta0_sq), 1.0 / std::sqrt(1.0 + eta1_sq), err};
  }
};

enum class TransitionSign { Excitation = +1, Deexcitation = -1 };

enum class Regime { Unruh, AntiUnruh, Mixed };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Unruh: return "unruh";
    case Regime::AntiUnruh: return "anti-unruh";
    case Regime::Mixed: return "mixed";
  }
  return "?";
}

/// Hyperbolic worldline through the origin; a = 0 gives the inertial line.
inline TrajectoryPoint trajectory(double accel, double tau) {
  if (!(accel >= 0)) throw DomainError("trajectory: accel must be >= 0");
  if (accel == 0.0) return {tau, 0.0};
  const double h = std::sinh(0.5 * accel * tau);
  return {std::sinh(accel * tau) / accel, 2.0 * h * h / accel};
}

inline double switching(double tau, double sigma) {
  if (!(sigma > 0)) throw DomainError("switching: sigma must be > 0");
  const double r = tau / sigma;
  return std::exp(-0.5 * r * r);
}

inline double mode_frequency(double k, double mass) {
  if (!(mass > 0)) throw DomainError("mode_frequency: mass must be > 0");
  return std::hypot(k, mass);
}

namespace detail {

/// Value together with an upper bound on its absolute error, integrated
/// side by side so that inner quadrature errors propagate to the outer sum.
struct Bounded {
  double value = 0.0;
  double bound = 0.0;

  friend Bounded operator+(Bounded x, Bounded y) { return {x.value + y.value, x.bound + y.bound}; }
  friend Bounded operator-(Bounded x, Bounded y) { return {x.value - y.value, x.bound - y.bound}; }
  friend Bounded operator*(double s, Bounded x) { return {s * x.value, s * x.bound}; }
};
inline double magnitude(const Bounded& x) { return std::abs(x.value); }

/// Integrand of the response integral for a single field mode, written in
/// terms of the mode rapidity u = asinh(k/m):
///
///   exp(-tau^2 / 2 sigma^2 + i s Omega tau + i (omega t(tau) - k x(tau)))
///
/// with omega t - k x = (2m/a) sinh(a tau/2) cosh(a tau/2 - u).
///
/// The integrand is entire in tau, so it is integrated along
/// z(tau) = tau + i delta(tau) with delta(tau) in [0, pi/(2a)] the minimizer
/// of
///
///   G(delta) = kappa delta^2 / 2 - s Omega delta - sin(a delta) H(tau) / a,
///
/// H = m cosh(a tau - u). For kappa = 1/sigma^2 this is the valley floor of
/// |f|; any kappa >= 1/sigma^2 still keeps |f| below the real-axis Gaussian
/// while turning the double-exponential oscillation into decay. kappa is
/// raised to about a^2 max(Omega, m) so that delta(tau) leaves zero
/// linearly rather than like a square root.
class ModeIntegrand {
 public:
  ModeIntegrand(double signed_gap, double rapidity, double accel, double sigma, double mass)
      : w_(signed_gap), u_(rapidity), a_(accel), sigma_(sigma), m_(mass) {
    inv_s2_ = 1.0 / (sigma * sigma);
    kappa_ = std::max(inv_s2_, 0.25 * accel * accel * std::max(std::abs(signed_gap), mass));
    cap_ = accel > 0 ? 0.5 * std::numbers::pi / accel : std::numeric_limits<double>::infinity();
    shifted_ = accel > 0 && (mass / accel) * std::sinh(std::abs(rapidity)) > 1e4;
  }

  /// Constant phase dropped by the shifted representation of the phase.
  double dropped_phase() const { return shifted_ ? (m_ / a_) * std::sinh(u_) : 0.0; }

  /// m cosh(a tau - u) = omega cosh(a tau) - k sinh(a tau): rate of the
  /// field phase along the real axis.
  double phase_rate(double tau) const { return m_ * std::cosh(a_ * tau - u_); }

  struct Shift {
    double delta;
    double slope;
  };

  /// delta(tau) and d delta / d tau for the integration path.
  Shift shift(double tau) const {
    const double h = phase_rate(tau);
    if (a_ == 0.0) return {std::max(0.0, sigma_ * sigma_ * (w_ + h)), 0.0};
    auto dg = [&](double d) { return d * kappa_ - w_ - std::cos(a_ * d) * h; };
    if (dg(0.0) >= 0.0) return {0.0, 0.0};
    if (dg(cap_) <= 0.0) return {cap_, 0.0};

    double lo = 0.0;
    double hi = cap_;
    double d = std::min(cap_, std::max(0.0, (w_ + h) / kappa_));
    if (!(d > lo && d < hi)) d = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
      const double g1 = dg(d);
      if (g1 > 0) hi = d; else lo = d;
      const double g2 = kappa_ + a_ * std::sin(a_ * d) * h;
      double next = d - g1 / g2;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double step = std::abs(next - d);
      d = next;
      if (step <= 4e-16 * std::max(d, 1e-300) || hi - lo <= 4e-16 * hi) break;
    }
    const double g2 = kappa_ + a_ * std::sin(a_ * d) * h;
    const double dh = a_ * m_ * std::sinh(a_ * tau - u_);
    return {d, std::cos(a_ * d) * dh / g2};
  }

  /// Field phase omega t(z) - k x(z) at complex proper time z (minus
  /// dropped_phase() when the shifted representation is active).
  std::complex<double> field_phase(std::complex<double> z) const {
    if (a_ == 0.0) return m_ * std::cosh(u_) * z;
    if (shifted_) return (m_ / a_) * std::sinh(a_ * z - u_);
    return (2.0 * m_ / a_) * std::sinh(0.5 * a_ * z) * std::cosh(0.5 * a_ * z - u_);
  }

  std::complex<double> on_path(double tau, Shift s) const {
    const std::complex<double> z(tau, s.delta);
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> g = -0.5 * z * z * inv_s2_ + i * (w_ * z + field_phase(z));
    if (g.real() < -745.0) return 0.0;
    return std::exp(g) * std::complex<double>(1.0, s.slope);
  }

  std::complex<double> operator()(double tau) const { return on_path(tau, shift(tau)); }

  /// Proper-time interval outside which |f| < exp(-cut) on the path,
  /// clipped to [-span, span]. Empty (lo >= hi) when the whole mode is
  /// negligible.
  std::pair<double, double> window(double span, double cut) const {
    if (a_ == 0.0) return {-span, span};
    const double c = cap_ * cap_ * 0.5 * kappa_ - w_ * cap_;
    const double r = a_ * (cut + c) / m_;
    if (r <= 1.0) return {0.0, 0.0};
    const double reach = std::acosh(r);
    return {std::max(-span, (u_ - reach) / a_), std::min(span, (u_ + reach) / a_)};
  }

  /// Proper times where delta(tau) leaves the delta = 0 clamp. The path
  /// slope jumps there, so they are used as quadrature breakpoints.
  std::vector<double> kinks() const {
    if (a_ == 0.0 || -w_ < m_) return {};
    const double r = std::acosh(-w_ / m_);
    return {(u_ - r) / a_, (u_ + r) / a_};
  }

  double accel() const { return a_; }
  double sigma() const { return sigma_; }

 private:
  double w_, u_, a_, sigma_, m_;
  double inv_s2_ = 0.0;
  double kappa_ = 0.0;
  double cap_ = 0.0;
  bool shifted_ = false;
};

inline constexpr double kWindowCut = 50.0;

/// Integral of the mode integrand over the truncated proper-time window.
/// Returns J = I * sqrt(4 pi omega), with the constant phase of the shifted
/// representation removed.
inline QuadratureResult<std::complex<double>> mode_integral(const ModeIntegrand& f,
                                                            const QuadratureConfig& cfg,
                                                            const Tolerance& tol) {
  const double span = cfg.tau_span_sigmas * f.sigma();
  const auto [lo, hi] = f.window(span, kWindowCut);
  if (!(lo < hi)) return {};

  double piece = 0.5 * f.sigma();
  if (f.accel() > 0) piece = std::min(piece, 0.5 / f.accel());
  const int n = std::clamp(static_cast<int>(std::ceil((hi - lo) / piece)), 2, 256);
  std::vector<double> breaks(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) breaks[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / n;
  breaks.back() = hi;
  for (double t : f.kinks()) {
    if (t > lo && t < hi) breaks.push_back(t);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(), [](double x, double y) { return !(x < y); }),
               breaks.end());
  return integrate_adaptive(f, breaks, tol);
}

inline Tolerance inner_tolerance(const QuadratureConfig& cfg) {
  return {0.1 * cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions};
}

inline double signed_gap(const DetectorParams& p, TransitionSign s) {
  return s == TransitionSign::Excitation ? p.gap : -p.gap;
}

/// Integral over rapidity of |J_s(u)|^2 on u >= 0, with error bound.
/// eta_s^2 = lambda^2 / (4 pi) * 2 * this.
inline QuadratureResult<double> rapidity_integral(const DetectorParams& p, TransitionSign sign,
                                                  const QuadratureConfig& cfg) {
  const double w = signed_gap(p, sign);
  const Tolerance inner = inner_tolerance(cfg);
  auto integrand = [&](double u) -> Bounded {
    const ModeIntegrand f(w, u, p.accel, p.sigma, p.field_mass);
    const auto r = mode_integral(f, cfg, inner);
    const double mag = std::abs(r.value);
    return {mag * mag, 2.0 * mag * r.error + r.error * r.error};
  };

  // Initial partition of [0, u_end]: uniform pieces, refined around the
  // inertial resonance omega = Omega of the de-excitation channel.
  auto partition = [&](double u_end) {
    std::vector<double> b;
    constexpr int kPieces = 8;
    for (int i = 0; i <= kPieces; ++i) b.push_back(u_end * i / kPieces);
    const double m = p.field_mass;
    if (sign == TransitionSign::Deexcitation && p.gap > m) {
      const double ures = std::acosh(p.gap / m);
      const double kres = std::sqrt(p.gap * p.gap - m * m);
      const double du = 1.0 / (p.sigma * kres);
      for (int j = -8; j <= 8; ++j) {
        const double x = ures + j * du;
        if (x > 0 && x < u_end) b.push_back(x);
      }
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end(), [](double x, double y) { return !(x < y); }), b.end());
    return b;
  };

  QuadratureResult<double> total;
  if (cfg.k_max) {
    const auto b = partition(std::asinh(*cfg.k_max / p.field_mass));
    const auto r = integrate_adaptive(integrand, b, Tolerance{cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions});
    total.value = r.value.value;
    total.error = r.error + r.value.bound;
    total.subdivisions = r.subdivisions;
    return total;
  }

  const double k0 = 8.0 * std::max({p.gap, p.field_mass, 1.0 / p.sigma});
  double u_lo = std::asinh(k0 / p.field_mass);
  {
    const auto b = partition(u_lo);
    const auto r = integrate_adaptive(integrand, b, Tolerance{cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions});
    total.value = r.value.value;
    total.error = r.error + r.value.bound;
    total.subdivisions = r.subdivisions;
  }
  constexpr int kMaxDoublings = 64;
  for (int n = 0;; ++n) {
    if (n == kMaxDoublings) {
      throw ConvergenceFailure("transition_amplitudes: momentum tail did not converge");
    }
    const double u_hi = 2.0 * u_lo;
    const double slices = std::max(1.0, std::ceil((u_hi - u_lo) / 8.0));
    const int count = static_cast<int>(std::min(slices, 512.0));
    std::vector<double> b(static_cast<std::size_t>(count) + 1);
    for (int i = 0; i <= count; ++i) b[static_cast<std::size_t>(i)] = u_lo + (u_hi - u_lo) * i / count;
    b.back() = u_hi;
    const Tolerance outer{cfg.rel_tol, std::max(cfg.abs_tol, cfg.rel_tol * total.value),
                          cfg.max_subdivisions};
    const auto r = integrate_adaptive(integrand, b, outer);
    total.value += r.value.value;
    total.error += r.error + r.value.bound;
    total.subdivisions += r.subdivisions;
    u_lo = u_hi;
    if (r.value.value <= cfg.k_tail_tol * total.value) {
      // The next doubling would add at most about as much again.
      total.error += r.value.value;
      return total;
    }
  }
}

}  // namespace detail

/// I_{+-,k}: first-order amplitude for emitting a quantum of momentum k
/// while the atom is excited (+) or de-excited (-).
inline std::complex<double> response_integral(const DetectorParams& p, double k, TransitionSign sign,
                                              const QuadratureConfig& cfg) {
  p.validate();
  cfg.validate();
  const double omega = mode_frequency(k, p.field_mass);
  const detail::ModeIntegrand f(detail::signed_gap(p, sign), std::asinh(k / p.field_mass), p.accel,
                                p.sigma, p.field_mass);
  const auto r = detail::mode_integral(f, cfg, detail::inner_tolerance(cfg));
  const std::complex<double> phase = std::polar(1.0, f.dropped_phase());
  return r.value * phase / std::sqrt(4.0 * std::numbers::pi * omega);
}

/// |eta_0|^2 = lambda^2 int dk |I_{+,k}|^2 and |eta_1|^2 = lambda^2 int dk |I_{-,k}|^2.
///
/// The momentum integral is taken in rapidity (dk / omega = du), where the
/// 1/omega of the mode normalization cancels; |I_{s,k}| is even in k.
inline TransitionAmplitudes transition_amplitudes(const DetectorParams& p, const QuadratureConfig& cfg) {
  p.validate();
  cfg.validate();
  if (p.coupling == 0.0) return TransitionAmplitudes::from_weights(0.0, 0.0);

  const double scale = p.coupling * p.coupling / (2.0 * std::numbers::pi);
  const auto up = detail::rapidity_integral(p, TransitionSign::Excitation, cfg);
  const auto down = detail::rapidity_integral(p, TransitionSign::Deexcitation, cfg);
  return TransitionAmplitudes::from_weights(scale * up.value, scale * down.value,
                                            scale * std::max(up.error, down.error));
}

/// Unruh if eta_0^2 rises strictly along the grid, anti-Unruh if it falls
/// strictly, mixed otherwise.
inline Regime classify_regime(const DetectorParams& p, std::span<const double> accel_grid,
                              const QuadratureConfig& cfg) {
  if (accel_grid.size() < 3) throw DomainError("classify_regime: need at least 3 accelerations");
  for (std::size_t i = 0; i < accel_grid.size(); ++i) {
    if (!(accel_grid[i] > 0)) throw DomainError("classify_regime: accelerations must be > 0");
    if (i > 0 && !(accel_grid[i] > accel_grid[i - 1])) {
      throw DomainError("classify_regime: accelerations must increase strictly");
    }
  }
  std::vector<double> eta;
  for (double a : accel_grid) {
    DetectorParams q = p;
    q.accel = a;
    eta.push_back(transition_amplitudes(q, cfg).eta0_sq);
  }
  bool up = true;
  bool down = true;
  for (std::size_t i = 1; i < eta.size(); ++i) {
    up = up && eta[i] > eta[i - 1];
    down = down && eta[i] < eta[i - 1];
  }
  if (down) return Regime::AntiUnruh;
  if (up) return Regime::Unruh;
  return Regime::Mixed;
}

/// Unruh temperature hbar a / (2 pi c k_B) in kelvin for a in m/s^2.
inline double unruh_temperature_si(double accel_si) {
  if (!(accel_si >= 0)) throw DomainError("unruh_temperature_si: acceleration must be >= 0");
  constexpr double hbar = 1.054571817e-34;  // J s
  constexpr double c = 299792458.0;         // m / s
  constexpr double k_b = 1.380649e-23;      // J / K
  return hbar * accel_si / (2.0 * std::numbers::pi * c * k_b);
}

}  // namespace tfaccel
