#pragma once

// Ramsey interferometry with J_z^2 detection. After the rotation
// exp(-i theta J_y) the phase is read from <J_z^2>, and error propagation
// gives
//
//   (dtheta)^2 = [dJz2^2 cot^2 + dJx2^2 tan^2 + V_xz] / [4 (<J_x^2> - <J_z^2>)^2]
//
// where dJz2, dJx2 are standard deviations of J_z^2, J_x^2 in the input
// state and V_xz = <(JxJz + JzJx)^2> + <Jz^2 Jx^2 + Jx^2 Jz^2> - 2<Jz^2><Jx^2>.

#include <cmath>
#include <numbers>
#include <optional>

#include "tfaccel/errors.hpp"
#include "tfaccel/twin_fock.hpp"

namespace tfaccel {

struct InterferometerInput {
  SpinMoments moments;
  int atoms = 2;

  void validate() const {
    if (!(moments.jx2_mean > moments.jz2_mean)) {
      throw DomainError("interferometer: <J_x^2> must exceed <J_z^2>");
    }
    if (!(moments.djz2 >= 0) || !(moments.djx2 >= 0) || !std::isfinite(moments.v_xz)) {
      throw DomainError("interferometer: invalid moment bundle");
    }
  }
};

struct PhaseSensitivity {
  double theta_opt = 0.0;
  double dtheta_sq_opt = 0.0;
  std::optional<double> dtheta_sq_series;
};

/// <J_z^2> after the rotation.
inline double rotated_jz2(const InterferometerInput& in, double theta) {
  in.validate();
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return in.moments.jz2_mean * c * c + in.moments.jx2_mean * s * s;
}

inline double sensitivity_at(const InterferometerInput& in, double theta) {
  in.validate();
  constexpr double half_pi = 0.5 * std::numbers::pi;
  if (!(theta >= 0 && theta <= half_pi)) throw DomainError("sensitivity_at: theta outside [0, pi/2]");
  const auto& mo = in.moments;
  const double gap = mo.jx2_mean - mo.jz2_mean;
  double num = mo.v_xz;
  if (mo.djz2 != 0.0) {
    if (theta == 0.0) throw DomainError("sensitivity_at: cot(theta) diverges at theta = 0");
    const double cot = std::cos(theta) / std::sin(theta);
    num += mo.djz2 * mo.djz2 * cot * cot;
  }
  if (mo.djx2 != 0.0) {
    if (theta == half_pi) throw DomainError("sensitivity_at: tan(theta) diverges at theta = pi/2");
    const double tan = std::tan(theta);
    num += mo.djx2 * mo.djx2 * tan * tan;
  }
  return num / (4.0 * gap * gap);
}

/// tan^2 theta_p = dJz2 / dJx2; 0 when Delta(J_z^2) vanishes.
inline double optimal_theta(const InterferometerInput& in) {
  in.validate();
  if (in.moments.djz2 == 0.0) return 0.0;
  if (!(in.moments.djx2 > 0)) throw DomainError("optimal_theta: Delta(J_x^2) must be > 0");
  return std::atan(std::sqrt(in.moments.djz2 / in.moments.djx2));
}

inline PhaseSensitivity optimal_sensitivity(const InterferometerInput& in) {
  in.validate();
  const auto& mo = in.moments;
  const double gap = mo.jx2_mean - mo.jz2_mean;
  PhaseSensitivity out;
  out.theta_opt = mo.djx2 > 0 ? optimal_theta(in) : 0.0;
  out.dtheta_sq_opt = (2.0 * mo.djz2 * mo.djx2 + mo.v_xz) / (4.0 * gap * gap);
  return out;
}

/// Exact moments of the Dicke state |j, m>.
inline SpinMoments dicke_moments(double j, double m) {
  if (!(j > 0) || std::abs(m) > j) throw DomainError("dicke_moments: need |m| <= j");
  // a = <J_- J_+>, b = <J_+ J_->, evaluated at m and at its neighbours.
  auto a = [j](double q) { return (j - q) * (j + q + 1); };
  auto b = [j](double q) { return (j + q) * (j - q + 1); };
  const double c = j * (j + 1);
  const double jx2 = 0.5 * (c - m * m);
  const double s = a(m) + b(m);
  const double jx4 = (s * s + a(m) * a(m + 1) + b(m) * b(m - 1)) / 16.0;
  SpinMoments out;
  out.jz_mean = m;
  out.jz2_mean = m * m;
  out.jz4_mean = m * m * m * m;
  out.jx2_mean = jx2;
  out.djx2 = std::sqrt(std::max(0.0, jx4 - jx2 * jx2));
  out.v_xz = 0.5 * (4 * m * m + 1) * (c - m * m) - 2 * m * m;
  out.j2_mean = c;
  return out;
}

/// Optimal (dtheta)^2 for |j, m>; reached at theta = 0.
inline double dicke_sensitivity(double j, double m) {
  if (!(j > 0) || std::abs(m) > j) throw DomainError("dicke_sensitivity: need |m| <= j");
  const double c = j * (j + 1);
  const double den = c - 3 * m * m;
  if (den == 0.0) throw DomainError("dicke_sensitivity: j(j+1) = 3 m^2");
  return ((4 * m * m + 1) * (c - m * m) - 4 * m * m) / (2 * den * den);
}

namespace detail {
// Sum over m != 0 of w_m (4 m^2 + 1), normalized weights.
inline double excited_weight_sum(const DickeDistribution& dist) {
  long double s = 0;
  for (int m = -dist.j(); m <= dist.j(); ++m) {
    if (m != 0) s += static_cast<long double>(dist.weight(m)) * (4.0L * m * m + 1);
  }
  return static_cast<double>(s);
}
}  // namespace detail

/// Moments of the accelerated twin-Fock state: the J_z family from the
/// weights, the J_x family from the leading-order forms in B_0 = sqrt(w_0/Z):
/// <J_x^2> = c B_0^2 / 2, Delta(J_x^2) = c B_0 / (2 sqrt 2),
/// V_xz = (c / 2)[1 + sum_{m != 0} w_m (4 m^2 + 1)], c = j(j+1).
inline SpinMoments accelerated_moments(const DickeDistribution& dist) {
  SpinMoments mo = jz_moments(dist);
  const double c = mo.j2_mean;
  const double b0_sq = dist.weight(0);
  const double b0 = std::sqrt(b0_sq);
  mo.jx2_mean = 0.5 * c * b0_sq;
  mo.djx2 = c * b0 / (2.0 * std::numbers::sqrt2);
  mo.v_xz = 0.5 * c * (1.0 + detail::excited_weight_sum(dist));
  return mo;
}

/// Both estimates for the accelerated twin-Fock state.
struct AcceleratedSensitivity {
  /// Optimal-phase formula on accelerated_moments; empty when
  /// <J_x^2> <= <J_z^2> there and the formula has no finite value.
  std::optional<PhaseSensitivity> optimal;
  /// Expansion that keeps only the leading denominator:
  /// [1 + sqrt2 B_0 Delta(J_z^2) + sum_{m != 0} w_m (4 m^2 + 1)] / (2 j(j+1)).
  double series = 0.0;
};

inline AcceleratedSensitivity accelerated_sensitivity(const DickeDistribution& dist) {
  const SpinMoments mo = accelerated_moments(dist);
  const double c = mo.j2_mean;
  const double b0 = std::sqrt(dist.weight(0));
  AcceleratedSensitivity out;
  out.series = (1.0 + std::numbers::sqrt2 * b0 * mo.djz2 + detail::excited_weight_sum(dist)) / (2.0 * c);
  if (mo.jx2_mean > mo.jz2_mean) {
    auto ps = optimal_sensitivity(InterferometerInput{mo, dist.atoms()});
    ps.dtheta_sq_series = out.series;
    out.optimal = ps;
  }
  return out;
}

}  // namespace tfaccel
