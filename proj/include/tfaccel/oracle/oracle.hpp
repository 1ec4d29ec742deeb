#pragma once

// Brute-force reference computations for the test suite. Nothing here calls
// into the log-domain, quadrature or spectrum code of the library: weights
// are summed term by term in extended precision, the two-atom state is built
// from an explicit atom-field amplitude table, and spin moments come from
// explicit Dicke-basis matrices.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <string>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "tfaccel/detector.hpp"
#include "tfaccel/errors.hpp"
#include "tfaccel/twin_fock.hpp"
#include "tfaccel/two_atom.hpp"

namespace tfaccel::oracle {

using Big50 = boost::multiprecision::cpp_bin_float_50;
using Big200 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<200>>;

struct OracleReport {
  std::string quantity;
  double closed_form = 0.0;
  double brute_force = 0.0;
  double rel_gap = 0.0;
};

inline OracleReport compare(std::string quantity, double closed_form, double brute_force) {
  const double gap = std::abs(closed_form - brute_force) / std::max(std::abs(brute_force), 1e-300);
  return {std::move(quantity), closed_form, brute_force, gap};
}

/// Binomial coefficients C(n, 0..n) by the multiplicative recurrence.
template <class Real>
std::vector<Real> binomial_row(int n) {
  std::vector<Real> row(static_cast<std::size_t>(n) + 1);
  row[0] = 1;
  for (int k = 0; k < n; ++k) row[static_cast<std::size_t>(k) + 1] = row[static_cast<std::size_t>(k)] * (n - k) / (k + 1);
  return row;
}

/// B_0^2 summed directly in the precision of Real.
template <class Real>
Real b0_sq_direct(int n, const TransitionAmplitudes& amps) {
  const int j = n / 2;
  const auto c = binomial_row<Real>(j);
  const Real d = pow(Real(amps.d0) * Real(amps.d1), n);
  const Real x = Real(amps.eta0_sq) * Real(amps.eta1_sq);  // (eta0 eta1)^2
  Real sum = 0;
  Real xk = 1;
  for (int k = 0; k <= j; ++k) {
    const Real& ck = c[static_cast<std::size_t>(k)];
    sum += ck * ck * ck * ck * xk;
    xk *= x;
  }
  return d * sum;
}

/// Unnormalized w_m for m = -N/2..N/2, summed term by term in 50 digits.
inline std::map<int, double> enumerate_b_weights(int n, const TransitionAmplitudes& amps) {
  if (n < 2 || n > 40 || n % 2 != 0) throw DomainError("enumerate_b_weights: N must be even, 2..40");
  const int j = n / 2;
  const auto c = binomial_row<Big50>(j);
  const Big50 d = pow(Big50(amps.d0) * Big50(amps.d1), n);
  const Big50 e0 = sqrt(Big50(amps.eta0_sq));
  const Big50 e1 = sqrt(Big50(amps.eta1_sq));
  const Big50 p = e0 * e1;

  std::map<int, double> out;
  out[0] = static_cast<double>(b0_sq_direct<Big50>(n, amps));
  for (int am = 1; am <= j; ++am) {
    Big50 s = 0;
    Big50 pk = 1;
    for (int k = 0; k + am <= j; ++k) {
      s += c[static_cast<std::size_t>(k)] * c[static_cast<std::size_t>(k + am)] * pk;
      pk *= p;
    }
    const Big50 core = d * s * s;
    out[am] = static_cast<double>(core * pow(e0, 2 * am));
    out[-am] = static_cast<double>(core * pow(e1, 2 * am));
  }
  return out;
}

struct PairOracleResult {
  Eigen::Matrix4cd rho;        // normalized
  double jz_unnormalized = 0;  // Tr(rho_unnormalized J_z)
  double jz_mean = 0;          // on the normalized state
  double concurrence = 0;
};

/// The two-atom state written out as an explicit atom x field amplitude
/// table, reduced by summing over the field index.
inline PairOracleResult two_atom_first_principles(const BipartiteInit& init, const TransitionAmplitudes& amps,
                                                  FieldTreatment treatment) {
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> a = init.alpha;
  const std::complex<double> b = init.beta;
  const double d = amps.d0 * amps.d1;
  const double e0 = std::sqrt(amps.eta0_sq);
  const double e1 = std::sqrt(amps.eta1_sq);

  // Field labels. Distant: vacuum, photon at B, photon at A, one each.
  // CoLocated: the two single-photon labels are the same state.
  const int vac = 0;
  const int at_b = 1;
  const int at_a = treatment == FieldTreatment::Distant ? 2 : 1;
  const int both = treatment == FieldTreatment::Distant ? 3 : 2;
  const int n_field = both + 1;

  // psi[atom][field], atom index 2 * A + B with g = 0, e = 1.
  std::vector<std::vector<std::complex<double>>> psi(4, std::vector<std::complex<double>>(static_cast<std::size_t>(n_field)));
  auto add = [&](int atom_a, int atom_b, int field, std::complex<double> amp) {
    psi[static_cast<std::size_t>(2 * atom_a + atom_b)][static_cast<std::size_t>(field)] += amp;
  };
  const int g = 0;
  const int e = 1;
  add(g, e, vac, d * a);
  add(e, g, vac, d * b);
  add(g, g, at_b, -i * d * a * e1);
  add(e, e, at_b, -i * d * b * e0);
  add(g, g, at_a, -i * d * b * e1);
  add(e, e, at_a, -i * d * a * e0);
  add(e, g, both, d * e0 * e1 * a);
  add(g, e, both, d * e0 * e1 * b);

  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      for (int f = 0; f < n_field; ++f) {
        rho(r, c) += psi[static_cast<std::size_t>(r)][static_cast<std::size_t>(f)] *
                     std::conj(psi[static_cast<std::size_t>(c)][static_cast<std::size_t>(f)]);
      }
    }
  }
  PairOracleResult out;
  out.jz_unnormalized = rho(3, 3).real() - rho(0, 0).real();
  rho /= rho.trace().real();
  out.rho = rho;
  out.jz_mean = rho(3, 3).real() - rho(0, 0).real();

  // Concurrence from the eigenvalues of rho * rho_tilde.
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  yy(0, 3) = yy(3, 0) = -1.0;
  yy(1, 2) = yy(2, 1) = 1.0;
  const Eigen::Matrix4cd tilde = yy * rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(rho * tilde);
  std::array<double, 4> l{};
  for (int k = 0; k < 4; ++k) l[static_cast<std::size_t>(k)] = std::sqrt(std::max(0.0, es.eigenvalues()(k).real()));
  std::sort(l.begin(), l.end(), std::greater<>());
  out.concurrence = std::max(0.0, l[0] - l[1] - l[2] - l[3]);
  return out;
}

namespace detail {

inline std::vector<double> simpson_weights(int intervals, double h) {
  std::vector<double> w(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) {
    w[static_cast<std::size_t>(i)] = (i == 0 || i == intervals ? 1.0 : (i % 2 ? 4.0 : 2.0)) * h / 3.0;
  }
  return w;
}

}  // namespace detail

/// lambda^2 int dk |I_{s,k}|^2 on a fixed real-axis grid: composite Simpson
/// in tau over |tau| <= span sigma and in k over [-k_max, k_max] (folded to
/// k >= 0). `sign` is +1 for excitation, -1 for de-excitation.
inline double grid_transition_weight(const DetectorParams& p, int sign, int tau_intervals, int k_intervals,
                                     double k_max, double span = 8.0) {
  if (tau_intervals % 2 || k_intervals % 2) throw DomainError("grid_transition_weight: even interval counts");
  const double t_lo = -span * p.sigma;
  const double ht = 2.0 * span * p.sigma / tau_intervals;
  const double hk = k_max / k_intervals;
  const auto wt = detail::simpson_weights(tau_intervals, ht);
  const auto wk = detail::simpson_weights(k_intervals, hk);

  std::vector<double> t(wt.size()), x(wt.size()), env(wt.size());
  for (std::size_t n = 0; n < wt.size(); ++n) {
    const double tau = t_lo + ht * static_cast<double>(n);
    t[n] = p.accel > 0 ? std::sinh(p.accel * tau) / p.accel : tau;
    x[n] = p.accel > 0 ? (std::cosh(p.accel * tau) - 1.0) / p.accel : 0.0;
    env[n] = wt[n] * std::exp(-tau * tau / (2 * p.sigma * p.sigma));
  }
  double total = 0.0;
  for (std::size_t q = 0; q < wk.size(); ++q) {
    const double k = hk * static_cast<double>(q);
    const double omega = std::sqrt(k * k + p.field_mass * p.field_mass);
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < wt.size(); ++n) {
      const double tau = t_lo + ht * static_cast<double>(n);
      acc += env[n] * std::polar(1.0, sign * p.gap * tau + omega * t[n] - k * x[n]);
    }
    total += wk[q] * std::norm(acc) / (4.0 * std::numbers::pi * omega);
  }
  return 2.0 * p.coupling * p.coupling * total;
}

namespace detail {

struct SpinMatrices {
  Eigen::MatrixXcd jz, jx, jy;
};

// Collective spin j = N/2 in the basis m = -j..j (index m + j).
inline SpinMatrices spin_matrices(int n) {
  const int dim = n + 1;
  const double j = 0.5 * n;
  Eigen::MatrixXcd jp = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd jz = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const double m = k - j;
    jz(k, k) = m;
    if (k + 1 < dim) jp(k + 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  const Eigen::MatrixXcd jm = jp.adjoint();
  const std::complex<double> i(0.0, 1.0);
  return {jz, 0.5 * (jp + jm), -0.5 * i * (jp - jm)};
}

inline double expect(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& op) { return (rho * op).trace().real(); }

}  // namespace detail

struct DickeMatrixResult {
  SpinMoments moments;
  double xi_e_sq = 0.0;
};

/// J_z moments and xi_E^2 by traces against the diagonal state built from
/// the normalized weights.
inline DickeMatrixResult dicke_matrix_moments(int n, const DickeDistribution& dist) {
  if (n > 12 || n != dist.atoms()) throw DomainError("dicke_matrix_moments: N must match and be <= 12");
  const auto s = detail::spin_matrices(n);
  const auto w = dist.normalized();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  for (int k = 0; k <= n; ++k) rho(k, k) = w[static_cast<std::size_t>(k)];

  const Eigen::MatrixXcd jz2 = s.jz * s.jz;
  const Eigen::MatrixXcd j2 = s.jx * s.jx + s.jy * s.jy + jz2;
  DickeMatrixResult out;
  auto& mo = out.moments;
  mo.jz_mean = detail::expect(rho, s.jz);
  mo.jz2_mean = detail::expect(rho, jz2);
  mo.jz4_mean = detail::expect(rho, jz2 * jz2);
  mo.jz_var = mo.jz2_mean - mo.jz_mean * mo.jz_mean;
  mo.djz2 = std::sqrt(std::max(0.0, mo.jz4_mean - mo.jz2_mean * mo.jz2_mean));
  mo.j2_mean = detail::expect(rho, j2);
  out.xi_e_sq = ((n - 1) * mo.jz_var + mo.jz2_mean) / (mo.j2_mean - 0.5 * n);
  return out;
}

/// <J_x^2>, Delta(J_x^2) and V_xz of the pure Dicke state |N/2, m> from
/// explicit matrices.
inline SpinMoments dicke_state_matrix_moments(int n, int m) {
  const auto s = detail::spin_matrices(n);
  const int k = m + n / 2;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  rho(k, k) = 1.0;
  const Eigen::MatrixXcd x2 = s.jx * s.jx;
  const Eigen::MatrixXcd z2 = s.jz * s.jz;
  const Eigen::MatrixXcd xz = s.jx * s.jz + s.jz * s.jx;
  SpinMoments mo;
  mo.jz_mean = detail::expect(rho, s.jz);
  mo.jz2_mean = detail::expect(rho, z2);
  mo.jz4_mean = detail::expect(rho, z2 * z2);
  mo.jx2_mean = detail::expect(rho, x2);
  mo.djx2 = std::sqrt(std::max(0.0, detail::expect(rho, x2 * x2) - mo.jx2_mean * mo.jx2_mean));
  mo.djz2 = std::sqrt(std::max(0.0, mo.jz4_mean - mo.jz2_mean * mo.jz2_mean));
  mo.v_xz = detail::expect(rho, xz * xz) + detail::expect(rho, z2 * x2 + x2 * z2) - 2.0 * mo.jz2_mean * mo.jx2_mean;
  mo.j2_mean = detail::expect(rho, x2 + s.jy * s.jy + z2);
  return mo;
}

}  // namespace tfaccel::oracle
