#pragma once

// Twin-Fock state |j, 0> after every atom has passed through the
// acceleration channel. Only the Dicke-diagonal weights are kept:
//
//   w_0 = B_0^2 = sum_k C(j,k)^4 (D0 D1)^N (eta0 eta1)^(2k)
//   w_m = |B_m|^2 = (D0 D1)^N eta^(2|m|) [sum_k C(j,k) C(j,k+|m|) (eta0 eta1)^k]^2
//
// with eta = eta0 for m > 0 and eta1 for m < 0, all in log domain.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "tfaccel/detector.hpp"
#include "tfaccel/errors.hpp"
#include "tfaccel/numerics/log_domain.hpp"

namespace tfaccel {

inline void require_even_atom_count(int n) {
  if (n < 2 || n % 2 != 0) throw DomainError("atom count N must be even and >= 2");
}

/// Weights over m = -N/2 .. N/2 for a fixed even N.
class DickeDistribution {
 public:
  DickeDistribution(int n, std::vector<LogWeight> log_w) : n_(n), log_w_(std::move(log_w)) {
    require_even_atom_count(n);
    if (log_w_.size() != static_cast<std::size_t>(n + 1)) {
      throw DomainError("DickeDistribution: need N + 1 weights");
    }
    std::vector<double> logs;
    logs.reserve(log_w_.size());
    for (const auto& w : log_w_) {
      if (w.sign < 0 && !w.is_zero()) throw DomainError("DickeDistribution: negative weight");
      logs.push_back(w.log_magnitude);
    }
    log_z_ = log_sum_exp(logs);
    if (!std::isfinite(log_z_)) throw InvalidState("DickeDistribution: weights do not normalize");
  }

  int atoms() const { return n_; }
  int j() const { return n_ / 2; }
  double log_z() const { return log_z_; }

  /// Unnormalized weight in log form.
  const LogWeight& log_weight(int m) const { return log_w_.at(index(m)); }

  /// w_m / Z.
  double weight(int m) const {
    const auto& w = log_w_.at(index(m));
    return w.is_zero() ? 0.0 : std::exp(w.log_magnitude - log_z_);
  }

  std::vector<double> normalized() const {
    std::vector<double> out;
    out.reserve(log_w_.size());
    for (int m = -j(); m <= j(); ++m) out.push_back(weight(m));
    return out;
  }

 private:
  std::size_t index(int m) const {
    if (m < -j() || m > j()) throw DomainError("DickeDistribution: |m| > N/2");
    return static_cast<std::size_t>(m + j());
  }

  int n_;
  std::vector<LogWeight> log_w_;
  double log_z_ = kNegInf;
};

/// Collective-spin averages. Fields not produced by a given routine are 0.
struct SpinMoments {
  double jz_mean = 0.0;
  double jz2_mean = 0.0;
  double jz4_mean = 0.0;
  double jz_var = 0.0;
  double djz2 = 0.0;  // standard deviation of the operator J_z^2
  double jx2_mean = 0.0;
  double djx2 = 0.0;  // standard deviation of the operator J_x^2
  double v_xz = 0.0;
  double j2_mean = 0.0;
};

namespace detail {

inline double log_or_neg_inf(double x) { return x > 0 ? std::log(x) : kNegInf; }

// k * ln(x) with the convention 0 * ln(0) = 0.
inline double scaled_log(std::uint64_t k, double log_x) {
  return k == 0 ? 0.0 : static_cast<double>(k) * log_x;
}

inline std::vector<double> log_binomial_row(std::uint64_t n) {
  std::vector<double> row(n + 1);
  for (std::uint64_t r = 0; r <= n; ++r) row[r] = r <= n / 2 ? log_binomial(n, r) : row[n - r];
  return row;
}

struct LogAmplitudeInputs {
  double log_d;        // ln(D0 D1)
  double log_eta01;    // ln(eta0 eta1)
  double log_eta0_sq;  // ln eta0^2
  double log_eta1_sq;  // ln eta1^2
};

inline LogAmplitudeInputs log_inputs(const TransitionAmplitudes& amps) {
  if (!(amps.eta0_sq >= 0) || !(amps.eta1_sq >= 0)) throw DomainError("amplitudes: eta^2 must be >= 0");
  return {std::log(amps.d0) + std::log(amps.d1),
          0.5 * (log_or_neg_inf(amps.eta0_sq) + log_or_neg_inf(amps.eta1_sq)),
          log_or_neg_inf(amps.eta0_sq), log_or_neg_inf(amps.eta1_sq)};
}

inline LogWeight b0_sq_from_row(int n, const std::vector<double>& row, const LogAmplitudeInputs& in) {
  const auto j = static_cast<std::uint64_t>(n / 2);
  std::vector<double> terms(j + 1);
  for (std::uint64_t k = 0; k <= j; ++k) terms[k] = 4.0 * row[k] + scaled_log(2 * k, in.log_eta01);
  return {log_sum_exp_unimodal(terms) + n * in.log_d, 1};
}

inline LogWeight bm_sq_from_row(int n, int m, const std::vector<double>& row, const LogAmplitudeInputs& in) {
  const auto j = static_cast<std::uint64_t>(n / 2);
  const auto am = static_cast<std::uint64_t>(m < 0 ? -m : m);
  const double log_eta_sq = m > 0 ? in.log_eta0_sq : in.log_eta1_sq;
  if (log_eta_sq == kNegInf) return LogWeight::zero();
  std::vector<double> terms(j - am + 1);
  for (std::uint64_t k = 0; k + am <= j; ++k) terms[k] = row[k] + row[k + am] + scaled_log(k, in.log_eta01);
  return {2.0 * log_sum_exp_unimodal(terms) + n * in.log_d + static_cast<double>(am) * log_eta_sq, 1};
}

}  // namespace detail

/// ln B_0^2.
inline LogWeight log_b0_sq(int n, const TransitionAmplitudes& amps) {
  require_even_atom_count(n);
  const auto row = detail::log_binomial_row(static_cast<std::uint64_t>(n / 2));
  return detail::b0_sq_from_row(n, row, detail::log_inputs(amps));
}

/// ln |B_m|^2 for m != 0. The unit-modulus phase of B_m is not tracked.
inline LogWeight log_bm_sq(int n, int m, const TransitionAmplitudes& amps) {
  require_even_atom_count(n);
  if (m == 0) throw DomainError("log_bm_sq: m = 0 is B_0^2");
  if (std::abs(m) > n / 2) throw DomainError("log_bm_sq: |m| > N/2");
  const auto row = detail::log_binomial_row(static_cast<std::uint64_t>(n / 2));
  return detail::bm_sq_from_row(n, m, row, detail::log_inputs(amps));
}

inline DickeDistribution dicke_distribution(int n, const TransitionAmplitudes& amps) {
  require_even_atom_count(n);
  const auto row = detail::log_binomial_row(static_cast<std::uint64_t>(n / 2));
  const auto in = detail::log_inputs(amps);
  const int j = n / 2;
  std::vector<LogWeight> w(static_cast<std::size_t>(n + 1));
  for (int m = -j; m <= j; ++m) {
    w[static_cast<std::size_t>(m + j)] =
        m == 0 ? detail::b0_sq_from_row(n, row, in) : detail::bm_sq_from_row(n, m, row, in);
  }
  return DickeDistribution(n, std::move(w));
}

/// <J_z>, <J_z^2>, <J_z^4>, the two variances and <J^2> from the
/// normalized weights.
inline SpinMoments jz_moments(const DickeDistribution& dist) {
  long double s1 = 0, s2 = 0, s4 = 0;
  const int j = dist.j();
  for (int m = -j; m <= j; ++m) {
    const long double w = dist.weight(m);
    const long double mm = static_cast<long double>(m) * m;
    s1 += w * m;
    s2 += w * mm;
    s4 += w * mm * mm;
  }
  SpinMoments out;
  out.jz_mean = static_cast<double>(s1);
  out.jz2_mean = static_cast<double>(s2);
  out.jz4_mean = static_cast<double>(s4);
  out.jz_var = std::max(0.0, static_cast<double>(s2 - s1 * s1));
  out.djz2 = std::sqrt(std::max(0.0, static_cast<double>(s4 - s2 * s2)));
  out.j2_mean = static_cast<double>(j) * (j + 1);
  return out;
}

namespace detail {
inline double squeezing_from(const SpinMoments& mo, int n) {
  require_even_atom_count(n);
  const double j = n / 2;
  const double denom = j * (j + 1) - 0.5 * n;
  if (!(denom > 0)) throw DomainError("squeezing parameter: nonpositive denominator");
  return ((n - 1) * mo.jz_var + mo.jz2_mean) / denom;
}
}  // namespace detail

/// xi_E^2 = [(N-1)(Delta J_z)^2 + <J_z^2>] / (<J^2> - N/2).
inline double squeezing_parameter(const DickeDistribution& dist) {
  return detail::squeezing_from(jz_moments(dist), dist.atoms());
}

/// True when the separable-state bound along z is violated.
inline bool witness_violated(const SpinMoments& mo, int n) {
  require_even_atom_count(n);
  const double j = n / 2;
  return (n - 1) * mo.jz_var + mo.jz2_mean < j * (j + 1) - 0.5 * n;
}

struct SqueezingPoint {
  int atoms;
  double xi_e_sq;
};

inline std::vector<SqueezingPoint> squeezing_vs_N(const TransitionAmplitudes& amps, std::span<const int> atom_counts) {
  for (int n : atom_counts) require_even_atom_count(n);
  std::vector<SqueezingPoint> out;
  out.reserve(atom_counts.size());
  for (int n : atom_counts) out.push_back({n, squeezing_parameter(dicke_distribution(n, amps))});
  return out;
}

}  // namespace tfaccel
