#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "tfaccel/errors.hpp"

namespace tfaccel {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// A nonnegative-or-signed real stored as sign * exp(log_magnitude).
/// log_magnitude == -inf encodes an exact zero.
struct LogWeight {
  double log_magnitude = kNegInf;
  int sign = 1;

  static LogWeight zero() { return {}; }
  static LogWeight one() { return {0.0, 1}; }
  static LogWeight from_value(double x) {
    if (x == 0.0) return zero();
    return {std::log(std::abs(x)), x < 0 ? -1 : 1};
  }

  bool is_zero() const { return log_magnitude == kNegInf; }
  double value() const { return is_zero() ? 0.0 : sign * std::exp(log_magnitude); }

  friend LogWeight operator*(LogWeight x, LogWeight y) {
    if (x.is_zero() || y.is_zero()) return zero();
    return {x.log_magnitude + y.log_magnitude, x.sign * y.sign};
  }
};

/// ln C(n, r). Short products are summed term by term; otherwise the
/// log-gamma difference is taken in extended precision.
inline double log_binomial(std::uint64_t n, std::uint64_t r) {
  if (r > n) throw DomainError("log_binomial: r > n");
  const std::uint64_t s = std::min(r, n - r);
  if (s == 0) return 0.0;
  if (s <= 32) {
    double acc = 0.0;
    for (std::uint64_t i = 1; i <= s; ++i) {
      acc += std::log(static_cast<double>(n - s + i)) - std::log(static_cast<double>(i));
    }
    return acc;
  }
  const auto nl = static_cast<long double>(n);
  const auto rl = static_cast<long double>(r);
  return static_cast<double>(std::lgamma(nl + 1.0L) - std::lgamma(rl + 1.0L) -
                             std::lgamma(nl - rl + 1.0L));
}

namespace detail {

// Neumaier summation of exp(x - top) over finite terms sorted descending.
inline double sum_sorted_descending(const std::vector<double>& xs) {
  if (xs.empty()) return kNegInf;
  const double top = xs.front();
  if (top == std::numeric_limits<double>::infinity()) return top;
  double sum = 0.0;
  double carry = 0.0;
  for (double x : xs) {
    const double t = std::exp(x - top);
    const double s = sum + t;
    carry += std::abs(sum) >= t ? (sum - s) + t : (t - s) + sum;
    sum = s;
  }
  return top + std::log(sum + carry);
}

inline std::vector<double> finite_terms(std::span<const double> logs) {
  std::vector<double> xs;
  xs.reserve(logs.size());
  for (double x : logs) {
    if (std::isnan(x)) throw DomainError("log_sum_exp: NaN term");
    if (x != kNegInf) xs.push_back(x);
  }
  return xs;
}

}  // namespace detail

/// ln(sum_i exp(x_i)) for log-magnitudes x_i. Terms are sorted descending
/// before the compensated summation, so the result does not depend on the
/// input order. -inf entries are exact zeros; an empty sum is -inf.
inline double log_sum_exp(std::span<const double> logs) {
  std::vector<double> xs = detail::finite_terms(logs);
  std::sort(xs.begin(), xs.end(), std::greater<>());
  return detail::sum_sorted_descending(xs);
}

/// Same value, bit for bit, as log_sum_exp for a sequence that rises to a
/// single peak and then falls (as the log of a log-concave sequence does).
/// The descending order is then a linear merge of the two flanks; inputs
/// that are not unimodal fall back to a full sort.
inline double log_sum_exp_unimodal(std::span<const double> logs) {
  if (logs.empty()) return kNegInf;
  for (double x : logs) {
    if (std::isnan(x)) throw DomainError("log_sum_exp: NaN term");
  }
  const auto peak = static_cast<std::size_t>(std::max_element(logs.begin(), logs.end()) - logs.begin());
  bool unimodal = true;
  for (std::size_t i = 1; i <= peak && unimodal; ++i) unimodal = logs[i - 1] <= logs[i];
  for (std::size_t i = peak + 1; i < logs.size() && unimodal; ++i) unimodal = logs[i - 1] >= logs[i];
  if (!unimodal) return log_sum_exp(logs);

  std::vector<double> xs;
  xs.reserve(logs.size());
  std::size_t left = peak;                // next candidate is logs[left - 1]
  std::size_t right = peak;               // next candidate is logs[right]
  while (left > 0 || right < logs.size()) {
    const bool take_right = left == 0 || (right < logs.size() && logs[right] >= logs[left - 1]);
    const double x = take_right ? logs[right++] : logs[--left];
    if (x == kNegInf) break;  // both flanks are exhausted of nonzero terms
    xs.push_back(x);
  }
  return detail::sum_sorted_descending(xs);
}

inline LogWeight log_sum_exp(std::span<const LogWeight> terms) {
  std::vector<double> logs;
  logs.reserve(terms.size());
  for (const auto& w : terms) {
    if (w.sign < 0 && !w.is_zero()) throw DomainError("log_sum_exp: negative term");
    logs.push_back(w.log_magnitude);
  }
  return {log_sum_exp(std::span<const double>(logs)), 1};
}

}  // namespace tfaccel
