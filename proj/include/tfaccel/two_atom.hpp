#pragma once

// Two atoms prepared in alpha|ge> + beta|eg> and accelerated together
// through the same channel. The field is traced out branch by branch.

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tfaccel/detector.hpp"
#include "tfaccel/errors.hpp"
#include "tfaccel/numerics/concurrence_spectrum.hpp"
#include "tfaccel/twin_fock.hpp"

namespace tfaccel {

struct BipartiteInit {
  std::complex<double> alpha{1.0 / std::numbers::sqrt2, 0.0};
  std::complex<double> beta{1.0 / std::numbers::sqrt2, 0.0};

  void validate() const {
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-12) {
      throw DomainError("BipartiteInit: |alpha|^2 + |beta|^2 must be 1");
    }
  }
};

/// How the single-photon sectors of the two atoms are bookkept.
/// CoLocated: both atoms emit into the same field state, so the two
/// single-photon branches add coherently. Distant: the branches stay
/// orthogonal.
enum class FieldTreatment { CoLocated, Distant };

inline const char* to_string(FieldTreatment t) {
  return t == FieldTreatment::CoLocated ? "colocated" : "distant";
}

using Vector4c = Eigen::Vector4cd;

namespace detail {

// Basis order: |gg>, |ge>, |eg>, |ee>.
inline std::vector<Vector4c> pair_branches(const BipartiteInit& init, const TransitionAmplitudes& amps,
                                           FieldTreatment treatment) {
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> a = init.alpha;
  const std::complex<double> b = init.beta;
  const double d = amps.d0 * amps.d1;
  const double e0 = std::sqrt(amps.eta0_sq);
  const double e1 = std::sqrt(amps.eta1_sq);

  std::vector<Vector4c> out;
  out.push_back(Vector4c(0.0, d * a, d * b, 0.0));
  if (treatment == FieldTreatment::Distant) {
    out.push_back(Vector4c(-i * d * a * e1, 0.0, 0.0, -i * d * b * e0));
    out.push_back(Vector4c(-i * d * b * e1, 0.0, 0.0, -i * d * a * e0));
  } else {
    out.push_back(Vector4c(-i * d * (a + b) * e1, 0.0, 0.0, -i * d * (a + b) * e0));
  }
  out.push_back(Vector4c(0.0, d * e0 * e1 * b, d * e0 * e1 * a, 0.0));
  return out;
}

}  // namespace detail

/// Sum of the branch projectors before renormalization. For Distant the
/// trace is already 1; for CoLocated it is not.
inline Matrix4c pair_state_unnormalized(const BipartiteInit& init, const TransitionAmplitudes& amps,
                                        FieldTreatment treatment) {
  init.validate();
  Matrix4c rho = Matrix4c::Zero();
  for (const auto& v : detail::pair_branches(init, amps, treatment)) rho += v * v.adjoint();
  return rho;
}

inline DensityMatrix4 evolve_pair(const BipartiteInit& init, const TransitionAmplitudes& amps,
                                  FieldTreatment treatment) {
  const Matrix4c rho = pair_state_unnormalized(init, amps, treatment);
  const double tr = rho.trace().real();
  if (!(tr > 0) || !std::isfinite(tr)) throw InvalidState("evolve_pair: state does not normalize");
  return DensityMatrix4(rho / tr);
}

/// max(0, l1 - l2 - l3 - l4) over the spin-flip spectrum.
inline double concurrence(const DensityMatrix4& rho) {
  const auto l = concurrence_spectrum(rho);
  return std::clamp(l[0] - l[1] - l[2] - l[3], 0.0, 1.0);
}

/// Tr(rho J_z) with J_z = (n_e - n_g) / 2 = diag(-1, 0, 0, 1).
inline double jz_trace(const Matrix4c& rho) { return rho(3, 3).real() - rho(0, 0).real(); }

inline double jz_mean_pair(const DensityMatrix4& rho) { return jz_trace(rho.matrix()); }

struct PairCurvePoint {
  double accel;
  double concurrence;
  double xi_e_sq;
};

/// Concurrence of the pair and the N = 2 squeezing parameter along an
/// acceleration grid. `base.accel` is ignored.
inline std::vector<PairCurvePoint> pair_entanglement_curve(const DetectorParams& base,
                                                           std::span<const double> accel_grid,
                                                           const BipartiteInit& init, FieldTreatment treatment,
                                                           const QuadratureConfig& cfg) {
  if (accel_grid.empty()) throw DomainError("pair_entanglement_curve: empty grid");
  init.validate();
  std::vector<PairCurvePoint> out;
  out.reserve(accel_grid.size());
  for (double a : accel_grid) {
    DetectorParams p = base;
    p.accel = a;
    const auto amps = transition_amplitudes(p, cfg);
    out.push_back({a, concurrence(evolve_pair(init, amps, treatment)),
                   squeezing_parameter(dicke_distribution(2, amps))});
  }
  return out;
}

}  // namespace tfaccel
