#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Dense>

#include "tfaccel/errors.hpp"

namespace tfaccel {

using Matrix4c = Eigen::Matrix4cd;

/// Two-qubit density matrix in the basis {|gg>, |ge>, |eg>, |ee>}.
/// Construction checks Hermiticity and unit trace; positivity is checked
/// where a spectrum is taken.
class DensityMatrix4 {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-12;

  explicit DensityMatrix4(const Matrix4c& m) : m_(m) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol * scale) {
      throw InvalidState("density matrix is not Hermitian");
    }
    if (std::abs(m.trace() - std::complex<double>(1.0)) > kTraceTol) {
      throw InvalidState("density matrix trace differs from 1");
    }
    // Exact Hermitian symmetrization removes the last-bit asymmetry.
    m_ = 0.5 * (m + m.adjoint());
  }

  const Matrix4c& matrix() const { return m_; }
  std::complex<double> operator()(int r, int c) const { return m_(r, c); }

 private:
  Matrix4c m_;
};

/// sigma_y (x) sigma_y, real in the computational basis.
inline Matrix4c spin_flip_operator() {
  Matrix4c y = Matrix4c::Zero();
  y(0, 3) = -1.0;
  y(3, 0) = -1.0;
  y(1, 2) = 1.0;
  y(2, 1) = 1.0;
  return y;
}

/// Square roots of the eigenvalues of rho * rho_tilde, descending.
///
/// With rho = A A^dagger (A = V sqrt(D) from the Hermitian eigensystem),
/// the eigenvalues of rho * rho_tilde are the squared singular values of
/// A^T (sigma_y x sigma_y) A, so the spectrum is read off an SVD and needs
/// no square roots of possibly tiny eigenvalues of a non-normal product.
inline std::array<double, 4> concurrence_spectrum(const DensityMatrix4& rho) {
  constexpr double kNegativeTol = 1e-10;
  Eigen::SelfAdjointEigenSolver<Matrix4c> eig(rho.matrix());
  if (eig.info() != Eigen::Success) throw NumericalError("concurrence_spectrum: eigensolver failed");

  Eigen::Vector4d d = eig.eigenvalues();
  for (int i = 0; i < 4; ++i) {
    if (d(i) < -kNegativeTol) {
      std::ostringstream msg;
      msg << "concurrence_spectrum: density matrix has eigenvalue " << d(i);
      throw NumericalError(msg.str());
    }
    d(i) = std::sqrt(std::max(d(i), 0.0));
  }
  const Matrix4c a = eig.eigenvectors() * d.cast<std::complex<double>>().asDiagonal();
  const Matrix4c s = a.transpose() * spin_flip_operator() * a;
  Eigen::JacobiSVD<Matrix4c> svd(s);
  const Eigen::Vector4d sv = svd.singularValues();

  std::array<double, 4> out{sv(0), sv(1), sv(2), sv(3)};
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace tfaccel
