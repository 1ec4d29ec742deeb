#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "tfaccel/oracle/oracle.hpp"
#include "tfaccel/two_atom.hpp"

using namespace tfaccel;
using cd = std::complex<double>;

namespace {

TransitionAmplitudes random_amps(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return TransitionAmplitudes::from_weights(u(rng), u(rng));
}

BipartiteInit random_init(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  cd a(g(rng), g(rng));
  cd b(g(rng), g(rng));
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  return {a / n, b / n};
}

DensityMatrix4 pure(const Vector4c& v) { return DensityMatrix4(v * v.adjoint()); }

}  // namespace

TEST(BipartiteInit, Validation) {
  EXPECT_NO_THROW(BipartiteInit{}.validate());
  BipartiteInit bad{cd(1.0), cd(1.0)};
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(EvolvePair, ZeroCouplingIsIdentity) {
  const auto amps = TransitionAmplitudes::from_weights(0.0, 0.0);
  for (auto t : {FieldTreatment::CoLocated, FieldTreatment::Distant}) {
    const BipartiteInit init{cd(0.6), cd(0.0, 0.8)};
    const auto rho = evolve_pair(init, amps, t);
    const Vector4c psi(0.0, init.alpha, init.beta, 0.0);
    EXPECT_LT((rho.matrix() - psi * psi.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(concurrence(rho), 2 * std::abs(init.alpha * init.beta), 1e-12);
  }
}

TEST(EvolvePair, DistantUnnormalizedTraceIsOne) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto rho = pair_state_unnormalized(random_init(rng), random_amps(rng), FieldTreatment::Distant);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-14);
  }
}

TEST(EvolvePair, DistantJzIsAtomNumberDifference) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 50; ++i) {
    const auto amps = random_amps(rng);
    const auto rho = pair_state_unnormalized(BipartiteInit{}, amps, FieldTreatment::Distant);
    const double d2 = std::pow(amps.d0 * amps.d1, 2);
    EXPECT_NEAR(jz_trace(rho), d2 * (amps.eta0_sq - amps.eta1_sq), 1e-12);
  }
}

TEST(EvolvePair, ProductInitialStateStaysSeparable) {
  std::mt19937_64 rng(2);
  for (auto t : {FieldTreatment::CoLocated, FieldTreatment::Distant}) {
    for (int i = 0; i < 20; ++i) {
      const auto rho = evolve_pair(BipartiteInit{cd(1.0), cd(0.0)}, random_amps(rng), t);
      EXPECT_NEAR(concurrence(rho), 0.0, 1e-12);
    }
  }
}

TEST(EvolvePair, MatchesFirstPrinciplesOracle) {
  std::mt19937_64 rng(13);
  for (auto t : {FieldTreatment::CoLocated, FieldTreatment::Distant}) {
    for (int i = 0; i < 100; ++i) {
      const auto init = random_init(rng);
      const auto amps = random_amps(rng);
      const auto rho = evolve_pair(init, amps, t);
      const auto ref = oracle::two_atom_first_principles(init, amps, t);
      EXPECT_LT((rho.matrix() - ref.rho).cwiseAbs().maxCoeff(), 1e-13);
      // The reference takes square roots of eigenvalues of rho rho~, which loses
      // half the digits when the smallest ones sit near zero.
      EXPECT_NEAR(concurrence(rho), ref.concurrence, 1e-8);
      EXPECT_NEAR(jz_mean_pair(rho), ref.jz_mean, 1e-13);
    }
  }
}

TEST(EvolvePair, ProducesValidDensityMatrices) {
  std::mt19937_64 rng(21);
  for (auto t : {FieldTreatment::CoLocated, FieldTreatment::Distant}) {
    for (int i = 0; i < 50; ++i) {
      const auto rho = evolve_pair(random_init(rng), random_amps(rng), t);
      Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho.matrix());
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
      EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
      const double c = concurrence(rho);
      EXPECT_GE(c, 0.0);
      EXPECT_LE(c, 1.0);
    }
  }
}

TEST(Concurrence, Examples) {
  EXPECT_NEAR(concurrence(pure(Vector4c(1, 0, 0, 1) / std::sqrt(2.0))), 1.0, 1e-12);
  EXPECT_NEAR(concurrence(DensityMatrix4(Matrix4c::Identity() / 4.0)), 0.0, 1e-14);
  const Vector4c phi(1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0));
  const Matrix4c werner = 0.5 * phi * phi.adjoint() + 0.125 * Matrix4c::Identity();
  EXPECT_NEAR(concurrence(DensityMatrix4(werner)), 0.25, 1e-12);
}

TEST(JzMean, BasisStates) {
  EXPECT_EQ(jz_mean_pair(pure(Vector4c(0, 1, 0, 0))), 0.0);
  EXPECT_EQ(jz_mean_pair(pure(Vector4c(0, 0, 0, 1))), 1.0);
  EXPECT_EQ(jz_mean_pair(pure(Vector4c(1, 0, 0, 0))), -1.0);
}

TEST(PairCurve, ZeroCouplingLimit) {
  DetectorParams p;
  p.coupling = 0.0;
  const std::vector<double> grid{1e-6};
  const auto curve = pair_entanglement_curve(p, grid, BipartiteInit{}, FieldTreatment::CoLocated, QuadratureConfig{});
  ASSERT_EQ(curve.size(), 1u);
  EXPECT_NEAR(curve[0].concurrence, 1.0, 1e-12);
  EXPECT_EQ(curve[0].xi_e_sq, 0.0);
}

TEST(PairCurve, AntiUnruhGapEnhancesEntanglement) {
  DetectorParams p;
  p.gap = 0.5;
  const std::vector<double> grid{2, 4, 6, 8, 10};
  for (auto t : {FieldTreatment::CoLocated, FieldTreatment::Distant}) {
    const auto c = pair_entanglement_curve(p, grid, BipartiteInit{}, t, QuadratureConfig{});
    for (std::size_t i = 1; i < c.size(); ++i) EXPECT_GE(c[i].concurrence, c[i - 1].concurrence);
  }
}

TEST(PairCurve, UnruhGapDegradesEntanglement) {
  DetectorParams p;
  p.gap = 5.0;
  const std::vector<double> grid{2, 4, 6, 8, 10};
  for (auto t : {FieldTreatment::CoLocated, FieldTreatment::Distant}) {
    const auto c = pair_entanglement_curve(p, grid, BipartiteInit{}, t, QuadratureConfig{});
    for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LE(c[i].concurrence, c[i - 1].concurrence);
  }
}

TEST(PairCurve, RejectsEmptyGrid) {
  EXPECT_THROW(pair_entanglement_curve(DetectorParams{}, {}, BipartiteInit{}, FieldTreatment::Distant,
                                       QuadratureConfig{}),
               DomainError);
}
