#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "tfaccel/oracle/oracle.hpp"
#include "tfaccel/twin_fock.hpp"
#include "tfaccel/two_atom.hpp"

using namespace tfaccel;

namespace {

DickeDistribution point_mass(int n, int m) {
  std::vector<LogWeight> w(static_cast<std::size_t>(n + 1));
  w[static_cast<std::size_t>(m + n / 2)] = LogWeight::one();
  return DickeDistribution(n, w);
}

const TransitionAmplitudes kZero = TransitionAmplitudes::from_weights(0.0, 0.0);

}  // namespace

TEST(B0Squared, ZeroCoupling) {
  for (int n : {2, 10, 1000}) EXPECT_EQ(log_b0_sq(n, kZero).log_magnitude, 0.0);
}

TEST(B0Squared, TwoAtomsByHand) {
  const auto a = TransitionAmplitudes::from_weights(0.3, 0.7);
  const double d2 = std::pow(a.d0 * a.d1, 2);
  EXPECT_NEAR(log_b0_sq(2, a).value(), d2 * (1 + 0.3 * 0.7), 1e-15);
}

TEST(B0Squared, LargeNMatchesBigFloat) {
  const auto a = TransitionAmplitudes::from_weights(2e-3, 5e-4);
  const double ref = static_cast<double>(log(oracle::b0_sq_direct<oracle::Big200>(10000, a)));
  EXPECT_NEAR(log_b0_sq(10000, a).log_magnitude, ref, 1e-10 * std::abs(ref));
}

TEST(BmSquared, TwoAtomsByHand) {
  const auto a = TransitionAmplitudes::from_weights(0.3, 0.7);
  const double d2 = std::pow(a.d0 * a.d1, 2);
  EXPECT_NEAR(log_bm_sq(2, 1, a).value(), d2 * 0.3, 1e-15);
  EXPECT_NEAR(log_bm_sq(2, -1, a).value(), d2 * 0.7, 1e-15);
}

TEST(BmSquared, ZeroCouplingAndDomain) {
  EXPECT_TRUE(log_bm_sq(6, 2, kZero).is_zero());
  EXPECT_TRUE(log_bm_sq(6, -3, kZero).is_zero());
  EXPECT_THROW(log_bm_sq(6, 0, kZero), DomainError);
  EXPECT_THROW(log_bm_sq(6, 4, kZero), DomainError);
  EXPECT_THROW(log_bm_sq(5, 1, kZero), DomainError);
}

TEST(DickeDistributionTest, ZeroCouplingIsPointMass) {
  const auto d = dicke_distribution(8, kZero);
  EXPECT_EQ(d.weight(0), 1.0);
  for (int m = 1; m <= 4; ++m) {
    EXPECT_EQ(d.weight(m), 0.0);
    EXPECT_EQ(d.weight(-m), 0.0);
  }
}

TEST(DickeDistributionTest, TwoAtomRatios) {
  const auto a = TransitionAmplitudes::from_weights(0.2, 0.5);
  const auto d = dicke_distribution(2, a);
  const double z = 0.5 + (1 + 0.1) + 0.2;
  EXPECT_NEAR(d.weight(-1), 0.5 / z, 1e-15);
  EXPECT_NEAR(d.weight(0), 1.1 / z, 1e-15);
  EXPECT_NEAR(d.weight(1), 0.2 / z, 1e-15);
}

TEST(DickeDistributionTest, NormalizedAndNonnegative) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n : {2, 40, 100, 10000}) {
    const auto d = dicke_distribution(n, TransitionAmplitudes::from_weights(u(rng), u(rng)));
    long double s = 0;
    for (double w : d.normalized()) {
      EXPECT_GE(w, 0.0);
      s += w;
    }
    EXPECT_NEAR(static_cast<double>(s), 1.0, 1e-12);
  }
}

TEST(DickeDistributionTest, SymmetricAmplitudesGiveSymmetricWeights) {
  const auto d = dicke_distribution(30, TransitionAmplitudes::from_weights(0.4, 0.4));
  for (int m = 1; m <= 15; ++m) EXPECT_NEAR(d.weight(m), d.weight(-m), 1e-15);
}

TEST(DickeDistributionTest, MatchesBigFloatEnumeration) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 2; n <= 40; n += 2) {
    for (int t = 0; t < 5; ++t) {
      const auto a = TransitionAmplitudes::from_weights(u(rng), u(rng));
      const auto d = dicke_distribution(n, a);
      for (const auto& [m, w] : oracle::enumerate_b_weights(n, a)) {
        EXPECT_NEAR(d.log_weight(m).value(), w, 1e-12 * w) << "N=" << n << " m=" << m;
      }
    }
  }
}

TEST(DickeDistributionTest, Validation) {
  EXPECT_THROW(dicke_distribution(3, kZero), DomainError);
  EXPECT_THROW(DickeDistribution(4, std::vector<LogWeight>(3)), DomainError);
  EXPECT_THROW(DickeDistribution(2, std::vector<LogWeight>(3)), InvalidState);
}

TEST(JzMoments, PointMassAtZero) {
  const auto mo = jz_moments(dicke_distribution(10, kZero));
  EXPECT_EQ(mo.jz_mean, 0.0);
  EXPECT_EQ(mo.jz2_mean, 0.0);
  EXPECT_EQ(mo.jz4_mean, 0.0);
  EXPECT_EQ(mo.djz2, 0.0);
  EXPECT_EQ(mo.j2_mean, 30.0);
}

TEST(JzMoments, TwoAtomsAgreeWithPairModule) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const auto a = TransitionAmplitudes::from_weights(u(rng), u(rng));
    const auto d = dicke_distribution(2, a);
    const auto pair = pair_state_unnormalized(BipartiteInit{}, a, FieldTreatment::Distant);
    const double unnormalized = std::exp(d.log_weight(1).log_magnitude) - std::exp(d.log_weight(-1).log_magnitude);
    EXPECT_NEAR(jz_trace(pair), unnormalized, 1e-14);
    EXPECT_NEAR(jz_moments(d).jz_mean, unnormalized / std::exp(d.log_z()), 1e-14);
  }
}

TEST(JzMoments, SymmetricWeightsHaveZeroMean) {
  const auto mo = jz_moments(dicke_distribution(20, TransitionAmplitudes::from_weights(0.3, 0.3)));
  EXPECT_NEAR(mo.jz_mean, 0.0, 1e-15);
  EXPECT_GT(mo.jz2_mean, 0.0);
}

TEST(Squeezing, IdealTwinFock) {
  EXPECT_EQ(squeezing_parameter(dicke_distribution(100, kZero)), 0.0);
  EXPECT_TRUE(witness_violated(jz_moments(dicke_distribution(2, kZero)), 2));
  for (int n : {4, 50}) EXPECT_TRUE(witness_violated(jz_moments(dicke_distribution(n, kZero)), n));
}

TEST(Squeezing, AllExcited) {
  for (int n : {2, 10, 64}) {
    const auto d = point_mass(n, n / 2);
    EXPECT_NEAR(squeezing_parameter(d), 1.0, 1e-14);
    EXPECT_FALSE(witness_violated(jz_moments(d), n));
  }
}

TEST(Squeezing, VersusAtomNumberAtZeroCoupling) {
  const std::vector<int> ns{2, 4, 6, 8};
  for (const auto& p : squeezing_vs_N(kZero, ns)) EXPECT_EQ(p.xi_e_sq, 0.0);
  const std::vector<int> bad{2, 3};
  EXPECT_THROW(squeezing_vs_N(kZero, bad), DomainError);
}

TEST(Squeezing, GrowsWithCoupling) {
  double prev = 0.0;
  for (double e : {0.01, 0.05, 0.1, 0.2}) {
    const double xi = squeezing_parameter(dicke_distribution(50, TransitionAmplitudes::from_weights(e, 1.5 * e)));
    EXPECT_GT(xi, prev);
    prev = xi;
  }
}
