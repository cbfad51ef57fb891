#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "lzcat/fockspace.hpp"

using namespace lzcat;

namespace {

constexpr double kPi = std::numbers::pi;

// Poisson tail P(X > n) by brute-force summation of the pmf from n+1 upward.
double poisson_tail(double mean, int n) {
  double tail = 0.0;
  for (int k = n + 1; k < n + 2000; ++k) tail += std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
  return tail;
}

}  // namespace

TEST(MakeCat, VacuumWhenAlphaIsZero) {
  const auto c = make_cat(0.0, 0.0, TruncationSpec{10, 1e-12});
  EXPECT_NEAR(std::abs(c[0]), 1.0, 1e-15);
  for (int n = 1; n <= 10; ++n) EXPECT_EQ(std::abs(c[n]), 0.0);
}

TEST(MakeCat, OddCatHasOnlyOddLevels) {
  const auto tr = truncation_for_cat(1.0, kPi, 1e-12);
  const auto c = make_cat(1.0, kPi, tr);
  for (int n = 0; n <= tr.n_max; n += 2) EXPECT_LT(std::abs(c[n]), 1e-15) << "n = " << n;
  EXPECT_GT(std::abs(c[1]), 0.5);
}

TEST(MakeCat, EvenCatHasOnlyEvenLevels) {
  const auto tr = truncation_for_cat(1.3, 0.0, 1e-12);
  const auto c = make_cat(1.3, 0.0, tr);
  for (int n = 1; n <= tr.n_max; n += 2) EXPECT_LT(std::abs(c[n]), 1e-15) << "n = " << n;
}

TEST(MakeCat, EvenCatMeanPhotonNumber) {
  // alpha = 1, theta = 0: 2(1 - e^{-2}) / (2(1 + e^{-2})) = tanh(1)
  const auto c = make_cat(1.0, 0.0, truncation_for_cat(1.0, 0.0, 1e-14));
  EXPECT_NEAR(c.mean_photon(), std::tanh(1.0), 1e-10);
  EXPECT_NEAR(c.mean_photon(), 0.76159, 1e-5);
}

TEST(MakeCat, MeanPhotonMatchesClosedForms) {
  for (double a2 : {0.3, 1.0, 2.0, 4.0}) {
    const double a = std::sqrt(a2);
    const auto ys = make_cat(a, kPi / 2, truncation_for_cat(a, kPi / 2, 1e-12));
    const auto even = make_cat(a, 0.0, truncation_for_cat(a, 0.0, 1e-12));
    const auto odd = make_cat(a, kPi, truncation_for_cat(a, kPi, 1e-12));
    EXPECT_NEAR(ys.mean_photon(), a2, 1e-10);
    EXPECT_NEAR(even.mean_photon(), a2 * std::tanh(a2), 1e-10);
    EXPECT_NEAR(odd.mean_photon(), a2 / std::tanh(a2), 1e-10);
  }
}

TEST(MakeCat, OddCatVacuumLimitIsSinglePhoton) {
  const auto c = make_cat(0.0, kPi, TruncationSpec{6, 1e-12});
  EXPECT_NEAR(std::abs(c[1]), 1.0, 1e-15);
  const auto tiny = make_cat(1e-6, kPi, TruncationSpec{8, 1e-12});
  EXPECT_NEAR(std::norm(tiny[1]), 1.0, 1e-10);
}

TEST(MakeCat, NormalizedForRandomParameters) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> alpha(0.0, 3.0), theta(0.0, 2 * kPi);
  for (int i = 0; i < 50; ++i) {
    const double a = alpha(rng), th = theta(rng);
    const auto c = make_cat(a, th, truncation_for_cat(a, th, 1e-12));
    EXPECT_LE(std::abs(1.0 - c.amplitudes().squaredNorm()), 1e-12);
  }
}

TEST(MakeCat, RejectsBadInput) {
  EXPECT_THROW(make_cat(-0.1, 0.0, TruncationSpec{10, 1e-12}), DomainError);
  EXPECT_THROW(make_cat(2.0, 0.0, TruncationSpec{3, 1e-12}), TruncationError);
}

TEST(MakeFock, Basics) {
  const TruncationSpec tr{5, 1e-12};
  EXPECT_EQ(make_fock(0, tr)[0], Complex(1.0));
  const auto f3 = make_fock(3, tr);
  EXPECT_EQ(f3[3], Complex(1.0));
  EXPECT_DOUBLE_EQ(f3.amplitudes().squaredNorm(), 1.0);
  EXPECT_THROW(make_fock(6, tr), DomainError);
  EXPECT_THROW(make_fock(-1, tr), DomainError);
}

TEST(PhotonAmplitudes, RejectsUnnormalized) {
  CVector c = CVector::Zero(3);
  c[0] = 0.9;
  EXPECT_THROW(PhotonAmplitudes{c}, DomainError);
}

TEST(ThermalWeights, GroundStateAtZeroTemperature) {
  const auto p = thermal_weights(10.0, 0.0, TruncationSpec{5, 1e-12});
  EXPECT_EQ(p[0], 1.0);
  EXPECT_EQ(p.tail(5).sum(), 0.0);
}

TEST(ThermalWeights, MeanPhotonNumberAndGeometricRatio) {
  const auto tr = truncation_for_thermal(1.0, 1.0, 1e-15);
  const auto p = thermal_weights(1.0, 1.0, tr);
  EXPECT_NEAR(p.sum(), 1.0, 1e-15);
  double mean = 0.0;
  for (Eigen::Index n = 0; n < p.size(); ++n) mean += n * p[n];
  EXPECT_NEAR(mean, 1.0 / (std::exp(1.0) - 1.0), 1e-12);
  EXPECT_NEAR(thermal_mean_photon(1.0, 1.0), 0.581977, 1e-6);
  for (Eigen::Index n = 0; n + 1 < p.size(); ++n) EXPECT_NEAR(p[n + 1] / p[n], std::exp(-1.0), 1e-15);
}

TEST(ThermalWeights, Errors) {
  EXPECT_THROW(thermal_weights(1.0, -1.0, TruncationSpec{5, 1e-12}), DomainError);
  EXPECT_THROW(thermal_weights(1.0, 1.0, TruncationSpec{5, 1e-12}), TruncationError);
}

TEST(ChooseTruncation, VacuumIsPaddingOnly) {
  const auto tr = choose_truncation(0.0, 1e-12);
  EXPECT_GE(tr.n_max, 5);
}

TEST(ChooseTruncation, PoissonTailBound) {
  const auto tr = choose_truncation(4.0, 1e-12);
  const int cutoff = tr.n_max - kTruncationPad;
  EXPECT_LE(poisson_tail(4.0, cutoff), 1e-12);
  EXPECT_GT(poisson_tail(4.0, cutoff - 1), 1e-12);  // tight
}

TEST(ChooseTruncation, MonotoneInMean) {
  int last = 0;
  for (double m = 0.0; m < 30.0; m += 0.25) {
    const int n = choose_truncation(m, 1e-12).n_max;
    EXPECT_GE(n, last) << "mean = " << m;
    last = n;
  }
}

TEST(ChooseTruncation, GeometricTail) {
  const double mean = thermal_mean_photon(1.0, 1.0);
  const auto tr = choose_truncation(mean, 1e-12, PhotonDistribution::geometric);
  const double q = mean / (1.0 + mean);
  EXPECT_LE(std::pow(q, tr.n_max - kTruncationPad + 1), 1e-12);
}

TEST(ChooseTruncation, RejectsBadInput) {
  EXPECT_THROW(choose_truncation(-1.0, 1e-12), DomainError);
  EXPECT_THROW(choose_truncation(1.0, 0.0), DomainError);
}

TEST(JointUp, CopiesAmplitudesIntoUpperLevel) {
  const auto ph = make_cat(1.0, kPi / 2, truncation_for_cat(1.0, kPi / 2, 1e-12));
  const auto s = joint_up(ph);
  EXPECT_EQ(s.levels(), ph.amplitudes().size());
  EXPECT_EQ((s.up() - ph.amplitudes()).norm(), 0.0);
  EXPECT_EQ(s.down().norm(), 0.0);
  EXPECT_DOUBLE_EQ(s.norm2(), ph.amplitudes().squaredNorm());
  EXPECT_TRUE(std::isnan(s.t()));

  const auto vac = joint_up(make_fock(0, TruncationSpec{3, 1e-12}));
  EXPECT_EQ(vac.amplitudes()[0], Complex(1.0));
}

TEST(ThermalEnsemble, OneMemberPerLevel) {
  const auto tr = truncation_for_thermal(1.0, 1.0, 1e-12);
  const auto ens = make_thermal_ensemble(1.0, 1.0, tr);
  EXPECT_EQ(static_cast<int>(ens.sector_states.size()), tr.levels());
  for (int n = 0; n <= tr.n_max; ++n) EXPECT_EQ(ens.sector_states[n].up()[n], Complex(1.0));
  EXPECT_NEAR(ens.weights.sum(), 1.0, 1e-15);
}
