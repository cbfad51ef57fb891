#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "lzcat/analytics.hpp"
#include "lzcat/fockspace.hpp"
#include "lzcat/propagator.hpp"

using namespace lzcat;
using namespace lzcat::analytic;

namespace {


// Independent oracles: photon-number weights built from the Poisson pmf and
// the two crossing-group rules written out directly.

std::vector<double> cat_weights_oracle(double a2, double theta, int n_max = 200) {
  std::vector<double> w(n_max + 1);
  double sum = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const double poisson = a2 == 0.0 ? (n == 0 ? 1.0 : 0.0) : std::exp(-a2 + n * std::log(a2) - std::lgamma(n + 1.0));
    w[n] = poisson * (2.0 + 2.0 * (n % 2 == 0 ? 1.0 : -1.0) * std::cos(theta));
    sum += w[n];
  }
  for (double& x : w) x /= sum;
  return w;
}

std::vector<double> thermal_weights_oracle(double q, int n_max = 4000) {
  std::vector<double> w(n_max + 1);
  for (int n = 0; n <= n_max; ++n) w[n] = (1.0 - q) * std::pow(q, n);
  return w;
}

double survive(double p, int n) { return n < 0 ? 1.0 : std::pow(p, n + 1); }

double rwa_oracle(const std::vector<double>& w, double p) {
  double out = 1.0;
  for (std::size_t n = 0; n < w.size(); ++n) out -= w[n] * survive(p, static_cast<int>(n));
  return out;
}

double full_oracle(const std::vector<double>& w, double p) {
  double out = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const int n = static_cast<int>(k);
    const double stay = survive(p, n - 1) * survive(p, n) + (1.0 - survive(p, n - 1)) * (1.0 - survive(p, n - 2));
    out += w[k] * (1.0 - stay);
  }
  return out;
}

double lz(double delta) { return std::exp(-kPi * delta * delta / 2.0); }

ClosedFormInputs cat(double a2, double theta, double delta) {
  ClosedFormInputs in;
  in.alpha2 = a2;
  in.theta = theta;
  in.delta = delta;
  return in;
}

ClosedFormInputs thermal(double delta, double t_over_omega, double omega = 10.0) {
  ClosedFormInputs in;
  in.delta = delta;
  in.omega = omega;
  in.temperature = t_over_omega * omega;
  return in;
}

}  // namespace

TEST(SingleCrossing, Examples) {
  EXPECT_EQ(p_up0(0.0), 1.0);
  EXPECT_NEAR(p_up0(0.5), 0.675232, 1e-6);
  EXPECT_LT(p_up0(20.0), 1e-100);
  EXPECT_EQ(p_up_n(-1, 0.5), 1.0);
  EXPECT_NEAR(p_up_n(0, 0.5), 0.675232, 1e-6);
  EXPECT_NEAR(p_up_n(3, 0.5), 0.2078796, 1e-7);
  EXPECT_THROW(p_up_n(-2, 0.5), DomainError);
  EXPECT_THROW(p_up0(0.5, 0.0), DomainError);
}

TEST(FockAverage, Examples) {
  RVector vac = RVector::Zero(4), one = RVector::Zero(4);
  vac[0] = 1.0;
  one[1] = 1.0;
  EXPECT_NEAR(plz_fock_avg(vac, 0.5), 1.0 - lz(0.5), 1e-15);
  EXPECT_NEAR(plz_fock_avg(one, 0.5), 1.0 - lz(0.5) * lz(0.5), 1e-15);
  const auto c = make_cat(1.0, kPi / 2, choose_truncation(4.0, 1e-14));
  EXPECT_NEAR(plz_fock_avg(c.amplitudes().cwiseAbs2(), 0.5), plz_yurke_stoler(1.0, 0.5), 1e-12);
}

TEST(CatRwa, Examples) {
  EXPECT_NEAR(plz_cat_rwa(cat(0.0, 0.0, 0.5)), 0.324768, 1e-6);
  EXPECT_NEAR(plz_cat_rwa(cat(1.0, kPi / 2, 0.5)), 0.5120133, 1e-7);
  EXPECT_NEAR(plz_cat_rwa(cat(2.0, kPi / 2, 0.5)), 0.6473345, 1e-7);
  EXPECT_NEAR(plz_cat_rwa(cat(4.0, kPi / 2, 0.5)), 0.8158071, 1e-7);
  EXPECT_NEAR(plz_cat_rwa(cat(1.0, 0.0, 0.5)), 0.4588085, 1e-7);
  EXPECT_NEAR(plz_cat_rwa(cat(1.0, kPi, 0.5)), 0.5818731, 1e-7);
  EXPECT_NEAR(plz_cat_rwa(cat(0.0, kPi, 0.5)), 1.0 - lz(0.5) * lz(0.5), 1e-15);
}

TEST(CatRwa, SpecializedFormsMatchGeneral) {
  for (double a2 : {0.0, 0.01, 0.3, 1.0, 2.0, 4.0, 10.0})
    for (double delta : {0.1, 0.5, 1.0})
      for (double theta : {0.0, 0.5 * kPi, kPi}) {
        if (a2 == 0.0 && theta == kPi) continue;  // general form is the limit there
        EXPECT_NEAR(plz_cat_rwa(cat(a2, theta, delta)), plz_cat_rwa_general(cat(a2, theta, delta)), 1e-14)
            << a2 << " " << theta << " " << delta;
      }
}

TEST(CatRwa, MatchesWeightedSum) {
  for (double a2 : {0.0, 0.3, 1.0, 2.0, 4.0})
    for (double theta : {0.0, 0.7, 0.5 * kPi, 2.0, kPi})
      for (double delta : {0.1, 0.5, 1.0}) {
        if (a2 == 0.0 && theta == kPi) continue;
        EXPECT_NEAR(plz_cat_rwa(cat(a2, theta, delta)), rwa_oracle(cat_weights_oracle(a2, theta), lz(delta)), 1e-12);
      }
}

TEST(CatRwa, MonotoneAndSaturating) {
  double last = 0.0;
  for (double a2 = 0.0; a2 <= 20.0; a2 += 0.25) {
    const double v = plz_cat_rwa(cat(a2, kPi / 2, 0.5));
    EXPECT_GE(v, last - 1e-15);
    last = v;
  }
  EXPECT_NEAR(plz_cat_rwa(cat(200.0, kPi / 2, 0.5)), 1.0, 1e-12);
  last = 0.0;
  for (double delta = 0.0; delta <= 2.0; delta += 0.05) {
    const double v = plz_cat_rwa(cat(1.0, kPi / 2, delta));
    EXPECT_GE(v, last - 1e-15);
    last = v;
  }
}

TEST(JointUpProb, Examples) {
  EXPECT_NEAR(joint_up_prob(0, 0.5), 0.675232, 1e-6);
  EXPECT_NEAR(joint_up_prob(1, 0.5), 0.3078640, 1e-7);
  for (int n = 0; n < 6; ++n) EXPECT_EQ(joint_up_prob(n, 0.0), 1.0);
  EXPECT_THROW(joint_up_prob(-1, 0.5), DomainError);
}

TEST(CatFull, Examples) {
  EXPECT_NEAR(plz_cat_norwa(cat(1e-12, 0.0, 0.5)), 1.0 - lz(0.5), 1e-10);
  EXPECT_NEAR(plz_cat_norwa(cat(0.0, 0.3, 0.5)), 1.0 - lz(0.5), 1e-15);
  EXPECT_NEAR(plz_cat_norwa(cat(0.0, kPi, 0.1)), 1.0 - std::pow(lz(0.1), 3), 1e-15);
  EXPECT_NEAR(plz_cat_norwa(cat(0.0, kPi, 0.1)), 0.0460308, 1e-7);
  EXPECT_NEAR(plz_cat_norwa(cat(1e-9, kPi, 0.1)), 0.0460308, 1e-7);
  EXPECT_NEAR(plz_cat_norwa(cat(1.0, kPi / 2, 0.1)), 0.0453275, 1e-7);
  EXPECT_LT(plz_cat_norwa(cat(400.0, kPi / 2, 0.5)), 1e-10);
  EXPECT_THROW(plz_cat_norwa(cat(1.0, 0.0, 0.0)), DomainError);
}

TEST(CatFull, MatchesWeightedSum) {
  for (double a2 : {0.0, 0.3, 1.0, 2.0, 4.0})
    for (double theta : {0.0, 0.7, 0.5 * kPi, 2.0, kPi})
      for (double delta : {0.1, 0.5, 1.0}) {
        if (a2 == 0.0 && theta == kPi) continue;
        EXPECT_NEAR(plz_cat_norwa(cat(a2, theta, delta)), full_oracle(cat_weights_oracle(a2, theta), lz(delta)),
                    1e-12);
        const auto c = make_cat(std::sqrt(a2), theta, choose_truncation(4.0 * a2, 1e-14));
        EXPECT_NEAR(plz_cat_norwa(cat(a2, theta, delta)), plz_full_fock_avg(c.amplitudes().cwiseAbs2(), delta),
                    1e-12);
      }
}

TEST(CatFull, NotMonotoneInAmplitude) {
  // There exist a1 < a2 with P(a1) > P(a2).
  bool found = false;
  double last = plz_cat_norwa(cat(0.0, kPi / 2, 0.5));
  for (double a2 = 0.1; a2 <= 8.0; a2 += 0.1) {
    const double v = plz_cat_norwa(cat(a2, kPi / 2, 0.5));
    if (v < last) found = true;
    last = v;
  }
  EXPECT_TRUE(found);
}

TEST(CatFull, IndependenceFlag) {
  EXPECT_TRUE(plz_cat_norwa_checked(cat(1.0, kPi / 2, 0.5)).independent);
  auto in = cat(100.0, kPi / 2, 0.5);
  in.omega = 1.0;
  EXPECT_FALSE(plz_cat_norwa_checked(in).independent);
}

TEST(Thermal, RwaExamples) {
  EXPECT_NEAR(plz_thermal_rwa(thermal(0.5, 0.0)), 1.0 - lz(0.5), 1e-15);
  EXPECT_NEAR(plz_thermal_rwa(thermal(0.1, 1.0)), 0.0244339, 1e-7);
  EXPECT_EQ(plz_thermal_rwa(thermal(0.0, 1.0)), 0.0);
  EXPECT_NEAR(plz_thermal_rwa(thermal(0.1, 1.0)),
              rwa_oracle(thermal_weights_oracle(std::exp(-1.0)), lz(0.1)), 1e-12);
  // The survival orientation tends to P_up0 at T -> 0.
  EXPECT_NEAR(plz_thermal_rwa_printed(thermal(0.5, 0.0)), lz(0.5), 1e-15);
  const double nbar = 1.0 / (std::exp(1.0) - 1.0), p0 = 1.0 - lz(0.1);
  EXPECT_NEAR(plz_thermal_rwa_printed(thermal(0.1, 1.0)), (1.0 - p0) / (1.0 + nbar * p0), 1e-14);
}

TEST(Thermal, FullExamples) {
  EXPECT_NEAR(plz_thermal_norwa(thermal(0.5, 0.0)), 1.0 - lz(0.5), 1e-15);
  EXPECT_NEAR(plz_thermal_norwa(thermal(0.0, 1.0)), 0.0, 1e-15);
  for (double tw : {0.3, 1.0, 3.0})
    for (double delta : {0.1, 0.5})
      EXPECT_NEAR(plz_thermal_norwa(thermal(delta, tw)),
                  full_oracle(thermal_weights_oracle(std::exp(-1.0 / tw)), lz(delta)), 1e-12);
  EXPECT_NEAR(plz_thermal_norwa(thermal(0.1, 1.0)), 0.03283, 1e-5);
}

TEST(Thermal, PrintedFullFormDiffersFromWeightedSum) {
  EXPECT_NEAR(plz_thermal_norwa_printed(thermal(0.1, 1.0)), 0.0088298, 1e-7);
  EXPECT_NEAR(plz_thermal_norwa_printed(thermal(0.5, 0.0)), 0.0, 1e-15);
  EXPECT_GT(std::abs(plz_thermal_norwa_printed(thermal(0.1, 1.0)) - plz_thermal_norwa(thermal(0.1, 1.0))), 0.02);
}

TEST(PhotonStats, Examples) {
  const auto vac = photon_stats_infty(cat(0.0, kPi / 2, 0.5));
  ASSERT_TRUE(vac.q.has_value());
  EXPECT_NEAR(*vac.q, -(1.0 - lz(0.5)), 1e-14);
  EXPECT_NEAR(*vac.q, -0.324768, 1e-6);

  EXPECT_FALSE(photon_stats_infty(cat(0.0, kPi / 2, 0.0)).q.has_value());

  for (double theta : {0.0, 0.5 * kPi, 2.0}) {
    const auto s = photon_stats_infty(cat(1.5, theta, 0.0));
    const auto w = cat_weights_oracle(1.5, theta);
    double n1 = 0.0, n2 = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n) {
      n1 += w[n] * n;
      n2 += w[n] * n * n;
    }
    EXPECT_NEAR(s.n2, n2, 1e-12);
    EXPECT_NEAR(*s.q, (n2 - n1 * n1) / n1 - 1.0, 1e-12);
  }
  // Near-complete transfer shifts the Poisson distribution by one photon: Q = -1/(|alpha|^2 + 1).
  EXPECT_NEAR(*photon_stats_infty(cat(400.0, kPi / 2, 0.5)).q, -1.0 / 401.0, 1e-6);
}

TEST(PhotonStats, MatchesSectorSum) {
  // RWA end state: sector n stays in |up,n> with P^{n+1}, else |down,n+1>.
  for (double a2 : {0.3, 1.0, 2.0, 4.0})
    for (double theta : {0.0, 1.0, 0.5 * kPi, kPi})
      for (double delta : {0.2, 0.5, 1.0}) {
        const auto w = cat_weights_oracle(a2, theta);
        const double p = lz(delta);
        double n1 = 0.0, n2 = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) {
          const double n = static_cast<double>(k), s = std::pow(p, n + 1.0);
          n1 += w[k] * (s * n + (1.0 - s) * (n + 1.0));
          n2 += w[k] * (s * n * n + (1.0 - s) * (n + 1.0) * (n + 1.0));
        }
        const auto st = photon_stats_infty(cat(a2, theta, delta));
        EXPECT_NEAR(st.nbar, n1, 1e-12);
        EXPECT_NEAR(st.n2, n2, 1e-12);
      }
}

TEST(PhotonStats, AgreesWithDisplayedExpression) {
  for (double a2 : {0.3, 1.0, 2.0})
    for (double theta : {0.0, 1.0, 0.5 * kPi, kPi}) {
      const double p = lz(0.5);
      const double norm2 = 2.0 * (1.0 + std::cos(theta) * std::exp(-2.0 * a2));
      const double n0 = 2.0 * a2 * (1.0 - std::cos(theta) * std::exp(-2.0 * a2)) / norm2;
      const double plz = 1.0 - 2.0 * p / (norm2 * std::exp(a2)) * (std::exp(a2 * p) + std::cos(theta) * std::exp(-a2 * p));
      const double n2 = -4.0 * a2 * p * p / (norm2 * std::exp(a2)) * (std::exp(a2 * p) - std::cos(theta) * std::exp(-a2 * p)) +
                        a2 * a2 + 3.0 * n0 + plz;
      EXPECT_NEAR(photon_stats_infty(cat(a2, theta, 0.5)).n2, n2, 1e-12);
    }
}

TEST(ClosedForms, StayInUnitInterval) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ua(0.0, 10.0), ut(0.0, 2 * kPi), ud(0.01, 2.0), uT(0.0, 5.0);
  for (int i = 0; i < 500; ++i) {
    const auto in = cat(ua(rng), ut(rng), ud(rng));
    for (double v : {plz_cat_rwa(in), plz_cat_norwa(in)}) {
      EXPECT_GE(v, -1e-15);
      EXPECT_LE(v, 1.0 + 1e-15);
    }
    const auto th = thermal(in.delta, uT(rng));
    for (double v : {plz_thermal_rwa(th), plz_thermal_norwa(th)}) {
      EXPECT_GE(v, -1e-15);
      EXPECT_LE(v, 1.0 + 1e-15);
    }
  }
}

TEST(ClosedForms, RejectInvalidInputs) {
  EXPECT_THROW(plz_cat_rwa(cat(-1.0, 0.0, 0.5)), DomainError);
  auto in = thermal(0.1, 1.0);
  in.temperature = -1.0;
  EXPECT_THROW(plz_thermal_rwa(in), DomainError);
}

TEST(SectorSolution, InitialConditionAndUnitarity) {
  const auto p = LZParams::resonant(Model::rwa, 0.5, 10.0);
  for (int n : {0, 2}) {
    const auto c = sector_coeffs(n, p, -10.0);
    const auto [a0, b0] = sector_amplitudes(c, -10.0, p.v);
    EXPECT_LT(std::abs(a0 - Complex(1.0)), 1e-10);
    EXPECT_LT(std::abs(b0), 1e-10);
    for (double t = -10.0; t <= 10.0; t += 0.5) {
      const auto [a, b] = sector_amplitudes(c, t, p.v);
      EXPECT_NEAR(std::norm(a) + std::norm(b), 1.0, 1e-6) << "t = " << t;
    }
  }
}

TEST(SectorSolution, MatchesNumericalIntegration) {
  const auto p = LZParams::resonant(Model::rwa, 0.5, 10.0);
  IntegratorConfig cfg;
  cfg.t0 = -10.0;
  cfg.t1 = 10.0;
  cfg.sample_count = 41;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  for (int n : {0, 1, 3}) {
    const auto num = evolve_sector_rwa(n, p, cfg);
    const auto c = sector_coeffs(n, p, cfg.t0);
    for (std::size_t i = 0; i < num.t.size(); ++i) {
      const auto [a, b] = sector_amplitudes(c, num.t[i], p.v);
      EXPECT_LT(std::abs(a - num.a[i]), 1e-6) << "n = " << n << " t = " << num.t[i];
      EXPECT_LT(std::abs(b - num.b[i]), 1e-6) << "n = " << n << " t = " << num.t[i];
    }
  }
}

TEST(SectorSolution, LongTimeSurvival) {
  const auto p = LZParams::resonant(Model::rwa, 0.5, 10.0);
  const auto [a, b] = sector_coeffs_analytic(1, p, 1000.0, -1000.0);
  EXPECT_NEAR(std::norm(a), p_up_n(1, 0.5), 2e-3);
  EXPECT_NEAR(std::norm(a) + std::norm(b), 1.0, 1e-8);
  EXPECT_THROW(sector_coeffs(0, LZParams::resonant(Model::rwa, 0.0, 10.0), -10.0), DomainError);
}
