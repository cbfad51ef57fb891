#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lzcat/hamiltonians.hpp"
#include "lzcat/observables.hpp"

using namespace lzcat;

namespace {

const Complex kI(0.0, 1.0);

JointState basis_state(int levels, bool up, int n, double t = 0.0) {
  CVector v = CVector::Zero(2 * levels);
  v[(up ? 0 : levels) + n] = 1.0;
  return JointState(v, t);
}

JointState random_state(int levels, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector v(2 * levels);
  for (auto& x : v) x = Complex(g(rng), g(rng));
  v.normalize();
  return JointState(v, 0.0);
}

// Photon-number sector of each basis index under Nhat = a^dag a + sigma_z/2:
// |up,n> and |down,n+1> share the value n + 1/2.
double sector_of(int index, int levels) { return index < levels ? index + 0.5 : (index - levels) - 0.5; }

}  // namespace

TEST(ApplyH, UncoupledIsPureDiagonalPhase) {
  const auto p = LZParams::resonant(Model::rwa, 0.0, 10.0);
  const double t = 3.7;
  std::mt19937_64 rng(1);
  const auto s = random_state(6, rng).at_time(t);
  const CVector d = apply_h(p, t, s);
  for (Eigen::Index n = 0; n < 6; ++n) {
    EXPECT_NEAR(std::abs(d[n] - (-kI) * (-0.5 * t) * s.up()[n]), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(d[6 + n] - (-kI) * (0.5 * t) * s.down()[n]), 0.0, 1e-14);
  }
}

TEST(ApplyH, RwaVacuumCouplesOnlyToDownOne) {
  const auto p = LZParams::resonant(Model::rwa, 0.5, 10.0);
  const auto s = basis_state(4, true, 0);
  const CVector d = apply_h(p, 0.0, s);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (i == 4 + 1) {
      EXPECT_NEAR(std::abs(d[i] - (-kI) * (-0.25)), 0.0, 1e-15);
    } else {
      EXPECT_EQ(std::abs(d[i]), 0.0) << "index " << i;
    }
  }
}

TEST(ApplyH, CounterRotatingCouplesDownward) {
  const auto p = LZParams::resonant(Model::full, 0.5, 10.0);
  const auto s = basis_state(4, true, 1);
  const CVector d = apply_h(p, 0.0, s, Frame::lab);
  EXPECT_NEAR(std::abs(d[4 + 2]), std::sqrt(2.0) * 0.25, 1e-15);
  EXPECT_NEAR(std::abs(d[4 + 0]), 0.25, 1e-15);
  // Diagonal term in the lab frame: omega (n + 1/2) at t = 0.
  EXPECT_NEAR(std::abs(d[1] - (-kI) * 15.0), 0.0, 1e-13);
}

TEST(ApplyH, RotatingFrameCounterTermCarriesPhase) {
  const auto p = LZParams::resonant(Model::full, 0.5, 10.0);
  const double t = 0.3;
  const auto s = basis_state(4, true, 1, t);
  const CVector d = apply_h(p, t, s, Frame::rotating);
  // <down,0|H|up,1> = -(Delta/2) e^{-2 i omega t}
  EXPECT_NEAR(std::abs(d[4] - (-kI) * (-0.25) * std::polar(1.0, -2.0 * 10.0 * t)), 0.0, 1e-15);
}

TEST(Hamiltonian, Hermitian) {
  std::mt19937_64 rng(11);
  for (Model m : {Model::rwa, Model::full})
    for (Frame f : {Frame::rotating, Frame::lab}) {
      const auto p = LZParams::resonant(m, 0.7, 3.0);
      for (int trial = 0; trial < 10; ++trial) {
        const double t = -5.0 + trial;
        const auto phi = random_state(7, rng), psi = random_state(7, rng);
        CVector h_psi(14), h_phi(14);
        hamiltonian_action(p, t, f, psi.amplitudes(), h_psi);
        hamiltonian_action(p, t, f, phi.amplitudes(), h_phi);
        const Complex lhs = phi.amplitudes().dot(h_psi);
        const Complex rhs = std::conj(psi.amplitudes().dot(h_phi));
        EXPECT_LE(std::abs(lhs - rhs), 1e-12);
      }
      const auto h = hamiltonian_matrix(p, 1.3, 6, f);
      EXPECT_LE((h - h.adjoint()).norm(), 1e-12);
    }
}

TEST(Hamiltonian, RwaPreservesExcitationSectors) {
  const auto p = LZParams::resonant(Model::rwa, 0.8, 10.0);
  const int levels = 6;
  for (int i = 0; i < 2 * levels; ++i) {
    CVector e = CVector::Zero(2 * levels);
    e[i] = 1.0;
    const CVector d = apply_h(p, 1.1, JointState(e, 1.1));
    for (int j = 0; j < 2 * levels; ++j) {
      if (sector_of(j, levels) != sector_of(i, levels)) {
        EXPECT_EQ(std::abs(d[j]), 0.0) << i << "->" << j;
      }
    }
  }
}

TEST(Hamiltonian, FullModelLeaksBetweenSectors) {
  const auto p = LZParams::resonant(Model::full, 0.5, 10.0);
  const int levels = 6;
  double leak = 0.0;
  for (int i = 0; i < 2 * levels; ++i) {
    CVector e = CVector::Zero(2 * levels);
    e[i] = 1.0;
    const CVector d = apply_h(p, 0.0, JointState(e, 0.0), Frame::lab);
    for (int j = 0; j < 2 * levels; ++j)
      if (sector_of(j, levels) != sector_of(i, levels)) leak = std::max(leak, std::abs(d[j]));
  }
  EXPECT_GT(leak, 0.1);
}

TEST(Spectrum, UncoupledRwaLevelsAreDiabaticLines) {
  const auto p = LZParams::resonant(Model::rwa, 0.0, 10.0);
  const auto slices = adiabatic_spectrum(p, {-3.0, 0.0, 2.5}, TruncationSpec{3, 1e-12});
  for (const auto& s : slices) {
    ASSERT_EQ(s.eigenvalues.size(), 8);
    for (Eigen::Index k = 0; k < 4; ++k) EXPECT_NEAR(s.eigenvalues[k], -0.5 * std::abs(s.t), 1e-12);
    for (Eigen::Index k = 4; k < 8; ++k) EXPECT_NEAR(s.eigenvalues[k], 0.5 * std::abs(s.t), 1e-12);
    EXPECT_TRUE(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
  }
}

TEST(Spectrum, SectorGapAtCrossingIsEnhancedCoupling) {
  // At t = 0 sector n is a 2x2 block with splitting Delta sqrt(n+1); the same
  // gap appears in both frames.
  const double delta = 0.5;
  for (Frame f : {Frame::rotating, Frame::lab}) {
    const auto p = LZParams::resonant(Model::rwa, delta, 10.0);
    const auto s = adiabatic_spectrum(p, {0.0}, TruncationSpec{4, 1e-12}, f).front();
    for (int n = 0; n < 4; ++n) {
      const double centre = f == Frame::lab ? 10.0 * (n + 0.5) : 0.0;
      for (double sign : {-1.0, 1.0}) {
        const double target = centre + sign * 0.5 * delta * std::sqrt(n + 1.0);
        double best = 1e9;
        for (double e : s.eigenvalues) best = std::min(best, std::abs(e - target));
        EXPECT_LT(best, 1e-12) << "n = " << n;
      }
    }
  }
}

TEST(Spectrum, FullModelHasSecondCrossingGroup) {
  const auto full = LZParams::resonant(Model::full, 0.5, 10.0);
  const auto rwa = LZParams::resonant(Model::rwa, 0.5, 10.0);
  const double t_cross = crossing_times(full).t_cross;
  // |up,1> and |down,0> are degenerate at t = 2 omega / v (energy 5). The
  // counter-rotating element opens a gap ~ Delta there; the RWA does not.
  auto gap_near = [](const SpectrumSlice& s, double energy) {
    std::vector<double> d(s.eigenvalues.begin(), s.eigenvalues.end());
    std::sort(d.begin(), d.end(), [&](double a, double b) { return std::abs(a - energy) < std::abs(b - energy); });
    return std::abs(d[0] - d[1]);
  };
  const auto f = adiabatic_spectrum(full, {t_cross, t_cross - 1.0}, TruncationSpec{4, 1e-12});
  EXPECT_NEAR(gap_near(f[0], 5.0), 0.5, 0.01);
  EXPECT_GT(gap_near(f[1], 5.0), 1.0);
  // Under the RWA the two levels belong to different sectors and cross
  // exactly (second-order shifts move the crossing slightly off t_cross).
  std::vector<double> ts;
  for (int i = -1000; i <= 1000; ++i) ts.push_back(t_cross + 1e-3 * i);
  double rwa_min = 1e9, full_min = 1e9;
  for (const auto& s : adiabatic_spectrum(rwa, ts, TruncationSpec{4, 1e-12}, Frame::lab))
    rwa_min = std::min(rwa_min, gap_near(s, 5.0));
  for (const auto& s : adiabatic_spectrum(full, ts, TruncationSpec{4, 1e-12}))
    full_min = std::min(full_min, gap_near(s, 5.0));
  EXPECT_LT(rwa_min, 2e-3);
  EXPECT_GT(full_min, 0.4);
  EXPECT_THROW(adiabatic_spectrum(full, {0.0}, TruncationSpec{4, 1e-12}, Frame::rotating), DomainError);
  EXPECT_THROW(adiabatic_spectrum(rwa, {std::nan("")}, TruncationSpec{4, 1e-12}), DomainError);
}

TEST(CrossingTimes, Examples) {
  EXPECT_DOUBLE_EQ(crossing_times(LZParams::resonant(Model::full, 0.5, 10.0)).t_cross, 20.0);
  EXPECT_DOUBLE_EQ(crossing_times(LZParams::resonant(Model::full, 0.5, 10.0)).tau_lz, 1.0);
  EXPECT_DOUBLE_EQ(crossing_times(LZParams::resonant(Model::full, 2.0, 10.0)).tau_lz, 2.0);
}

TEST(IndependenceCheck, Examples) {
  EXPECT_TRUE(independence_check(LZParams::resonant(Model::full, 0.5, 10.0), 1.0));
  EXPECT_FALSE(independence_check(LZParams::resonant(Model::full, 0.5, 1.0), 4.0));
  EXPECT_TRUE(independence_check(LZParams::resonant(Model::full, 0.0, 0.3), 100.0));
  EXPECT_FALSE(independence_check(LZParams::resonant(Model::full, 0.0, 0.2), 0.0));
}

TEST(LZParams, Validation) {
  EXPECT_THROW((LZParams{0.0, 0.5, 10.0, 10.0, Model::rwa}.validate()), DomainError);
  EXPECT_THROW((LZParams{1.0, -0.5, 10.0, 10.0, Model::rwa}.validate()), DomainError);
  EXPECT_THROW((LZParams{1.0, 0.5, 0.0, 0.0, Model::rwa}.validate()), DomainError);
  EXPECT_THROW((LZParams{1.0, 0.5, 10.0, 11.0, Model::full}.validate()), DomainError);
  EXPECT_NO_THROW((LZParams{1.0, 0.5, 10.0, 11.0, Model::rwa}.validate()));
  EXPECT_DOUBLE_EQ((LZParams{1.0, 0.5, 10.0, 11.0, Model::rwa}.detuning()), 1.0);
}

TEST(Frames, RoundTripAndObservableInvariance) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    const auto s = random_state(8, rng).at_time(0.37 * i - 1.0);
    const auto lab = to_lab_frame(s, 10.0);
    EXPECT_LE((to_rotating_frame(lab, 10.0).amplitudes() - s.amplitudes()).norm(), 1e-14);
    EXPECT_NEAR(p_lz(lab), p_lz(s), 1e-14);
    EXPECT_NEAR(linear_entropy(reduce_tls(lab)), linear_entropy(reduce_tls(s)), 1e-14);
    EXPECT_NEAR(photon_moments(lab).n2, photon_moments(s).n2, 1e-12);
  }
}
