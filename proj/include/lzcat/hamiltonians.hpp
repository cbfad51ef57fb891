#pragma once

// Time-dependent Hamiltonians of a swept TLS coupled to one photon mode.
//
// Basis ordering follows JointState: [up_0..up_N, down_0..down_N]. Energies
// are in units of sqrt(v), times in 1/sqrt(v).
//
//   rotating frame (w.r.t. omega*Nhat, Nhat = a^dag a + sigma_z/2):
//     up_n   : -(v t - detuning)/2
//     down_n : +(v t - detuning)/2
//     <up,n|H|down,n+1> = -(Delta/2) sqrt(n+1)
//     <up,n|H|down,n-1> = -(Delta/2) sqrt(n) e^{2 i omega t}   (FULL only)
//   lab frame: the same plus omega*Nhat on the diagonal and no phase on the
//   counter-rotating element.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lzcat/error.hpp"
#include "lzcat/fockspace.hpp"

namespace lzcat {

enum class Model { rwa, full };
enum class Frame { rotating, lab };

inline std::string to_string(Model m) { return m == Model::rwa ? "rwa" : "full"; }
inline std::string to_string(Frame f) { return f == Frame::rotating ? "rotating" : "lab"; }

struct LZParams {
  double v = 1.0;
  double delta = 0.0;
  double omega = 10.0;
  double omega0 = 10.0;
  Model model = Model::rwa;

  static LZParams resonant(Model model, double delta, double omega, double v = 1.0) {
    return LZParams{v, delta, omega, omega, model};
  }

  double detuning() const noexcept { return omega0 - omega; }

  void validate() const {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("LZParams: sweep velocity v must be > 0");
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw DomainError("LZParams: coupling delta must be >= 0");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("LZParams: omega must be > 0");
    if (!std::isfinite(omega0)) throw DomainError("LZParams: omega0 must be finite");
    if (model == Model::full && detuning() != 0.0)
      throw DomainError("LZParams: finite detuning is only supported under the RWA");
  }
};

/// RWA dynamics is written in the rotating frame, FULL in the lab frame.
inline Frame canonical_frame(Model m) noexcept { return m == Model::rwa ? Frame::rotating : Frame::lab; }

namespace detail {

struct HamiltonianTerms {
  double diag_up_offset;    // -(v t - detuning)/2
  double omega_lab;         // omega in the lab frame, 0 in the rotating frame
  Complex counter_phase;    // e^{2 i omega t} in the rotating frame, 1 in the lab frame
  double half_delta;
  bool counter_rotating;
};

inline HamiltonianTerms terms(const LZParams& p, double t, Frame frame) {
  const bool lab = frame == Frame::lab;
  return HamiltonianTerms{-0.5 * (p.v * t - p.detuning()), lab ? p.omega : 0.0,
                          lab ? Complex(1.0, 0.0) : std::polar(1.0, 2.0 * p.omega * t), 0.5 * p.delta,
                          p.model == Model::full};
}

}  // namespace detail

/// out = H(t) psi. `psi` and `out` use the JointState layout.
template <class In, class Out>
void hamiltonian_action(const LZParams& p, double t, Frame frame, const In& psi, Out& out) {
  const Eigen::Index levels = psi.size() / 2;
  const auto k = detail::terms(p, t, frame);
  auto up = psi.head(levels);
  auto dn = psi.tail(levels);
  auto out_up = out.head(levels);
  auto out_dn = out.tail(levels);

  for (Eigen::Index n = 0; n < levels; ++n) {
    const double number = static_cast<double>(n);
    out_up[n] = (k.diag_up_offset + k.omega_lab * (number + 0.5)) * up[n];
    out_dn[n] = (-k.diag_up_offset + k.omega_lab * (number - 0.5)) * dn[n];
  }
  for (Eigen::Index n = 0; n + 1 < levels; ++n) {
    const double g = -k.half_delta * std::sqrt(static_cast<double>(n + 1));
    out_up[n] += g * dn[n + 1];
    out_dn[n + 1] += g * up[n];
  }
  if (k.counter_rotating) {
    for (Eigen::Index n = 1; n < levels; ++n) {
      const Complex h = -k.half_delta * std::sqrt(static_cast<double>(n)) * k.counter_phase;
      out_up[n] += h * dn[n - 1];
      out_dn[n - 1] += std::conj(h) * up[n];
    }
  }
}

/// Schroedinger right-hand side -i H(t) psi in the given frame.
inline CVector apply_h(const LZParams& p, double t, const JointState& state, Frame frame) {
  CVector out(state.dim());
  hamiltonian_action(p, t, frame, state.amplitudes(), out);
  return Complex(0.0, -1.0) * out;
}

inline CVector apply_h(const LZParams& p, double t, const JointState& state) {
  return apply_h(p, t, state, canonical_frame(p.model));
}

/// Dense H(t) over 2(n_max+1) basis states.
inline Eigen::MatrixXcd hamiltonian_matrix(const LZParams& p, double t, int n_max, Frame frame) {
  const Eigen::Index dim = 2 * static_cast<Eigen::Index>(n_max + 1);
  Eigen::MatrixXcd h(dim, dim);
  CVector basis = CVector::Zero(dim);
  CVector column(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    basis[j] = 1.0;
    hamiltonian_action(p, t, frame, basis, column);
    h.col(j) = column;
    basis[j] = 0.0;
  }
  return h;
}

struct SpectrumSlice {
  double t = 0.0;
  RVector eigenvalues;  // ascending
};

/// Instantaneous eigenvalues on a time grid. FULL spectra are only
/// meaningful in the lab frame; the rotating-frame FULL generator carries
/// explicit e^{2 i omega t} phases.
inline std::vector<SpectrumSlice> adiabatic_spectrum(const LZParams& p, const std::vector<double>& t_grid,
                                                     const TruncationSpec& trunc, Frame frame) {
  p.validate();
  trunc.validate();
  if (p.model == Model::full && frame != Frame::lab)
    throw DomainError("adiabatic_spectrum: FULL model spectrum requires the lab frame");
  std::vector<SpectrumSlice> slices;
  slices.reserve(t_grid.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  for (double t : t_grid) {
    if (!std::isfinite(t)) throw DomainError("adiabatic_spectrum: non-finite time in grid");
    const Eigen::MatrixXd h = hamiltonian_matrix(p, t, trunc.n_max, frame).real();
    solver.compute(h, Eigen::EigenvaluesOnly);
    slices.push_back(SpectrumSlice{t, solver.eigenvalues()});
  }
  return slices;
}

inline std::vector<SpectrumSlice> adiabatic_spectrum(const LZParams& p, const std::vector<double>& t_grid,
                                                     const TruncationSpec& trunc) {
  return adiabatic_spectrum(p, t_grid, trunc, p.model == Model::full ? Frame::lab : Frame::rotating);
}

struct CrossingTimes {
  double t_cross;  // separation of the rotating and counter-rotating crossing groups, 2 omega / v
  double tau_lz;   // duration of a single transition, max(1/sqrt(v), Delta/v)
};

inline CrossingTimes crossing_times(const LZParams& p) {
  return CrossingTimes{2.0 * p.omega / p.v, std::max(1.0 / std::sqrt(p.v), p.delta / p.v)};
}

/// True when the two crossing groups can be treated as independent
/// transitions for a cat of amplitude alpha: omega > max(sqrt(v)/4, |alpha| Delta).
inline bool independence_check(const LZParams& p, double alpha) {
  return p.omega > std::max(0.25 * std::sqrt(p.v), std::abs(alpha) * p.delta);
}

/// Maps a rotating-frame state to the lab frame: psi_lab = e^{-i omega t Nhat} psi_rot.
inline JointState to_lab_frame(const JointState& rotating, double omega) {
  const Eigen::Index levels = rotating.levels();
  CVector amps = rotating.amplitudes();
  const double t = rotating.t();
  for (Eigen::Index n = 0; n < levels; ++n) {
    const double number = static_cast<double>(n);
    amps[n] *= std::polar(1.0, -omega * t * (number + 0.5));
    amps[levels + n] *= std::polar(1.0, -omega * t * (number - 0.5));
  }
  return JointState(std::move(amps), t);
}

/// Inverse of to_lab_frame.
inline JointState to_rotating_frame(const JointState& lab, double omega) {
  return to_lab_frame(lab, -omega);
}

}  // namespace lzcat
