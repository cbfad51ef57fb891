#pragma once

// Truncated Fock space: photon states, cat and thermal initial conditions,
// and joint two-level-system (TLS) x field states.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lzcat/error.hpp"

namespace lzcat {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Extra Fock levels kept above the tail bound; the counter-rotating
/// dynamics populates neighbouring number sectors.
inline constexpr int kTruncationPad = 5;

/// Highest retained Fock level plus the probability weight admitted above it.
struct TruncationSpec {
  int n_max = 0;
  double tail_tolerance = 1e-12;

  int levels() const noexcept { return n_max + 1; }

  void validate() const {
    if (n_max < 0) throw DomainError("TruncationSpec: n_max must be >= 0");
    if (!(tail_tolerance > 0.0 && tail_tolerance < 1.0))
      throw DomainError("TruncationSpec: tail_tolerance must lie in (0, 1)");
  }
};

enum class PhotonDistribution { poisson, geometric };

namespace detail {

inline double poisson_log_pmf(double mean, int k) {
  if (mean == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return -mean + k * std::log(mean) - std::lgamma(k + 1.0);
}

// Smallest N with P(X > N) <= eps, X ~ Poisson(mean). Tails are summed
// directly from the top so no 1 - cdf cancellation enters.
inline int poisson_cutoff(double mean, double eps) {
  if (mean == 0.0) return 0;
  const int k_top = static_cast<int>(mean + 40.0 * std::sqrt(mean) + 60.0);
  std::vector<double> suffix(k_top + 2, 0.0);
  for (int k = k_top; k >= 0; --k) suffix[k] = suffix[k + 1] + std::exp(poisson_log_pmf(mean, k));
  for (int n = 0; n <= k_top; ++n)
    if (suffix[n + 1] <= eps) return n;
  return k_top;
}

inline int geometric_cutoff(double mean, double eps) {
  if (mean == 0.0) return 0;
  // P(X > N) = q^(N+1), q = mean / (1 + mean)
  const double log_q = std::log(mean) - std::log1p(mean);
  const int n = static_cast<int>(std::ceil(std::log(eps) / log_q)) - 1;
  return std::max(n, 0);
}

}  // namespace detail

/// Cutoff whose Poisson (cat/coherent) or geometric (thermal) tail above
/// n_max is at most eps, padded by kTruncationPad levels.
inline TruncationSpec choose_truncation(double mean_photon, double eps,
                                        PhotonDistribution dist = PhotonDistribution::poisson) {
  if (!(mean_photon >= 0.0) || !std::isfinite(mean_photon))
    throw DomainError("choose_truncation: mean_photon must be finite and >= 0");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("choose_truncation: eps must lie in (0, 1)");
  const int cutoff = dist == PhotonDistribution::poisson ? detail::poisson_cutoff(mean_photon, eps)
                                                         : detail::geometric_cutoff(mean_photon, eps);
  return TruncationSpec{cutoff + kTruncationPad, eps};
}

/// Normalized amplitudes over |0>..|n_max>.
class PhotonAmplitudes {
 public:
  explicit PhotonAmplitudes(CVector c) : c_(std::move(c)) {
    if (c_.size() == 0) throw DomainError("PhotonAmplitudes: empty amplitude vector");
    if (std::abs(1.0 - c_.squaredNorm()) > 1e-12)
      throw DomainError("PhotonAmplitudes: amplitudes are not normalized");
  }

  const CVector& amplitudes() const noexcept { return c_; }
  Complex operator[](Eigen::Index n) const { return c_[n]; }
  int n_max() const noexcept { return static_cast<int>(c_.size()) - 1; }

  /// Photon-number distribution |c_n|^2.
  RVector weights() const { return c_.cwiseAbs2(); }

  double mean_photon() const {
    double m = 0.0;
    for (Eigen::Index n = 0; n < c_.size(); ++n) m += static_cast<double>(n) * std::norm(c_[n]);
    return m;
  }

 private:
  CVector c_;
};

namespace detail {

// 1 + cos(theta) without cancellation near theta = pi.
inline double one_plus_cos(double theta) {
  const double c = std::cos(0.5 * theta);
  return 2.0 * c * c;
}

// theta is pi to double precision: the alpha -> 0 limit is |1> rather than |0>.
inline bool odd_vacuum_limit(double theta) { return std::cos(theta) == -1.0; }

// Unnormalized cat amplitude e^{-a^2/2} a^k (1 + e^{i theta}(-1)^k) / sqrt(k!).
inline Complex cat_raw_amplitude(double alpha, double theta, int k) {
  if (alpha == 0.0) {
    return k == 0 ? Complex(1.0, 0.0) + std::polar(1.0, theta) : Complex(0.0, 0.0);
  }
  const double magnitude =
      std::exp(-0.5 * alpha * alpha + k * std::log(alpha) - 0.5 * std::lgamma(k + 1.0));
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return magnitude * (Complex(1.0, 0.0) + sign * std::polar(1.0, theta));
}

// N_theta^2 = 2(1 + cos(theta) e^{-2 a^2}), arranged to stay accurate for
// small alpha near theta = pi.
inline double cat_norm2(double alpha, double theta) {
  const double a2 = alpha * alpha;
  return 2.0 * (-std::expm1(-2.0 * a2) + one_plus_cos(theta) * std::exp(-2.0 * a2));
}

// Exact probability weight of the normalized cat above level n_max.
inline double cat_tail(double alpha, double theta, int n_max) {
  const double norm2 = cat_norm2(alpha, theta);
  if (alpha == 0.0) return 0.0;
  double tail = 0.0;
  const int k_stop = static_cast<int>(alpha * alpha + 40.0 * alpha + 60.0);
  for (int k = n_max + 1; k <= k_stop; ++k) tail += std::norm(cat_raw_amplitude(alpha, theta, k));
  return tail / norm2;
}

}  // namespace detail

/// Fock state |n>.
inline PhotonAmplitudes make_fock(int n, const TruncationSpec& trunc) {
  trunc.validate();
  if (n < 0 || n > trunc.n_max)
    throw DomainError("make_fock: level " + std::to_string(n) + " outside 0.." +
                      std::to_string(trunc.n_max));
  CVector c = CVector::Zero(trunc.levels());
  c[n] = 1.0;
  return PhotonAmplitudes(std::move(c));
}

/// Coherent superposition (|alpha> + e^{i theta}|-alpha>)/N_theta for real
/// alpha >= 0. The alpha -> 0 limit of the odd cat (theta = pi) is |1>.
inline PhotonAmplitudes make_cat(double alpha, double theta, const TruncationSpec& trunc) {
  trunc.validate();
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("make_cat: alpha must be real and >= 0");
  if (!std::isfinite(theta)) throw DomainError("make_cat: theta must be finite");

  const double norm2 = detail::cat_norm2(alpha, theta);
  if (norm2 == 0.0 || (alpha == 0.0 && detail::odd_vacuum_limit(theta))) {
    if (trunc.n_max < 1) throw TruncationError("make_cat: odd-cat vacuum limit needs n_max >= 1");
    return make_fock(1, trunc);
  }

  const double tail = detail::cat_tail(alpha, theta, trunc.n_max);
  if (tail > trunc.tail_tolerance)
    throw TruncationError("make_cat: truncated norm deficit " + std::to_string(tail) +
                          " exceeds tail tolerance at n_max = " + std::to_string(trunc.n_max));

  CVector c(trunc.levels());
  for (int k = 0; k <= trunc.n_max; ++k) c[k] = detail::cat_raw_amplitude(alpha, theta, k);
  c /= c.norm();
  return PhotonAmplitudes(std::move(c));
}

/// Poisson-based cutoff, raised until the exact cat tail fits under eps,
/// then padded.
inline TruncationSpec truncation_for_cat(double alpha, double theta, double eps) {
  if (!(alpha >= 0.0)) throw DomainError("truncation_for_cat: alpha must be >= 0");
  int n = choose_truncation(alpha * alpha, eps).n_max - kTruncationPad;
  if (detail::cat_norm2(alpha, theta) > 0.0)
    while (detail::cat_tail(alpha, theta, n) > eps) ++n;
  return TruncationSpec{std::max(n, 1) + kTruncationPad, eps};
}

/// Boltzmann weights p(n) ~ e^{-n omega/T} over 0..n_max, renormalized.
/// T = 0 is the vacuum.
inline RVector thermal_weights(double omega, double temperature, const TruncationSpec& trunc) {
  trunc.validate();
  if (!(omega > 0.0)) throw DomainError("thermal_weights: omega must be > 0");
  if (!(temperature >= 0.0)) throw DomainError("thermal_weights: negative temperature");

  RVector p = RVector::Zero(trunc.levels());
  if (temperature == 0.0) {
    p[0] = 1.0;
    return p;
  }
  const double ratio = std::exp(-omega / temperature);
  const double tail = std::pow(ratio, trunc.n_max + 1);
  if (tail > trunc.tail_tolerance)
    throw TruncationError("thermal_weights: thermal tail " + std::to_string(tail) +
                          " exceeds tail tolerance at n_max = " + std::to_string(trunc.n_max));
  p[0] = 1.0;
  for (int n = 1; n <= trunc.n_max; ++n) p[n] = p[n - 1] * ratio;
  p /= p.sum();
  return p;
}

/// Mean photon number of the untruncated thermal state, 1/(e^{omega/T} - 1).
inline double thermal_mean_photon(double omega, double temperature) {
  if (temperature == 0.0) return 0.0;
  return 1.0 / std::expm1(omega / temperature);
}

/// Amplitudes over the product basis, stored as [up_0..up_N, down_0..down_N].
class JointState {
 public:
  JointState(CVector amplitudes, double t) : amps_(std::move(amplitudes)), t_(t) {
    if (amps_.size() < 2 || amps_.size() % 2 != 0)
      throw DomainError("JointState: amplitude vector must have even length >= 2");
  }

  static JointState from_parts(const CVector& up, const CVector& down, double t) {
    if (up.size() != down.size()) throw DomainError("JointState: up/down length mismatch");
    CVector amps(up.size() + down.size());
    amps << up, down;
    return JointState(std::move(amps), t);
  }

  Eigen::Index levels() const noexcept { return amps_.size() / 2; }
  int n_max() const noexcept { return static_cast<int>(levels()) - 1; }
  Eigen::Index dim() const noexcept { return amps_.size(); }
  double t() const noexcept { return t_; }

  const CVector& amplitudes() const noexcept { return amps_; }
  auto up() const { return amps_.head(levels()); }
  auto down() const { return amps_.tail(levels()); }

  double norm2() const { return amps_.squaredNorm(); }

  JointState at_time(double t) const { return JointState(amps_, t); }

 private:
  CVector amps_;
  double t_;
};

/// |up> (x) photon state. The time stays unset until a propagator assigns it.
inline JointState joint_up(const PhotonAmplitudes& ph) {
  const CVector& c = ph.amplitudes();
  return JointState::from_parts(c, CVector::Zero(c.size()), std::numeric_limits<double>::quiet_NaN());
}

/// Diagonal thermal ensemble: Boltzmann weights and one |up, n> member per level.
struct ThermalEnsemble {
  RVector weights;
  std::vector<JointState> sector_states;
};

inline ThermalEnsemble make_thermal_ensemble(double omega, double temperature,
                                             const TruncationSpec& trunc) {
  ThermalEnsemble ens{thermal_weights(omega, temperature, trunc), {}};
  ens.sector_states.reserve(static_cast<std::size_t>(trunc.levels()));
  for (int n = 0; n <= trunc.n_max; ++n) ens.sector_states.push_back(joint_up(make_fock(n, trunc)));
  return ens;
}

/// Geometric-tail cutoff for a thermal field at (omega, T).
inline TruncationSpec truncation_for_thermal(double omega, double temperature, double eps) {
  return choose_truncation(thermal_mean_photon(omega, temperature), eps,
                           PhotonDistribution::geometric);
}

}  // namespace lzcat
