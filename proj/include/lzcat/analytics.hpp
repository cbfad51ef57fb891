#pragma once

// Closed-form long-time transition probabilities, photon statistics and the
// exact RWA sector solution in parabolic cylinder functions.
//
// The distribution-averaged results are all built on the photon generating
// function R(x) = sum_n |C_n|^2 x^n: with P = P_up0 the single-crossing
// survival probability,
//   RWA:  P_LZ = 1 - P R(P)
//   FULL: P_LZ = [(1 + P) R(P) - (1 + P^2) R(P^2)] / P
// (the second from the joint two-crossing survival of each Fock level).

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <utility>

#include "lzcat/error.hpp"
#include "lzcat/fockspace.hpp"
#include "lzcat/hamiltonians.hpp"
#include "lzcat/special/pcf.hpp"

namespace lzcat::analytic {

inline constexpr double kPi = std::numbers::pi;

/// Survival probability of |up> through a single crossing, e^{-pi Delta^2 / (2 v)}.
inline double p_up0(double delta, double v = 1.0) {
  if (!(v > 0.0)) throw DomainError("p_up0: v must be > 0");
  return std::exp(-kPi * delta * delta / (2.0 * v));
}

/// Survival in sector n, P_up0^{n+1}; n = -1 (no crossing) gives 1.
inline double p_up_n(int n, double delta, double v = 1.0) {
  if (n < -1) throw DomainError("p_up_n: n must be >= -1");
  return std::exp(-kPi * delta * delta * (n + 1.0) / (2.0 * v));
}

/// 1 - sum_n w_n P_up,n for an arbitrary photon-number distribution.
inline double plz_fock_avg(const RVector& weights, double delta, double v = 1.0) {
  const double p = p_up0(delta, v);
  double survive = 0.0, pn = p;
  for (Eigen::Index n = 0; n < weights.size(); ++n, pn *= p) survive += weights[n] * pn;
  return 1.0 - survive;
}

struct ClosedFormInputs {
  double alpha2 = 0.0;  // |alpha|^2
  double theta = 0.0;
  double delta = 0.5;
  double v = 1.0;
  double omega = 10.0;
  double temperature = 0.0;

  void validate() const {
    if (!(alpha2 >= 0.0) || !std::isfinite(alpha2)) throw DomainError("closed form: alpha2 must be >= 0");
    if (!std::isfinite(theta)) throw DomainError("closed form: theta must be finite");
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw DomainError("closed form: delta must be >= 0");
    if (!(v > 0.0)) throw DomainError("closed form: v must be > 0");
    if (!(omega > 0.0)) throw DomainError("closed form: omega must be > 0");
    if (!(temperature >= 0.0)) throw DomainError("closed form: temperature must be >= 0");
  }
};

// --- cat states -------------------------------------------------------------

/// N_theta^2 = 2(1 + cos(theta) e^{-2|alpha|^2}).
inline double cat_norm2(double alpha2, double theta) {
  return 2.0 * (-std::expm1(-2.0 * alpha2) + lzcat::detail::one_plus_cos(theta) * std::exp(-2.0 * alpha2));
}

/// Initial mean photon number 2|alpha|^2 (1 - cos(theta) e^{-2|alpha|^2}) / N_theta^2;
/// 1 in the odd-cat vacuum limit.
inline double cat_mean_photon(double alpha2, double theta) {
  const double eps = lzcat::detail::one_plus_cos(theta);
  if (alpha2 == 0.0) return lzcat::detail::odd_vacuum_limit(theta) ? 1.0 : 0.0;
  const double one_minus_cos = 2.0 - eps;
  const double num = -std::expm1(-2.0 * alpha2) + one_minus_cos * std::exp(-2.0 * alpha2);
  return 2.0 * alpha2 * num / cat_norm2(alpha2, theta);
}

namespace detail {

// R(x) = 2 e^{-a} (e^{a x} + cos(theta) e^{-a x}) / N^2, written without
// cancellation for small a near theta = pi.
inline double cat_generating(double a, double theta, double x) {
  const double eps = lzcat::detail::one_plus_cos(theta);
  if (a == 0.0) return lzcat::detail::odd_vacuum_limit(theta) ? x : 1.0;
  const double num = std::exp(-a * (1.0 - x)) * -std::expm1(-2.0 * a * x) + eps * std::exp(-a * (1.0 + x));
  const double den = -std::expm1(-2.0 * a) + eps * std::exp(-2.0 * a);
  return num / den;
}

// R'(x) = 2 a e^{-a} (e^{a x} - cos(theta) e^{-a x}) / N^2.
inline double cat_generating_slope(double a, double theta, double x) {
  const double eps = lzcat::detail::one_plus_cos(theta);
  if (a == 0.0) return lzcat::detail::odd_vacuum_limit(theta) ? 1.0 : 0.0;
  const double num = std::exp(-a * (1.0 - x)) + (1.0 - eps) * std::exp(-a * (1.0 + x));
  const double den = -std::expm1(-2.0 * a) + eps * std::exp(-2.0 * a);
  return a * num / den;
}

inline double full_from_generating(double p, double r_p, double r_p2) {
  return ((1.0 + p) * r_p - (1.0 + p * p) * r_p2) / p;
}

}  // namespace detail

/// Yurke-Stoler cat (theta = pi/2): 1 - P e^{-|alpha|^2 (1 - P)}.
inline double plz_yurke_stoler(double alpha2, double delta, double v = 1.0) {
  const double p = p_up0(delta, v);
  return 1.0 - p * std::exp(-alpha2 * (1.0 - p));
}

/// Even cat (theta = 0): 1 - P cosh(|alpha|^2 P) / cosh(|alpha|^2).
inline double plz_even_cat(double alpha2, double delta, double v = 1.0) {
  const double p = p_up0(delta, v);
  const double ratio = std::exp(-alpha2 * (1.0 - p)) * (1.0 + std::exp(-2.0 * alpha2 * p)) /
                       (1.0 + std::exp(-2.0 * alpha2));
  return 1.0 - p * ratio;
}

/// Odd cat (theta = pi): 1 - P sinh(|alpha|^2 P) / sinh(|alpha|^2); 1 - P^2 as |alpha| -> 0.
inline double plz_odd_cat(double alpha2, double delta, double v = 1.0) {
  const double p = p_up0(delta, v);
  if (alpha2 == 0.0) return 1.0 - p * p;
  const double ratio = std::exp(-alpha2 * (1.0 - p)) * std::expm1(-2.0 * alpha2 * p) / std::expm1(-2.0 * alpha2);
  return 1.0 - p * ratio;
}

/// General cat under the RWA, 1 - P R(P), without special-angle dispatch.
inline double plz_cat_rwa_general(const ClosedFormInputs& in) {
  in.validate();
  const double p = p_up0(in.delta, in.v);
  return 1.0 - p * detail::cat_generating(in.alpha2, in.theta, p);
}

/// General cat under the RWA; theta in {pi/2, 0, pi} use the specialized forms.
inline double plz_cat_rwa(const ClosedFormInputs& in) {
  in.validate();
  if (in.theta == 0.5 * kPi) return plz_yurke_stoler(in.alpha2, in.delta, in.v);
  if (in.theta == 0.0) return plz_even_cat(in.alpha2, in.delta, in.v);
  if (in.theta == kPi) return plz_odd_cat(in.alpha2, in.delta, in.v);
  return plz_cat_rwa_general(in);
}

/// Probability that |up, n> is again |up> after both crossing groups:
/// P_{n-1} P_n + (1 - P_{n-1})(1 - P_{n-2}), P_m = P_up0^{m+1}.
inline double joint_up_prob(int n, double delta, double v = 1.0) {
  if (n < 0) throw DomainError("joint_up_prob: n must be >= 0");
  const double first = p_up_n(n - 1, delta, v) * p_up_n(n, delta, v);
  if (n == 0) return first;  // 1 - P_{-1} = 0
  return first + (1.0 - p_up_n(n - 1, delta, v)) * (1.0 - p_up_n(n - 2, delta, v));
}

/// Same two-path sum with the crossings taken in the order this Hamiltonian
/// meets them (RWA partner at t = 0, counter-rotating partner at t = 2 omega / v):
/// P_n P_{n-1} + (1 - P_n)(1 - P_{n+1}). Fock-state numerics follow this form.
inline double joint_up_prob_sweep_order(int n, double delta, double v = 1.0) {
  if (n < 0) throw DomainError("joint_up_prob_sweep_order: n must be >= 0");
  return p_up_n(n, delta, v) * p_up_n(n - 1, delta, v) +
         (1.0 - p_up_n(n, delta, v)) * (1.0 - p_up_n(n + 1, delta, v));
}

/// sum_n w_n (1 - joint_up_prob(n)), the direct FULL-model sum.
inline double plz_full_fock_avg(const RVector& weights, double delta, double v = 1.0) {
  double out = 0.0;
  for (Eigen::Index n = 0; n < weights.size(); ++n)
    out += weights[n] * (1.0 - joint_up_prob(static_cast<int>(n), delta, v));
  return out;
}

struct CatFullResult {
  double p_lz;
  bool independent;  // crossing groups well separated (see independence_check)
};

/// General cat beyond the RWA (two independent crossing groups).
inline CatFullResult plz_cat_norwa_checked(const ClosedFormInputs& in) {
  in.validate();
  if (!(in.delta > 0.0)) throw DomainError("plz_cat_norwa: requires delta > 0");
  const double p = p_up0(in.delta, in.v);
  const double value = detail::full_from_generating(p, detail::cat_generating(in.alpha2, in.theta, p),
                                                    detail::cat_generating(in.alpha2, in.theta, p * p));
  const LZParams params{in.v, in.delta, in.omega, in.omega, Model::full};
  return {value, independence_check(params, std::sqrt(in.alpha2))};
}

inline double plz_cat_norwa(const ClosedFormInputs& in) { return plz_cat_norwa_checked(in).p_lz; }

// --- thermal field ----------------------------------------------------------

namespace detail {

inline double boltzmann_ratio(double omega, double temperature) {
  return temperature == 0.0 ? 0.0 : std::exp(-omega / temperature);
}

// R_T(x) = (1 - q) / (1 - q x)
inline double thermal_generating(double q, double x) { return (1.0 - q) / (1.0 - q * x); }

}  // namespace detail

/// Thermal field under the RWA: 1 - (1 - P_0LZ)/(1 + nbar P_0LZ), P_0LZ = 1 - P.
inline double plz_thermal_rwa(const ClosedFormInputs& in) {
  in.validate();
  const double p = p_up0(in.delta, in.v);
  return 1.0 - p * detail::thermal_generating(detail::boltzmann_ratio(in.omega, in.temperature), p);
}

/// The complementary orientation (1 - P_0LZ)/(1 + nbar P_0LZ), i.e. the
/// long-time survival probability; tends to P_up0 as T -> 0.
inline double plz_thermal_rwa_printed(const ClosedFormInputs& in) { return 1.0 - plz_thermal_rwa(in); }

/// Thermal field beyond the RWA, the Boltzmann average of 1 - joint_up_prob.
/// Tends to 1 - P_up0 as T -> 0.
inline double plz_thermal_norwa(const ClosedFormInputs& in) {
  in.validate();
  const double p = p_up0(in.delta, in.v);
  if (p == 0.0) return 1.0;
  const double q = detail::boltzmann_ratio(in.omega, in.temperature);
  return detail::full_from_generating(p, detail::thermal_generating(q, p), detail::thermal_generating(q, p * p));
}

/// G_T/P [f_T(P) - f_T(P^2)] with G_T = 1 - e^{-omega/T}, f_T(x) = 1/(1 - x e^{-omega/T}):
/// the bracket without the (1 + x) weights. Kept for comparison; it vanishes
/// as T -> 0 instead of reducing to the vacuum result.
inline double plz_thermal_norwa_printed(const ClosedFormInputs& in) {
  in.validate();
  const double p = p_up0(in.delta, in.v);
  const double q = detail::boltzmann_ratio(in.omega, in.temperature);
  return (detail::thermal_generating(q, p) - detail::thermal_generating(q, p * p)) / p;
}

// --- photon statistics --------------------------------------------------------

struct PhotonStats {
  double nbar;
  double n2;
  std::optional<double> q;  // empty when nbar = 0
};

/// Long-time RWA photon moments for a cat state:
///   nbar = nbar_0 + P_LZ,
///   <n^2> = -4|alpha|^2 P^2 (e^{|alpha|^2 P} - cos(theta) e^{-|alpha|^2 P}) / (N^2 e^{|alpha|^2})
///           + |alpha|^4 + 3 nbar_0 + P_LZ.
inline PhotonStats photon_stats_infty(const ClosedFormInputs& in) {
  in.validate();
  const double p = p_up0(in.delta, in.v);
  const double a = in.alpha2;
  const double n0 = cat_mean_photon(a, in.theta);
  const double plz = plz_cat_rwa(in);
  // The first term equals -2 P^2 R'(P).
  const double n2 = -2.0 * p * p * detail::cat_generating_slope(a, in.theta, p) + a * a + 3.0 * n0 + plz;
  const double nbar = n0 + plz;
  PhotonStats out{nbar, n2, std::nullopt};
  if (nbar > 0.0) out.q = (n2 - nbar * nbar) / nbar - 1.0;
  return out;
}

// --- exact sector solution ----------------------------------------------------

struct SectorCoeffs {
  int n = 0;
  double delta_n = 0.0;
  double t0 = 0.0;
  Complex mu_plus, mu_minus, nu_plus, nu_minus;
};

/// Z_t = -sqrt(2) e^{i pi/4} sqrt(v/2) t.
inline Complex weber_argument(double t, double v) { return -std::polar(1.0, 0.25 * kPi) * std::sqrt(v) * t; }

/// Coefficients fixing (A_n, B_n) = (1, 0) at t0 for the sector Hamiltonian
/// diag(-v t/2, +v t/2) with off-diagonal -(Delta/2) sqrt(n+1). With this
/// sign of the coupling nu_{+} = +mu_{+} e^{-i pi/4}/sqrt(delta_n) and
/// nu_{-} = -mu_{-} e^{-i pi/4}/sqrt(delta_n).
inline SectorCoeffs sector_coeffs(int n, const LZParams& p, double t0) {
  p.validate();
  if (p.model != Model::rwa) throw DomainError("sector_coeffs: requires the RWA model");
  if (p.detuning() != 0.0) throw DomainError("sector_coeffs: requires resonance");
  if (n < 0) throw DomainError("sector_coeffs: n must be >= 0");
  SectorCoeffs c;
  c.n = n;
  c.t0 = t0;
  c.delta_n = p.delta * p.delta * (n + 1.0) / (4.0 * p.v);
  if (!(c.delta_n > 0.0)) throw DomainError("sector_coeffs: requires delta > 0");

  const Complex nu_b(0.0, -c.delta_n);  // order of the B functions, -i delta_n
  const Complex nu_a = nu_b - 1.0;      // order of the A functions, -1 - i delta_n
  const Complex z0 = weber_argument(t0, p.v);
  const Complex db_m = special::pcf_D(nu_b, -z0), db_p = special::pcf_D(nu_b, z0);
  const Complex da_m = special::pcf_D(nu_a, -z0), da_p = special::pcf_D(nu_a, z0);
  c.mu_plus = db_m / (db_m * da_p + db_p * da_m);
  c.mu_minus = c.mu_plus * db_p / db_m;
  const Complex k = std::polar(1.0, -0.25 * kPi) / std::sqrt(c.delta_n);
  c.nu_plus = k * c.mu_plus;
  c.nu_minus = -k * c.mu_minus;
  return c;
}

/// (A_n(t), B_n(t)) from the coefficients.
inline std::pair<Complex, Complex> sector_amplitudes(const SectorCoeffs& c, double t, double v) {
  const Complex nu_b(0.0, -c.delta_n);
  const Complex nu_a = nu_b - 1.0;
  const Complex z = weber_argument(t, v);
  const Complex a = c.mu_plus * special::pcf_D(nu_a, z) + c.mu_minus * special::pcf_D(nu_a, -z);
  const Complex b = c.nu_plus * special::pcf_D(nu_b, z) + c.nu_minus * special::pcf_D(nu_b, -z);
  return {a, b};
}

inline std::pair<Complex, Complex> sector_coeffs_analytic(int n, const LZParams& p, double t, double t0) {
  return sector_amplitudes(sector_coeffs(n, p, t0), t, p.v);
}

}  // namespace lzcat::analytic
