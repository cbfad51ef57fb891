#pragma once

// Parabolic cylinder function D_nu(z) for complex order and argument.
//
// Moderate |z|: Kummer representation
//   D_nu(z) = 2^{nu/2} sqrt(pi) e^{-z^2/4} [ M(-nu/2, 1/2, z^2/2) / Gamma((1-nu)/2)
//                                  - sqrt(2) z M((1-nu)/2, 3/2, z^2/2) / Gamma(-nu/2) ],
// with the M series summed in binary floating point of 50..400 decimal
// digits (picked from the size of the largest series term and re-checked
// afterwards, together with the final recombination and both 1/Gamma factors). Large |z|: the Poincare expansion, including the recessive
// Stokes term for |arg z| > pi/2. Every path either meets the accuracy
// target or throws NumericalError.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "lzcat/error.hpp"

namespace lzcat::special {

using Complex = std::complex<double>;

struct PcfOptions {
  double z_cap = 40.0;            // |z| beyond which only the asymptotic expansion is tried
  double asymptotic_tol = 1e-15;  // accept the expansion when its smallest term is below this
  double max_rel_error = 1e-9;    // abort when cancellation would exceed this
};

namespace detail {

inline constexpr double kPi = std::numbers::pi;

inline bool is_nonpositive_integer(Complex z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

// log Gamma(z) for Re z >= 0.5 (Lanczos, g = 7, n = 9).
inline Complex lgamma_right(Complex z) {
  static constexpr double g = 7.0;
  static constexpr double c[9] = {0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
                                  771.32342877765313,      -176.61502916214059,   12.507343278686905,
                                  -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  z -= 1.0;
  Complex x = c[0];
  for (int i = 1; i < 9; ++i) x += c[i] / (z + static_cast<double>(i));
  const Complex t = z + g + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

}  // namespace detail

/// 1 / Gamma(z); exactly zero at the poles z = 0, -1, -2, ...
inline Complex rgamma(Complex z) {
  if (detail::is_nonpositive_integer(z)) return 0.0;
  if (z.real() < 0.5) {
    // 1/Gamma(z) = sin(pi z) Gamma(1 - z) / pi
    return std::sin(detail::kPi * z) * std::exp(detail::lgamma_right(1.0 - z)) / detail::kPi;
  }
  return std::exp(-detail::lgamma_right(z));
}

inline Complex gamma(Complex z) {
  if (detail::is_nonpositive_integer(z)) throw DomainError("gamma: pole at a non-positive integer");
  return 1.0 / rgamma(z);
}

namespace detail {

template <unsigned Digits>
using MpReal = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<Digits>,
                                             boost::multiprecision::et_off>;

template <class R>
struct MpComplex {
  R re, im;

  MpComplex() : re(0), im(0) {}
  MpComplex(R r, R i) : re(std::move(r)), im(std::move(i)) {}
  explicit MpComplex(Complex z) : re(z.real()), im(z.imag()) {}

  friend MpComplex operator+(const MpComplex& a, const MpComplex& b) { return {a.re + b.re, a.im + b.im}; }
  friend MpComplex operator-(const MpComplex& a, const MpComplex& b) { return {a.re - b.re, a.im - b.im}; }
  friend MpComplex operator/(const MpComplex& a, const MpComplex& b) {
    const R d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  friend MpComplex operator*(const MpComplex& a, const MpComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend MpComplex operator*(const MpComplex& a, const R& s) { return {a.re * s, a.im * s}; }
  friend MpComplex operator/(const MpComplex& a, const R& s) { return {a.re / s, a.im / s}; }

  R magnitude_proxy() const {  // max(|re|, |im|), within a factor sqrt(2) of |z|
    using std::abs;
    const R a = abs(re), b = abs(im);
    return a > b ? a : b;
  }

  Complex to_double() const { return {re.template convert_to<double>(), im.template convert_to<double>()}; }
};

template <class R>
MpComplex<R> mp_exp(const MpComplex<R>& z) {
  const R m = boost::multiprecision::exp(z.re);
  return {m * boost::multiprecision::cos(z.im), m * boost::multiprecision::sin(z.im)};
}

template <class R>
MpComplex<R> mp_log(const MpComplex<R>& z) {
  return {boost::multiprecision::log(boost::multiprecision::hypot(z.re, z.im)), boost::multiprecision::atan2(z.im, z.re)};
}

template <class R>
MpComplex<R> mp_sin(const MpComplex<R>& z) {
  return {boost::multiprecision::sin(z.re) * boost::multiprecision::cosh(z.im),
          boost::multiprecision::cos(z.re) * boost::multiprecision::sinh(z.im)};
}

// 1 / Gamma(w) at the working precision: upward shift to Re w >= Digits, then
// the Stirling series; reflection for Re w < 1/2. `w` must not be a pole.
template <unsigned Digits>
MpComplex<MpReal<Digits>> mp_rgamma(const MpComplex<MpReal<Digits>>& w) {
  using R = MpReal<Digits>;
  using C = MpComplex<R>;
  const R pi = boost::math::constants::pi<R>();
  if (w.re < R(0.5)) {
    // 1/Gamma(w) = sin(pi w) / (pi / Gamma(1 - w))
    const C one_minus(R(1) - w.re, -w.im);
    return mp_sin(w * pi) / (mp_rgamma<Digits>(one_minus) * pi);
  }
  C shifted = w, product(R(1), R(0));
  while (shifted.re < R(static_cast<int>(Digits))) {
    product = product * shifted;
    shifted = shifted + C(R(1), R(0));
  }
  // log Gamma(u) = (u - 1/2) log u - u + log(2 pi)/2 + sum_k B_2k / (2k (2k-1) u^{2k-1})
  const C log_u = mp_log(shifted);
  C lg = (shifted - C(R(0.5), R(0))) * log_u - shifted + C(boost::multiprecision::log(2 * pi) / 2, R(0));
  const C inv = C(R(1), R(0)) / shifted, inv2 = inv * inv;
  const R eps = boost::multiprecision::pow(R(10), -static_cast<int>(Digits) - 5);
  C power = inv;
  for (int k = 1; k < 4 * static_cast<int>(Digits); ++k) {
    const R coeff = boost::math::bernoulli_b2n<R>(k) / R((2 * k) * (2 * k - 1));
    const C term = power * coeff;
    lg = lg + term;
    if (term.magnitude_proxy() < eps) break;
    power = power * inv2;
  }
  return product * mp_exp(C(-lg.re, -lg.im));
}

// log10 of an upper bound on the largest term of M(a, b, x).
inline double kummer_log10_peak(Complex a, double b, Complex x) {
  const double aa = std::abs(a), ax = std::abs(x);
  if (ax == 0.0) return 0.0;
  double log_term = 0.0, peak = 0.0;
  for (int k = 0; k < 1'000'000; ++k) {
    const double ratio = (aa + k) * ax / ((b + k) * (k + 1.0));
    if (ratio < 1.0 && k > aa + ax) break;
    log_term += std::log10(ratio);
    peak = std::max(peak, log_term);
  }
  return peak;
}

template <unsigned Digits>
struct KummerSum {
  MpComplex<MpReal<Digits>> value;
  double digits_lost = 0.0;  // log10(largest term / |sum|)
};

// M(a, b, x) = sum_k (a)_k / (b)_k x^k / k!
template <unsigned Digits>
KummerSum<Digits> kummer_series(const MpComplex<MpReal<Digits>>& a, double b_d, const MpComplex<MpReal<Digits>>& x) {
  using R = MpReal<Digits>;
  using C = MpComplex<R>;
  const R b(b_d);
  C term(R(1), R(0));
  C sum = term;
  R peak = R(1);
  const R eps = boost::multiprecision::pow(R(10), -static_cast<int>(Digits) + 3);
  const double abs_a = std::abs(a.to_double());
  const double abs_x = x.magnitude_proxy().template convert_to<double>() * std::sqrt(2.0);
  for (long k = 0; k < 2'000'000; ++k) {
    const C ak = a + C(R(k), R(0));
    term = term * ak * x / ((b + k) * (k + 1));
    sum = sum + term;
    const R mag = term.magnitude_proxy();
    if (mag > peak) peak = mag;
    if (k > abs_a + abs_x && mag <= eps * sum.magnitude_proxy()) break;
    if (mag == 0) break;
  }
  KummerSum<Digits> out{sum, 0.0};
  const R s = sum.magnitude_proxy();
  out.digits_lost = s == 0 ? std::numeric_limits<double>::infinity()
                           : boost::multiprecision::log10(peak / s).template convert_to<double>();
  return out;
}

// e^{-z^2/4} [ M(-nu/2, 1/2, z^2/2) / Gamma((1-nu)/2) - sqrt(2) z M((1-nu)/2, 3/2, z^2/2) / Gamma(-nu/2) ],
// recombined at the working precision; empty when the digits lost to the
// series peak and to the final cancellation exceed the budget.
template <unsigned Digits>
std::optional<Complex> kummer_combination_at(Complex nu, Complex z, double guard) {
  using R = MpReal<Digits>;
  using C = MpComplex<R>;
  const C zz(z);
  const C x = zz * zz / R(2);
  // Both parameters are formed at the working precision: the recombination
  // cancels, so they must differ by exactly 1/2.
  const C a_even(-0.5 * nu);  // exact: halving a double
  const C a_odd = a_even + C(R(0.5), R(0));
  const auto m1 = kummer_series<Digits>(a_even, 0.5, x);
  const auto m2 = kummer_series<Digits>(a_odd, 1.5, x);
  if (m1.digits_lost + guard > Digits || m2.digits_lost + guard > Digits) return std::nullopt;

  const C r1 = is_nonpositive_integer(0.5 - 0.5 * nu) ? C() : mp_rgamma<Digits>(a_odd);
  const C r2 = is_nonpositive_integer(-0.5 * nu) ? C() : mp_rgamma<Digits>(a_even);
  const C t1 = m1.value * r1;
  const C t2 = zz * m2.value * r2 * boost::multiprecision::sqrt(R(2));
  const C d = t1 - t2;
  const R scale = std::max(t1.magnitude_proxy(), t2.magnitude_proxy());
  const R mag = d.magnitude_proxy();
  if (scale > 0) {
    if (mag == 0) return std::nullopt;
    const double cancel = boost::multiprecision::log10(scale / mag).template convert_to<double>();
    if (std::max(m1.digits_lost, m2.digits_lost) + cancel + guard > Digits) return std::nullopt;
  }
  return (mp_exp(C(-x.re / 2, -x.im / 2)) * d).to_double();
}

inline Complex kummer_combination(Complex nu, Complex z, double guard) {
  const Complex x = 0.5 * z * z;
  const double need =
      std::max(kummer_log10_peak(-0.5 * nu, 0.5, x), kummer_log10_peak(0.5 * (1.0 - nu), 1.5, x)) + guard + 5.0;
  if (need <= 50)
    if (auto r = kummer_combination_at<50>(nu, z, guard)) return *r;
  if (need <= 100)
    if (auto r = kummer_combination_at<100>(nu, z, guard)) return *r;
  if (need <= 200)
    if (auto r = kummer_combination_at<200>(nu, z, guard)) return *r;
  if (auto r = kummer_combination_at<400>(nu, z, guard)) return *r;
  std::ostringstream os;
  os << "pcf_D: Kummer series needs more than 400 digits at nu = " << nu << ", z = " << z;
  throw NumericalError(os.str());
}

inline Complex pow_principal(Complex z, Complex p) { return std::exp(p * std::log(z)); }

struct AsymptoticSum {
  Complex value;
  double smallest_term;  // relative to the leading term, 0 if the series terminated
};

// sum_s sgn^s (c)_{2s} / (s! (2 z^2)^s), truncated at its smallest term.
inline AsymptoticSum asymptotic_series(Complex c, Complex z, double sign) {
  const Complex w = 1.0 / (2.0 * z * z);
  Complex term = 1.0, sum = 1.0;
  double smallest = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 500; ++s) {
    const Complex next = term * sign * (c + 2.0 * s) * (c + 2.0 * s + 1.0) * w / (s + 1.0);
    const double mag = std::abs(next);
    if (mag == 0.0) return {sum + next, 0.0};
    if (mag >= smallest) break;
    smallest = mag;
    term = next;
    sum += term;
    if (mag < 1e-18) break;
  }
  return {sum, smallest};
}

}  // namespace detail

/// Poincare expansion of D_nu(z). `smallest_term` reports the truncation
/// error estimate relative to the leading term(s).
struct PcfAsymptotic {
  Complex value;
  double error_estimate;
};

inline PcfAsymptotic pcf_D_asymptotic(Complex nu, Complex z) {
  const double ph = std::arg(z);
  const Complex z2 = z * z;
  const auto lead = detail::asymptotic_series(-nu, z, -1.0);
  Complex value = std::exp(-0.25 * z2) * detail::pow_principal(z, nu) * lead.value;
  double err = lead.smallest_term;
  if (std::abs(ph) > 0.5 * detail::kPi) {
    const double pm = ph > 0.0 ? 1.0 : -1.0;
    const Complex rg = rgamma(-nu);
    if (rg != 0.0) {
      const auto rec = detail::asymptotic_series(nu + 1.0, z, 1.0);
      const Complex second = -std::sqrt(2.0 * detail::kPi) * rg * std::exp(Complex(0.0, pm * detail::kPi) * nu) *
                             std::exp(0.25 * z2) * detail::pow_principal(z, -nu - 1.0) * rec.value;
      const double scale = std::max(std::abs(value), std::abs(second));
      err = std::max(err * std::abs(value), rec.smallest_term * std::abs(second)) / std::max(scale, 1e-300);
      value += second;
    }
  }
  return {value, err};
}

/// Kummer-series evaluation, valid for any |z| the multiprecision tiers can
/// carry; throws when no tier reaches `max_rel_error` after cancellation.
inline Complex pcf_D_kummer(Complex nu, Complex z, double max_rel_error = 1e-9) {
  const double guard = std::max(10.0, -std::log10(max_rel_error) + 10.0);
  const Complex pref = std::exp(0.5 * nu * std::log(2.0)) * std::sqrt(detail::kPi);
  return pref * detail::kummer_combination(nu, z, guard);
}

/// Parabolic cylinder function D_nu(z) (Whittaker's notation).
inline Complex pcf_D(Complex nu, Complex z, const PcfOptions& opt = {}) {
  if (!std::isfinite(nu.real()) || !std::isfinite(nu.imag()) || !std::isfinite(z.real()) ||
      !std::isfinite(z.imag()))
    throw DomainError("pcf_D: non-finite input");
  if (z == 0.0) {
    // D_nu(0) = 2^{nu/2} sqrt(pi) / Gamma((1 - nu)/2)
    return std::exp(0.5 * nu * std::log(2.0)) * std::sqrt(detail::kPi) * rgamma(0.5 * (1.0 - nu));
  }
  const double r = std::abs(z);
  if (r > 2.0) {
    const auto asym = pcf_D_asymptotic(nu, z);
    if (asym.error_estimate < opt.asymptotic_tol) return asym.value;
  }
  if (r <= opt.z_cap) return pcf_D_kummer(nu, z, opt.max_rel_error);
  std::ostringstream os;
  os << "pcf_D: no convergent representation at nu = " << nu << ", z = " << z << " (|z| cap " << opt.z_cap
     << ")";
  throw NumericalError(os.str());
}

}  // namespace lzcat::special
