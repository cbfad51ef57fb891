#pragma once

// Physical quantities extracted from joint TLS x field states.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "lzcat/error.hpp"
#include "lzcat/fockspace.hpp"

namespace lzcat {

/// Reduced two-level density matrix after tracing out the field.
struct ReducedTLS {
  double rho_uu = 1.0;
  double rho_dd = 0.0;
  Complex rho_ud{0.0, 0.0};
};

/// Sampled observables on a common time grid. Undefined entries are NaN
/// (Q where nbar = 0, E_l for mixed ensembles).
struct ObservableSeries {
  std::vector<double> t;
  std::vector<double> p_lz;
  std::vector<double> e_l;
  std::vector<double> q;
  std::vector<double> nbar;
  std::vector<double> n2;
  std::vector<double> norm;

  std::size_t size() const noexcept { return t.size(); }

  void reserve(std::size_t n) {
    for (auto* v : {&t, &p_lz, &e_l, &q, &nbar, &n2, &norm}) v->reserve(n);
  }
};

/// Population of the initially empty level, sum_n |down_n|^2.
inline double p_lz(const JointState& s) { return s.down().squaredNorm(); }

inline ReducedTLS reduce_tls(const JointState& s) {
  return ReducedTLS{s.up().squaredNorm(), s.down().squaredNorm(), std::conj(s.up().dot(s.down()))};
}

/// 1 - Tr rho^2.
inline double linear_entropy(const ReducedTLS& r) {
  return 1.0 - (r.rho_uu * r.rho_uu + r.rho_dd * r.rho_dd + 2.0 * std::norm(r.rho_ud));
}

struct PhotonMoments {
  double nbar = 0.0;
  double n2 = 0.0;
};

/// <a^dag a> and <(a^dag a)^2>.
inline PhotonMoments photon_moments(const JointState& s) {
  PhotonMoments m;
  const auto up = s.up();
  const auto dn = s.down();
  for (Eigen::Index n = 0; n < s.levels(); ++n) {
    const double w = std::norm(up[n]) + std::norm(dn[n]);
    const double k = static_cast<double>(n);
    m.nbar += k * w;
    m.n2 += k * k * w;
  }
  return m;
}

/// Weighted average over ensemble members.
inline PhotonMoments photon_moments(const RVector& weights, const std::vector<JointState>& members) {
  if (static_cast<std::size_t>(weights.size()) != members.size())
    throw DomainError("photon_moments: weight/member count mismatch");
  PhotonMoments m;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto mi = photon_moments(members[i]);
    m.nbar += weights[static_cast<Eigen::Index>(i)] * mi.nbar;
    m.n2 += weights[static_cast<Eigen::Index>(i)] * mi.n2;
  }
  return m;
}

/// Mandel Q = (n2 - nbar^2)/nbar - 1; empty when nbar = 0.
inline std::optional<double> mandel_q(double nbar, double n2) {
  if (!(nbar > 0.0)) return std::nullopt;
  return (n2 - nbar * nbar) / nbar - 1.0;
}

inline double mandel_q_or_nan(double nbar, double n2) {
  return mandel_q(nbar, n2).value_or(std::numeric_limits<double>::quiet_NaN());
}

/// <Nhat> with Nhat = a^dag a + sigma_z / 2.
inline double total_number(const JointState& s) {
  const auto up = s.up();
  const auto dn = s.down();
  double total = 0.0;
  for (Eigen::Index n = 0; n < s.levels(); ++n) {
    const double k = static_cast<double>(n);
    total += (k + 0.5) * std::norm(up[n]) + (k - 0.5) * std::norm(dn[n]);
  }
  return total;
}

/// Appends one sample computed from a pure state.
inline void append_sample(ObservableSeries& series, const JointState& s) {
  const auto r = reduce_tls(s);
  const auto m = photon_moments(s);
  series.t.push_back(s.t());
  series.p_lz.push_back(r.rho_dd);
  series.e_l.push_back(linear_entropy(r));
  series.q.push_back(mandel_q_or_nan(m.nbar, m.n2));
  series.nbar.push_back(m.nbar);
  series.n2.push_back(m.n2);
  series.norm.push_back(s.norm2());
}

inline ObservableSeries series_from_states(const std::vector<JointState>& states) {
  ObservableSeries out;
  out.reserve(states.size());
  for (const auto& s : states) append_sample(out, s);
  return out;
}

/// Mean over the last `fraction` of samples (at least one sample), skipping NaN.
inline double tail_mean(const std::vector<double>& values, double fraction = 0.1) {
  if (values.empty()) throw DomainError("tail_mean: empty series");
  const auto n = values.size();
  auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  count = std::clamp<std::size_t>(count, 1, n);
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = n - count; i < n; ++i) {
    if (std::isnan(values[i])) continue;
    sum += values[i];
    ++used;
  }
  return used == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(used);
}

}  // namespace lzcat
