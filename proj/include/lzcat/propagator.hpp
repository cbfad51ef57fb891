#pragma once

// Time evolution of pure states and diagonal thermal ensembles.
//
// RWA runs integrate and report in the rotating frame. FULL runs report in
// the lab frame; by default they are integrated in the interaction picture
// psi_I = e^{i omega t Nhat} psi_lab, whose generator carries e^{2 i omega t}
// on the counter-rotating element instead of omega*n on the diagonal, so
// the step size does not shrink with the photon number. Initial states are
// given in the reporting frame at t0.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <thread>
#include <vector>

#include "lzcat/error.hpp"
#include "lzcat/fockspace.hpp"
#include "lzcat/hamiltonians.hpp"
#include "lzcat/observables.hpp"
#include "lzcat/ode/dop853.hpp"

namespace lzcat {

/// How FULL-model dynamics is integrated; results are reported in the lab
/// frame either way.
enum class FullIntegration { interaction_picture, lab_direct };

/// Largest |1 - ||psi||^2| tolerated before a run is aborted.
inline constexpr double kNormDriftAbort = 1e-6;

struct IntegratorConfig {
  double t0 = -50.0;
  double t1 = 50.0;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int sample_count = 2001;
  double max_step = 1.0;
  FullIntegration full_integration = FullIntegration::interaction_picture;

  void validate() const {
    if (!(std::isfinite(t0) && std::isfinite(t1) && t0 < t1))
      throw DomainError("IntegratorConfig: need finite t0 < t1");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("IntegratorConfig: tolerances must be > 0");
    if (sample_count < 2) throw DomainError("IntegratorConfig: sample_count must be >= 2");
    if (!(max_step > 0.0)) throw DomainError("IntegratorConfig: max_step must be > 0");
  }

  /// Uniform grid with exact endpoints.
  std::vector<double> sample_times() const {
    std::vector<double> ts(static_cast<std::size_t>(sample_count));
    const double span = t1 - t0;
    for (int i = 0; i < sample_count; ++i)
      ts[static_cast<std::size_t>(i)] = t0 + span * static_cast<double>(i) / (sample_count - 1);
    ts.back() = t1;
    return ts;
  }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<JointState> states;
  double norm_drift = 0.0;  // max |1 - ||psi||^2| over samples
  ode::Stats stats;
};

namespace detail {

inline void check_drift(double norm2, double t) {
  if (!(std::abs(1.0 - norm2) <= kNormDriftAbort)) {
    std::ostringstream os;
    os << "norm drift " << std::abs(1.0 - norm2) << " exceeds " << kNormDriftAbort << " at t = " << t;
    throw NumericalError(os.str());
  }
}

// Sign of the frame map between the integration and reporting frames:
// +1: integration = rotating, reporting = lab (FULL default); 0: identical.
inline int frame_shift(const LZParams& p, const IntegratorConfig& cfg) {
  return p.model == Model::full && cfg.full_integration == FullIntegration::interaction_picture ? 1 : 0;
}

inline Frame integration_frame(const LZParams& p, const IntegratorConfig& cfg) {
  if (p.model == Model::rwa) return Frame::rotating;
  return cfg.full_integration == FullIntegration::interaction_picture ? Frame::rotating : Frame::lab;
}

}  // namespace detail

/// Propagates `initial` (reporting frame, at time initial.t(); a NaN time
/// means times.front()) through the monotone sample times in either
/// direction, calling observer(const JointState&) at each one. Returns the
/// max norm drift. No renormalization is applied.
template <class Observer>
double propagate(const JointState& initial, const LZParams& p, const std::vector<double>& times,
                 const IntegratorConfig& cfg, Observer&& observer, ode::Stats* stats = nullptr) {
  p.validate();
  if (times.empty()) throw DomainError("propagate: empty sample grid");
  const double t_start = std::isnan(initial.t()) ? times.front() : initial.t();
  // Accepts the output of an earlier run, whose drift is bounded by the conservation target.
  if (std::abs(1.0 - initial.norm2()) > 1e-8) throw DomainError("propagate: initial state is not normalized");

  const Frame frame = detail::integration_frame(p, cfg);
  const bool shift = detail::frame_shift(p, cfg) != 0;
  auto rhs = [&p, frame](double t, const CVector& y, CVector& dy) {
    hamiltonian_action(p, t, frame, y, dy);
    dy *= Complex(0.0, -1.0);
  };
  ode::StepControl control;
  control.max_step = cfg.max_step;
  ode::Dop853 solver(rhs, ode::Tolerances{cfg.rel_tol, cfg.abs_tol}, control);

  const JointState start = initial.at_time(t_start);
  CVector y = shift ? to_rotating_frame(start, p.omega).amplitudes() : start.amplitudes();
  double t = t_start;
  double drift = 0.0;
  for (double ts : times) {
    solver.advance(t, y, ts);
    JointState s(y, ts);
    if (shift) s = to_lab_frame(s, p.omega);
    const double n2 = s.norm2();
    detail::check_drift(n2, ts);
    drift = std::max(drift, std::abs(1.0 - n2));
    observer(s);
  }
  if (stats) *stats = solver.stats();
  return drift;
}

/// Full trajectory sampled on cfg's grid, initial state placed at cfg.t0.
inline Trajectory evolve(const JointState& initial, const LZParams& p, const IntegratorConfig& cfg) {
  cfg.validate();
  Trajectory traj;
  traj.times = cfg.sample_times();
  traj.states.reserve(traj.times.size());
  traj.norm_drift = propagate(
      initial.at_time(cfg.t0), p, traj.times, cfg, [&](const JointState& s) { traj.states.push_back(s); },
      &traj.stats);
  return traj;
}

/// Observable series only; no state snapshots are kept.
inline ObservableSeries evolve_observables(const JointState& initial, const LZParams& p,
                                           const IntegratorConfig& cfg, double* norm_drift = nullptr) {
  cfg.validate();
  ObservableSeries series;
  const auto times = cfg.sample_times();
  series.reserve(times.size());
  const double drift =
      propagate(initial.at_time(cfg.t0), p, times, cfg, [&](const JointState& s) { append_sample(series, s); });
  if (norm_drift) *norm_drift = drift;
  return series;
}

/// Amplitudes of the closed RWA sector span{|up,n>, |down,n+1>}.
struct SectorSeries {
  int n = 0;
  std::vector<double> t;
  std::vector<Complex> a;  // |up, n>
  std::vector<Complex> b;  // |down, n+1>
};

/// Integrates the 2x2 sector system from (A, B) = (1, 0) at cfg.t0.
inline SectorSeries evolve_sector_rwa(int n, const LZParams& p, const IntegratorConfig& cfg) {
  p.validate();
  cfg.validate();
  if (p.model != Model::rwa) throw DomainError("evolve_sector_rwa: requires the RWA model");
  if (n < 0) throw DomainError("evolve_sector_rwa: sector index must be >= 0");

  const double g = -0.5 * p.delta * std::sqrt(static_cast<double>(n) + 1.0);
  auto rhs = [&p, g](double t, const CVector& y, CVector& dy) {
    const double e = -0.5 * (p.v * t - p.detuning());
    dy[0] = Complex(0.0, -1.0) * (e * y[0] + g * y[1]);
    dy[1] = Complex(0.0, -1.0) * (g * y[0] - e * y[1]);
  };
  ode::StepControl control;
  control.max_step = cfg.max_step;
  ode::Dop853 solver(rhs, ode::Tolerances{cfg.rel_tol, cfg.abs_tol}, control);

  SectorSeries out;
  out.n = n;
  out.t = cfg.sample_times();
  CVector y(2);
  y << 1.0, 0.0;
  double t = cfg.t0;
  for (double ts : out.t) {
    solver.advance(t, y, ts);
    detail::check_drift(y.squaredNorm(), ts);
    out.a.push_back(y[0]);
    out.b.push_back(y[1]);
  }
  return out;
}

namespace detail {

// Runs f(i) for i in [0, count) on up to `jobs` threads. Each index is
// handled exactly once; the first exception is rethrown after joining.
template <class F>
void parallel_for(std::size_t count, unsigned jobs, F&& f) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += jobs) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Weighted average over independently evolved |up, n> members. Only the
/// population and photon moments are defined for the mixed state; e_l is NaN
/// and q is built from the averaged moments. Members are combined in index
/// order, so the result does not depend on `jobs`.
inline ObservableSeries evolve_thermal(const ThermalEnsemble& ens, const LZParams& p, const IntegratorConfig& cfg,
                                       unsigned jobs = 1, double* norm_drift = nullptr) {
  cfg.validate();
  if (static_cast<std::size_t>(ens.weights.size()) != ens.sector_states.size())
    throw DomainError("evolve_thermal: weight/member count mismatch");

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < ens.sector_states.size(); ++i)
    if (ens.weights[static_cast<Eigen::Index>(i)] > 0.0) active.push_back(i);

  std::vector<ObservableSeries> member(active.size());
  std::vector<double> drift(active.size(), 0.0);
  detail::parallel_for(active.size(), jobs, [&](std::size_t k) {
    member[k] = evolve_observables(ens.sector_states[active[k]], p, cfg, &drift[k]);
  });

  const auto times = cfg.sample_times();
  const std::size_t m = times.size();
  ObservableSeries out;
  out.t = times;
  out.p_lz.assign(m, 0.0);
  out.nbar.assign(m, 0.0);
  out.n2.assign(m, 0.0);
  out.norm.assign(m, 0.0);
  for (std::size_t k = 0; k < active.size(); ++k) {
    const double w = ens.weights[static_cast<Eigen::Index>(active[k])];
    for (std::size_t i = 0; i < m; ++i) {
      out.p_lz[i] += w * member[k].p_lz[i];
      out.nbar[i] += w * member[k].nbar[i];
      out.n2[i] += w * member[k].n2[i];
      out.norm[i] += w * member[k].norm[i];
    }
  }
  out.e_l.assign(m, std::numeric_limits<double>::quiet_NaN());
  out.q.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.q[i] = mandel_q_or_nan(out.nbar[i], out.n2[i]);
  if (norm_drift) *norm_drift = drift.empty() ? 0.0 : *std::max_element(drift.begin(), drift.end());
  return out;
}

}  // namespace lzcat
