#pragma once

// run / sweep / analytic commands on top of the physics modules.

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lzcat/analytics.hpp"
#include "lzcat/fockspace.hpp"
#include "lzcat/observables.hpp"
#include "lzcat/propagator.hpp"
#include "lzcat/scenario/config.hpp"
#include "lzcat/scenario/io.hpp"

namespace lzcat::scenario {

struct Simulation {
  ObservableSeries series;
  double norm_drift = 0.0;
  TruncationSpec truncation;
  LZParams params;
};

/// Evolves the configured initial state; thermal members use up to `jobs` threads.
inline Simulation simulate(const ScenarioConfig& cfg, unsigned jobs = 1) {
  cfg.validate();
  Simulation sim;
  sim.params = cfg.resolved_params();
  sim.truncation = cfg.truncation();
  const auto& ig = cfg.integrator;
  switch (cfg.initial.kind) {
    case InitialKind::cat: {
      const auto state = joint_up(make_cat(std::sqrt(cfg.initial.alpha2), cfg.initial.theta, sim.truncation));
      sim.series = evolve_observables(state, sim.params, ig, &sim.norm_drift);
      break;
    }
    case InitialKind::fock: {
      const auto state = joint_up(make_fock(cfg.initial.n, sim.truncation));
      sim.series = evolve_observables(state, sim.params, ig, &sim.norm_drift);
      break;
    }
    case InitialKind::thermal: {
      const auto ens = make_thermal_ensemble(sim.params.omega, cfg.temperature(), sim.truncation);
      sim.series = evolve_thermal(ens, sim.params, ig, jobs, &sim.norm_drift);
      break;
    }
  }
  return sim;
}

/// Long-time values: tail means over the last 10% of samples; Q is formed
/// from the tail-averaged moments.
struct FinalValues {
  double p_lz, e_l, q, nbar, n2;
};

inline FinalValues final_values(const ObservableSeries& s) {
  FinalValues f{};
  f.p_lz = tail_mean(s.p_lz);
  f.e_l = s.e_l.empty() ? std::numeric_limits<double>::quiet_NaN() : tail_mean(s.e_l);
  f.nbar = tail_mean(s.nbar);
  f.n2 = tail_mean(s.n2);
  f.q = mandel_q_or_nan(f.nbar, f.n2);
  return f;
}

/// The closed-form long-time P_LZ matching the model and initial state.
inline double analytic_p_lz(const ScenarioConfig& cfg) {
  const auto p = cfg.resolved_params();
  analytic::ClosedFormInputs in;
  in.alpha2 = cfg.initial.alpha2;
  in.theta = cfg.initial.theta;
  in.delta = p.delta;
  in.v = p.v;
  in.omega = p.omega;
  in.temperature = cfg.temperature();
  const bool full = p.model == Model::full;
  if (p.delta == 0.0) return 0.0;
  switch (cfg.initial.kind) {
    case InitialKind::cat: return full ? analytic::plz_cat_norwa(in) : analytic::plz_cat_rwa(in);
    case InitialKind::fock:
      return full ? 1.0 - analytic::joint_up_prob(cfg.initial.n, p.delta, p.v)
                  : 1.0 - analytic::p_up_n(cfg.initial.n, p.delta, p.v);
    case InitialKind::thermal: return full ? analytic::plz_thermal_norwa(in) : analytic::plz_thermal_rwa(in);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline CsvTable timeseries_table(const ObservableSeries& s, const std::vector<std::string>& columns) {
  CsvTable t;
  t.add("t", s.t);
  for (const auto& name : columns) {
    if (name == "p_lz") t.add(name, s.p_lz);
    else if (name == "e_l") t.add(name, s.e_l);
    else if (name == "q") t.add(name, s.q);
    else if (name == "nbar") t.add(name, s.nbar);
    else if (name == "n2") t.add(name, s.n2);
    else if (name == "norm") t.add(name, s.norm);
  }
  return t;
}

inline Json finals_json(const FinalValues& f, double analytic) {
  return Json{{"final_p_lz", json_real(f.p_lz)}, {"final_e_l", json_real(f.e_l)}, {"final_q", json_real(f.q)},
              {"final_nbar", json_real(f.nbar)}, {"analytic_p_lz", json_real(analytic)}};
}

/// Writes timeseries.csv and timeseries.json into out_dir.
inline Simulation cmd_run(const ScenarioConfig& cfg, const std::filesystem::path& out_dir, unsigned jobs = 1) {
  auto sim = simulate(cfg, jobs);
  write_atomic(out_dir / "timeseries.csv", timeseries_table(sim.series, cfg.columns()).str());
  Json meta = metadata_header("run");
  meta["config"] = config_to_json(cfg);
  meta["data"] = "timeseries.csv";
  meta["norm_drift"] = sim.norm_drift;
  meta["results"] = finals_json(final_values(sim.series), analytic_p_lz(cfg));
  write_json(out_dir / "timeseries.json", meta);
  return sim;
}

struct SweepRow {
  double axis_value;
  FinalValues finals;
  double analytic;
  double norm_drift;
};

/// Independent runs at each axis value, `jobs` at a time; rows keep input order.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned jobs = 1) {
  spec.validate();
  std::vector<SweepRow> rows(spec.values.size());
  lzcat::detail::parallel_for(spec.values.size(), jobs, [&](std::size_t i) {
    const auto cfg = spec.at(spec.values[i]);
    const auto sim = simulate(cfg, 1);
    rows[i] = SweepRow{spec.values[i], final_values(sim.series), analytic_p_lz(cfg), sim.norm_drift};
  });
  return rows;
}

inline CsvTable sweep_table(const std::vector<SweepRow>& rows) {
  std::vector<double> x, p, e, q, a;
  for (const auto& r : rows) {
    x.push_back(r.axis_value);
    p.push_back(r.finals.p_lz);
    e.push_back(r.finals.e_l);
    q.push_back(r.finals.q);
    a.push_back(r.analytic);
  }
  CsvTable t;
  t.add("axis_value", x);
  t.add("final_p_lz", p);
  t.add("final_e_l", e);
  t.add("final_q", q);
  t.add("analytic_p_lz", a);
  return t;
}

/// Writes sweep.csv and sweep.json into out_dir.
inline std::vector<SweepRow> cmd_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir,
                                       unsigned jobs = 1) {
  auto rows = run_sweep(spec, jobs);
  write_atomic(out_dir / "sweep.csv", sweep_table(rows).str());
  Json meta = metadata_header("sweep");
  meta["config"] = config_to_json(spec.base);
  meta["sweep"] = {{"axis", spec.axis}, {"values", spec.values}};
  meta["data"] = "sweep.csv";
  double drift = 0.0;
  for (const auto& r : rows) drift = std::max(drift, r.norm_drift);
  meta["norm_drift"] = drift;
  write_json(out_dir / "sweep.json", meta);
  return rows;
}

// --- analytic tables -------------------------------------------------------------

struct AnalyticRequest {
  std::string formula = "cat-rwa";
  std::vector<double> alpha2 = {1.0};
  std::vector<double> theta = {0.5 * std::numbers::pi};
  std::vector<double> delta = {0.5};
  std::vector<double> v = {1.0};
  std::vector<double> omega = {10.0};
  std::vector<double> temperature = {0.0};
  std::optional<double> t_over_omega;  // overrides temperature when set
  bool oracle = false;
};

struct FormulaInfo {
  std::string id;
  std::string description;
  std::function<double(const analytic::ClosedFormInputs&)> closed_form;
  // Direct truncated sum over the photon distribution; empty when there is none.
  std::function<double(const analytic::ClosedFormInputs&)> oracle;
};

namespace detail {

inline RVector cat_weights(double alpha2, double theta) {
  const TruncationSpec tr{choose_truncation(4.0 * alpha2, 1e-14).n_max, 1e-14};
  return make_cat(std::sqrt(alpha2), theta, tr).weights();
}

inline RVector boltzmann_weights(double omega, double temperature) {
  return thermal_weights(omega, temperature, truncation_for_thermal(omega, temperature, 1e-16));
}

// Long-time RWA photon moments summed directly over Fock levels:
// |up,n> ends as |down,n+1> with probability 1 - P^{n+1}.
inline analytic::PhotonStats photon_stats_sum(const analytic::ClosedFormInputs& in) {
  const RVector w = cat_weights(in.alpha2, in.theta);
  const double p = analytic::p_up0(in.delta, in.v);
  double nbar = 0.0, n2 = 0.0, pn = p;
  for (Eigen::Index n = 0; n < w.size(); ++n, pn *= p) {
    const double k = static_cast<double>(n);
    nbar += w[n] * (k + (1.0 - pn));
    n2 += w[n] * (k * k + (2.0 * k + 1.0) * (1.0 - pn));
  }
  return {nbar, n2, mandel_q(nbar, n2)};
}

}  // namespace detail

inline const std::vector<FormulaInfo>& formulas() {
  using analytic::ClosedFormInputs;
  constexpr double pi = std::numbers::pi;
  static const std::vector<FormulaInfo> table = {
      {"cat-rwa", "general cat state, RWA", analytic::plz_cat_rwa_general,
       [](const ClosedFormInputs& in) {
         return analytic::plz_fock_avg(detail::cat_weights(in.alpha2, in.theta), in.delta, in.v);
       }},
      {"yurke-stoler", "Yurke-Stoler cat (theta = pi/2), RWA",
       [](const ClosedFormInputs& in) { return analytic::plz_yurke_stoler(in.alpha2, in.delta, in.v); },
       [](const ClosedFormInputs& in) {
         return analytic::plz_fock_avg(detail::cat_weights(in.alpha2, 0.5 * pi), in.delta, in.v);
       }},
      {"even-cat", "even cat (theta = 0), RWA",
       [](const ClosedFormInputs& in) { return analytic::plz_even_cat(in.alpha2, in.delta, in.v); },
       [](const ClosedFormInputs& in) {
         return analytic::plz_fock_avg(detail::cat_weights(in.alpha2, 0.0), in.delta, in.v);
       }},
      {"odd-cat", "odd cat (theta = pi), RWA",
       [](const ClosedFormInputs& in) { return analytic::plz_odd_cat(in.alpha2, in.delta, in.v); },
       [](const ClosedFormInputs& in) {
         return analytic::plz_fock_avg(detail::cat_weights(in.alpha2, pi), in.delta, in.v);
       }},
      {"cat-full", "general cat state, independent crossings beyond the RWA", analytic::plz_cat_norwa,
       [](const ClosedFormInputs& in) {
         return analytic::plz_full_fock_avg(detail::cat_weights(in.alpha2, in.theta), in.delta, in.v);
       }},
      {"thermal-rwa", "thermal field, RWA (transition probability)", analytic::plz_thermal_rwa,
       [](const ClosedFormInputs& in) {
         return analytic::plz_fock_avg(detail::boltzmann_weights(in.omega, in.temperature), in.delta, in.v);
       }},
      {"thermal-rwa-survival", "thermal field, RWA, complementary (survival) orientation",
       analytic::plz_thermal_rwa_printed,
       [](const ClosedFormInputs& in) {
         return 1.0 -
                analytic::plz_fock_avg(detail::boltzmann_weights(in.omega, in.temperature), in.delta, in.v);
       }},
      {"thermal-full", "thermal field beyond the RWA, Boltzmann average of the joint survival",
       analytic::plz_thermal_norwa,
       [](const ClosedFormInputs& in) {
         return analytic::plz_full_fock_avg(detail::boltzmann_weights(in.omega, in.temperature), in.delta,
                                            in.v);
       }},
      {"thermal-full-printed", "thermal field beyond the RWA, bracket without (1+x) weights",
       analytic::plz_thermal_norwa_printed, nullptr},
      {"nbar-infty", "long-time mean photon number, RWA cat",
       [](const ClosedFormInputs& in) { return analytic::photon_stats_infty(in).nbar; },
       [](const ClosedFormInputs& in) { return detail::photon_stats_sum(in).nbar; }},
      {"n2-infty", "long-time <n^2>, RWA cat",
       [](const ClosedFormInputs& in) { return analytic::photon_stats_infty(in).n2; },
       [](const ClosedFormInputs& in) { return detail::photon_stats_sum(in).n2; }},
      {"q-infty", "long-time Mandel Q, RWA cat",
       [](const ClosedFormInputs& in) {
         return analytic::photon_stats_infty(in).q.value_or(std::numeric_limits<double>::quiet_NaN());
       },
       [](const ClosedFormInputs& in) {
         return detail::photon_stats_sum(in).q.value_or(std::numeric_limits<double>::quiet_NaN());
       }},
  };
  return table;
}

inline const FormulaInfo& find_formula(const std::string& id) {
  for (const auto& f : formulas())
    if (f.id == id) return f;
  std::string known;
  for (const auto& f : formulas()) known += (known.empty() ? "" : ", ") + f.id;
  throw ConfigError("unknown formula '" + id + "' (known: " + known + ")", 0, "formula");
}

/// Tab-separated table over the Cartesian product of the input lists.
inline void cmd_analytic(const AnalyticRequest& req, std::ostream& out) {
  const auto& f = find_formula(req.formula);
  out << "formula\talpha2\ttheta\tdelta\tv\tomega\tT\tvalue";
  if (req.oracle) out << "\toracle\tabs_diff";
  out << '\n';
  const auto temps = req.t_over_omega ? std::vector<double>{*req.t_over_omega} : req.temperature;
  for (double a2 : req.alpha2)
    for (double th : req.theta)
      for (double d : req.delta)
        for (double v : req.v)
          for (double w : req.omega)
            for (double tt : temps) {
              analytic::ClosedFormInputs in{a2, th, d, v, w, req.t_over_omega ? tt * w : tt};
              try {
                in.validate();
              } catch (const DomainError& e) {
                throw ConfigError(e.what());
              }
              const double value = f.closed_form(in);
              out << f.id << '\t' << format_real(a2) << '\t' << format_real(th) << '\t' << format_real(d) << '\t'
                  << format_real(v) << '\t' << format_real(w) << '\t' << format_real(in.temperature) << '\t'
                  << format_real(value);
              if (req.oracle) {
                const double o = f.oracle ? f.oracle(in) : std::numeric_limits<double>::quiet_NaN();
                out << '\t' << format_real(o) << '\t' << format_real(std::abs(value - o));
              }
              out << '\n';
            }
}

}  // namespace lzcat::scenario
