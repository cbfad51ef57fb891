// Command-line front end: run, sweep, figure, analytic.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 unknown figure id.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lzcat/error.hpp"
#include "lzcat/scenario/commands.hpp"
#include "lzcat/scenario/config.hpp"
#include "lzcat/scenario/figures.hpp"
#include "lzcat/version.hpp"

namespace {

namespace sc = lzcat::scenario;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUnknownFigure = 4;

// Flags shared by run/sweep/figure; each maps onto a scenario key.
struct CommonFlags {
  std::string config;
  std::string out = "out";
  std::string model;
  std::string t0, t1, rel_tol, abs_tol, nmax;
  unsigned jobs = 0;  // 0: take run.jobs from the config

  void attach(CLI::App* app, bool with_config) {
    if (with_config) {
      app->add_option("--config", config, "scenario file (key = value)");
      app->add_option("--model", model, "rwa | full")->check(CLI::IsMember({"rwa", "full"}));
    }
    app->add_option("--out", out, "output directory")->capture_default_str();
    app->add_option("--t0", t0, "window start [1/sqrt(v)]");
    app->add_option("--t1", t1, "window end [1/sqrt(v)]");
    app->add_option("--rel-tol", rel_tol, "relative local error tolerance");
    app->add_option("--abs-tol", abs_tol, "absolute local error tolerance");
    app->add_option("--nmax", nmax, "Fock cutoff (integer or 'auto')");
    app->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    app->allow_extras();
  }

  std::vector<sc::Entry> entries(const std::vector<std::string>& extras) const {
    std::vector<sc::Entry> out_entries;
    auto add = [&](const char* key, const std::string& v) {
      if (!v.empty()) out_entries.push_back(sc::Entry{key, v, 0});
    };
    add("model", model);
    add("integrator.t0", t0);
    add("integrator.t1", t1);
    add("integrator.rel_tol", rel_tol);
    add("integrator.abs_tol", abs_tol);
    add("truncation.n_max", nmax);
    auto extra = sc::parse_overrides(extras);
    out_entries.insert(out_entries.end(), extra.begin(), extra.end());
    return out_entries;
  }
};

std::vector<double> list_or_throw(const std::string& text, const std::string& field) {
  auto v = sc::parse_real_list(text, field);
  if (v.empty()) throw lzcat::ConfigError("empty list", 0, field);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landau-Zener transitions of a two-level system coupled to a photon mode"};
  app.set_version_flag("--version", std::string(lzcat::kVersion));
  app.require_subcommand(1);

  CommonFlags run_flags, sweep_flags, fig_flags;
  auto* run = app.add_subcommand("run", "evolve one scenario and write timeseries.csv");
  run_flags.attach(run, true);
  auto* sweep = app.add_subcommand("sweep", "final values over a parameter axis, written to sweep.csv");
  sweep_flags.attach(sweep, true);

  auto* figure = app.add_subcommand("figure", "regenerate figure data (CSV + manifest.json)");
  std::vector<std::string> figure_ids;
  figure->add_option("ids", figure_ids, "figure ids, or 'all'")->required();
  fig_flags.attach(figure, false);

  auto* analytic = app.add_subcommand("analytic", "tabulate closed-form results (tab-separated)");
  std::string formula = "cat-rwa";
  std::string a2 = "1", theta = "pi/2", delta = "0.5", v = "1", omega = "10", temp = "0", t_over_omega;
  bool oracle = false, list = false;
  analytic->add_option("--formula", formula, "formula id (see --list)")->capture_default_str();
  analytic->add_option("--alpha2", a2, "|alpha|^2 values, comma separated")->capture_default_str();
  analytic->add_option("--theta", theta, "cat phase values")->capture_default_str();
  analytic->add_option("--delta", delta, "coupling values [sqrt(v)]")->capture_default_str();
  analytic->add_option("--v", v, "sweep velocities")->capture_default_str();
  analytic->add_option("--omega", omega, "photon frequencies [sqrt(v)]")->capture_default_str();
  analytic->add_option("--T", temp, "temperatures [sqrt(v)]")->capture_default_str();
  analytic->add_option("--T-over-omega", t_over_omega, "scaled temperature (overrides --T)");
  analytic->add_flag("--oracle", oracle, "add the direct-sum column and |difference|");
  analytic->add_flag("--list", list, "list formula ids and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run->parsed() || sweep->parsed()) {
      const auto& flags = run->parsed() ? run_flags : sweep_flags;
      const auto& sub = run->parsed() ? *run : *sweep;
      const auto doc = sc::load_document(flags.config, flags.entries(sub.remaining()));
      const unsigned jobs = flags.jobs ? flags.jobs : doc.jobs;
      if (run->parsed()) {
        const auto sim = sc::cmd_run(doc.config, flags.out, jobs);
        const auto f = sc::final_values(sim.series);
        std::cout << "wrote " << flags.out << "/timeseries.csv  final_p_lz=" << sc::format_real(f.p_lz)
                  << "  analytic_p_lz=" << sc::format_real(sc::analytic_p_lz(doc.config))
                  << "  norm_drift=" << sc::format_real(sim.norm_drift) << '\n';
      } else {
        const auto rows = sc::cmd_sweep(doc.sweep(), flags.out, jobs);
        std::cout << "wrote " << flags.out << "/sweep.csv (" << rows.size() << " points)\n";
      }
    } else if (figure->parsed()) {
      const auto overrides = fig_flags.entries(figure->remaining());
      const auto doc = sc::build_document(overrides);
      sc::FigureOptions opt;
      opt.integrator = doc.config.integrator;
      opt.n_max = doc.config.n_max;
      opt.tail_tolerance = doc.config.tail_tolerance;
      opt.jobs = fig_flags.jobs ? fig_flags.jobs : 1;
      std::vector<std::string> ids = figure_ids;
      if (ids.size() == 1 && ids.front() == "all") ids = sc::figure_ids();
      for (const auto& id : ids) {
        const auto m = sc::cmd_figure(id, fig_flags.out, opt);
        std::cout << "wrote " << fig_flags.out << "/" << id << "/manifest.json (" << m["curves"].size()
                  << " curves)\n";
      }
    } else if (analytic->parsed()) {
      if (list) {
        for (const auto& f : sc::formulas()) std::cout << f.id << '\t' << f.description << '\n';
        return 0;
      }
      sc::AnalyticRequest req;
      req.formula = formula;
      req.alpha2 = list_or_throw(a2, "alpha2");
      req.theta = list_or_throw(theta, "theta");
      req.delta = list_or_throw(delta, "delta");
      req.v = list_or_throw(v, "v");
      req.omega = list_or_throw(omega, "omega");
      req.temperature = list_or_throw(temp, "T");
      if (!t_over_omega.empty()) {
        const auto r = sc::parse_real(t_over_omega);
        if (!r) throw lzcat::ConfigError("not a number", 0, "T-over-omega");
        req.t_over_omega = *r;
      }
      req.oracle = oracle;
      sc::cmd_analytic(req, std::cout);
    }
  } catch (const sc::UnknownFigure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUnknownFigure;
  } catch (const lzcat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lzcat::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lzcat::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
