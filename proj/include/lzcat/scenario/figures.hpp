#pragma once

// Figure-data regeneration: one CSV per curve plus manifest.json describing
// files, labels, axis columns, reference lines and vertical markers.
// Curve sets chosen here rather than fixed by the figure are marked "assumed".

#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lzcat/analytics.hpp"
#include "lzcat/hamiltonians.hpp"
#include "lzcat/scenario/commands.hpp"
#include "lzcat/scenario/config.hpp"
#include "lzcat/scenario/io.hpp"

namespace lzcat::scenario {

class UnknownFigure : public std::invalid_argument {
 public:
  explicit UnknownFigure(const std::string& id) : std::invalid_argument("unknown figure id '" + id + "'") {}
};

struct FigureOptions {
  IntegratorConfig integrator;
  std::optional<int> n_max;
  double tail_tolerance = 1e-12;
  unsigned jobs = 1;
};

inline const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"1a", "1b", "1c", "1d", "2a", "2b", "2c", "3a",
                                               "3b", "3c", "4a", "4b", "5",  "6a", "6b", "7"};
  return ids;
}

namespace figures {

inline constexpr double kHalfPi = 0.5 * std::numbers::pi;

struct RefLine {
  double value;
  std::string formula;
  std::string style;  // "dashed" | "dash-dot"
  std::string label;
};

struct VLine {
  double value;
  std::string label;
};

struct Curve {
  std::string file;
  std::string label;
  Json params;
  std::vector<RefLine> refs;
  std::vector<VLine> vlines;
  std::function<CsvTable()> compute;
};

struct Figure {
  std::string id;
  std::string title;
  std::string kind;  // timeseries | sweep | spectrum
  std::string x_column, x_label;
  std::vector<std::string> y_columns;
  std::string y_label;
  std::vector<std::string> assumed;  // parameters chosen here rather than fixed by the figure
  std::vector<std::string> notes;
  std::vector<RefLine> refs;         // figure-wide
  std::vector<Curve> curves;
};

inline ScenarioConfig cat_config(const FigureOptions& o, Model m, double delta, double omega, double alpha2,
                                 double theta = kHalfPi) {
  ScenarioConfig c;
  c.params = LZParams::resonant(m, delta, omega);
  c.initial.kind = InitialKind::cat;
  c.initial.alpha2 = alpha2;
  c.initial.theta = theta;
  c.integrator = o.integrator;
  c.n_max = o.n_max;
  c.tail_tolerance = o.tail_tolerance;
  return c;
}

inline std::string num(double x) { return format_real(x); }

// Extends the window to at least t_end at the same sample spacing, so the
// last 10% of samples lies after both crossing groups.
inline IntegratorConfig reaching(IntegratorConfig in, double t_end) {
  if (in.t1 >= t_end) return in;
  const double dt = (in.t1 - in.t0) / (in.sample_count - 1);
  in.t1 = t_end;
  in.sample_count = static_cast<int>(std::lround((in.t1 - in.t0) / dt)) + 1;
  return in;
}

inline Curve timeseries_curve(std::string file, std::string label, const ScenarioConfig& cfg) {
  Curve c;
  c.file = std::move(file);
  c.label = std::move(label);
  c.params = config_to_json(cfg);
  c.compute = [cfg] {
    return timeseries_table(simulate(cfg, 1).series, {"p_lz", "e_l", "q", "nbar", "n2", "norm"});
  };
  return c;
}

inline Curve sweep_curve(std::string file, std::string label, SweepSpec spec) {
  Curve c;
  c.file = std::move(file);
  c.label = std::move(label);
  c.params = config_to_json(spec.base);
  c.params["sweep"] = {{"axis", spec.axis}, {"values", spec.values}};
  c.compute = [spec] { return sweep_table(run_sweep(spec, 1)); };
  return c;
}

inline Curve spectrum_curve(std::string file, std::string label, LZParams p, int n_max, std::vector<double> ts) {
  Curve c;
  c.file = std::move(file);
  c.label = std::move(label);
  c.params = {{"model", to_string(p.model)}, {"frame", "lab"}, {"delta", p.delta}, {"omega", p.omega},
              {"v", p.v},                    {"n_max", n_max}};
  c.compute = [p, n_max, ts] {
    const auto slices = adiabatic_spectrum(p, ts, TruncationSpec{n_max, 1e-12}, Frame::lab);
    CsvTable t;
    t.add("t", ts);
    const auto levels = slices.front().eigenvalues.size();
    for (Eigen::Index k = 0; k < levels; ++k) {
      std::vector<double> e;
      for (const auto& s : slices) e.push_back(s.eigenvalues[k]);
      t.add("E" + std::to_string(k), std::move(e));
    }
    return t;
  };
  return c;
}

inline std::vector<double> grid(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  out.back() = b;
  return out;
}

inline std::string tag(double x) {
  std::string s = format_real(x);
  for (auto& ch : s)
    if (ch == '.') ch = 'p';
  return s;
}

inline RefLine ys_ref(double alpha2, double delta) {
  return {analytic::plz_yurke_stoler(alpha2, delta), "yurke-stoler", "dashed",
          "RWA closed form, |alpha|^2 = " + num(alpha2)};
}

inline Figure build(const std::string& id, const FigureOptions& o) {
  Figure f;
  f.id = id;
  const std::vector<double> a2_curves = {0.3, 1.0, 2.0};
  const std::vector<double> a2_time = {0.0, 1.0, 2.0, 4.0};
  const auto alpha2_axis = grid(0.0, 8.0, 17);
  const auto theta_axis = grid(0.0, 2.0 * std::numbers::pi, 25);
  const std::string t_label = "t [1/sqrt(v)]";

  auto timeseries = [&](std::string y, std::string ylabel) {
    f.kind = "timeseries";
    f.x_column = "t";
    f.x_label = t_label;
    f.y_columns = {std::move(y)};
    f.y_label = std::move(ylabel);
  };
  auto sweep = [&](std::string xlabel, std::string y, std::string ylabel) {
    f.kind = "sweep";
    f.x_column = "axis_value";
    f.x_label = std::move(xlabel);
    f.y_columns = {std::move(y)};
    f.y_label = std::move(ylabel);
  };

  if (id == "1a" || id == "4a") {
    const bool full = id == "4a";
    f.title = full ? "Adiabatic levels beyond the RWA" : "Adiabatic levels, RWA";
    f.kind = "spectrum";
    f.x_column = "t";
    f.x_label = t_label;
    f.y_label = "E [sqrt(v)]";
    f.assumed = {"n_max", "t_window"};
    const auto p = LZParams::resonant(full ? Model::full : Model::rwa, 0.5, 10.0);
    const auto ts = full ? grid(-10.0, 30.0, 801) : grid(-10.0, 10.0, 401);
    auto c = spectrum_curve("spectrum.csv", "adiabatic energies (lab frame)", p, 3, ts);
    c.vlines.push_back({0.0, "rotating-term crossings"});
    if (full) c.vlines.push_back({crossing_times(p).t_cross, "counter-rotating crossings, 2 omega / v"});
    for (int k = 0; k < 8; ++k) f.y_columns.push_back("E" + std::to_string(k));
    f.curves.push_back(std::move(c));
  } else if (id == "1b" || id == "4b") {
    const bool full = id == "4b";
    f.title = full ? "P_LZ(t) beyond the RWA, Yurke-Stoler cat" : "P_LZ(t), RWA, Yurke-Stoler cat";
    timeseries("p_lz", "P_LZ");
    f.assumed = {"alpha2 set"};
    for (double a2 : a2_time) {
      auto c = timeseries_curve("alpha2_" + tag(a2) + ".csv", "|alpha|^2 = " + num(a2),
                                cat_config(o, full ? Model::full : Model::rwa, 0.5, 10.0, a2));
      c.refs.push_back(ys_ref(a2, 0.5));
      if (full) c.vlines.push_back({20.0, "2 omega / v"});
      f.curves.push_back(std::move(c));
    }
  } else if (id == "1c" || id == "2b" || id == "3b") {
    const bool p_panel = id == "1c";
    const std::vector<double> deltas = p_panel ? std::vector<double>{0.1, 0.2, 0.5} : std::vector<double>{0.2, 0.5, 1.0};
    const std::string y = id == "1c" ? "final_p_lz" : id == "2b" ? "final_e_l" : "final_q";
    const std::string yl = id == "1c" ? "P_LZ(inf)" : id == "2b" ? "E_l(inf)" : "Q(inf)";
    f.title = yl + " versus |alpha|^2, RWA, Yurke-Stoler cat";
    sweep("|alpha|^2", y, yl);
    f.assumed = {"alpha2 grid"};
    if (id == "3b") f.refs.push_back({0.0, "poissonian", "dashed", "Q = 0"});
    for (double d : deltas)
      f.curves.push_back(sweep_curve("delta_" + tag(d) + ".csv", "Delta = " + num(d),
                                     SweepSpec{"alpha2", alpha2_axis, cat_config(o, Model::rwa, d, 10.0, 1.0)}));
  } else if (id == "1d" || id == "2c") {
    const bool p_panel = id == "1d";
    f.title = std::string(p_panel ? "P_LZ(inf)" : "E_l(inf)") + " versus theta, RWA, Delta = 0.5";
    sweep("theta", p_panel ? "final_p_lz" : "final_e_l", p_panel ? "P_LZ(inf)" : "E_l(inf)");
    f.assumed = {"alpha2 set", "theta grid"};
    for (double a2 : a2_curves)
      f.curves.push_back(sweep_curve("alpha2_" + tag(a2) + ".csv", "|alpha|^2 = " + num(a2),
                                     SweepSpec{"theta", theta_axis, cat_config(o, Model::rwa, 0.5, 10.0, a2)}));
  } else if (id == "2a" || id == "3a") {
    const bool e_panel = id == "2a";
    f.title = std::string(e_panel ? "E_l(t)" : "Q(t)") + ", RWA, Yurke-Stoler cat, Delta = 0.5";
    timeseries(e_panel ? "e_l" : "q", e_panel ? "E_l" : "Q");
    f.assumed = {"alpha2 set"};
    if (!e_panel) f.refs.push_back({0.0, "poissonian", "dashed", "Q = 0"});
    for (double a2 : a2_curves)
      f.curves.push_back(timeseries_curve("alpha2_" + tag(a2) + ".csv", "|alpha|^2 = " + num(a2),
                                          cat_config(o, Model::rwa, 0.5, 10.0, a2)));
  } else if (id == "3c") {
    f.title = "Q(inf) versus Delta, RWA, Yurke-Stoler cat";
    sweep("Delta [sqrt(v)]", "final_q", "Q(inf)");
    f.assumed = {"alpha2 set", "Delta grid"};
    f.refs.push_back({0.0, "poissonian", "dashed", "Q = 0"});
    for (double a2 : a2_curves)
      f.curves.push_back(sweep_curve("alpha2_" + tag(a2) + ".csv", "|alpha|^2 = " + num(a2),
                                     SweepSpec{"delta", grid(0.0, 2.0, 21), cat_config(o, Model::rwa, 0.5, 10.0, a2)}));
  } else if (id == "5") {
    f.title = "P_LZ(t) beyond the RWA, |alpha|^2 = 1, several Delta and omega";
    timeseries("p_lz", "P_LZ");
    f.assumed = {"Delta set", "omega set"};
    for (double d : {0.1, 0.5})
      for (double w : {1.0, 10.0}) {
        auto c = timeseries_curve("delta_" + tag(d) + "_omega_" + tag(w) + ".csv",
                                  "Delta = " + num(d) + ", omega = " + num(w), cat_config(o, Model::full, d, w, 1.0));
        c.refs.push_back(ys_ref(1.0, d));
        c.refs.back().style = "dash-dot";
        c.vlines.push_back({2.0 * w, "2 omega / v"});
        f.curves.push_back(std::move(c));
      }
  } else if (id == "6a") {
    f.title = "Long-time P_LZ beyond the RWA versus |alpha|^2, omega = 10";
    sweep("|alpha|^2", "final_p_lz", "P_LZ(inf)");
    f.assumed = {"alpha2 grid"};
    f.notes.push_back(
        "the three curves are labelled 0.1, 0.2, 0.5 at fixed omega = 10; the labels are read as couplings "
        "Delta");
    for (double d : {0.1, 0.2, 0.5}) {
      auto c = sweep_curve("delta_" + tag(d) + ".csv", "Delta = " + num(d),
                           SweepSpec{"alpha2", grid(0.0, 4.0, 9), cat_config(o, Model::full, d, 10.0, 1.0)});
      f.curves.push_back(std::move(c));
    }
    f.y_columns.push_back("analytic_p_lz");
  } else if (id == "6b") {
    f.title = "E_l(t) and Q(t) beyond the RWA, |alpha|^2 = 1, Delta = 0.1, omega = 10";
    timeseries("e_l", "E_l, Q");
    f.y_columns.push_back("q");
    auto c = timeseries_curve("alpha2_1.csv", "|alpha|^2 = 1", cat_config(o, Model::full, 0.1, 10.0, 1.0));
    c.vlines.push_back({20.0, "2 omega / v"});
    f.curves.push_back(std::move(c));
  } else if (id == "7") {
    f.title = "P_LZ(t) beyond the RWA, thermal field, Delta = 0.1, T/omega = 1";
    timeseries("p_lz", "P_LZ");
    f.notes.push_back("the time window is extended to 2 omega / v + 40 so the tail average follows both crossing groups");
    analytic::ClosedFormInputs in;
    in.delta = 0.1;
    in.omega = 1.0;
    in.temperature = 1.0;  // only T/omega enters
    f.refs.push_back({analytic::plz_thermal_rwa(in), "thermal-rwa", "dash-dot", "RWA thermal closed form"});
    f.refs.push_back({analytic::plz_thermal_norwa(in), "thermal-full", "dashed",
                      "independent-crossing thermal closed form"});
    f.refs.push_back({analytic::plz_thermal_norwa_printed(in), "thermal-full-printed", "dashed",
                      "independent-crossing thermal, bracket without (1+x) weights"});
    for (double w : {1.0, 10.0, 20.0}) {
      ScenarioConfig cfg;
      cfg.params = LZParams::resonant(Model::full, 0.1, w);
      cfg.initial.kind = InitialKind::thermal;
      cfg.initial.t_over_omega = 1.0;
      cfg.integrator = reaching(o.integrator, 2.0 * w / cfg.params.v + 40.0);
      cfg.n_max = o.n_max;
      cfg.tail_tolerance = o.tail_tolerance;
      Curve c;
      c.file = "omega_" + tag(w) + ".csv";
      c.label = "omega = " + num(w);
      c.params = config_to_json(cfg);
      c.compute = [cfg] { return timeseries_table(simulate(cfg, 1).series, {"p_lz", "q", "nbar", "n2", "norm"}); };
      c.vlines.push_back({2.0 * w, "2 omega / v"});
      f.curves.push_back(std::move(c));
    }
  } else {
    throw UnknownFigure(id);
  }
  return f;
}

inline Json ref_json(const RefLine& r) {
  return Json{{"value", r.value}, {"formula", r.formula}, {"style", r.style}, {"label", r.label}};
}

}  // namespace figures

/// Regenerates the data behind one figure into out_dir/<id>/ and returns the manifest.
inline Json cmd_figure(const std::string& id, const std::filesystem::path& out_dir, const FigureOptions& opt = {}) {
  auto fig = figures::build(id, opt);
  std::vector<CsvTable> tables(fig.curves.size());
  lzcat::detail::parallel_for(fig.curves.size(), opt.jobs, [&](std::size_t i) { tables[i] = fig.curves[i].compute(); });

  const auto dir = out_dir / id;
  Json curves = Json::array();
  for (std::size_t i = 0; i < fig.curves.size(); ++i) {
    const auto& c = fig.curves[i];
    write_atomic(dir / c.file, tables[i].str());
    Json refs = Json::array();
    for (const auto& r : c.refs) refs.push_back(figures::ref_json(r));
    Json vlines = Json::array();
    for (const auto& v : c.vlines) vlines.push_back({{"value", v.value}, {"label", v.label}});
    curves.push_back({{"file", c.file},
                      {"label", c.label},
                      {"rows", tables[i].rows()},
                      {"params", c.params},
                      {"reference_lines", refs},
                      {"vlines", vlines}});
  }
  Json refs = Json::array();
  for (const auto& r : fig.refs) refs.push_back(figures::ref_json(r));

  Json m = metadata_header("figure");
  m["figure"] = fig.id;
  m["title"] = fig.title;
  m["kind"] = fig.kind;
  m["x"] = {{"column", fig.x_column}, {"label", fig.x_label}};
  m["y"] = {{"columns", fig.y_columns}, {"label", fig.y_label}};
  m["assumed"] = !fig.assumed.empty();
  m["assumed_parameters"] = fig.assumed;
  m["notes"] = fig.notes;
  m["reference_lines"] = refs;
  m["curves"] = curves;
  write_json(dir / "manifest.json", m);
  return m;
}

}  // namespace lzcat::scenario
