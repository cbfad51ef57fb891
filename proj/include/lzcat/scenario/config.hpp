#pragma once

// Scenario files: flat `key = value` text with optional [section] headers
// (a header prefixes the keys below it, so `[params]` + `delta = 0.5` is
// `params.delta = 0.5`). `#` starts a comment. The same keys are accepted
// as `--key=value` overrides on the command line.
//
// Reals accept multiples of pi: `pi`, `pi/2`, `0.5*pi`, `3pi/4`, `-pi`.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lzcat/error.hpp"
#include "lzcat/fockspace.hpp"
#include "lzcat/hamiltonians.hpp"
#include "lzcat/propagator.hpp"

namespace lzcat::scenario {

enum class InitialKind { cat, fock, thermal };

inline std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::cat: return "cat";
    case InitialKind::fock: return "fock";
    case InitialKind::thermal: return "thermal";
  }
  return "?";
}

struct InitialState {
  InitialKind kind = InitialKind::cat;
  double alpha2 = 1.0;
  double theta = 0.5 * std::numbers::pi;
  int n = 0;
  double temperature = 0.0;
  std::optional<double> t_over_omega;  // when set, T follows omega
};

/// Observable columns in canonical output order.
inline const std::vector<std::string>& observable_names() {
  static const std::vector<std::string> names = {"p_lz", "e_l", "q", "nbar", "n2", "norm"};
  return names;
}

struct ScenarioConfig {
  LZParams params = LZParams::resonant(Model::rwa, 0.5, 10.0);
  bool omega0_set = false;  // otherwise omega0 tracks omega (resonance)
  InitialState initial;
  IntegratorConfig integrator;
  std::optional<int> n_max;  // empty: automatic from the tail tolerance
  double tail_tolerance = 1e-12;
  std::optional<std::vector<std::string>> outputs;

  double temperature() const {
    return initial.t_over_omega ? *initial.t_over_omega * params.omega : initial.temperature;
  }

  LZParams resolved_params() const {
    LZParams p = params;
    if (!omega0_set) p.omega0 = p.omega;
    return p;
  }

  TruncationSpec truncation() const {
    if (n_max) return TruncationSpec{*n_max, tail_tolerance};
    switch (initial.kind) {
      case InitialKind::cat: return truncation_for_cat(std::sqrt(initial.alpha2), initial.theta, tail_tolerance);
      case InitialKind::fock: return TruncationSpec{initial.n + kTruncationPad, tail_tolerance};
      case InitialKind::thermal:
        return truncation_for_thermal(resolved_params().omega, temperature(), tail_tolerance);
    }
    return {};
  }

  /// Requested columns, or the defaults for the initial-state kind.
  std::vector<std::string> columns() const {
    if (outputs) {
      std::vector<std::string> out;
      for (const auto& name : observable_names())
        if (std::find(outputs->begin(), outputs->end(), name) != outputs->end()) out.push_back(name);
      return out;
    }
    if (initial.kind == InitialKind::thermal) return {"p_lz", "q", "nbar", "norm"};
    return {"p_lz", "e_l", "q", "nbar", "norm"};
  }

  void validate() const {
    resolved_params().validate();
    integrator.validate();
    if (!(tail_tolerance > 0.0 && tail_tolerance < 1.0))
      throw ConfigError("must lie in (0, 1)", 0, "truncation.tail_tolerance");
    if (n_max && *n_max < 0) throw ConfigError("must be >= 0", 0, "truncation.n_max");
    if (!(initial.alpha2 >= 0.0)) throw ConfigError("must be >= 0", 0, "initial.alpha2");
    if (initial.n < 0) throw ConfigError("must be >= 0", 0, "initial.n");
    if (!(temperature() >= 0.0)) throw ConfigError("must be >= 0", 0, "initial.T");
    if (outputs) {
      for (const auto& name : *outputs) {
        const auto& known = observable_names();
        if (std::find(known.begin(), known.end(), name) == known.end())
          throw ConfigError("unknown observable '" + name + "'", 0, "output.columns");
      }
      if (initial.kind == InitialKind::thermal &&
          std::find(outputs->begin(), outputs->end(), "e_l") != outputs->end())
        throw ConfigError("linear entropy is not defined for thermal ensembles", 0, "output.columns");
    }
  }
};

inline const std::vector<std::string>& sweep_axes() {
  static const std::vector<std::string> axes = {"alpha2", "theta", "delta", "omega", "T"};
  return axes;
}

struct SweepSpec {
  std::string axis;
  std::vector<double> values;
  ScenarioConfig base;

  void validate() const {
    const auto& axes = sweep_axes();
    if (std::find(axes.begin(), axes.end(), axis) == axes.end())
      throw ConfigError("unknown sweep axis '" + axis + "'", 0, "sweep.axis");
    if (values.empty()) throw ConfigError("no sweep values", 0, "sweep.values");
    for (double x : values)
      if (!std::isfinite(x)) throw ConfigError("non-finite sweep value", 0, "sweep.values");
    base.validate();
  }

  /// Base configuration with the axis set to `x`.
  ScenarioConfig at(double x) const {
    ScenarioConfig c = base;
    if (axis == "alpha2") c.initial.alpha2 = x;
    else if (axis == "theta") c.initial.theta = x;
    else if (axis == "delta") c.params.delta = x;
    else if (axis == "omega") c.params.omega = x;
    else if (axis == "T") {
      c.initial.t_over_omega.reset();
      c.initial.temperature = x;
    }
    return c;
  }
};

// --- value parsing --------------------------------------------------------------

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_plain_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return x;
}

}  // namespace detail

/// Real number, optionally a rational multiple of pi.
inline std::optional<double> parse_real(std::string_view text) {
  const auto s = detail::trim(text);
  const auto at = s.find("pi");
  if (at == std::string_view::npos) return detail::parse_plain_double(s);
  auto head = detail::trim(s.substr(0, at));
  auto tail = detail::trim(s.substr(at + 2));
  double factor = 1.0;
  if (!head.empty() && head.back() == '*') head = detail::trim(head.substr(0, head.size() - 1));
  if (head == "-") factor = -1.0;
  else if (!head.empty() && head != "+") {
    const auto f = detail::parse_plain_double(head);
    if (!f) return std::nullopt;
    factor = *f;
  }
  if (!tail.empty()) {
    if (tail.front() != '/') return std::nullopt;
    const auto d = detail::parse_plain_double(tail.substr(1));
    if (!d || *d == 0.0) return std::nullopt;
    factor /= *d;
  }
  return factor * std::numbers::pi;
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = detail::trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!piece.empty()) out.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::vector<double> parse_real_list(std::string_view s, const std::string& field, int line = 0) {
  std::vector<double> out;
  for (const auto& piece : split_list(s)) {
    const auto x = parse_real(piece);
    if (!x) throw ConfigError("not a number: '" + piece + "'", line, field);
    out.push_back(*x);
  }
  return out;
}

/// `start:stop:count`, inclusive, count >= 2 (count 1 gives start).
inline std::vector<double> parse_range(std::string_view s, const std::string& field, int line = 0) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto colon = s.find(':', start);
    parts.emplace_back(detail::trim(s.substr(start, colon == s.npos ? s.npos : colon - start)));
    if (colon == s.npos) break;
    start = colon + 1;
  }
  if (parts.size() != 3) throw ConfigError("expected start:stop:count", line, field);
  const auto a = parse_real(parts[0]);
  const auto b = parse_real(parts[1]);
  const auto n = detail::parse_plain_double(parts[2]);
  if (!a || !b || !n || *n < 1 || *n != std::floor(*n)) throw ConfigError("expected start:stop:count", line, field);
  const int count = static_cast<int>(*n);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] = count == 1 ? *a : *a + (*b - *a) * i / (count - 1);
  if (count > 1) out.back() = *b;
  return out;
}

// --- key/value documents -----------------------------------------------------------

struct Entry {
  std::string key;
  std::string value;
  int line = 0;  // 0 for command-line overrides
};

/// Parses scenario text into ordered entries; later entries win.
inline std::vector<Entry> parse_entries(std::string_view text) {
  std::vector<Entry> out;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == text.npos ? text.npos : nl - pos);
    pos = nl == text.npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != line.npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == line.npos) throw ConfigError("expected 'key = value'", line_no);
    std::string key(detail::trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("empty key", line_no);
    if (!section.empty()) key = section + "." + key;
    out.push_back(Entry{std::move(key), std::string(detail::trim(line.substr(eq + 1))), line_no});
  }
  return out;
}

/// `--key=value` tokens; anything else is rejected.
inline std::vector<Entry> parse_overrides(const std::vector<std::string>& args) {
  std::vector<Entry> out;
  for (const auto& a : args) {
    if (a.rfind("--", 0) != 0 || a.find('=') == std::string::npos)
      throw ConfigError("unrecognized argument '" + a + "' (overrides take the form --key=value)");
    const auto eq = a.find('=');
    out.push_back(Entry{a.substr(2, eq - 2), a.substr(eq + 1), 0});
  }
  return out;
}

/// Scenario plus the optional sweep block from the same document.
struct ScenarioDocument {
  ScenarioConfig config;
  std::optional<std::string> sweep_axis;
  std::optional<std::vector<double>> sweep_values;
  unsigned jobs = 1;

  SweepSpec sweep() const {
    if (!sweep_axis) throw ConfigError("missing", 0, "sweep.axis");
    if (!sweep_values) throw ConfigError("missing (give sweep.values or sweep.range)", 0, "sweep.values");
    SweepSpec s{*sweep_axis, *sweep_values, config};
    s.validate();
    return s;
  }
};

namespace detail {

inline double real_field(const Entry& e) {
  const auto x = parse_real(e.value);
  if (!x) throw ConfigError("not a number: '" + e.value + "'", e.line, e.key);
  return *x;
}

inline int int_field(const Entry& e) {
  const auto x = parse_plain_double(e.value);
  if (!x || *x != std::floor(*x) || std::abs(*x) > 1e9)
    throw ConfigError("not an integer: '" + e.value + "'", e.line, e.key);
  return static_cast<int>(*x);
}

}  // namespace detail

inline void apply_entry(ScenarioDocument& doc, const Entry& e) {
  auto& c = doc.config;
  const std::string& k = e.key;
  using detail::int_field;
  using detail::real_field;
  if (k == "model" || k == "params.model") {
    if (e.value == "rwa") c.params.model = Model::rwa;
    else if (e.value == "full") c.params.model = Model::full;
    else throw ConfigError("expected 'rwa' or 'full'", e.line, k);
  } else if (k == "params.v") c.params.v = real_field(e);
  else if (k == "params.delta") c.params.delta = real_field(e);
  else if (k == "params.omega") c.params.omega = real_field(e);
  else if (k == "params.omega0") {
    c.params.omega0 = real_field(e);
    c.omega0_set = true;
  } else if (k == "initial.kind") {
    if (e.value == "cat") c.initial.kind = InitialKind::cat;
    else if (e.value == "fock") c.initial.kind = InitialKind::fock;
    else if (e.value == "thermal") c.initial.kind = InitialKind::thermal;
    else throw ConfigError("expected 'cat', 'fock' or 'thermal'", e.line, k);
  } else if (k == "initial.alpha2") c.initial.alpha2 = real_field(e);
  else if (k == "initial.alpha") {
    const double a = real_field(e);
    if (a < 0.0) throw ConfigError("must be >= 0", e.line, k);
    c.initial.alpha2 = a * a;
  } else if (k == "initial.theta") c.initial.theta = real_field(e);
  else if (k == "initial.n") c.initial.n = int_field(e);
  else if (k == "initial.T") {
    c.initial.temperature = real_field(e);
    c.initial.t_over_omega.reset();
  } else if (k == "initial.T_over_omega") c.initial.t_over_omega = real_field(e);
  else if (k == "integrator.t0") c.integrator.t0 = real_field(e);
  else if (k == "integrator.t1") c.integrator.t1 = real_field(e);
  else if (k == "integrator.rel_tol") c.integrator.rel_tol = real_field(e);
  else if (k == "integrator.abs_tol") c.integrator.abs_tol = real_field(e);
  else if (k == "integrator.sample_count") c.integrator.sample_count = int_field(e);
  else if (k == "integrator.max_step") c.integrator.max_step = real_field(e);
  else if (k == "integrator.full_integration") {
    if (e.value == "interaction") c.integrator.full_integration = FullIntegration::interaction_picture;
    else if (e.value == "lab") c.integrator.full_integration = FullIntegration::lab_direct;
    else throw ConfigError("expected 'interaction' or 'lab'", e.line, k);
  } else if (k == "truncation.n_max") {
    if (e.value == "auto") c.n_max.reset();
    else c.n_max = int_field(e);
  } else if (k == "truncation.tail_tolerance") c.tail_tolerance = real_field(e);
  else if (k == "output.columns") c.outputs = split_list(e.value);
  else if (k == "sweep.axis") doc.sweep_axis = e.value;
  else if (k == "sweep.values") doc.sweep_values = parse_real_list(e.value, k, e.line);
  else if (k == "sweep.range") doc.sweep_values = parse_range(e.value, k, e.line);
  else if (k == "run.jobs") {
    const int j = int_field(e);
    if (j < 1) throw ConfigError("must be >= 1", e.line, k);
    doc.jobs = static_cast<unsigned>(j);
  } else {
    throw ConfigError("unknown key", e.line, k);
  }
}

/// Applies entries in order and validates the result.
inline ScenarioDocument build_document(const std::vector<Entry>& entries) {
  ScenarioDocument doc;
  for (const auto& e : entries) apply_entry(doc, e);
  try {
    doc.config.validate();
  } catch (const DomainError& err) {
    throw ConfigError(err.what());
  }
  return doc;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Loads `path` (may be empty for defaults) and applies overrides on top.
inline ScenarioDocument load_document(const std::string& path, const std::vector<Entry>& overrides = {}) {
  std::vector<Entry> entries;
  if (!path.empty()) entries = parse_entries(read_text_file(path));
  entries.insert(entries.end(), overrides.begin(), overrides.end());
  return build_document(entries);
}

}  // namespace lzcat::scenario
