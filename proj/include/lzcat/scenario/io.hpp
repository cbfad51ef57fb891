#pragma once

// CSV/JSON output: 17 significant digits, '\n' line endings, "nan" for
// undefined values, files replaced atomically (write temp, then rename).

#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "lzcat/error.hpp"
#include "lzcat/scenario/config.hpp"
#include "lzcat/version.hpp"

namespace lzcat::scenario {

using Json = nlohmann::ordered_json;

inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// Column-major numeric table.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  void add(std::string name, std::vector<double> values) {
    if (!columns.empty() && values.size() != columns.front().size())
      throw DomainError("CsvTable: column '" + name + "' has mismatched length");
    header.push_back(std::move(name));
    columns.push_back(std::move(values));
  }

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }

  std::string str() const {
    std::string out;
    for (std::size_t j = 0; j < header.size(); ++j) out += (j ? "," : "") + header[j];
    out += '\n';
    for (std::size_t i = 0; i < rows(); ++i) {
      for (std::size_t j = 0; j < columns.size(); ++j) {
        if (j) out += ',';
        out += format_real(columns[j][i]);
      }
      out += '\n';
    }
    return out;
  }
};

/// Writes `content` to `path` via a uniquely named sibling and rename().
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  static std::atomic<unsigned long> counter{0};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp" + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

/// JSON number, or null for NaN/inf.
inline Json json_real(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json config_to_json(const ScenarioConfig& c) {
  const LZParams p = c.resolved_params();
  Json j;
  j["model"] = to_string(p.model);
  j["params"] = {{"v", p.v}, {"delta", p.delta}, {"omega", p.omega}, {"omega0", p.omega0}};
  Json init;
  init["kind"] = to_string(c.initial.kind);
  switch (c.initial.kind) {
    case InitialKind::cat:
      init["alpha2"] = c.initial.alpha2;
      init["theta"] = c.initial.theta;
      break;
    case InitialKind::fock: init["n"] = c.initial.n; break;
    case InitialKind::thermal:
      init["T"] = c.temperature();
      if (c.initial.t_over_omega) init["T_over_omega"] = *c.initial.t_over_omega;
      break;
  }
  j["initial"] = init;
  const auto& ig = c.integrator;
  j["integrator"] = {{"t0", ig.t0},
                     {"t1", ig.t1},
                     {"rel_tol", ig.rel_tol},
                     {"abs_tol", ig.abs_tol},
                     {"sample_count", ig.sample_count},
                     {"max_step", ig.max_step},
                     {"full_integration",
                      ig.full_integration == FullIntegration::interaction_picture ? "interaction" : "lab"}};
  const auto tr = c.truncation();
  j["truncation"] = {{"n_max", tr.n_max}, {"auto", !c.n_max.has_value()}, {"tail_tolerance", c.tail_tolerance}};
  j["output"] = {{"columns", c.columns()}};
  return j;
}

inline Json metadata_header(const std::string& command) {
  Json j;
  j["generator"] = "lzcat";
  j["version"] = std::string(kVersion);
  j["command"] = command;
  return j;
}

inline void write_json(const std::filesystem::path& path, const Json& j) { write_atomic(path, j.dump(2) + "\n"); }

}  // namespace lzcat::scenario
