#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "specwave/analysis.hpp"
#include "specwave/config.hpp"
#include "specwave/errors.hpp"
#include "specwave/grid.hpp"
#include "specwave/integrator.hpp"
#include "specwave/version.hpp"

namespace specwave {

inline constexpr std::string_view diagnostics_header =
    "t,mass,momentum,energy,energy_eq4,max_abs,l2_norm,spectrum_tail";
inline constexpr std::string_view gamma_header = "t,gamma";

// Locale-independent decimal rendering with 17 significant digits, enough to
// reproduce any double exactly on read-back.
inline std::string format_double(double value) {
  char buffer[64];
  const std::to_chars_result result =
      std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

// Fixed-point rendering with the given number of decimals, locale-independent.
inline std::string format_fixed(double value, int decimals) {
  char buffer[64];
  const std::to_chars_result result =
      std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::fixed, decimals);
  return std::string(buffer, result.ptr);
}

inline double parse_double(std::string_view text, const std::string& where) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  // from_chars does not accept a leading '+' or the inf/nan spellings produced
  // by to_chars, so handle those directly.
  if (!text.empty() && text.front() == '+') ++first;
  std::string_view body(first, static_cast<std::size_t>(last - first));
  if (body == "nan" || body == "-nan") return std::nan("");
  if (body == "inf") return std::numeric_limits<double>::infinity();
  if (body == "-inf") return -std::numeric_limits<double>::infinity();
  const std::from_chars_result result = std::from_chars(first, last, value);
  if (result.ec != std::errc{} || result.ptr != last) {
    throw IoError(where + ": cannot parse number from \"" + std::string(text) + "\"");
  }
  return value;
}

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace detail

inline void write_diagnostics(const DiagnosticsSeries& series, const std::filesystem::path& path) {
  if (series.rows.empty()) throw ConfigError("series", "diagnostics series is empty");
  std::ofstream out = detail::open_for_write(path);
  out << diagnostics_header << '\n';
  for (const DiagnosticsRow& row : series.rows) {
    out << format_double(row.t) << ',' << format_double(row.mass) << ',' << format_double(row.momentum)
        << ',' << format_double(row.energy) << ',' << format_double(row.energy_eq4) << ','
        << format_double(row.max_abs) << ',' << format_double(row.l2_norm) << ','
        << format_double(row.spectrum_tail) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

inline DiagnosticsSeries read_diagnostics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty diagnostics file: " + path.string());
  if (line != diagnostics_header) {
    throw IoError("unexpected diagnostics header in " + path.string() + ": \"" + line + "\"");
  }
  DiagnosticsSeries series;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (fields.size() != 8) {
      throw IoError("diagnostics row with " + std::to_string(fields.size()) + " fields in " +
                    path.string());
    }
    DiagnosticsRow row;
    const std::string where = path.string();
    row.t = parse_double(fields[0], where);
    row.mass = parse_double(fields[1], where);
    row.momentum = parse_double(fields[2], where);
    row.energy = parse_double(fields[3], where);
    row.energy_eq4 = parse_double(fields[4], where);
    row.max_abs = parse_double(fields[5], where);
    row.l2_norm = parse_double(fields[6], where);
    row.spectrum_tail = parse_double(fields[7], where);
    series.rows.push_back(row);
  }
  return series;
}

// Snapshot column labels carry the time with six fixed decimals.
inline std::string format_snapshot_time(double t) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6f", t);
  return std::string(buffer);
}

inline void write_snapshots(const std::vector<Snapshot>& snapshots, const GridSpec& grid,
                            const std::filesystem::path& path) {
  if (snapshots.empty()) throw ConfigError("snapshots", "no snapshots to write");
  for (const Snapshot& snap : snapshots) {
    if (snap.psi.size() != static_cast<std::size_t>(grid.num_points)) {
      throw ContractViolationError("write_snapshots: snapshot length does not match the grid");
    }
  }
  std::ofstream out = detail::open_for_write(path);
  out << 'x';
  for (const Snapshot& snap : snapshots) out << ",psi@" << format_snapshot_time(snap.t);
  out << '\n';
  for (int j = 0; j < grid.num_points; ++j) {
    out << format_double(grid.node(j));
    for (const Snapshot& snap : snapshots) out << ',' << format_double(snap.psi[static_cast<std::size_t>(j)]);
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

inline void write_gamma_series(const GammaSeries& series, const std::filesystem::path& path) {
  if (series.rows.empty()) throw ConfigError("series", "gamma series is empty");
  std::ofstream out = detail::open_for_write(path);
  out << gamma_header << '\n';
  for (const GammaPoint& row : series.rows) {
    out << format_double(row.t) << ',' << format_double(row.gamma) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

inline GammaSeries read_gamma_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty gamma file: " + path.string());
  if (line != gamma_header) {
    throw IoError("unexpected gamma header in " + path.string() + ": \"" + line + "\"");
  }
  GammaSeries series;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (fields.size() != 2) {
      throw IoError("gamma row with " + std::to_string(fields.size()) + " fields in " + path.string());
    }
    series.rows.push_back({parse_double(fields[0], path.string()), parse_double(fields[1], path.string())});
  }
  return series;
}

// Everything needed to reproduce a run bit for bit: the fully resolved config,
// derived scales, and the blow-up record when one occurred.
struct RunManifest {
  RunConfig config;
  double dx = 0.0;
  double dt_used = 0.0;
  double omega_cap_value = 0.0;
  std::optional<double> snapped_kp;
  std::optional<BlowupRecord> blowup;
  std::string tool_version = std::string(version);
};

inline RunManifest make_manifest(const RunConfig& config, const GridSpec& grid) {
  RunManifest manifest;
  manifest.config = config;
  manifest.config.control.dt = resolved_dt(config, grid);
  manifest.dx = grid.dx();
  manifest.dt_used = *manifest.config.control.dt;
  manifest.omega_cap_value = omega_cap(config.params, grid);
  return manifest;
}

inline void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["schema"] = "specwave-manifest";
  doc["version"] = manifest.tool_version;
  doc["config"] = config_to_json(manifest.config);
  nlohmann::json derived;
  derived["dx"] = manifest.dx;
  derived["dt_used"] = manifest.dt_used;
  derived["omega_cap"] = manifest.omega_cap_value;
  if (manifest.snapped_kp) derived["snapped_kp"] = *manifest.snapped_kp;
  derived["sigma_exploratory"] = manifest.config.params.sigma == 1;
  doc["derived"] = derived;
  if (manifest.blowup) {
    doc["blowup"] = {
        {"t_blow", manifest.blowup->t_blow},
        {"trigger", manifest.blowup->trigger == BlowupTrigger::overflow ? "overflow" : "non_finite"}};
  }
  std::ofstream out = detail::open_for_write(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

inline RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("manifest is not valid JSON: " + path.string() + " (" + e.what() + ")");
  }
  if (!doc.is_object() || doc.value("schema", "") != std::string("specwave-manifest")) {
    throw IoError("not a manifest file: " + path.string());
  }
  if (!doc.contains("config")) throw IoError("manifest without config block: " + path.string());
  RunManifest manifest;
  manifest.config = config_from_json(doc.at("config"));
  manifest.tool_version = doc.value("version", "");
  if (doc.contains("derived")) {
    const nlohmann::json& derived = doc.at("derived");
    manifest.dx = derived.value("dx", 0.0);
    manifest.dt_used = derived.value("dt_used", 0.0);
    manifest.omega_cap_value = derived.value("omega_cap", 0.0);
    if (derived.contains("snapped_kp")) manifest.snapped_kp = derived.at("snapped_kp").get<double>();
  }
  if (doc.contains("blowup")) {
    const nlohmann::json& blow = doc.at("blowup");
    BlowupRecord record;
    record.t_blow = blow.value("t_blow", 0.0);
    record.trigger =
        blow.value("trigger", "overflow") == std::string("non_finite") ? BlowupTrigger::non_finite
                                                                       : BlowupTrigger::overflow;
    manifest.blowup = record;
  }
  return manifest;
}

// True when the file at `path` is a manifest rather than a bare config.
inline bool is_manifest_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error&) {
    return false;
  }
  return doc.is_object() && doc.value("schema", "") == std::string("specwave-manifest");
}

}  // namespace specwave
