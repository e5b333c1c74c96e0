#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "specwave/analysis.hpp"
#include "specwave/errors.hpp"
#include "specwave/grid.hpp"
#include "specwave/integrator.hpp"
#include "specwave/model.hpp"

namespace specwave {

enum class IcKind { gaussian, sech2, file };

struct IcSpec {
  IcKind kind = IcKind::gaussian;
  double amplitude = 1.0;
  double width = 1.0;
  double center = 0.0;
  std::string path;  // file kind only

  bool operator==(const IcSpec&) const = default;
};

enum class VelocityKind { zero, file };

struct VelocitySpec {
  VelocityKind kind = VelocityKind::zero;
  std::string path;

  bool operator==(const VelocitySpec&) const = default;
};

struct ControlSpec {
  std::optional<double> dt;  // absent means the stability-based default
  double t_max = 2.0;
  int snapshot_stride = 10;
  double blowup_threshold = 1e6;

  bool operator==(const ControlSpec&) const = default;
};

struct OutputSpec {
  std::string diagnostics = "diagnostics.csv";
  std::string snapshots = "snapshots.csv";
  std::string plots = "plots";
  std::optional<std::vector<double>> snapshot_times;  // absent means quarter points

  bool operator==(const OutputSpec&) const = default;
};

struct PerturbationConfig {
  double eps = 1e-3;
  double k_p = kp_preset_packet;

  bool operator==(const PerturbationConfig&) const = default;
};

struct RunConfig {
  ModelParams params;
  double L = 30.0;
  int N = 1024;
  IcSpec ic;
  VelocitySpec psi_t0;
  ControlSpec control;
  bool dealias = true;
  std::optional<PerturbationConfig> perturbation;
  OutputSpec outputs;

  bool operator==(const RunConfig&) const = default;
};

inline GridSpec grid_of(const RunConfig& config) { return make_grid(config.L, config.N); }

// Stability-based default step: dt = 0.25 / omega_cap with
// omega_cap = sqrt(|alpha1| k_max^2 + 3 |alpha2| k_max^4) at the Nyquist wavenumber.
inline double omega_cap(const ModelParams& params, const GridSpec& grid) {
  const double k = nyquist_wavenumber(grid);
  const double k2 = k * k;
  return std::sqrt(std::abs(params.alpha1) * k2 + 3.0 * std::abs(params.alpha2) * k2 * k2);
}

inline double default_dt(const ModelParams& params, const GridSpec& grid) {
  const double cap = omega_cap(params, grid);
  if (cap == 0.0) return 0.25;  // dispersionless parameter sets have no scale to resolve
  return 0.25 / cap;
}

inline double resolved_dt(const RunConfig& config, const GridSpec& grid) {
  double dt = config.control.dt ? *config.control.dt : default_dt(config.params, grid);
  if (config.control.t_max > 0.0) dt = std::min(dt, config.control.t_max);
  return dt;
}

inline StepControl step_control_of(const RunConfig& config, const GridSpec& grid) {
  return StepControl{resolved_dt(config, grid), config.control.t_max, config.control.snapshot_stride,
                     config.control.blowup_threshold};
}

inline std::vector<double> snapshot_times_of(const RunConfig& config) {
  if (config.outputs.snapshot_times) return *config.outputs.snapshot_times;
  const double T = config.control.t_max;
  if (T == 0.0) return {0.0};
  return {0.0, 0.25 * T, 0.5 * T, 0.75 * T, T};
}

namespace detail {

inline std::vector<double> read_field_file(const std::string& path, int expected, const std::string& where) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open field file: " + path);
  std::vector<double> values;
  double v = 0.0;
  while (in >> v) values.push_back(v);
  if (!in.eof()) throw ConfigError(where, "field file contains non-numeric data: " + path);
  if (static_cast<int>(values.size()) != expected) {
    throw ConfigError(where, "field file " + path + " holds " + std::to_string(values.size()) +
                                 " values, expected " + std::to_string(expected));
  }
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!std::isfinite(values[j])) throw NumericalStateError(j, where + ": non-finite value in " + path);
  }
  return values;
}

}  // namespace detail

inline std::vector<double> build_ic(const IcSpec& ic, const GridSpec& grid) {
  const std::size_t n = static_cast<std::size_t>(grid.num_points);
  std::vector<double> psi(n);
  switch (ic.kind) {
    case IcKind::gaussian:
      for (std::size_t j = 0; j < n; ++j) {
        const double u = (grid.node(static_cast<int>(j)) - ic.center) / ic.width;
        psi[j] = ic.amplitude * std::exp(-u * u);
      }
      return psi;
    case IcKind::sech2:
      for (std::size_t j = 0; j < n; ++j) {
        const double u = (grid.node(static_cast<int>(j)) - ic.center) / ic.width;
        const double sech = 1.0 / std::cosh(u);
        psi[j] = ic.amplitude * sech * sech;
      }
      return psi;
    case IcKind::file:
      return detail::read_field_file(ic.path, grid.num_points, "ic.path");
  }
  throw ConfigError("ic.kind", "unknown initial condition kind");
}

inline FieldPair initial_state(const RunConfig& config, const GridSpec& grid) {
  FieldPair state;
  state.psi = build_ic(config.ic, grid);
  if (config.psi_t0.kind == VelocityKind::zero) {
    state.psi_t.assign(static_cast<std::size_t>(grid.num_points), 0.0);
  } else {
    state.psi_t = detail::read_field_file(config.psi_t0.path, grid.num_points, "psi_t0.path");
  }
  return state;
}

inline void validate_config(const RunConfig& config) {
  validate_params(config.params);
  (void)make_grid(config.L, config.N);

  if (!std::isfinite(config.ic.amplitude)) throw ConfigError("ic.amplitude", "amplitude must be finite");
  if (!std::isfinite(config.ic.width) || config.ic.width <= 0.0) {
    throw ConfigError("ic.width", "width must be positive and finite");
  }
  if (!std::isfinite(config.ic.center)) throw ConfigError("ic.center", "center must be finite");
  if (config.ic.kind == IcKind::file && config.ic.path.empty()) {
    throw ConfigError("ic.path", "file initial conditions need a path");
  }
  if (config.psi_t0.kind == VelocityKind::file && config.psi_t0.path.empty()) {
    throw ConfigError("psi_t0.path", "file velocities need a path");
  }

  if (!std::isfinite(config.control.t_max) || config.control.t_max < 0.0) {
    throw ConfigError("control.t_max", "t_max must be a finite number >= 0");
  }
  if (config.control.dt) {
    if (!std::isfinite(*config.control.dt) || *config.control.dt <= 0.0) {
      throw ConfigError("control.dt", "dt must be positive and finite");
    }
    if (config.control.t_max > 0.0 && *config.control.dt > config.control.t_max) {
      throw ConfigError("control.dt", "dt must not exceed t_max");
    }
  }
  if (config.control.snapshot_stride < 1) {
    throw ConfigError("control.snapshot_stride", "snapshot_stride must be a positive integer");
  }
  if (!std::isfinite(config.control.blowup_threshold) || config.control.blowup_threshold <= 0.0) {
    throw ConfigError("control.blowup_threshold", "blowup_threshold must be positive and finite");
  }

  if (config.perturbation) {
    const PerturbationSpec spec{config.perturbation->eps, config.perturbation->k_p};
    validate_perturbation(spec);
  }

  if (config.outputs.diagnostics.empty()) throw ConfigError("outputs.diagnostics", "path must be non-empty");
  if (config.outputs.snapshots.empty()) throw ConfigError("outputs.snapshots", "path must be non-empty");
  std::vector<std::string> normalized;
  for (const std::string& p : {config.outputs.diagnostics, config.outputs.snapshots, config.outputs.plots}) {
    if (p.empty()) continue;
    normalized.push_back(std::filesystem::path(p).lexically_normal().string());
  }
  std::sort(normalized.begin(), normalized.end());
  if (std::adjacent_find(normalized.begin(), normalized.end()) != normalized.end()) {
    throw ConfigError("outputs", "diagnostics, snapshots, and plots paths must be distinct");
  }

  if (config.outputs.snapshot_times) {
    for (double t : *config.outputs.snapshot_times) {
      if (!std::isfinite(t) || t < 0.0 || t > config.control.t_max) {
        throw ConfigError("outputs.snapshot_times", "snapshot times must lie in [0, t_max]");
      }
    }
  }
}

namespace detail {

using json = nlohmann::json;

inline std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                                const std::string& base) {
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* name) { return item.key() == name; });
    if (!known) throw ConfigError(join_path(base, item.key()), "unknown key");
  }
}

inline double get_number(const json& obj, const char* key, const std::string& base, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join_path(base, key), "expected a number");
  return v.get<double>();
}

inline int get_integer(const json& obj, const char* key, const std::string& base, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(join_path(base, key), "expected an integer");
  return v.get<int>();
}

inline bool get_boolean(const json& obj, const char* key, const std::string& base, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(join_path(base, key), "expected a boolean");
  return v.get<bool>();
}

inline std::string get_string(const json& obj, const char* key, const std::string& base,
                              const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(join_path(base, key), "expected a string");
  return v.get<std::string>();
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& doc) {
  using detail::json;
  if (!doc.is_object()) throw ConfigError("document", "config must be a JSON object");
  detail::reject_unknown_keys(
      doc, {"params", "grid", "ic", "psi_t0", "control", "dealias", "perturbation", "outputs"}, "");

  RunConfig config;

  if (!doc.contains("params")) throw ConfigError("params", "required block is missing");
  const json& params = doc.at("params");
  if (!params.is_object()) throw ConfigError("params", "expected an object");
  detail::reject_unknown_keys(params, {"alpha1", "alpha2", "alpha3", "sigma"}, "params");
  config.params.alpha1 = detail::get_number(params, "alpha1", "params", 1.0);
  config.params.alpha2 = detail::get_number(params, "alpha2", "params", 1.0);
  config.params.alpha3 = detail::get_number(params, "alpha3", "params", 1.0);
  config.params.sigma = detail::get_integer(params, "sigma", "params", 2);

  if (doc.contains("grid")) {
    const json& grid = doc.at("grid");
    if (!grid.is_object()) throw ConfigError("grid", "expected an object");
    detail::reject_unknown_keys(grid, {"L", "N"}, "grid");
    config.L = detail::get_number(grid, "L", "grid", config.L);
    config.N = detail::get_integer(grid, "N", "grid", config.N);
  }

  if (doc.contains("ic")) {
    const json& ic = doc.at("ic");
    if (!ic.is_object()) throw ConfigError("ic", "expected an object");
    detail::reject_unknown_keys(ic, {"kind", "amplitude", "width", "center", "path"}, "ic");
    const std::string kind = detail::get_string(ic, "kind", "ic", "gaussian");
    if (kind == "gaussian") {
      config.ic.kind = IcKind::gaussian;
    } else if (kind == "sech2") {
      config.ic.kind = IcKind::sech2;
    } else if (kind == "file") {
      config.ic.kind = IcKind::file;
    } else {
      throw ConfigError("ic.kind", "expected gaussian, sech2, or file");
    }
    config.ic.amplitude = detail::get_number(ic, "amplitude", "ic", config.ic.amplitude);
    config.ic.width = detail::get_number(ic, "width", "ic", config.ic.width);
    config.ic.center = detail::get_number(ic, "center", "ic", config.ic.center);
    config.ic.path = detail::get_string(ic, "path", "ic", config.ic.path);
  }

  if (doc.contains("psi_t0")) {
    const json& vel = doc.at("psi_t0");
    if (!vel.is_object()) throw ConfigError("psi_t0", "expected an object");
    detail::reject_unknown_keys(vel, {"kind", "path"}, "psi_t0");
    const std::string kind = detail::get_string(vel, "kind", "psi_t0", "zero");
    if (kind == "zero") {
      config.psi_t0.kind = VelocityKind::zero;
    } else if (kind == "file") {
      config.psi_t0.kind = VelocityKind::file;
    } else {
      throw ConfigError("psi_t0.kind", "expected zero or file");
    }
    config.psi_t0.path = detail::get_string(vel, "path", "psi_t0", config.psi_t0.path);
  }

  if (doc.contains("control")) {
    const json& control = doc.at("control");
    if (!control.is_object()) throw ConfigError("control", "expected an object");
    detail::reject_unknown_keys(control, {"dt", "t_max", "snapshot_stride", "blowup_threshold"},
                                "control");
    if (control.contains("dt")) {
      const json& dt = control.at("dt");
      if (dt.is_string()) {
        if (dt.get<std::string>() != "auto") {
          throw ConfigError("control.dt", "expected a number or \"auto\"");
        }
        config.control.dt.reset();
      } else if (dt.is_number()) {
        config.control.dt = dt.get<double>();
      } else {
        throw ConfigError("control.dt", "expected a number or \"auto\"");
      }
    }
    config.control.t_max = detail::get_number(control, "t_max", "control", config.control.t_max);
    config.control.snapshot_stride =
        detail::get_integer(control, "snapshot_stride", "control", config.control.snapshot_stride);
    config.control.blowup_threshold =
        detail::get_number(control, "blowup_threshold", "control", config.control.blowup_threshold);
  }

  if (doc.contains("dealias")) {
    if (!doc.at("dealias").is_boolean()) throw ConfigError("dealias", "expected a boolean");
    config.dealias = doc.at("dealias").get<bool>();
  }

  if (doc.contains("perturbation")) {
    const json& pert = doc.at("perturbation");
    if (!pert.is_object()) throw ConfigError("perturbation", "expected an object");
    detail::reject_unknown_keys(pert, {"eps", "k_p"}, "perturbation");
    PerturbationConfig p;
    p.eps = detail::get_number(pert, "eps", "perturbation", p.eps);
    p.k_p = detail::get_number(pert, "k_p", "perturbation", p.k_p);
    config.perturbation = p;
  }

  if (doc.contains("outputs")) {
    const json& outputs = doc.at("outputs");
    if (!outputs.is_object()) throw ConfigError("outputs", "expected an object");
    detail::reject_unknown_keys(outputs, {"diagnostics", "snapshots", "plots", "snapshot_times"},
                                "outputs");
    config.outputs.diagnostics =
        detail::get_string(outputs, "diagnostics", "outputs", config.outputs.diagnostics);
    config.outputs.snapshots = detail::get_string(outputs, "snapshots", "outputs", config.outputs.snapshots);
    config.outputs.plots = detail::get_string(outputs, "plots", "outputs", config.outputs.plots);
    if (outputs.contains("snapshot_times")) {
      const json& times = outputs.at("snapshot_times");
      if (!times.is_array()) throw ConfigError("outputs.snapshot_times", "expected an array of numbers");
      std::vector<double> values;
      for (const json& t : times) {
        if (!t.is_number()) throw ConfigError("outputs.snapshot_times", "expected an array of numbers");
        values.push_back(t.get<double>());
      }
      config.outputs.snapshot_times = std::move(values);
    }
  }

  validate_config(config);
  return config;
}

inline RunConfig parse_config(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("document", std::string("not valid JSON: ") + e.what());
  }
  return config_from_json(doc);
}

inline nlohmann::json config_to_json(const RunConfig& config) {
  nlohmann::json doc;
  doc["params"] = {{"alpha1", config.params.alpha1},
                   {"alpha2", config.params.alpha2},
                   {"alpha3", config.params.alpha3},
                   {"sigma", config.params.sigma}};
  doc["grid"] = {{"L", config.L}, {"N", config.N}};
  nlohmann::json ic = {{"amplitude", config.ic.amplitude},
                       {"width", config.ic.width},
                       {"center", config.ic.center}};
  switch (config.ic.kind) {
    case IcKind::gaussian: ic["kind"] = "gaussian"; break;
    case IcKind::sech2: ic["kind"] = "sech2"; break;
    case IcKind::file:
      ic["kind"] = "file";
      ic["path"] = config.ic.path;
      break;
  }
  doc["ic"] = ic;
  nlohmann::json vel;
  if (config.psi_t0.kind == VelocityKind::zero) {
    vel["kind"] = "zero";
  } else {
    vel["kind"] = "file";
    vel["path"] = config.psi_t0.path;
  }
  doc["psi_t0"] = vel;
  nlohmann::json control;
  if (config.control.dt) {
    control["dt"] = *config.control.dt;
  } else {
    control["dt"] = "auto";
  }
  control["t_max"] = config.control.t_max;
  control["snapshot_stride"] = config.control.snapshot_stride;
  control["blowup_threshold"] = config.control.blowup_threshold;
  doc["control"] = control;
  doc["dealias"] = config.dealias;
  if (config.perturbation) {
    doc["perturbation"] = {{"eps", config.perturbation->eps}, {"k_p", config.perturbation->k_p}};
  }
  nlohmann::json outputs = {{"diagnostics", config.outputs.diagnostics},
                            {"snapshots", config.outputs.snapshots},
                            {"plots", config.outputs.plots}};
  if (config.outputs.snapshot_times) outputs["snapshot_times"] = *config.outputs.snapshot_times;
  doc["outputs"] = outputs;
  return doc;
}

inline std::string serialize_config(const RunConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

// Named experiment presets.
inline RunConfig preset(std::string_view name) {
  RunConfig config;
  config.params = ModelParams{1.0, 1.0, 1.0, 2};
  config.control.dt = 5e-4;
  config.control.t_max = 2.0;
  if (name == "fig1") {
    return config;
  }
  if (name == "fig2") {
    config.params.alpha3 = -1.0;
    return config;
  }
  if (name == "fig5") {
    config.ic.kind = IcKind::sech2;
    config.perturbation = PerturbationConfig{1e-3, kp_preset_packet};
    return config;
  }
  if (name == "blowup") {
    config.params = ModelParams{-1.0, -1.0, -1.0, 2};
    return config;
  }
  throw ConfigError("preset", "unknown preset: " + std::string(name) +
                                  " (expected fig1, fig2, fig5, or blowup)");
}

}  // namespace specwave
