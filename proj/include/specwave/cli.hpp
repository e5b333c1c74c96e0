#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "specwave/analysis.hpp"
#include "specwave/config.hpp"
#include "specwave/errors.hpp"
#include "specwave/grid.hpp"
#include "specwave/integrator.hpp"
#include "specwave/io.hpp"
#include "specwave/model.hpp"
#include "specwave/plot.hpp"
#include "specwave/studies.hpp"
#include "specwave/version.hpp"

namespace specwave {

// Process exit codes used by the command driver.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_blowup = 3;

namespace cli_detail {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string config_path;
  std::string preset_name;
  std::string out_dir = "out";
  std::optional<double> alpha1;
  std::optional<double> alpha2;
  std::optional<double> alpha3;
  std::optional<int> sigma;
  std::optional<double> L;
  std::optional<int> N;
  std::optional<double> dt;
  std::optional<double> t_max;
  bool no_dealias = false;
  std::optional<double> eps;
  std::optional<double> k_p;
};

inline void add_common_options(CLI::App* cmd, CommonOptions& opt) {
  CLI::Option* config = cmd->add_option("--config", opt.config_path, "config or manifest file to load");
  CLI::Option* preset_opt =
      cmd->add_option("--preset", opt.preset_name, "named preset: fig1, fig2, fig5, blowup");
  config->excludes(preset_opt);
  preset_opt->excludes(config);
  cmd->add_option("--out", opt.out_dir, "output directory (default: out)");
  cmd->add_option("--alpha1", opt.alpha1, "linear stiffness coefficient");
  cmd->add_option("--alpha2", opt.alpha2, "gradient nonlinearity coefficient");
  cmd->add_option("--alpha3", opt.alpha3, "power nonlinearity coefficient");
  cmd->add_option("--sigma", opt.sigma, "power nonlinearity exponent (integer >= 1)");
  cmd->add_option("--L", opt.L, "domain half length");
  cmd->add_option("--N", opt.N, "grid points (even, >= 8)");
  cmd->add_option("--dt", opt.dt, "time step (default: stability-based)");
  cmd->add_option("--tmax", opt.t_max, "final time");
  cmd->add_flag("--no-dealias", opt.no_dealias, "disable the 2/3 dealiasing mask");
  cmd->add_option("--eps", opt.eps, "perturbation amplitude");
  cmd->add_option("--kp", opt.k_p, "perturbation wavenumber (snapped to the grid)");
}

inline RunConfig resolve_config(const CommonOptions& opt) {
  RunConfig config;
  if (!opt.config_path.empty()) {
    try {
      if (is_manifest_file(opt.config_path)) {
        config = read_manifest(opt.config_path).config;
      } else {
        config = load_config_file(opt.config_path);
      }
    } catch (const IoError& e) {
      throw ConfigError("config", e.what());
    }
  } else if (!opt.preset_name.empty()) {
    config = preset(opt.preset_name);
  } else {
    config = preset("fig1");
  }
  if (opt.alpha1) config.params.alpha1 = *opt.alpha1;
  if (opt.alpha2) config.params.alpha2 = *opt.alpha2;
  if (opt.alpha3) config.params.alpha3 = *opt.alpha3;
  if (opt.sigma) config.params.sigma = *opt.sigma;
  if (opt.L) config.L = *opt.L;
  if (opt.N) config.N = *opt.N;
  if (opt.dt) config.control.dt = *opt.dt;
  if (opt.t_max) {
    // A new horizon invalidates snapshot times derived from the old one.
    if (config.outputs.snapshot_times) {
      std::vector<double> kept;
      for (double t : *config.outputs.snapshot_times) {
        if (t <= *opt.t_max) kept.push_back(t);
      }
      if (kept.empty()) {
        config.outputs.snapshot_times.reset();
      } else {
        config.outputs.snapshot_times = kept;
      }
    }
    config.control.t_max = *opt.t_max;
  }
  if (opt.no_dealias) config.dealias = false;
  if (opt.eps || opt.k_p) {
    PerturbationConfig pert = config.perturbation.value_or(PerturbationConfig{});
    if (opt.eps) pert.eps = *opt.eps;
    if (opt.k_p) pert.k_p = *opt.k_p;
    config.perturbation = pert;
  }
  validate_config(config);
  return config;
}

inline fs::path joined(const fs::path& out_dir, const std::string& leaf) { return out_dir / leaf; }

struct RunnerOutputs {
  fs::path diagnostics;
  fs::path snapshots;
  fs::path plots;  // empty disables plot rendering
};

inline RunnerOutputs output_paths(const RunConfig& config, const std::string& out_dir) {
  RunnerOutputs paths;
  paths.diagnostics = joined(out_dir, config.outputs.diagnostics);
  paths.snapshots = joined(out_dir, config.outputs.snapshots);
  if (!config.outputs.plots.empty()) paths.plots = joined(out_dir, config.outputs.plots);
  return paths;
}

inline std::vector<double> nonnegative_wavenumbers(const GridSpec& grid) {
  std::vector<double> k;
  const double unit = std::numbers::pi / grid.half_length;
  for (int j = 0; j <= grid.num_points / 2; ++j) k.push_back(unit * static_cast<double>(j));
  return k;
}

inline PlotSeries spectrum_series(const GridSpec& grid, std::span<const Complex> coeffs,
                                  const std::string& label) {
  PlotSeries series;
  series.label = label;
  series.x = nonnegative_wavenumbers(grid);
  for (int j = 0; j <= grid.num_points / 2; ++j) {
    series.y.push_back(std::abs(coeffs[static_cast<std::size_t>(j)]));
  }
  return series;
}

inline void render_run_plots(const GridSpec& grid, const RunResult& result,
                             const fs::path& plots_dir) {
  if (plots_dir.empty()) return;
  const std::vector<double> nodes = grid.nodes();

  if (!result.snapshots.empty()) {
    PlotData lines;
    lines.title = "field profiles";
    lines.x_label = "x";
    lines.y_label = "psi";
    const std::size_t count = result.snapshots.size();
    const std::size_t stride = count <= 8 ? 1 : (count + 7) / 8;
    for (std::size_t s = 0; s < count; s += stride) {
      const Snapshot& snap = result.snapshots[s];
      lines.series.push_back({"t=" + format_snapshot_time(snap.t), nodes, snap.psi});
    }
    if (lines.series.back().label != "t=" + format_snapshot_time(result.snapshots.back().t)) {
      const Snapshot& snap = result.snapshots.back();
      lines.series.push_back({"t=" + format_snapshot_time(snap.t), nodes, snap.psi});
    }
    render_plot(PlotKind::lines, lines, plots_dir / "lines.svg");

    if (result.snapshots.size() >= 2) {
      PlotData heat;
      heat.title = "field evolution";
      heat.x_label = "x";
      heat.y_label = "t";
      heat.x = nodes;
      for (const Snapshot& snap : result.snapshots) {
        heat.times.push_back(snap.t);
        heat.field.push_back(snap.psi);
      }
      render_plot(PlotKind::heatmap, heat, plots_dir / "heatmap.svg");
    }
  }

  PlotData spec;
  spec.title = "spectrum magnitude";
  spec.x_label = "k";
  spec.y_label = "abs coefficient";
  const double t_final = result.final_state.t;
  if (detail::all_finite(result.final_state.psi_hat)) {
    spec.series.push_back(
        spectrum_series(grid, result.final_state.psi_hat, "t=" + format_snapshot_time(t_final)));
    render_plot(PlotKind::spectrum, spec, plots_dir / "spectrum.svg");
  }
}

// Shared driver for the state-evolving commands.
struct CompletedRun {
  RunConfig config;
  GridSpec grid;
  RunResult result;
  RunManifest manifest;
};

inline CompletedRun execute_run(const RunConfig& config, const std::string& out_dir,
                                bool write_snapshot_csv) {
  CompletedRun run{config, grid_of(config), {}, {}};
  const StepControl control = step_control_of(config, run.grid);
  const FieldPair ic = initial_state(config, run.grid);
  const std::vector<double> times = snapshot_times_of(config);
  run.result = simulate(config.params, run.grid, ic, control, config.dealias, times);

  const RunnerOutputs paths = output_paths(config, out_dir);
  write_diagnostics(run.result.diagnostics, paths.diagnostics);
  if (write_snapshot_csv && !run.result.snapshots.empty()) {
    write_snapshots(run.result.snapshots, run.grid, paths.snapshots);
  }
  run.manifest = make_manifest(config, run.grid);
  run.manifest.blowup = run.result.blowup;
  return run;
}

inline int finish_run(const CompletedRun& run, const std::string& out_dir) {
  write_manifest(run.manifest, joined(out_dir, "manifest.json"));
  render_run_plots(run.grid, run.result, output_paths(run.config, out_dir).plots);
  if (run.result.blowup) {
    std::cerr << "blow-up detected at t = " << format_double(run.result.blowup->t_blow) << " ("
              << (run.result.blowup->trigger == BlowupTrigger::overflow ? "overflow" : "non-finite")
              << ")\n";
    return exit_blowup;
  }
  return exit_ok;
}

inline int run_simulate(const CommonOptions& opt) {
  const RunConfig config = resolve_config(opt);
  const CompletedRun run = execute_run(config, opt.out_dir, true);
  const int code = finish_run(run, opt.out_dir);
  std::cout << "simulate: " << run.result.diagnostics.rows.size() << " diagnostics rows, final t = "
            << format_double(run.result.final_state.t) << "\n";
  return code;
}

inline int run_perturb(const CommonOptions& opt) {
  RunConfig config = resolve_config(opt);
  if (!config.perturbation) config.perturbation = PerturbationConfig{};
  const GridSpec grid = grid_of(config);
  const StepControl control = step_control_of(config, grid);
  const FieldPair ic = initial_state(config, grid);
  const PerturbationSpec spec{config.perturbation->eps, config.perturbation->k_p};

  const PerturbationStudy study = perturbation_study(config.params, grid, ic, spec, control,
                                                     config.dealias);

  const RunnerOutputs paths = output_paths(config, opt.out_dir);
  write_diagnostics(study.base.diagnostics, paths.diagnostics);
  fs::path perturbed_path = paths.diagnostics;
  perturbed_path.replace_filename(perturbed_path.stem().string() + "_perturbed" +
                                  perturbed_path.extension().string());
  write_diagnostics(study.perturbed.diagnostics, perturbed_path);
  const fs::path gamma_path = paths.diagnostics.parent_path() / "gamma.csv";
  write_gamma_series(study.gamma, gamma_path);

  RunManifest manifest = make_manifest(config, grid);
  manifest.snapped_kp = study.snapped_kp;
  manifest.blowup = study.base.blowup ? study.base.blowup : study.perturbed.blowup;
  write_manifest(manifest, joined(opt.out_dir, "manifest.json"));

  if (!paths.plots.empty()) {
    PlotData gamma;
    gamma.title = "perturbation growth";
    gamma.x_label = "t";
    gamma.y_label = "gamma = log10 relative separation";
    PlotSeries series;
    series.label = "gamma";
    for (const GammaPoint& row : study.gamma.rows) {
      series.x.push_back(row.t);
      series.y.push_back(row.gamma);
    }
    gamma.series.push_back(series);
    render_plot(PlotKind::gamma, gamma, paths.plots / "gamma.svg");

    if (detail::all_finite(study.base.final_state.psi_hat) &&
        detail::all_finite(study.perturbed.final_state.psi_hat)) {
      PlotData spec_plot;
      spec_plot.title = "spectrum magnitude, base vs perturbed";
      spec_plot.x_label = "k";
      spec_plot.y_label = "abs coefficient";
      spec_plot.series.push_back(spectrum_series(grid, study.base.final_state.psi_hat, "base"));
      spec_plot.series.push_back(spectrum_series(grid, study.perturbed.final_state.psi_hat, "perturbed"));
      render_plot(PlotKind::spectrum, spec_plot, paths.plots / "spectrum_compare.svg");
    }
  }

  double gamma_peak = -std::numeric_limits<double>::infinity();
  for (const GammaPoint& row : study.gamma.rows) gamma_peak = std::max(gamma_peak, row.gamma);
  std::cout << "perturb: snapped k_p = " << format_double(study.snapped_kp)
            << ", max gamma = " << format_double(gamma_peak) << "\n";
  if (manifest.blowup) {
    std::cerr << "blow-up detected at t = " << format_double(manifest.blowup->t_blow) << "\n";
    return exit_blowup;
  }
  return exit_ok;
}

inline int run_spectrum(const CommonOptions& opt) {
  const RunConfig config = resolve_config(opt);
  const CompletedRun run = execute_run(config, opt.out_dir, false);

  const GridSpec& grid = run.grid;
  std::ofstream out = detail::open_for_write(joined(opt.out_dir, "spectrum.csv"));
  out << "k,abs_psi_hat\n";
  if (detail::all_finite(run.result.final_state.psi_hat)) {
    const double unit = std::numbers::pi / grid.half_length;
    for (int j = 0; j <= grid.num_points / 2; ++j) {
      out << format_double(unit * static_cast<double>(j)) << ','
          << format_double(std::abs(run.result.final_state.psi_hat[static_cast<std::size_t>(j)])) << '\n';
    }
  }
  if (!out) throw IoError("write failed: spectrum.csv");
  out.close();

  const int code = finish_run(run, opt.out_dir);
  std::cout << "spectrum: final t = " << format_double(run.result.final_state.t) << "\n";
  return code;
}

struct RangeOptions {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::quiet_NaN();
  int steps = 0;
};

inline int run_dispersion(const CommonOptions& opt, const RangeOptions& range) {
  const RunConfig config = resolve_config(opt);
  const ModelParams& params = config.params;
  double hi = range.hi;
  if (!std::isfinite(hi)) {
    const std::optional<double> edge = detail::real_band_edge(params);
    hi = edge ? 0.98 * *edge : 2.0;
  }
  if (range.steps < 2) throw ConfigError("ksteps", "need at least two samples");
  if (!(hi > range.lo)) throw ConfigError("kmax", "kmax must exceed kmin");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::ofstream out = detail::open_for_write(joined(opt.out_dir, "dispersion.csv"));
  out << "k,omega_squared,omega,v_group,v_phase,kdv_omega\n";
  PlotData plot;
  plot.title = "linear dispersion";
  plot.x_label = "k";
  plot.y_label = "value";
  PlotSeries omega_series{"omega", {}, {}};
  PlotSeries vg_series{"v_group", {}, {}};
  PlotSeries vp_series{"v_phase", {}, {}};
  PlotSeries kdv_series{"kdv_omega", {}, {}};
  for (int i = 0; i < range.steps; ++i) {
    const double k =
        range.lo + (hi - range.lo) * static_cast<double>(i) / static_cast<double>(range.steps - 1);
    const double w2 = omega_squared(params, k);
    const double omega = w2 > 0.0 ? std::sqrt(w2) : nan;
    double vg = nan;
    double vp = nan;
    if (w2 > 0.0) {
      vg = group_velocity(params, k);
      if (k != 0.0) vp = phase_velocity(params, k);
    }
    const double kdv = kdv_omega(params.alpha1, params.alpha2, k);
    out << format_double(k) << ',' << format_double(w2) << ',' << format_double(omega) << ','
        << format_double(vg) << ',' << format_double(vp) << ',' << format_double(kdv) << '\n';
    omega_series.x.push_back(k);
    omega_series.y.push_back(omega);
    vg_series.x.push_back(k);
    vg_series.y.push_back(vg);
    vp_series.x.push_back(k);
    vp_series.y.push_back(vp);
    kdv_series.x.push_back(k);
    kdv_series.y.push_back(kdv);
  }
  if (!out) throw IoError("write failed: dispersion.csv");
  out.close();

  if (!config.outputs.plots.empty()) {
    plot.series = {omega_series, vg_series, vp_series, kdv_series};
    render_plot(PlotKind::dispersion, plot, joined(opt.out_dir, config.outputs.plots) / "dispersion.svg");
  }
  std::cout << "dispersion: " << range.steps << " samples in [" << format_double(range.lo) << ", "
            << format_double(hi) << "]\n";
  return exit_ok;
}

inline int run_twave(const CommonOptions& opt, const RangeOptions& range) {
  const RunConfig config = resolve_config(opt);
  if (range.steps < 1) throw ConfigError("csteps", "need at least one sample");
  if (range.steps > 1 && !(range.hi > range.lo)) throw ConfigError("cmax", "cmax must exceed cmin");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::ofstream out = detail::open_for_write(joined(opt.out_dir, "twave.csv"));
  out << "c,slope_neg,slope_zero,slope_pos,family\n";
  for (int i = 0; i < range.steps; ++i) {
    const double c = range.steps == 1
                         ? range.lo
                         : range.lo + (range.hi - range.lo) * static_cast<double>(i) /
                               static_cast<double>(range.steps - 1);
    const TravelingWaveSlopes slopes = traveling_wave_slopes(config.params, c);
    double neg = nan;
    double pos = nan;
    if (slopes.slopes.size() == 3) {
      neg = slopes.slopes.front();
      pos = slopes.slopes.back();
    }
    const char* family = slopes.degenerate_dispersion ? "degenerate"
                         : slopes.extended_space      ? "linear_ramp"
                         : slopes.triple_root         ? "triple_root"
                                                      : "constant_only";
    out << format_double(c) << ',' << format_double(neg) << ',' << format_double(0.0) << ','
        << format_double(pos) << ',' << family << '\n';
  }
  if (!out) throw IoError("write failed: twave.csv");
  std::cout << "twave: " << range.steps << " speeds tabulated\n";
  return exit_ok;
}

inline int run_converge(const CommonOptions& opt, std::vector<double> dt_levels,
                        std::vector<int> n_levels) {
  const RunConfig config = resolve_config(opt);
  if (dt_levels.empty()) dt_levels = {4e-3, 2e-3, 1e-3, 2.5e-4};
  const ConvergenceReport report = convergence_study(config, dt_levels, n_levels);

  nlohmann::json doc;
  doc["temporal_order"] = report.temporal_order;
  doc["reference_dt"] = report.reference_dt;
  nlohmann::json temporal = nlohmann::json::array();
  for (const ConvergenceReport::TemporalRow& row : report.temporal) {
    temporal.push_back({{"dt", row.dt}, {"error", row.error}});
  }
  doc["temporal"] = temporal;
  nlohmann::json spatial = nlohmann::json::array();
  for (const ConvergenceReport::SpatialRow& row : report.spatial) {
    spatial.push_back({{"N", row.num_points}, {"spectrum_tail", row.tail}});
  }
  doc["spatial"] = spatial;
  std::ofstream out = detail::open_for_write(joined(opt.out_dir, "converge.json"));
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: converge.json");

  std::cout << "converge: fitted temporal order " << format_double(report.temporal_order) << "\n";
  for (const ConvergenceReport::TemporalRow& row : report.temporal) {
    std::cout << "  dt = " << format_double(row.dt) << "  error = " << format_double(row.error) << "\n";
  }
  for (const ConvergenceReport::SpatialRow& row : report.spatial) {
    std::cout << "  N = " << row.num_points << "  spectrum_tail = " << format_double(row.tail) << "\n";
  }
  return exit_ok;
}

}  // namespace cli_detail

// Parse and execute one command line (without the program name). Returns the
// process exit code: 0 success, 2 configuration errors, 3 blow-up detected.
inline int run_command(std::vector<std::string> args) {
  CLI::App app{"pseudospectral laboratory for psi_tt = (a1 + 3 a2 psi_x^2) psi_xx - a3 psi^sigma"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1);

  cli_detail::CommonOptions simulate_opt;
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "evolve an initial condition and log diagnostics");
  cli_detail::add_common_options(simulate_cmd, simulate_opt);

  cli_detail::CommonOptions perturb_opt;
  CLI::App* perturb_cmd =
      app.add_subcommand("perturb", "evolve base and perturbed states, logging the separation");
  cli_detail::add_common_options(perturb_cmd, perturb_opt);

  cli_detail::CommonOptions dispersion_opt;
  cli_detail::RangeOptions dispersion_range{0.0, std::numeric_limits<double>::quiet_NaN(), 121};
  CLI::App* dispersion_cmd = app.add_subcommand("dispersion", "tabulate the linear dispersion relations");
  cli_detail::add_common_options(dispersion_cmd, dispersion_opt);
  dispersion_cmd->add_option("--kmin", dispersion_range.lo, "smallest wavenumber (default 0)");
  dispersion_cmd->add_option("--kmax", dispersion_range.hi, "largest wavenumber (default: band edge)");
  dispersion_cmd->add_option("--ksteps", dispersion_range.steps, "sample count (default 121)");

  cli_detail::CommonOptions twave_opt;
  cli_detail::RangeOptions twave_range{2.0, 2.0, 1};
  CLI::App* twave_cmd = app.add_subcommand("twave", "tabulate piecewise-linear traveling-wave slopes");
  cli_detail::add_common_options(twave_cmd, twave_opt);
  twave_cmd->add_option("--cmin", twave_range.lo, "smallest speed (default 2)");
  twave_cmd->add_option("--cmax", twave_range.hi, "largest speed (default 2)");
  twave_cmd->add_option("--csteps", twave_range.steps, "sample count (default 1)");

  cli_detail::CommonOptions spectrum_opt;
  CLI::App* spectrum_cmd = app.add_subcommand("spectrum", "evolve and tabulate the final spectrum");
  cli_detail::add_common_options(spectrum_cmd, spectrum_opt);

  cli_detail::CommonOptions converge_opt;
  std::vector<double> converge_dt_levels;
  std::vector<int> converge_n_levels;
  CLI::App* converge_cmd = app.add_subcommand("converge", "temporal and spatial convergence study");
  cli_detail::add_common_options(converge_cmd, converge_opt);
  converge_cmd->add_option("--dt-levels", converge_dt_levels,
                           "explicit dt levels, coarsest to finest (default 4e-3 2e-3 1e-3 2.5e-4)");
  converge_cmd->add_option("--n-levels", converge_n_levels, "grid sizes for the spatial tail sweep");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config_error;
  }

  try {
    if (app.got_subcommand(simulate_cmd)) return cli_detail::run_simulate(simulate_opt);
    if (app.got_subcommand(perturb_cmd)) return cli_detail::run_perturb(perturb_opt);
    if (app.got_subcommand(dispersion_cmd)) return cli_detail::run_dispersion(dispersion_opt, dispersion_range);
    if (app.got_subcommand(twave_cmd)) return cli_detail::run_twave(twave_opt, twave_range);
    if (app.got_subcommand(spectrum_cmd)) return cli_detail::run_spectrum(spectrum_opt);
    if (app.got_subcommand(converge_cmd)) {
      return cli_detail::run_converge(converge_opt, converge_dt_levels, converge_n_levels);
    }
    std::cerr << "error: no subcommand selected\n";
    return exit_config_error;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const StudyAbortedError& e) {
    std::cerr << "study aborted: " << e.what() << "\n";
    return exit_blowup;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace specwave
