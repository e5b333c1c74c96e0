#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "specwave/analysis.hpp"
#include "specwave/config.hpp"
#include "specwave/errors.hpp"
#include "specwave/grid.hpp"
#include "specwave/integrator.hpp"
#include "specwave/model.hpp"

namespace specwave {

struct PerturbationStudy {
  double snapped_kp = 0.0;
  GammaSeries gamma;
  RunResult base;
  RunResult perturbed;
};

namespace detail {

inline std::vector<double> stride_times(const StepControl& control) {
  std::vector<double> times{0.0};
  if (control.t_max == 0.0) return times;
  const double block = control.dt * static_cast<double>(control.snapshot_stride);
  for (long i = 1; static_cast<double>(i) * block < control.t_max; ++i) {
    times.push_back(static_cast<double>(i) * block);
  }
  times.push_back(control.t_max);
  return times;
}

}  // namespace detail

// Evolve the base state and its cosine-perturbed copy under identical stepping
// and log gamma(t) at every diagnostics time shared by the two runs.
inline PerturbationStudy perturbation_study(const ModelParams& params, const GridSpec& grid,
                                            const FieldPair& base_ic, const PerturbationSpec& spec,
                                            const StepControl& control, bool dealias_on) {
  validate_control(control);
  const PerturbedField pert = perturbed_ic(grid, base_ic.psi, spec);
  FieldPair pert_ic{pert.samples, base_ic.psi_t};

  const std::vector<double> times = detail::stride_times(control);

  PerturbationStudy study;
  study.snapped_kp = pert.snapped_kp;
  study.base = simulate(params, grid, base_ic, control, dealias_on, times);
  study.perturbed = simulate(params, grid, pert_ic, control, dealias_on, times);

  const std::size_t shared = std::min(study.base.snapshots.size(), study.perturbed.snapshots.size());
  for (std::size_t j = 0; j < shared; ++j) {
    const Snapshot& a = study.base.snapshots[j];
    const Snapshot& b = study.perturbed.snapshots[j];
    study.gamma.rows.push_back({a.t, growth_rate(grid, b.psi, a.psi)});
  }
  return study;
}

struct ConvergenceReport {
  struct TemporalRow {
    double dt = 0.0;
    double error = 0.0;
  };
  struct SpatialRow {
    int num_points = 0;
    double tail = 0.0;
  };
  double temporal_order = 0.0;
  double reference_dt = 0.0;
  std::vector<TemporalRow> temporal;
  std::vector<SpatialRow> spatial;
};

namespace detail {

inline std::vector<double> final_field(const RunConfig& config, const GridSpec& grid, double dt,
                                       StepperKind stepper) {
  StepControl control = step_control_of(config, grid);
  control.dt = dt;
  const FieldPair ic = initial_state(config, grid);
  const RunResult result = simulate(config.params, grid, ic, control, config.dealias, {}, stepper);
  if (result.blowup) {
    throw StudyAbortedError("convergence study aborted: blow-up at dt = " + std::to_string(dt) +
                            ", N = " + std::to_string(grid.num_points));
  }
  return inverse(grid, result.final_state.psi_hat);
}

inline double fitted_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    mx += x[j];
    my += y[j];
  }
  mx /= n;
  my /= n;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    num += (x[j] - mx) * (y[j] - my);
    den += (x[j] - mx) * (x[j] - mx);
  }
  return num / den;
}

}  // namespace detail

// Temporal self-convergence against the finest step plus an optional spatial
// resolution sweep reporting the spectrum tail at each N.
inline ConvergenceReport convergence_study(const RunConfig& base, std::span<const double> dt_levels,
                                           std::span<const int> n_levels = {},
                                           StepperKind stepper = StepperKind::classical) {
  if (dt_levels.size() < 3) {
    throw ConfigError("dt_levels", "order fitting requires at least three dt levels");
  }
  for (double dt : dt_levels) {
    if (!std::isfinite(dt) || dt <= 0.0) throw ConfigError("dt_levels", "dt levels must be positive");
  }
  validate_config(base);
  if (base.control.t_max <= 0.0) {
    throw ConfigError("control.t_max", "convergence study needs t_max > 0");
  }

  std::vector<double> levels(dt_levels.begin(), dt_levels.end());
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.size() < 3) {
    throw ConfigError("dt_levels", "order fitting requires at least three distinct dt levels");
  }

  ConvergenceReport report;
  const GridSpec grid = grid_of(base);
  report.reference_dt = levels.back();
  const std::vector<double> reference = detail::final_field(base, grid, report.reference_dt, stepper);

  std::vector<double> log_dt;
  std::vector<double> log_err;
  for (std::size_t j = 0; j + 1 < levels.size(); ++j) {
    const std::vector<double> field = detail::final_field(base, grid, levels[j], stepper);
    double err = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) err = std::max(err, std::abs(field[i] - reference[i]));
    report.temporal.push_back({levels[j], err});
    log_dt.push_back(std::log(levels[j]));
    log_err.push_back(std::log(std::max(err, 1e-300)));
  }
  report.temporal_order = detail::fitted_slope(log_dt, log_err);

  for (int n : n_levels) {
    RunConfig config = base;
    config.N = n;
    const GridSpec fine = grid_of(config);
    StepControl control = step_control_of(config, fine);
    const FieldPair ic = initial_state(config, fine);
    const RunResult result = simulate(config.params, fine, ic, control, config.dealias);
    if (result.blowup) {
      throw StudyAbortedError("convergence study aborted: blow-up at N = " + std::to_string(n));
    }
    report.spatial.push_back({n, result.diagnostics.rows.back().spectrum_tail});
  }
  return report;
}

}  // namespace specwave
