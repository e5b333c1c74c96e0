#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "specwave/analysis.hpp"
#include "specwave/errors.hpp"
#include "specwave/grid.hpp"
#include "specwave/model.hpp"

namespace specwave {

// Evolution state in spectral space: coefficients of psi and of psi_t.
struct EvolutionState {
  double t = 0.0;
  std::vector<Complex> psi_hat;
  std::vector<Complex> v_hat;
};

struct StepControl {
  double dt = 0.0;
  double t_max = 0.0;
  int snapshot_stride = 10;
  double blowup_threshold = 1e6;
};

inline void validate_control(const StepControl& control) {
  if (!std::isfinite(control.t_max) || control.t_max < 0.0) {
    throw ConfigError("t_max", "t_max must be a finite number >= 0");
  }
  if (control.t_max > 0.0) {
    if (!std::isfinite(control.dt) || control.dt <= 0.0) {
      throw ConfigError("dt", "dt must be positive and finite");
    }
    if (control.dt > control.t_max) throw ConfigError("dt", "dt must not exceed t_max");
  }
  if (control.snapshot_stride < 1) {
    throw ConfigError("snapshot_stride", "snapshot_stride must be a positive integer");
  }
  if (!std::isfinite(control.blowup_threshold) || control.blowup_threshold <= 0.0) {
    throw ConfigError("blowup_threshold", "blowup_threshold must be positive and finite");
  }
}

enum class BlowupTrigger { overflow, non_finite };

struct BlowupRecord {
  double t_blow = 0.0;
  BlowupTrigger trigger = BlowupTrigger::overflow;
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> psi;
};

struct RunResult {
  DiagnosticsSeries diagnostics;
  std::vector<Snapshot> snapshots;
  EvolutionState final_state;
  std::optional<BlowupRecord> blowup;
};

// Time derivative of (psi_hat, v_hat): psi_hat' = v_hat, v_hat' = transform of
// the acceleration evaluated in physical space.
struct StateDerivative {
  std::vector<Complex> d_psi_hat;
  std::vector<Complex> d_v_hat;
};

inline StateDerivative rhs(const ModelParams& params, const GridSpec& grid,
                           const EvolutionState& state, bool dealias_on) {
  StateDerivative d;
  d.d_psi_hat = state.v_hat;
  const std::vector<double> psi = inverse(grid, state.psi_hat);
  d.d_v_hat = forward(grid, acceleration(params, grid, psi, dealias_on));
  return d;
}

// Stage arithmetic for the Runge-Kutta steppers.
namespace detail {

inline std::vector<Complex> shifted(std::span<const Complex> base, double scale,
                                    std::span<const Complex> delta) {
  std::vector<Complex> out(base.begin(), base.end());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += scale * delta[j];
  return out;
}

}  // namespace detail

enum class StepperKind {
  classical,           // standard fourth-order weights throughout
  halved_final_stage,  // variant whose fourth stage reuses the half-step
                       // increment; low-order, kept for study
};

// One Runge-Kutta step of size dt from state. Non-finite stage values raise
// NumericalStateError for the caller to fold into a blow-up record.
inline EvolutionState rk4_step(const ModelParams& params, const GridSpec& grid,
                               const EvolutionState& state, double dt, bool dealias_on,
                               StepperKind kind = StepperKind::classical) {
  if (!std::isfinite(dt) || dt <= 0.0) throw ConfigError("dt", "dt must be positive and finite");

  const EvolutionState& y = state;
  const StateDerivative s1 = rhs(params, grid, y, dealias_on);

  EvolutionState y2{y.t, detail::shifted(y.psi_hat, 0.5 * dt, s1.d_psi_hat),
                    detail::shifted(y.v_hat, 0.5 * dt, s1.d_v_hat)};
  const StateDerivative s2 = rhs(params, grid, y2, dealias_on);

  EvolutionState y3{y.t, detail::shifted(y.psi_hat, 0.5 * dt, s2.d_psi_hat),
                    detail::shifted(y.v_hat, 0.5 * dt, s2.d_v_hat)};
  const StateDerivative s3 = rhs(params, grid, y3, dealias_on);

  const double last_scale = kind == StepperKind::classical ? dt : 0.5 * dt;
  EvolutionState y4{y.t, detail::shifted(y.psi_hat, last_scale, s3.d_psi_hat),
                    detail::shifted(y.v_hat, last_scale, s3.d_v_hat)};
  const StateDerivative s4 = rhs(params, grid, y4, dealias_on);

  const std::size_t n = y.psi_hat.size();
  EvolutionState out;
  out.t = y.t + dt;
  out.psi_hat.resize(n);
  out.v_hat.resize(n);
  const double w = dt / 6.0;
  for (std::size_t j = 0; j < n; ++j) {
    out.psi_hat[j] = y.psi_hat[j] + w * (s1.d_psi_hat[j] + 2.0 * s2.d_psi_hat[j] +
                                         2.0 * s3.d_psi_hat[j] + s4.d_psi_hat[j]);
    out.v_hat[j] = y.v_hat[j] + w * (s1.d_v_hat[j] + 2.0 * s2.d_v_hat[j] +
                                     2.0 * s3.d_v_hat[j] + s4.d_v_hat[j]);
  }
  return out;
}

namespace detail {

inline bool all_finite(std::span<const Complex> values) {
  for (const Complex& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

}  // namespace detail

// Inspect a state for breakdown. Non-finite data wins over the overflow test so
// that a state poisoned by NaN is never misreported as a plain overflow.
inline std::optional<BlowupTrigger> detect_blowup(const GridSpec& grid, const EvolutionState& state,
                                                  double threshold) {
  if (!detail::all_finite(state.psi_hat) || !detail::all_finite(state.v_hat)) {
    return BlowupTrigger::non_finite;
  }
  const std::vector<double> psi = inverse(grid, state.psi_hat);
  double peak = 0.0;
  for (double v : psi) peak = std::max(peak, std::abs(v));
  if (peak > threshold) return BlowupTrigger::overflow;
  return std::nullopt;
}

// Full diagnostics record for a state. A non-finite state yields a row of NaN
// measures, the permitted terminal form of a blown-up series.
inline DiagnosticsRow compute_diagnostics_row(const ModelParams& params, const GridSpec& grid,
                                              const EvolutionState& state) {
  DiagnosticsRow row;
  row.t = state.t;
  if (!detail::all_finite(state.psi_hat) || !detail::all_finite(state.v_hat)) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.mass = row.momentum = row.energy = row.energy_eq4 = nan;
    row.max_abs = row.l2_norm = row.spectrum_tail = nan;
    return row;
  }
  const std::vector<double> psi = inverse(grid, state.psi_hat);
  const std::vector<double> psi_t = inverse(grid, state.v_hat);
  const std::vector<double> psi_x = inverse(grid, spectral_derivative(grid, state.psi_hat, 1));
  row.mass = mass(grid, psi);
  row.momentum = momentum(grid, psi_t);
  row.energy = detail::energy_from_parts(params, grid, psi, psi_x, psi_t);
  row.energy_eq4 = detail::energy_eq4_from_parts(params, grid, psi, psi_x, psi_t);
  for (double v : psi) row.max_abs = std::max(row.max_abs, std::abs(v));
  row.l2_norm = l2_norm(grid, psi);
  double peak = 0.0;
  for (const Complex& c : state.psi_hat) peak = std::max(peak, std::abs(c));
  row.spectrum_tail = peak == 0.0 ? 0.0 : spectrum_tail_from_coefficients(grid, state.psi_hat);
  return row;
}

// March the state from t = 0 to t_max with fixed steps, landing exactly on each
// requested snapshot time and on t_max by shortening the final step of each
// segment. Diagnostics are recorded at t = 0, every snapshot_stride steps, and
// at the final time; blow-up checks run after every step.
inline RunResult simulate(const ModelParams& params, const GridSpec& grid, const FieldPair& ic,
                          const StepControl& control, bool dealias_on,
                          std::span<const double> snapshot_times = {},
                          StepperKind stepper = StepperKind::classical) {
  validate_params(params);
  validate_control(control);
  const std::size_t n = static_cast<std::size_t>(grid.num_points);
  if (ic.psi.size() != n || ic.psi_t.size() != n) {
    throw ContractViolationError("simulate: initial fields must match the grid size");
  }
  std::set<double> requested;
  for (double t : snapshot_times) {
    if (!std::isfinite(t) || t < 0.0 || t > control.t_max) {
      throw ConfigError("snapshot_times", "snapshot times must lie in [0, t_max]");
    }
    requested.insert(t);
  }

  RunResult result;
  EvolutionState state{0.0, forward(grid, ic.psi), forward(grid, ic.psi_t)};

  result.diagnostics.rows.push_back(compute_diagnostics_row(params, grid, state));
  if (requested.contains(0.0)) result.snapshots.push_back({0.0, ic.psi});

  if (control.t_max == 0.0) {
    result.final_state = std::move(state);
    return result;
  }

  std::vector<double> boundaries(requested.begin(), requested.end());
  std::erase_if(boundaries, [&](double t) { return t <= 0.0 || t >= control.t_max; });
  boundaries.push_back(control.t_max);

  long step_count = 0;
  double segment_start = 0.0;
  for (double boundary : boundaries) {
    const double span = boundary - segment_start;
    const long steps = std::max<long>(1, static_cast<long>(std::ceil(span / control.dt - 1e-9)));
    for (long s = 1; s <= steps; ++s) {
      const double target = s == steps ? boundary : segment_start + static_cast<double>(s) * control.dt;
      const double dt_step = target - state.t;
      try {
        state = rk4_step(params, grid, state, dt_step, dealias_on, stepper);
      } catch (const NumericalStateError&) {
        // The stage itself degenerated; the last finite state marks the end.
        if (result.diagnostics.rows.back().t != state.t) {
          result.diagnostics.rows.push_back(compute_diagnostics_row(params, grid, state));
        }
        result.blowup = BlowupRecord{state.t, BlowupTrigger::non_finite};
        result.final_state = std::move(state);
        return result;
      }
      state.t = target;
      ++step_count;

      const std::optional<BlowupTrigger> trigger = detect_blowup(grid, state, control.blowup_threshold);
      if (trigger) {
        result.diagnostics.rows.push_back(compute_diagnostics_row(params, grid, state));
        result.blowup = BlowupRecord{state.t, *trigger};
        result.final_state = std::move(state);
        return result;
      }

      const bool at_end = state.t == control.t_max;
      if (step_count % control.snapshot_stride == 0 || at_end) {
        result.diagnostics.rows.push_back(compute_diagnostics_row(params, grid, state));
      }
      if (s == steps && requested.contains(boundary)) {
        result.snapshots.push_back({state.t, inverse(grid, state.psi_hat)});
      }
    }
    segment_start = boundary;
  }

  result.final_state = std::move(state);
  return result;
}

}  // namespace specwave
