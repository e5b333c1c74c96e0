#include "specwave/integrator.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "specwave/analysis.hpp"
#include "specwave/errors.hpp"
#include "specwave/grid.hpp"
#include "specwave/model.hpp"

using specwave::Complex;
using specwave::EvolutionState;
using specwave::FieldPair;
using specwave::GridSpec;
using specwave::ModelParams;
using specwave::StepControl;

namespace {

constexpr double pi = std::numbers::pi;

FieldPair gaussian_ic(const GridSpec& grid) {
  FieldPair ic;
  ic.psi.resize(static_cast<std::size_t>(grid.num_points));
  ic.psi_t.assign(static_cast<std::size_t>(grid.num_points), 0.0);
  for (int j = 0; j < grid.num_points; ++j) {
    const double x = grid.node(j);
    ic.psi[static_cast<std::size_t>(j)] = std::exp(-x * x);
  }
  return ic;
}

FieldPair cosine_ic(const GridSpec& grid) {
  FieldPair ic;
  ic.psi.resize(static_cast<std::size_t>(grid.num_points));
  ic.psi_t.assign(static_cast<std::size_t>(grid.num_points), 0.0);
  for (int j = 0; j < grid.num_points; ++j) {
    ic.psi[static_cast<std::size_t>(j)] = std::cos(grid.node(j));
  }
  return ic;
}

double max_error_vs_exact(const GridSpec& grid, const std::vector<double>& psi, double t) {
  double worst = 0.0;
  for (int j = 0; j < grid.num_points; ++j) {
    worst = std::max(worst,
                     std::abs(psi[static_cast<std::size_t>(j)] - std::cos(t) * std::cos(grid.node(j))));
  }
  return worst;
}

}  // namespace

TEST_CASE("rhs maps the zero state to the zero derivative", "[integrator]") {
  const GridSpec grid = specwave::make_grid(30.0, 64);
  EvolutionState state;
  state.psi_hat.assign(64, Complex(0.0, 0.0));
  state.v_hat.assign(64, Complex(0.0, 0.0));
  const specwave::StateDerivative d = specwave::rhs(ModelParams{1.0, 1.0, 1.0, 2}, grid, state, true);
  for (const Complex& v : d.d_psi_hat) REQUIRE(std::abs(v) == 0.0);
  for (const Complex& v : d.d_v_hat) REQUIRE(std::abs(v) < 1e-12);
}

TEST_CASE("rhs reduces to the wave equation without nonlinear terms", "[integrator]") {
  const GridSpec grid = specwave::make_grid(pi, 16);
  const FieldPair ic = cosine_ic(grid);
  EvolutionState state{0.0, specwave::forward(grid, ic.psi), specwave::forward(grid, ic.psi_t)};
  const specwave::StateDerivative d = specwave::rhs(ModelParams{1.0, 0.0, 0.0, 2}, grid, state, true);
  // psi_hat' must equal v_hat and v_hat' must equal -psi_hat for cos x.
  for (std::size_t j = 0; j < 16; ++j) {
    CAPTURE(j);
    REQUIRE(std::abs(d.d_psi_hat[j] - state.v_hat[j]) == 0.0);
    REQUIRE(std::abs(d.d_v_hat[j] + state.psi_hat[j]) < 1e-12);
  }
}

TEST_CASE("time stepping converges at fourth order on the linear problem", "[integrator]") {
  const GridSpec grid = specwave::make_grid(pi, 16);
  const ModelParams params{1.0, 0.0, 0.0, 2};
  const FieldPair ic = cosine_ic(grid);
  const double t_max = 0.4;

  const auto run_error = [&](double dt) {
    const StepControl control{dt, t_max, 1000, 1e6};
    const specwave::RunResult out = specwave::simulate(params, grid, ic, control, true);
    return max_error_vs_exact(grid, specwave::inverse(grid, out.final_state.psi_hat), t_max);
  };

  const double coarse = run_error(0.04);
  const double fine = run_error(0.02);
  REQUIRE(coarse < 1e-6);
  REQUIRE(coarse / fine > 13.0);
  REQUIRE(coarse / fine < 20.0);
}

TEST_CASE("the listed stepper variant differs from the classical one", "[integrator]") {
  const GridSpec grid = specwave::make_grid(30.0, 64);
  const ModelParams params{1.0, 1.0, 1.0, 2};
  const FieldPair ic = gaussian_ic(grid);
  EvolutionState state{0.0, specwave::forward(grid, ic.psi), specwave::forward(grid, ic.psi_t)};
  const EvolutionState classical =
      specwave::rk4_step(params, grid, state, 1e-2, true, specwave::StepperKind::classical);
  const EvolutionState listed =
      specwave::rk4_step(params, grid, state, 1e-2, true, specwave::StepperKind::halved_final_stage);
  double diff = 0.0;
  for (std::size_t j = 0; j < classical.psi_hat.size(); ++j) {
    diff = std::max(diff, std::abs(classical.psi_hat[j] - listed.psi_hat[j]));
    diff = std::max(diff, std::abs(classical.v_hat[j] - listed.v_hat[j]));
  }
  REQUIRE(diff > 1e-12);
  REQUIRE(classical.t == listed.t);
}

TEST_CASE("rk4_step rejects non-positive steps", "[integrator]") {
  const GridSpec grid = specwave::make_grid(30.0, 64);
  EvolutionState state;
  state.psi_hat.assign(64, Complex(0.0, 0.0));
  state.v_hat.assign(64, Complex(0.0, 0.0));
  REQUIRE_THROWS_AS(specwave::rk4_step(ModelParams{}, grid, state, 0.0, true), specwave::ConfigError);
  REQUIRE_THROWS_AS(specwave::rk4_step(ModelParams{}, grid, state, -1e-3, true), specwave::ConfigError);
}

TEST_CASE("control validation pins each field", "[integrator]") {
  REQUIRE_NOTHROW(specwave::validate_control(StepControl{1e-3, 1.0, 10, 1e6}));
  REQUIRE_NOTHROW(specwave::validate_control(StepControl{0.0, 0.0, 10, 1e6}));
  REQUIRE_THROWS_AS(specwave::validate_control(StepControl{0.0, 1.0, 10, 1e6}), specwave::ConfigError);
  REQUIRE_THROWS_AS(specwave::validate_control(StepControl{-1e-3, 1.0, 10, 1e6}), specwave::ConfigError);
  REQUIRE_THROWS_AS(specwave::validate_control(StepControl{2.0, 1.0, 10, 1e6}), specwave::ConfigError);
  REQUIRE_THROWS_AS(specwave::validate_control(StepControl{1e-3, -1.0, 10, 1e6}), specwave::ConfigError);
  REQUIRE_THROWS_AS(specwave::validate_control(StepControl{1e-3, 1.0, 0, 1e6}), specwave::ConfigError);
  REQUIRE_THROWS_AS(specwave::validate_control(StepControl{1e-3, 1.0, 10, 0.0}), specwave::ConfigError);
}

TEST_CASE("simulate with t_max zero reports the initial state only", "[integrator]") {
  const GridSpec grid = specwave::make_grid(30.0, 64);
  const FieldPair ic = gaussian_ic(grid);
  const StepControl control{0.0, 0.0, 10, 1e6};
  const std::vector<double> times{0.0};
  const specwave::RunResult out =
      specwave::simulate(ModelParams{1.0, 1.0, 1.0, 2}, grid, ic, control, true, times);
  REQUIRE(out.diagnostics.rows.size() == 1);
  REQUIRE(out.diagnostics.rows[0].t == 0.0);
  REQUIRE(out.snapshots.size() == 1);
  REQUIRE(out.snapshots[0].t == 0.0);
  REQUIRE(oracles::max_abs_diff(out.snapshots[0].psi, ic.psi) == 0.0);
  REQUIRE(out.final_state.t == 0.0);
  REQUIRE_FALSE(out.blowup.has_value());
}

TEST_CASE("simulate logs diagnostics on the stride and at the final time", "[integrator]") {
  const GridSpec grid = specwave::make_grid(30.0, 64);
  const FieldPair ic = gaussian_ic(grid);
  const StepControl control{1e-3, 0.05, 10, 1e6};
  const specwave::RunResult out =
      specwave::simulate(ModelParams{1.0, 1.0, 1.0, 2}, grid, ic, control, true);
  // 50 steps: rows at t = 0 plus steps 10, 20, 30, 40, 50.
  REQUIRE(out.diagnostics.rows.size() == 6);
  REQUIRE(out.diagnostics.rows.front().t == 0.0);
  REQUIRE(out.diagnostics.rows.back().t == 0.05);
  REQUIRE(std::abs(out.diagnostics.rows[1].t - 0.01) < 1e-12);
  REQUIRE(out.final_state.t == 0.05);
  REQUIRE(out.snapshots.empty());
}

TEST_CASE("simulate lands exactly on requested snapshot times", "[integrator]") {
  const GridSpec grid = specwave::make_grid(30.0, 64);
  const FieldPair ic = gaussian_ic(grid);
  const StepControl control{1e-3, 0.05, 10, 1e6};
  const std::vector<double> times{0.0, 0.0131, 0.05};
  const specwave::RunResult out =
      specwave::simulate(ModelParams{1.0, 1.0, 1.0, 2}, grid, ic, control, true, times);
  REQUIRE(out.snapshots.size() == 3);
  REQUIRE(out.snapshots[0].t == 0.0);
  REQUIRE(out.snapshots[1].t == 0.0131);
  REQUIRE(out.snapshots[2].t == 0.05);
  REQUIRE(out.final_state.t == 0.05);
  // The mid-segment landing must not disturb the totals: the final row still
  // sits exactly at t_max.
  REQUIRE(out.diagnostics.rows.back().t == 0.05);
}

TEST_CASE("simulate rejects snapshot times outside the horizon", "[integrator]") {
  const GridSpec grid = specwave::make_grid(30.0, 64);
  const FieldPair ic = gaussian_ic(grid);
  const StepControl control{1e-3, 0.05, 10, 1e6};
  const std::vector<double> beyond{0.06};
  REQUIRE_THROWS_AS(specwave::simulate(ModelParams{}, grid, ic, control, true, beyond),
                    specwave::ConfigError);
  const std::vector<double> negative{-0.01};
  REQUIRE_THROWS_AS(specwave::simulate(ModelParams{}, grid, ic, control, true, negative),
                    specwave::ConfigError);
}

TEST_CASE("simulate rejects mismatched initial fields", "[integrator]") {
  const GridSpec grid = specwave::make_grid(30.0, 64);
  FieldPair ic;
  ic.psi.assign(32, 1.0);
  ic.psi_t.assign(64, 0.0);
  const StepControl control{1e-3, 0.01, 10, 1e6};
  REQUIRE_THROWS_AS(specwave::simulate(ModelParams{}, grid, ic, control, true),
                    specwave::ContractViolationError);
}

TEST_CASE("simulate is deterministic run to run", "[integrator]") {
  const GridSpec grid = specwave::make_grid(30.0, 128);
  const ModelParams params{1.0, 1.0, 1.0, 2};
  const FieldPair ic = gaussian_ic(grid);
  const StepControl control{1e-3, 0.05, 10, 1e6};
  const specwave::RunResult a = specwave::simulate(params, grid, ic, control, true);
  const specwave::RunResult b = specwave::simulate(params, grid, ic, control, true);
  REQUIRE(a.final_state.psi_hat.size() == b.final_state.psi_hat.size());
  for (std::size_t j = 0; j < a.final_state.psi_hat.size(); ++j) {
    REQUIRE(a.final_state.psi_hat[j].real() == b.final_state.psi_hat[j].real());
    REQUIRE(a.final_state.psi_hat[j].imag() == b.final_state.psi_hat[j].imag());
    REQUIRE(a.final_state.v_hat[j].real() == b.final_state.v_hat[j].real());
    REQUIRE(a.final_state.v_hat[j].imag() == b.final_state.v_hat[j].imag());
  }
  REQUIRE(a.diagnostics.rows.size() == b.diagnostics.rows.size());
  for (std::size_t r = 0; r < a.diagnostics.rows.size(); ++r) {
    REQUIRE(a.diagnostics.rows[r].energy == b.diagnostics.rows[r].energy);
  }
}

TEST_CASE("evolution preserves the reality of the field", "[integrator]") {
  const GridSpec grid = specwave::make_grid(30.0, 128);
  const ModelParams params{1.0, 1.0, 1.0, 2};
  const FieldPair ic = gaussian_ic(grid);
  const StepControl control{1e-3, 0.1, 10, 1e6};
  const specwave::RunResult out = specwave::simulate(params, grid, ic, control, true);
  REQUIRE(specwave::conjugate_asymmetry(out.final_state.psi_hat) < 1e-10);
  REQUIRE(specwave::conjugate_asymmetry(out.final_state.v_hat) < 1e-10);
}

TEST_CASE("evolution runs backward to the initial state", "[integrator]") {
  const GridSpec grid = specwave::make_grid(30.0, 256);
  const ModelParams params{1.0, 1.0, 1.0, 2};
  const FieldPair ic = gaussian_ic(grid);
  const StepControl control{1e-3, 0.25, 1000, 1e6};
  const specwave::RunResult fwd = specwave::simulate(params, grid, ic, control, true);

  FieldPair back_ic;
  back_ic.psi = specwave::inverse(grid, fwd.final_state.psi_hat);
  back_ic.psi_t = specwave::inverse(grid, fwd.final_state.v_hat);
  for (double& v : back_ic.psi_t) v = -v;
  const specwave::RunResult back = specwave::simulate(params, grid, back_ic, control, true);

  const std::vector<double> returned = specwave::inverse(grid, back.final_state.psi_hat);
  REQUIRE(oracles::max_abs_diff(returned, ic.psi) < 1e-5);
  const std::vector<double> returned_vel = specwave::inverse(grid, back.final_state.v_hat);
  REQUIRE(oracles::max_abs(returned_vel) < 1e-5);
}

TEST_CASE("energy drift stays small on a short focusing run", "[integrator]") {
  const GridSpec grid = specwave::make_grid(30.0, 512);
  const ModelParams params{1.0, 1.0, 1.0, 2};
  const FieldPair ic = gaussian_ic(grid);
  const StepControl control{1e-3, 0.2, 10, 1e6};
  const specwave::RunResult out = specwave::simulate(params, grid, ic, control, true);
  // The divergence-form right-hand side conserves the discrete energy exactly
  // in the semidiscrete limit, so the residual is time-integration error plus
  // round-off, measured near 1e-13 here.
  REQUIRE(specwave::conservation_drift(out.diagnostics, specwave::ConservedQuantity::energy) < 1e-10);
}

TEST_CASE("momentum tracks the numerical derivative of the mass", "[integrator]") {
  const GridSpec grid = specwave::make_grid(30.0, 128);
  const ModelParams params{1.0, 1.0, 1.0, 2};
  const FieldPair ic = gaussian_ic(grid);
  const StepControl control{1e-3, 0.2, 10, 1e6};
  const specwave::RunResult out = specwave::simulate(params, grid, ic, control, true);
  const auto& rows = out.diagnostics.rows;
  REQUIRE(rows.size() >= 5);
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    const double dt_rows = rows[i + 1].t - rows[i - 1].t;
    const double fd = (rows[i + 1].mass - rows[i - 1].mass) / dt_rows;
    CAPTURE(i);
    REQUIRE(std::abs(fd - rows[i].momentum) < 5e-5);
  }
}

TEST_CASE("detect_blowup prefers the non-finite trigger", "[integrator]") {
  const GridSpec grid = specwave::make_grid(30.0, 64);
  EvolutionState nan_state;
  nan_state.psi_hat.assign(64, Complex(1e300, 0.0));
  nan_state.psi_hat[0] = Complex(std::nan(""), 0.0);
  nan_state.v_hat.assign(64, Complex(0.0, 0.0));
  const auto trigger = specwave::detect_blowup(grid, nan_state, 1e6);
  REQUIRE(trigger.has_value());
  REQUIRE(*trigger == specwave::BlowupTrigger::non_finite);

  EvolutionState big_state;
  big_state.psi_hat = specwave::forward(grid, std::vector<double>(64, 2e6));
  big_state.v_hat.assign(64, Complex(0.0, 0.0));
  const auto big = specwave::detect_blowup(grid, big_state, 1e6);
  REQUIRE(big.has_value());
  REQUIRE(*big == specwave::BlowupTrigger::overflow);

  EvolutionState calm_state;
  calm_state.psi_hat = specwave::forward(grid, std::vector<double>(64, 0.5));
  calm_state.v_hat.assign(64, Complex(0.0, 0.0));
  REQUIRE_FALSE(specwave::detect_blowup(grid, calm_state, 1e6).has_value());
}

TEST_CASE("threshold crossing ends the run with an overflow record", "[integrator]") {
  const GridSpec grid = specwave::make_grid(30.0, 64);
  const ModelParams params{1.0, 1.0, 1.0, 2};
  const FieldPair ic = gaussian_ic(grid);
  // The initial peak is 1, so a threshold of 0.5 trips on the first step.
  const StepControl control{1e-3, 0.05, 10, 0.5};
  const specwave::RunResult out = specwave::simulate(params, grid, ic, control, true);
  REQUIRE(out.blowup.has_value());
  REQUIRE(out.blowup->trigger == specwave::BlowupTrigger::overflow);
  REQUIRE(out.blowup->t_blow == 1e-3);
  REQUIRE(out.diagnostics.rows.back().t == 1e-3);
  REQUIRE(std::isfinite(out.diagnostics.rows.back().max_abs));
  REQUIRE(out.diagnostics.rows.back().max_abs > 0.5);
}

TEST_CASE("a degenerating stage ends the run at the last finite time", "[integrator]") {
  const GridSpec grid = specwave::make_grid(30.0, 64);
  // A huge field with a high power overflows inside the first stage evaluation.
  const ModelParams params{1.0, 1.0, -1.0, 5};
  FieldPair ic;
  ic.psi.assign(64, 1e80);
  ic.psi_t.assign(64, 0.0);
  const StepControl control{1e-3, 0.05, 10, 1e6};
  const specwave::RunResult out = specwave::simulate(params, grid, ic, control, true);
  REQUIRE(out.blowup.has_value());
  REQUIRE(out.blowup->trigger == specwave::BlowupTrigger::non_finite);
  REQUIRE(out.blowup->t_blow == 0.0);
  REQUIRE(out.final_state.t == 0.0);
  REQUIRE(out.diagnostics.rows.size() == 1);
}

TEST_CASE("diagnostics of a non-finite state are NaN rows", "[integrator]") {
  const GridSpec grid = specwave::make_grid(30.0, 64);
  EvolutionState state;
  state.t = 1.5;
  state.psi_hat.assign(64, Complex(std::nan(""), 0.0));
  state.v_hat.assign(64, Complex(0.0, 0.0));
  const specwave::DiagnosticsRow row =
      specwave::compute_diagnostics_row(ModelParams{1.0, 1.0, 1.0, 2}, grid, state);
  REQUIRE(row.t == 1.5);
  REQUIRE(std::isnan(row.mass));
  REQUIRE(std::isnan(row.energy));
  REQUIRE(std::isnan(row.spectrum_tail));
  REQUIRE(std::isnan(row.max_abs));
}
