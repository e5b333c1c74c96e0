// Minimal library walkthrough: build a grid, evolve a Gaussian pulse, and
// report how well the energy functional is conserved.
#include <cmath>
#include <cstdio>

#include "specwave/specwave.hpp"

int main() {
  const specwave::GridSpec grid = specwave::make_grid(30.0, 256);
  const specwave::ModelParams params{1.0, 1.0, 1.0, 2};

  specwave::FieldPair ic;
  for (int j = 0; j < grid.num_points; ++j) {
    const double x = grid.node(j);
    ic.psi.push_back(std::exp(-x * x));
    ic.psi_t.push_back(0.0);
  }

  const specwave::StepControl control{1e-3, 1.0, 50, 1e6};
  const specwave::RunResult run = specwave::simulate(params, grid, ic, control, true);

  const double drift =
      specwave::conservation_drift(run.diagnostics, specwave::ConservedQuantity::energy);
  std::printf("steps to t = %.2f, relative energy drift %.3e\n", run.final_state.t, drift);
  std::printf("final spectrum tail %.3e\n", run.diagnostics.rows.back().spectrum_tail);
  return 0;
}
