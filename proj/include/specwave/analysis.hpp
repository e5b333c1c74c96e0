#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "specwave/errors.hpp"
#include "specwave/grid.hpp"
#include "specwave/model.hpp"

namespace specwave {

// One diagnostics record. Entries are finite except in an optional terminal
// row written when a run blows up.
struct DiagnosticsRow {
  double t = 0.0;
  double mass = 0.0;
  double momentum = 0.0;
  double energy = 0.0;
  double energy_eq4 = 0.0;
  double max_abs = 0.0;
  double l2_norm = 0.0;
  double spectrum_tail = 0.0;
};

struct DiagnosticsSeries {
  std::vector<DiagnosticsRow> rows;
};

enum class ConservedQuantity { mass, energy };

// Largest relative excursion of a logged quantity from its initial value:
// max over rows of |q - q0| / max(1, |q0|).
inline double conservation_drift(const DiagnosticsSeries& series, ConservedQuantity quantity) {
  if (series.rows.size() < 2) {
    throw ConfigError("series", "conservation drift requires at least two diagnostics rows");
  }
  const auto pick = [quantity](const DiagnosticsRow& row) {
    return quantity == ConservedQuantity::mass ? row.mass : row.energy;
  };
  const double q0 = pick(series.rows.front());
  const double denom = std::max(1.0, std::abs(q0));
  double worst = 0.0;
  for (const DiagnosticsRow& row : series.rows) {
    worst = std::max(worst, std::abs(pick(row) - q0) / denom);
  }
  return worst;
}

// Discrete L2 norm sqrt(sum psi_j^2 dx).
inline double l2_norm(const GridSpec& grid, std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(sum * grid.dx());
}

// Largest |coefficient| in the top decile of |k| (20*|mode| >= 9*N in integer
// form), relative to the largest |coefficient| overall.
inline double spectrum_tail_from_coefficients(const GridSpec& grid, std::span<const Complex> coeffs) {
  const std::size_t n = static_cast<std::size_t>(grid.num_points);
  if (coeffs.size() != n) {
    throw ContractViolationError("spectrum_tail: expected " + std::to_string(n) +
                                 " coefficients, got " + std::to_string(coeffs.size()));
  }
  double peak = 0.0;
  double tail = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double mag = std::abs(coeffs[j]);
    peak = std::max(peak, mag);
    if (20 * std::abs(signed_mode(grid, j)) >= 9 * grid.num_points) tail = std::max(tail, mag);
  }
  if (peak == 0.0) throw UndefinedReferenceError("spectrum_tail: field is identically zero");
  return tail / peak;
}

inline double spectrum_tail(const GridSpec& grid, std::span<const double> psi) {
  bool any_nonzero = false;
  for (double v : psi) {
    if (v != 0.0) {
      any_nonzero = true;
      break;
    }
  }
  if (!any_nonzero) throw UndefinedReferenceError("spectrum_tail: field is identically zero");
  return spectrum_tail_from_coefficients(grid, forward(grid, psi));
}

// Cosine perturbation specification; eps is the amplitude, k_p the requested
// wavenumber before snapping to the grid ladder.
struct PerturbationSpec {
  double eps = 1e-3;
  double k_p = 2.0;
};

// Preset perturbation wavenumbers offered by the experiment configs.
inline constexpr double kp_preset_packet = 2.0;
inline constexpr double kp_preset_long_wave = 0.25;

inline void validate_perturbation(const PerturbationSpec& spec) {
  if (!std::isfinite(spec.eps) || spec.eps <= 0.0) {
    throw ConfigError("perturbation.eps", "eps must be positive and finite");
  }
  if (!std::isfinite(spec.k_p)) throw ConfigError("perturbation.k_p", "k_p must be finite");
}

// Nearest grid wavenumber (pi/L)*round(k*L/pi), clamped to the resolvable band.
inline double snap_wavenumber(const GridSpec& grid, double k) {
  const double unit = std::numbers::pi / grid.half_length;
  double mode = std::round(k / unit);
  const double limit = static_cast<double>(grid.num_points / 2);
  mode = std::clamp(mode, -limit, limit);
  return unit * mode;
}

struct PerturbedField {
  std::vector<double> samples;
  double snapped_kp = 0.0;
};

// psi0 + eps*cos(k x) with k snapped to the grid ladder; the snapped value is
// reported alongside the samples.
inline PerturbedField perturbed_ic(const GridSpec& grid, std::span<const double> psi0,
                                   const PerturbationSpec& spec) {
  validate_perturbation(spec);
  const std::size_t n = static_cast<std::size_t>(grid.num_points);
  if (psi0.size() != n) {
    throw ContractViolationError("perturbed_ic: expected " + std::to_string(n) + " samples, got " +
                                 std::to_string(psi0.size()));
  }
  PerturbedField out;
  out.snapped_kp = snap_wavenumber(grid, spec.k_p);
  out.samples.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.samples[j] = psi0[j] + spec.eps * std::cos(out.snapped_kp * grid.node(static_cast<int>(j)));
  }
  return out;
}

// Clamp applied to growth rates when the separation underflows.
inline constexpr double growth_rate_floor = -16.0;

// gamma = log10(||psi_pert - psi|| / ||psi||) in the discrete L2 norm.
inline double growth_rate(const GridSpec& grid, std::span<const double> psi_pert,
                          std::span<const double> psi) {
  const std::size_t n = static_cast<std::size_t>(grid.num_points);
  if (psi.size() != n || psi_pert.size() != n) {
    throw ContractViolationError("growth_rate: field lengths must match the grid");
  }
  const double ref = l2_norm(grid, psi);
  if (ref == 0.0) {
    throw UndefinedReferenceError("growth_rate: reference field has zero norm");
  }
  std::vector<double> diff(n);
  for (std::size_t j = 0; j < n; ++j) diff[j] = psi_pert[j] - psi[j];
  const double sep = l2_norm(grid, diff);
  if (sep == 0.0) return growth_rate_floor;
  return std::max(growth_rate_floor, std::log10(sep / ref));
}

struct GammaPoint {
  double t = 0.0;
  double gamma = 0.0;
};

struct GammaSeries {
  std::vector<GammaPoint> rows;
};

// Slopes of the piecewise-linear traveling-wave families psi = a*(x - c*t) + b.
// The slope 0 family always exists; nonzero slopes +-sqrt(3*(c^2 - alpha1)/alpha2)
// exist when the radicand is positive (growing tails, outside the decaying class).
struct TravelingWaveSlopes {
  std::vector<double> slopes;
  bool triple_root = false;        // radicand exactly zero: the three roots coincide
  bool extended_space = false;     // nonzero slopes present: linear growth at infinity
  bool degenerate_dispersion = false;  // alpha2 = 0: only the constant family survives
};

inline TravelingWaveSlopes traveling_wave_slopes(const ModelParams& params, double c) {
  if (!std::isfinite(c)) throw DomainError("traveling_wave_slopes: c must be finite");
  validate_params(params);
  TravelingWaveSlopes out;
  if (params.alpha2 == 0.0) {
    out.slopes = {0.0};
    out.degenerate_dispersion = true;
    return out;
  }
  const double radicand = 3.0 * (c * c - params.alpha1) / params.alpha2;
  if (radicand > 0.0) {
    const double s = std::sqrt(radicand);
    out.slopes = {-s, 0.0, s};
    out.extended_space = true;
  } else {
    out.slopes = {0.0};
    out.triple_root = radicand == 0.0;
  }
  return out;
}

}  // namespace specwave
