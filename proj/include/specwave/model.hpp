#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specwave/errors.hpp"
#include "specwave/grid.hpp"

// Model: psi_tt = (alpha1 + 3*alpha2*psi_x^2) * psi_xx - alpha3 * psi^sigma
// on a periodic domain, together with the functionals and linear-theory
// formulas attached to it.
namespace specwave {

struct ModelParams {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double alpha3 = 1.0;
  int sigma = 2;

  bool operator==(const ModelParams&) const = default;
};

inline void validate_params(const ModelParams& p) {
  if (!std::isfinite(p.alpha1)) throw ConfigError("alpha1", "alpha1 must be finite");
  if (!std::isfinite(p.alpha2)) throw ConfigError("alpha2", "alpha2 must be finite");
  if (!std::isfinite(p.alpha3)) throw ConfigError("alpha3", "alpha3 must be finite");
  if (p.sigma < 1) throw ConfigError("sigma", "sigma must be an integer >= 1");
}

// Field and its time derivative on the grid nodes.
struct FieldPair {
  std::vector<double> psi;
  std::vector<double> psi_t;
};

namespace detail {

inline double int_pow(double base, int exponent) {
  double value = 1.0;
  for (int p = 0; p < exponent; ++p) value *= base;
  return value;
}

inline void check_finite(std::span<const double> values, const char* what) {
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!std::isfinite(values[j])) throw NumericalStateError(j, std::string(what) + ": non-finite value");
  }
}

}  // namespace detail

// Right-hand side of the second-order equation evaluated pseudospectrally:
// derivatives in spectral space, products pointwise, and (when dealias_on)
// the 2/3 mask applied to the transform of each nonlinear product.
inline std::vector<double> acceleration(const ModelParams& params, const GridSpec& grid,
                                        std::span<const double> psi, bool dealias_on) {
  validate_params(params);
  detail::check_finite(psi, "acceleration");
  const std::size_t n = static_cast<std::size_t>(grid.num_points);
  const std::vector<Complex> psi_hat = forward(grid, psi);
  const std::vector<double> psi_x = inverse(grid, spectral_derivative(grid, psi_hat, 1));
  const std::vector<double> psi_xx = inverse(grid, spectral_derivative(grid, psi_hat, 2));

  // The quasilinear term is applied in divergence form, alpha2 * d/dx(psi_x^3).
  // The spectral derivative is skew-adjoint under the grid inner product, so
  // with this form the semidiscrete flow conserves the discrete energy exactly.
  // Expanding the derivative into 3 psi_x^2 psi_xx instead leaves an aliasing
  // residue that shows up as energy drift once gradients steepen.
  std::vector<double> gradient_cubed(n);
  std::vector<double> power_term(n);
  for (std::size_t j = 0; j < n; ++j) {
    gradient_cubed[j] = psi_x[j] * psi_x[j] * psi_x[j];
    power_term[j] = detail::int_pow(psi[j], params.sigma);
  }
  std::vector<Complex> cubed_hat = forward(grid, gradient_cubed);
  if (dealias_on) {
    cubed_hat = dealias(grid, cubed_hat);
    power_term = inverse(grid, dealias(grid, forward(grid, power_term)));
  }
  const std::vector<double> gradient_term = inverse(grid, spectral_derivative(grid, cubed_hat, 1));

  std::vector<double> accel(n);
  for (std::size_t j = 0; j < n; ++j) {
    accel[j] = params.alpha1 * psi_xx[j] + params.alpha2 * gradient_term[j] -
               params.alpha3 * power_term[j];
  }
  detail::check_finite(accel, "acceleration");
  return accel;
}

// Pointwise density of the conserved energy:
// H = 1/2 psi_t^2 + 1/2 alpha1 psi_x^2 + alpha2/4 psi_x^4 + alpha3/(sigma+1) psi^(sigma+1).
inline double hamiltonian_density(const ModelParams& params, double psi, double psi_x, double psi_t) {
  const double gx2 = psi_x * psi_x;
  return 0.5 * psi_t * psi_t + 0.5 * params.alpha1 * gx2 + 0.25 * params.alpha2 * gx2 * gx2 +
         params.alpha3 / static_cast<double>(params.sigma + 1) * detail::int_pow(psi, params.sigma + 1);
}

namespace detail {

inline double energy_from_parts(const ModelParams& params, const GridSpec& grid,
                                std::span<const double> psi, std::span<const double> psi_x,
                                std::span<const double> psi_t) {
  double sum = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    sum += hamiltonian_density(params, psi[j], psi_x[j], psi_t[j]);
  }
  return sum * grid.dx();
}

// Companion form with the opposite sign on the gradient terms:
// 1/2 integral of [psi_t^2 - (alpha1 + alpha2/2 psi_x^2) psi_x^2 + 2 alpha3/(sigma+1) psi^(sigma+1)].
inline double energy_eq4_from_parts(const ModelParams& params, const GridSpec& grid,
                                    std::span<const double> psi, std::span<const double> psi_x,
                                    std::span<const double> psi_t) {
  double sum = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    const double gx2 = psi_x[j] * psi_x[j];
    sum += 0.5 * psi_t[j] * psi_t[j] - 0.5 * params.alpha1 * gx2 - 0.25 * params.alpha2 * gx2 * gx2 +
           params.alpha3 / static_cast<double>(params.sigma + 1) * int_pow(psi[j], params.sigma + 1);
  }
  return sum * grid.dx();
}

}  // namespace detail

inline double energy(const ModelParams& params, const GridSpec& grid, const FieldPair& state) {
  validate_params(params);
  const std::vector<double> psi_x = inverse(grid, spectral_derivative(grid, forward(grid, state.psi), 1));
  return detail::energy_from_parts(params, grid, state.psi, psi_x, state.psi_t);
}

inline double energy_eq4(const ModelParams& params, const GridSpec& grid, const FieldPair& state) {
  validate_params(params);
  const std::vector<double> psi_x = inverse(grid, spectral_derivative(grid, forward(grid, state.psi), 1));
  return detail::energy_eq4_from_parts(params, grid, state.psi, psi_x, state.psi_t);
}

// integral of psi dx. Not conserved by the dynamics; logged for monitoring.
inline double mass(const GridSpec& grid, std::span<const double> psi) {
  double sum = 0.0;
  for (double v : psi) sum += v;
  return sum * grid.dx();
}

// integral of psi_t dx, the rate of change of the mass.
inline double momentum(const GridSpec& grid, std::span<const double> psi_t) {
  return mass(grid, psi_t);
}

// Linear dispersion relation omega^2 = alpha1 k^2 - 3 alpha2 k^4.
inline double omega_squared(const ModelParams& params, double k) {
  if (!std::isfinite(k)) throw DomainError("omega_squared: k must be finite");
  const double k2 = k * k;
  return params.alpha1 * k2 - 3.0 * params.alpha2 * k2 * k2;
}

namespace detail {

inline std::optional<double> real_band_edge(const ModelParams& params) {
  if (params.alpha1 > 0.0 && params.alpha2 > 0.0) {
    return std::sqrt(params.alpha1 / (3.0 * params.alpha2));
  }
  return std::nullopt;
}

[[noreturn]] inline void throw_evanescent(const ModelParams& params, double k, double w2) {
  std::string message = "wavenumber k = " + std::to_string(k) + " lies outside the real band (omega^2 = " +
                        std::to_string(w2) + ")";
  const std::optional<double> edge = real_band_edge(params);
  if (edge) message += "; real band is |k| < " + std::to_string(*edge);
  throw EvanescentBandError(k, edge, message);
}

}  // namespace detail

// Group velocity d omega / dk on the positive branch of omega.
inline double group_velocity(const ModelParams& params, double k) {
  const double w2 = omega_squared(params, k);
  if (!(w2 > 0.0)) detail::throw_evanescent(params, k, w2);
  return (params.alpha1 * k - 6.0 * params.alpha2 * k * k * k) / std::sqrt(w2);
}

// Phase velocity omega / k on the positive branch of omega.
inline double phase_velocity(const ModelParams& params, double k) {
  if (k == 0.0) throw DomainError("phase_velocity: k must be nonzero");
  const double w2 = omega_squared(params, k);
  if (!(w2 > 0.0)) detail::throw_evanescent(params, k, w2);
  return std::sqrt(w2) / k;
}

// Third-order comparison relation omega = alpha k - beta k^3.
inline double kdv_omega(double alpha, double beta, double k) {
  if (!std::isfinite(k)) throw DomainError("kdv_omega: k must be finite");
  return alpha * k - beta * k * k * k;
}

}  // namespace specwave
