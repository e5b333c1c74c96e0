#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "specwave/errors.hpp"
#include "specwave/fft.hpp"

namespace specwave {

using Complex = fft::Complex;

// Uniform periodic grid on [-L, L) with N nodes, x_j = -L + j*dx, dx = 2L/N.
struct GridSpec {
  double half_length = 0.0;  // L
  int num_points = 0;        // N

  double dx() const { return 2.0 * half_length / static_cast<double>(num_points); }
  double node(int j) const { return -half_length + static_cast<double>(j) * dx(); }

  std::vector<double> nodes() const {
    std::vector<double> x(static_cast<std::size_t>(num_points));
    for (int j = 0; j < num_points; ++j) x[static_cast<std::size_t>(j)] = node(j);
    return x;
  }
};

inline GridSpec make_grid(double half_length, int num_points) {
  if (!std::isfinite(half_length) || half_length <= 0.0) {
    throw ConfigError("L", "L must be a positive finite number");
  }
  if (num_points % 2 != 0) throw ConfigError("N", "N must be even");
  if (num_points < 8) throw ConfigError("N", "N must be at least 8");
  return GridSpec{half_length, num_points};
}

// Signed mode index for coefficient slot j: 0..N/2 then j-N for the upper half.
inline int signed_mode(const GridSpec& grid, std::size_t j) {
  const int n = grid.num_points;
  const int i = static_cast<int>(j);
  return i <= n / 2 ? i : i - n;
}

// Wavenumber ladder k_j = (pi/L)*signed_mode(j); the Nyquist slot carries +pi*N/(2L).
inline std::vector<double> wavenumbers(const GridSpec& grid) {
  const std::size_t n = static_cast<std::size_t>(grid.num_points);
  std::vector<double> k(n);
  const double unit = std::numbers::pi / grid.half_length;
  for (std::size_t j = 0; j < n; ++j) k[j] = unit * static_cast<double>(signed_mode(grid, j));
  return k;
}

inline double nyquist_wavenumber(const GridSpec& grid) {
  return std::numbers::pi / grid.half_length * static_cast<double>(grid.num_points / 2);
}

// Forward transform of real samples: c_m = sum_j psi_j exp(-2*pi*i*j*m/N).
inline std::vector<Complex> forward(const GridSpec& grid, std::span<const double> samples) {
  const std::size_t n = static_cast<std::size_t>(grid.num_points);
  if (samples.size() != n) {
    throw ContractViolationError("forward: expected " + std::to_string(n) + " samples, got " +
                                 std::to_string(samples.size()));
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(samples[j])) {
      throw NumericalStateError(j, "forward: non-finite sample");
    }
  }
  std::vector<Complex> coeffs(samples.begin(), samples.end());
  fft::forward_in_place(coeffs);
  // The exact transform of real samples is conjugate-symmetric; the complex
  // FFT leaves round-off asymmetry. Project it out so the symmetry is exact,
  // which the slot-wise spectral operations then preserve. Without this,
  // inverse() can reject a field whose amplitude decayed to round-off scale.
  coeffs[0] = Complex{coeffs[0].real(), 0.0};
  coeffs[n / 2] = Complex{coeffs[n / 2].real(), 0.0};
  for (std::size_t j = 1; j < n / 2; ++j) {
    const Complex mean = 0.5 * (coeffs[j] + std::conj(coeffs[n - j]));
    coeffs[j] = mean;
    coeffs[n - j] = std::conj(mean);
  }
  return coeffs;
}

// Largest deviation from conjugate symmetry c_j = conj(c_{(N-j) mod N}),
// relative to the largest coefficient magnitude. Zero for an all-zero array.
inline double conjugate_asymmetry(std::span<const Complex> coeffs) {
  const std::size_t n = coeffs.size();
  double peak = 0.0;
  for (const Complex& c : coeffs) peak = std::max(peak, std::abs(c));
  if (peak == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t partner = j == 0 ? 0 : n - j;
    worst = std::max(worst, std::abs(coeffs[j] - std::conj(coeffs[partner])));
  }
  return worst / peak;
}

inline constexpr double conjugate_symmetry_tolerance = 1e-8;

// Inverse transform back to real samples, applying the 1/N normalization.
// Coefficients must be conjugate-symmetric so the result is real.
inline std::vector<double> inverse(const GridSpec& grid, std::span<const Complex> coeffs) {
  const std::size_t n = static_cast<std::size_t>(grid.num_points);
  if (coeffs.size() != n) {
    throw ContractViolationError("inverse: expected " + std::to_string(n) + " coefficients, got " +
                                 std::to_string(coeffs.size()));
  }
  const double asym = conjugate_asymmetry(coeffs);
  if (!(asym <= conjugate_symmetry_tolerance)) {
    throw ContractViolationError("inverse: coefficients are not conjugate-symmetric (relative asymmetry " +
                                 std::to_string(asym) + ")");
  }
  std::vector<Complex> work(coeffs.begin(), coeffs.end());
  fft::inverse_in_place(work);
  std::vector<double> samples(n);
  for (std::size_t j = 0; j < n; ++j) samples[j] = work[j].real();
  return samples;
}

// Differentiate in spectral space: multiply slot j by (i*k_j)^order. Odd orders
// zero the Nyquist slot to keep the inverse real; even orders retain it.
inline std::vector<Complex> spectral_derivative(const GridSpec& grid, std::span<const Complex> coeffs,
                                                int order) {
  if (order < 1) throw ConfigError("order", "derivative order must be a positive integer");
  const std::size_t n = static_cast<std::size_t>(grid.num_points);
  if (coeffs.size() != n) {
    throw ContractViolationError("spectral_derivative: expected " + std::to_string(n) +
                                 " coefficients, got " + std::to_string(coeffs.size()));
  }
  const double unit = std::numbers::pi / grid.half_length;
  std::vector<Complex> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const int mode = signed_mode(grid, j);
    if (order % 2 != 0 && j == n / 2) {
      out[j] = Complex{0.0, 0.0};
      continue;
    }
    const double k = unit * static_cast<double>(mode);
    double mag = 1.0;
    for (int p = 0; p < order; ++p) mag *= k;
    // (i*k)^order = i^order * k^order with i^order cycling 1, i, -1, -i.
    switch (order % 4) {
      case 0: out[j] = coeffs[j] * Complex{mag, 0.0}; break;
      case 1: out[j] = coeffs[j] * Complex{0.0, mag}; break;
      case 2: out[j] = coeffs[j] * Complex{-mag, 0.0}; break;
      default: out[j] = coeffs[j] * Complex{0.0, -mag}; break;
    }
  }
  return out;
}

// Two-thirds dealiasing: zero every slot with |k| above (2/3) of the Nyquist
// wavenumber. The comparison is exact in integers: 3*|mode| > N.
inline std::vector<Complex> dealias(const GridSpec& grid, std::span<const Complex> coeffs) {
  const std::size_t n = static_cast<std::size_t>(grid.num_points);
  if (coeffs.size() != n) {
    throw ContractViolationError("dealias: expected " + std::to_string(n) + " coefficients, got " +
                                 std::to_string(coeffs.size()));
  }
  std::vector<Complex> out(coeffs.begin(), coeffs.end());
  for (std::size_t j = 0; j < n; ++j) {
    const int mode = signed_mode(grid, j);
    if (3 * std::abs(mode) > grid.num_points) out[j] = Complex{0.0, 0.0};
  }
  return out;
}

// A field carried in both representations at once.
struct SpectralField {
  std::vector<double> samples;
  std::vector<Complex> coefficients;

  static SpectralField from_samples(const GridSpec& grid, std::span<const double> samples) {
    SpectralField f;
    f.samples.assign(samples.begin(), samples.end());
    f.coefficients = forward(grid, samples);
    return f;
  }

  static SpectralField from_coefficients(const GridSpec& grid, std::span<const Complex> coeffs) {
    SpectralField f;
    f.samples = inverse(grid, coeffs);
    f.coefficients.assign(coeffs.begin(), coeffs.end());
    return f;
  }
};

}  // namespace specwave
