#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <numbers>
#include <utility>
#include <vector>

#include "specwave/errors.hpp"

// Self-contained complex FFT: iterative radix-2 for power-of-two lengths and
// Bluestein's chirp-z algorithm for every other length. Plans are cached per
// thread, so concurrent runs on separate threads share no mutable state.
namespace specwave::fft {

using Complex = std::complex<double>;

namespace detail {

constexpr bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

struct Plan {
  std::size_t n = 0;
  // Radix-2 tables (power-of-two n).
  std::vector<std::size_t> bitrev;
  std::vector<Complex> twiddle;  // exp(-2*pi*i*j/n) for j < n/2
  // Bluestein tables (other n).
  std::size_t padded = 0;        // power of two >= 2n-1
  std::vector<Complex> chirp;    // exp(-i*pi*j^2/n) for j < n
  std::vector<Complex> chirp_spectrum;  // forward transform of the padded conjugate chirp
  const Plan* sub = nullptr;     // plan of size `padded`, owned by the cache
};

// Unscaled forward transform of power-of-two length, in place.
inline void transform_pow2(const Plan& plan, Complex* a) {
  const std::size_t n = plan.n;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t r = plan.bitrev[j];
    if (j < r) std::swap(a[j], a[r]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const Complex w = plan.twiddle[j * stride];
        const Complex u = a[start + j];
        const Complex v = a[start + j + half] * w;
        a[start + j] = u + v;
        a[start + j + half] = u - v;
      }
    }
  }
}

const Plan& plan_for(std::size_t n);

// Unscaled forward transform of arbitrary length via chirp-z: the DFT becomes a
// circular convolution with the chirp, evaluated with power-of-two transforms.
inline void transform_bluestein(const Plan& plan, std::vector<Complex>& data) {
  const std::size_t n = plan.n;
  const std::size_t m = plan.padded;
  std::vector<Complex> work(m, Complex{0.0, 0.0});
  for (std::size_t j = 0; j < n; ++j) work[j] = data[j] * plan.chirp[j];
  transform_pow2(*plan.sub, work.data());
  for (std::size_t j = 0; j < m; ++j) work[j] *= plan.chirp_spectrum[j];
  // Unscaled inverse of the sub-transform via conjugation.
  for (auto& v : work) v = std::conj(v);
  transform_pow2(*plan.sub, work.data());
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t j = 0; j < n; ++j) {
    data[j] = std::conj(work[j]) * scale * plan.chirp[j];
  }
}

inline std::unique_ptr<Plan> build_plan(std::size_t n) {
  auto plan = std::make_unique<Plan>();
  plan->n = n;
  if (is_pow2(n)) {
    plan->bitrev.assign(n, 0);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) {
        if (j & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      }
      plan->bitrev[j] = r;
    }
    plan->twiddle.resize(n / 2);
    for (std::size_t j = 0; j < n / 2; ++j) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
      plan->twiddle[j] = Complex{std::cos(angle), std::sin(angle)};
    }
  } else {
    plan->padded = next_pow2(2 * n - 1);
    plan->sub = &plan_for(plan->padded);
    plan->chirp.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      // Reduce j^2 modulo 2n before forming the angle to keep the argument small.
      const std::size_t q = (j * j) % (2 * n);
      const double angle = -std::numbers::pi * static_cast<double>(q) / static_cast<double>(n);
      plan->chirp[j] = Complex{std::cos(angle), std::sin(angle)};
    }
    std::vector<Complex> b(plan->padded, Complex{0.0, 0.0});
    b[0] = std::conj(plan->chirp[0]);
    for (std::size_t j = 1; j < n; ++j) {
      b[j] = std::conj(plan->chirp[j]);
      b[plan->padded - j] = b[j];
    }
    transform_pow2(*plan->sub, b.data());
    plan->chirp_spectrum = std::move(b);
  }
  return plan;
}

inline const Plan& plan_for(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<Plan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = build_plan(n);
  return *slot;
}

}  // namespace detail

// Forward transform in place: X_k = sum_j x_j exp(-2*pi*i*j*k/n), no scaling.
inline void forward_in_place(std::vector<Complex>& data) {
  if (data.empty()) throw ConfigError("length", "transform length must be positive");
  const detail::Plan& plan = detail::plan_for(data.size());
  if (detail::is_pow2(data.size())) {
    detail::transform_pow2(plan, data.data());
  } else {
    detail::transform_bluestein(plan, data);
  }
}

// Inverse transform in place: x_j = (1/n) sum_k X_k exp(+2*pi*i*j*k/n).
inline void inverse_in_place(std::vector<Complex>& data) {
  if (data.empty()) throw ConfigError("length", "transform length must be positive");
  for (auto& v : data) v = std::conj(v);
  forward_in_place(data);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v = std::conj(v) * scale;
}

}  // namespace specwave::fft
