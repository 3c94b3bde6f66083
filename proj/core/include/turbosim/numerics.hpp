/*
 * Copyright 2026 The turbosim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Special functions, adaptive quadrature and small statistics helpers.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <functional>
#include <span>

namespace turbosim::numerics {

/// ln Γ(x) for x > 0. Relative error below 1e-13 on [0.5, 200], including
/// the neighbourhoods of the zeros at x = 1 and x = 2.
double ln_gamma(double x);

/// Modified Bessel function of the second kind K_ν(x), x > 0, any real ν.
double bessel_k(double nu, double x);

struct QuadratureSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
  /// Upper limit of a semi-infinite integral is pushed out until the
  /// estimated remaining mass falls below this value.
  double tail_cutoff_mass = 1e-14;

  /// Throws DomainError if any field violates its invariant.
  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions = 0;
  /// Truncation point actually used (the finite upper limit for intervals).
  double upper_limit = 0.0;
};

using RealFunction = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (7/15) on [a, b]. Nodes are strictly interior, so
/// integrable endpoint singularities are allowed. Throws ConvergenceError
/// when `max_subdivisions` is exhausted before the tolerance is met.
QuadratureResult integrate_interval(const RealFunction& f, double a, double b,
                                    const QuadratureSpec& spec = {});

/// ∫₀^∞ f(x) dx for f decaying at both ends. The half-line is mapped onto
/// (0, 1] by x = t / (1 - t) and subdivided adaptively there.
QuadratureResult integrate_semi_infinite(const RealFunction& f,
                                         const QuadratureSpec& spec = {});

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  std::size_t points = 0;
};

/// Ordinary least-squares line through (x, y). Requires at least two points
/// with distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Two-sided 95% Wilson score interval for `successes` out of `n`.
struct Interval {
  double low = 0.0;
  double high = 0.0;
};
Interval wilson_interval(double successes, double n, double z = 1.959963984540054);

/// Streaming mean and variance (Welford), mergeable across blocks.
struct RunningMoments {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) noexcept {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  void merge(const RunningMoments& o) noexcept {
    if (o.n == 0) return;
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    const double d = o.mean - mean;
    n += o.n;
    mean += d * nb / static_cast<double>(n);
    m2 += o.m2 + d * d * na * nb / static_cast<double>(n);
  }
  double variance() const noexcept { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double std_error() const noexcept { return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear);

}  // namespace turbosim::numerics
