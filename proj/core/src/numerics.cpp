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

#include "turbosim/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "turbosim/errors.hpp"

namespace turbosim::numerics {

namespace {

constexpr double kEulerGamma = 0.5772156649015328606;

// ζ(k)/k for k = 2..33.
constexpr std::array<double, 32> kZetaOverK = {
    0.82246703342411321824,  0.40068563438653142847,  0.27058080842778454788,
    0.20738555102867398527,  0.16955717699740818995,  0.14404989676884611812,
    0.12550966952474304242,  0.11133426586956469049,  0.10009945751278180853,
    0.090954017145829042233, 0.083353840546109004025, 0.076932516411352191473,
    0.071432946295361336059, 0.066668705882420468033, 0.062500955141213040742,
    0.058823978658684582339, 0.055555767627403611102, 0.052631679379616660734,
    0.05000004769810169364,  0.047619070330142227991, 0.045454556293204669442,
    0.043478266053040259361, 0.041666669150341210469, 0.040000001192140140586,
    0.038461539034675185706, 0.037037037312989325549, 0.035714285847333358028,
    0.034482758684919300811, 0.033333333364377581081, 0.032258064531150416339,
    0.03125000000727597448,  0.030303030306558045507,
};

// ln Γ(1 + z) = -γ z + Σ_{k≥2} (-1)^k ζ(k)/k z^k, evaluated for |z| < 0.2.
double ln_gamma_1p_series(double z) {
  double acc = 0.0;
  for (std::size_t i = kZetaOverK.size(); i-- > 0;) {
    const int k = static_cast<int>(i) + 2;
    const double term = (k % 2 == 0) ? kZetaOverK[i] : -kZetaOverK[i];
    acc = acc * z + term;
  }
  return z * (-kEulerGamma + z * acc);
}

double lgamma_positive(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod_15(const RealFunction& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  Panel p{a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
  if (!std::isfinite(p.value) || !std::isfinite(p.error)) {
    throw ConvergenceError("quadrature: integrand is not finite on [" + std::to_string(a) +
                           ", " + std::to_string(b) + "]");
  }
  return p;
}

QuadratureResult adaptive(const RealFunction& f, double a, double b,
                          const QuadratureSpec& spec) {
  std::priority_queue<Panel> panels;
  Panel first = gauss_kronrod_15(f, a, b);
  double total = first.value;
  double total_error = first.error;
  panels.push(first);
  int subdivisions = 1;

  auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };

  while (total_error > tolerance()) {
    if (subdivisions >= spec.max_subdivisions) {
      throw ConvergenceError("quadrature: " + std::to_string(spec.max_subdivisions) +
                             " subdivisions exhausted, error estimate " +
                             std::to_string(total_error));
    }
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval collapsed to machine resolution; nothing left to refine.
      panels.push(worst);
      break;
    }
    const Panel left = gauss_kronrod_15(f, worst.a, mid);
    const Panel right = gauss_kronrod_15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++subdivisions;
  }

  // Re-sum to shed the drift of the running updates.
  double sum = 0.0;
  double err = 0.0;
  while (!panels.empty()) {
    sum += panels.top().value;
    err += panels.top().error;
    panels.pop();
  }
  return {sum, err, subdivisions, b};
}

}  // namespace

double ln_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("ln_gamma: argument must be positive and finite, got " + std::to_string(x));
  }
  if (std::abs(x - 1.0) < 0.2) return ln_gamma_1p_series(x - 1.0);
  if (std::abs(x - 2.0) < 0.2) return std::log1p(x - 2.0) + ln_gamma_1p_series(x - 2.0);
  return lgamma_positive(x);
}

double bessel_k(double nu, double x) {
  if (!(x > 0.0)) {
    throw DomainError("bessel_k: argument must be positive, got " + std::to_string(x));
  }
  if (!std::isfinite(nu)) throw DomainError("bessel_k: order must be finite");
  return std::cyl_bessel_k(std::abs(nu), x);
}

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0)) throw DomainError("QuadratureSpec: abs_tol must be positive");
  if (!(rel_tol > 0.0)) throw DomainError("QuadratureSpec: rel_tol must be positive");
  if (max_subdivisions < 1) throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
  if (!(tail_cutoff_mass > 0.0) || !(tail_cutoff_mass < 1e-10)) {
    throw DomainError("QuadratureSpec: tail_cutoff_mass must lie in (0, 1e-10)");
  }
}

QuadratureResult integrate_interval(const RealFunction& f, double a, double b,
                                    const QuadratureSpec& spec) {
  spec.validate();
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("integrate_interval: limits must be finite");
  }
  if (a == b) return {0.0, 0.0, 0, b};
  if (b < a) {
    QuadratureResult r = adaptive(f, b, a, spec);
    r.value = -r.value;
    r.upper_limit = b;
    return r;
  }
  return adaptive(f, a, b, spec);
}

QuadratureResult integrate_semi_infinite(const RealFunction& f, const QuadratureSpec& spec) {
  spec.validate();
  // x = t / (1 - t), dx = dt / (1 - t)^2.
  const RealFunction mapped = [&f](double t) {
    const double s = 1.0 - t;
    return f(t / s) / (s * s);
  };
  auto to_t = [](double x) { return x / (1.0 + x); };

  // Push the truncation point out until a single-panel estimate of the
  // remaining tail is below tail_cutoff_mass.
  constexpr double kMaxCut = 1e12;
  double cut = 1.0;
  for (;;) {
    const Panel tail = gauss_kronrod_15(mapped, to_t(cut), 1.0);
    if (std::abs(tail.value) + tail.error < spec.tail_cutoff_mass) break;
    if (cut >= kMaxCut) {
      throw ConvergenceError("integrate_semi_infinite: tail mass above cutoff beyond x = 1e12");
    }
    cut *= 4.0;
  }

  QuadratureResult r = adaptive(mapped, 0.0, to_t(cut), spec);
  r.upper_limit = cut;
  return r;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("fit_line: x and y differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw DomainError("fit_line: need at least two points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_line: x values are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / static_cast<double>(n));
  fit.points = n;
  return fit;
}

Interval wilson_interval(double successes, double n, double z) {
  if (!(n > 0.0)) return {0.0, 1.0};
  const double p = successes / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  // Rounding can leave the bounds a few ulps on the wrong side of p at 0 or n.
  return {std::clamp(center - half, 0.0, p), std::clamp(center + half, p, 1.0)};
}

double linear_to_db(double linear) {
  if (!(linear > 0.0)) throw DomainError("linear_to_db: value must be positive");
  return 10.0 * std::log10(linear);
}

}  // namespace turbosim::numerics
