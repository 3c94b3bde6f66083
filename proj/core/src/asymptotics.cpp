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

#include "turbosim/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "turbosim/errors.hpp"
#include "turbosim/parallel.hpp"

namespace turbosim {

namespace {

constexpr std::uint64_t kCrDomain = 1;
constexpr std::uint64_t kCrBlockTrials = 8192;

void check_cr(const CrValue& cr) {
  if (!(cr.value > 0.0) || !std::isfinite(cr.value)) {
    throw DomainError("C_r must be positive and finite");
  }
}

void check_order(int n) {
  if (n < 1) throw DomainError("receiver count N must be at least 1");
}

}  // namespace

std::string to_string(CrMethod method) {
  switch (method) {
    case CrMethod::kClosedForm: return "closed_form";
    case CrMethod::kQuadrature1d: return "quadrature";
    case CrMethod::kMonteCarloGeneral: return "monte_carlo";
  }
  return "?";
}

CrValue cr_closed_form(const TurbulenceParams& params) {
  const double a = params.alpha();
  const double b = params.beta();
  if (!(a + b - 1.0 > 0.0) || !(2.0 * a - 1.0 > 0.0) || !(2.0 * b - 1.0 > 0.0)) {
    throw DomainError("cr_closed_form: requires alpha, beta > 1/2 (Gamma arguments must be positive)");
  }
  using numerics::ln_gamma;
  const double log_value = ln_gamma(a + b - 1.0) + ln_gamma(2.0 * b - 1.0) + ln_gamma(2.0 * a - 1.0) -
                           2.0 * ln_gamma(a) - 2.0 * ln_gamma(b) - ln_gamma(a + b - 0.5) +
                           (3.0 - 2.0 * a - 2.0 * b) * std::numbers::ln2 +
                           0.5 * std::log(std::numbers::pi) + std::log(a) + std::log(b);
  return {std::exp(log_value), CrMethod::kClosedForm, 0.0};
}

CrValue cr_quadrature_bpsk(const TurbulenceParams& params, const numerics::QuadratureSpec& spec) {
  const GammaGammaPdf pdf(params);
  const auto result = numerics::integrate_semi_infinite(
      [&pdf](double x) {
        if (!(x > 0.0)) return 0.0;
        const double f = pdf(x);
        return f * f;
      },
      spec);
  return {result.value, CrMethod::kQuadrature1d, 0.0};
}

CrValue cr_general(const TurbulenceParams& params, std::span<const std::complex<double>> delta_s,
                   std::uint64_t trials, const RngStream& rng, int workers) {
  if (delta_s.size() < 2) throw DomainError("cr_general: need k >= 2 symbol differences");
  for (const auto& d : delta_s) {
    if (d == std::complex<double>{}) throw DomainError("cr_general: delta_s entries must be nonzero");
  }
  if (trials < 10000) throw DomainError("cr_general: at least 1e4 trials required");

  const GammaGammaPdf pdf(params);
  const GammaGammaSampler sampler(params);
  const std::size_t k = delta_s.size();
  const double last_sq = std::norm(delta_s[k - 1]);
  const double scale = 4.0 / last_sq;

  const std::uint64_t blocks = (trials + kCrBlockTrials - 1) / kCrBlockTrials;
  numerics::RunningMoments total;
  detail::run_ordered_blocks<numerics::RunningMoments>(
      blocks, workers,
      [&](std::uint64_t b) {
        RngStream stream = detail::block_stream(rng, kCrDomain, 0, b);
        const std::uint64_t begin = b * kCrBlockTrials;
        const std::uint64_t end = std::min(trials, begin + kCrBlockTrials);
        numerics::RunningMoments s;
        for (std::uint64_t t = begin; t < end; ++t) {
          std::complex<double> x{};
          for (std::size_t j = 0; j + 1 < k; ++j) {
            const double irradiance = sampler(stream);
            x += std::sqrt(irradiance) * stream.unit_phasor() * delta_s[j];
          }
          x *= 0.5;
          const double arg = scale * std::norm(x);
          const double v = arg > 0.0 ? scale * pdf(arg) : 0.0;
          s.push(v);
        }
        return s;
      },
      [&](std::uint64_t, const numerics::RunningMoments& s) {
        total.merge(s);
        return false;
      });
  return {total.mean, CrMethod::kMonteCarloGeneral, total.std_error()};
}

double effective_cdf(double r, int n, const CrValue& cr) {
  check_order(n);
  check_cr(cr);
  if (!(r >= 0.0)) throw DomainError("effective_cdf: r must be non-negative");
  if (r == 0.0) return 0.0;
  const double value = std::exp(n * std::log(cr.value) + 2.0 * n * std::log(r) -
                                numerics::ln_gamma(n + 1.0));
  if (value > 0.1) {
    throw DomainError("effective_cdf: F_N(r) = " + std::to_string(value) +
                      " exceeds 0.1, outside the small-radius regime");
  }
  return value;
}

double effective_pdf(double r, int n, const CrValue& cr) {
  check_order(n);
  check_cr(cr);
  if (!(r >= 0.0)) throw DomainError("effective_pdf: r must be non-negative");
  if (r == 0.0) return 0.0;
  return 2.0 * std::exp(n * std::log(cr.value) + (2.0 * n - 1.0) * std::log(r) -
                        numerics::ln_gamma(static_cast<double>(n)));
}

double pep_asymptote(const CrValue& cr, int n, double snr) {
  check_order(n);
  check_cr(cr);
  if (!(snr > 0.0)) throw DomainError("pep_asymptote: snr must be positive");
  return ber_asymptote(cr, n).evaluate(snr);
}

AsymptoteModel::AsymptoteModel(double coefficient, int slope)
    : coefficient_(coefficient), slope_(slope) {
  if (!(coefficient > 0.0) || !std::isfinite(coefficient)) {
    throw DomainError("asymptote coefficient must be positive and finite");
  }
  if (slope < 1) throw DomainError("asymptote slope must be a positive integer");
}

double AsymptoteModel::evaluate(double snr) const {
  if (!(snr > 0.0)) throw DomainError("asymptote: snr must be positive");
  return std::exp(std::log(coefficient_) - slope_ * std::log(snr));
}

double AsymptoteModel::snr_at(double ber) const {
  if (!(ber > 0.0)) throw DomainError("asymptote: target BER must be positive");
  return std::exp((std::log(coefficient_) - std::log(ber)) / slope_);
}

AsymptoteModel ber_asymptote(const CrValue& cr, int n) {
  check_order(n);
  check_cr(cr);
  const double log_coeff = n * std::log(cr.value) + numerics::ln_gamma(n + 0.5) -
                           std::log(2.0 * std::sqrt(std::numbers::pi)) - numerics::ln_gamma(n + 1.0);
  return AsymptoteModel(std::exp(log_coeff), n);
}

BerBounds ber_bounds_bpsk_2tx(const CrValue& cr, int n, double snr, double pep_single_error) {
  if (!(pep_single_error >= 0.0) || pep_single_error > 1.0) {
    throw DomainError("ber_bounds: pep_single_error must be a probability");
  }
  const double lower = pep_asymptote(cr, n, snr);
  return {lower, lower + 0.5 * pep_single_error * 2.0};
}

SlopeFit fit_log_log_slope(std::span<const double> snr_db, std::span<const double> values,
                           double low_db, double high_db) {
  if (snr_db.size() != values.size()) throw DimensionError("fit_log_log_slope: length mismatch");
  std::vector<double> x;
  std::vector<double> y;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < snr_db.size(); ++i) {
    if (snr_db[i] < low_db || snr_db[i] > high_db || !(values[i] > 0.0)) continue;
    x.push_back(snr_db[i] / 10.0);  // log10 of the linear SNR
    y.push_back(std::log10(values[i]));
    lo = std::min(lo, snr_db[i]);
    hi = std::max(hi, snr_db[i]);
  }
  if (x.size() < 3) {
    throw DomainError("slope fit needs at least 3 usable points in [" + std::to_string(low_db) +
                      ", " + std::to_string(high_db) + "] dB, found " + std::to_string(x.size()));
  }
  const auto line = numerics::fit_line(x, y);
  SlopeFit fit;
  fit.fitted_slope = line.slope;
  fit.intercept = line.intercept;
  fit.window_low_db = lo;
  fit.window_high_db = hi;
  fit.residual_rms = line.residual_rms;
  fit.points = line.points;
  return fit;
}

SlopeFit fit_diversity_slope(const BerCurve& curve, double low_db, double high_db,
                             std::uint64_t min_errors) {
  std::vector<double> snr;
  std::vector<double> ber;
  for (const auto& p : curve.points) {
    if (p.bit_errors < min_errors) continue;
    snr.push_back(p.snr_db);
    ber.push_back(p.ber);
  }
  return fit_log_log_slope(snr, ber, low_db, high_db);
}

std::pair<double, double> top_converged_decade(const BerCurve& curve, std::uint64_t min_errors) {
  double floor_ber = std::numeric_limits<double>::infinity();
  for (const auto& p : curve.points) {
    if (p.bit_errors >= min_errors && p.ber > 0.0) floor_ber = std::min(floor_ber, p.ber);
  }
  if (!std::isfinite(floor_ber)) {
    throw DomainError("top_converged_decade: no point has " + std::to_string(min_errors) + " errors");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& p : curve.points) {
    if (p.bit_errors >= min_errors && p.ber > 0.0 && p.ber <= 10.0 * floor_ber) {
      lo = std::min(lo, p.snr_db);
      hi = std::max(hi, p.snr_db);
    }
  }
  return {lo, hi};
}

}  // namespace turbosim
