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

// Small-radius laws, asymptotic PEP/BER lines and diversity-slope fitting.

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>

#include "turbosim/channel.hpp"
#include "turbosim/curve.hpp"
#include "turbosim/numerics.hpp"
#include "turbosim/rng.hpp"

namespace turbosim {

enum class CrMethod { kClosedForm, kQuadrature1d, kMonteCarloGeneral };

std::string to_string(CrMethod method);

/// Coefficient of the small-radius law F_1(r) = C_r r².
struct CrValue {
  double value = 0.0;
  CrMethod method = CrMethod::kClosedForm;
  double std_error = 0.0;  ///< nonzero only for kMonteCarloGeneral
};

/// Closed form for two transmitters with BPSK, evaluated in log space.
/// Throws DomainError unless α, β > 1/2.
CrValue cr_closed_form(const TurbulenceParams& params);

/// ∫₀^∞ f_I(I)² dI by adaptive quadrature. Throws ConvergenceError.
CrValue cr_quadrature_bpsk(const TurbulenceParams& params, const numerics::QuadratureSpec& spec = {});

/// Monte-Carlo C_r for an arbitrary difference vector Δs (k ≥ 2 nonzero
/// entries): E[(4/|Δs_k|²)·f_I(4|X|²/|Δs_k|²)] with X = ½ Σ_{j<k} h_j Δs_j,
/// averaged over irradiances and phases. `rng` supplies the seed and stream
/// family; blocks are derived from it so the result is independent of
/// `workers`. Throws DomainError for trials < 10⁴ or a zero entry.
CrValue cr_general(const TurbulenceParams& params, std::span<const std::complex<double>> delta_s,
                   std::uint64_t trials, const RngStream& rng, int workers = 1);

/// F_N(r) = C_r^N r^{2N} / N!. Throws DomainError for r < 0, N < 1 or when
/// the value exceeds 0.1 (outside the small-radius regime).
double effective_cdf(double r, int n, const CrValue& cr);

/// f_N(r) = 2 C_r^N r^{2N-1} / (N-1)!.
double effective_pdf(double r, int n, const CrValue& cr);

/// C_r^N Γ(N+½) / (2√π N!) · snr^{-N}.
double pep_asymptote(const CrValue& cr, int n, double snr);

/// coefficient · snr^{-slope}.
class AsymptoteModel {
 public:
  AsymptoteModel(double coefficient, int slope);

  double coefficient() const noexcept { return coefficient_; }
  int slope() const noexcept { return slope_; }

  double evaluate(double snr) const;
  double evaluate_db(double snr_db) const { return evaluate(numerics::db_to_linear(snr_db)); }
  /// Linear SNR at which the line reaches `ber`.
  double snr_at(double ber) const;

 private:
  double coefficient_;
  int slope_;
};

/// Asymptotic BER line for 2-Tx BPSK with N receivers.
AsymptoteModel ber_asymptote(const CrValue& cr, int n);

struct BerBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// lower = P(11→00) asymptote; upper adds both single-error PEPs, each equal
/// to `pep_single_error` by symmetry and weighted by ½ bit.
BerBounds ber_bounds_bpsk_2tx(const CrValue& cr, int n, double snr, double pep_single_error);

struct SlopeFit {
  double fitted_slope = 0.0;  ///< d log10(BER) / d log10(SNR)
  double intercept = 0.0;
  double window_low_db = 0.0;
  double window_high_db = 0.0;
  double residual_rms = 0.0;
  std::size_t points = 0;

  double diversity() const noexcept { return -fitted_slope; }
};

/// Least-squares slope of log10(value) against log10(snr) over the points
/// with snr_db in [low_db, high_db] and value > 0. Throws DomainError with
/// fewer than three usable points.
SlopeFit fit_log_log_slope(std::span<const double> snr_db, std::span<const double> values,
                           double low_db, double high_db);

/// Same fit on a simulated curve, using only points with at least
/// `min_errors` bit errors.
SlopeFit fit_diversity_slope(const BerCurve& curve, double low_db, double high_db,
                             std::uint64_t min_errors = 100);

/// SNR window (dB) of the reliable points (≥ min_errors errors) whose BER
/// lies within one decade of the lowest reliable BER. Throws DomainError
/// when the curve has no reliable point.
std::pair<double, double> top_converged_decade(const BerCurve& curve,
                                               std::uint64_t min_errors = 100);

}  // namespace turbosim
