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

// Gamma-Gamma irradiance model and random MIMO channel matrices.

#pragma once

#include <complex>

#include <Eigen/Core>

#include "turbosim/rng.hpp"

namespace turbosim {

/// Effective eddy counts (α large-scale, β small-scale) of the Gamma-Gamma law.
class TurbulenceParams {
 public:
  /// Throws DomainError unless both values are finite and positive.
  TurbulenceParams(double alpha, double beta);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

  /// Scintillation index E[I²] - 1 = 1/α + 1/β + 1/(αβ).
  double scintillation_index() const noexcept;

  friend bool operator==(const TurbulenceParams&, const TurbulenceParams&) = default;

 private:
  double alpha_;
  double beta_;
};

/// Unit-mean Gamma-Gamma irradiance density
///   f(I) = 2 (αβ)^{(α+β)/2} I^{(α+β)/2-1} K_{α-β}(2√(αβI)) / (Γ(α)Γ(β)).
/// Caches the log normalisation so repeated evaluation is cheap.
class GammaGammaPdf {
 public:
  explicit GammaGammaPdf(const TurbulenceParams& params);

  /// Throws DomainError for irradiance <= 0.
  double operator()(double irradiance) const;

 private:
  double alpha_beta_;
  double order_;
  double exponent_;
  double log_norm_;
};

double gg_pdf(const TurbulenceParams& params, double irradiance);

/// Draws I = X·Y with X ~ Gamma(α, 1/α) and Y ~ Gamma(β, 1/β).
class GammaGammaSampler {
 public:
  explicit GammaGammaSampler(const TurbulenceParams& params);

  double operator()(RngStream& rng) const noexcept { return large_(rng) * small_(rng); }

 private:
  GammaSampler large_;
  GammaSampler small_;
};

double gg_sample(const TurbulenceParams& params, RngStream& rng);

/// N×M complex channel gains h_nm = √I_nm e^{jΔφ_nm}; rows index receive
/// apertures, columns transmit apertures.
class ChannelMatrix {
 public:
  ChannelMatrix() = default;
  ChannelMatrix(int receivers, int transmitters);

  int receivers() const noexcept { return static_cast<int>(gains_.rows()); }
  int transmitters() const noexcept { return static_cast<int>(gains_.cols()); }

  const Eigen::MatrixXcd& gains() const noexcept { return gains_; }
  std::complex<double> operator()(int n, int m) const { return gains_(n, m); }
  double irradiance(int n, int m) const { return irradiance_(n, m); }

  /// Sets entry (n, m) from its irradiance and phase. Throws DomainError
  /// for negative or non-finite irradiance.
  void set(int n, int m, double irradiance, std::complex<double> phasor);

  /// Builds a matrix from raw gains (irradiance = |h|²). Used by tests and
  /// by callers that scale or rotate a sampled channel.
  static ChannelMatrix from_gains(const Eigen::MatrixXcd& gains);

 private:
  Eigen::MatrixXcd gains_;
  Eigen::MatrixXd irradiance_;
};

/// Fills `out` (already shaped N×M) with i.i.d. Gamma-Gamma magnitudes and
/// uniform phases. Draw order: row-major, irradiance then phase per entry.
void sample_channel_into(ChannelMatrix& out, const GammaGammaSampler& sampler, RngStream& rng);

/// Same, with every irradiance frozen at 1 (phases still random). Debug path
/// for checks against the scalar AWGN channel.
void sample_unit_channel_into(ChannelMatrix& out, RngStream& rng);

ChannelMatrix sample_channel(int transmitters, int receivers, const TurbulenceParams& params,
                             RngStream& rng);

struct PhysicalLinkParams {
  double symbol_period_s;         ///< T_b
  double responsivity_a_per_w;    ///< R_oe
  double mean_irradiance_w_m2;    ///< Ī_s
  double photon_energy_j;         ///< hν
};

/// Linear receiver SNR 2·T_b·R_oe·Ī_s/(hν).
double snr_from_physical(const PhysicalLinkParams& link);

}  // namespace turbosim
