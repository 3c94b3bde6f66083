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

#include "turbosim/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "turbosim/errors.hpp"
#include "turbosim/numerics.hpp"

namespace turbosim {

TurbulenceParams::TurbulenceParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!std::isfinite(alpha) || !(alpha > 0.0)) {
    throw DomainError("turbulence: alpha must be positive and finite, got " + std::to_string(alpha));
  }
  if (!std::isfinite(beta) || !(beta > 0.0)) {
    throw DomainError("turbulence: beta must be positive and finite, got " + std::to_string(beta));
  }
}

double TurbulenceParams::scintillation_index() const noexcept {
  return 1.0 / alpha_ + 1.0 / beta_ + 1.0 / (alpha_ * beta_);
}

GammaGammaPdf::GammaGammaPdf(const TurbulenceParams& params)
    : alpha_beta_(params.alpha() * params.beta()),
      order_(params.alpha() - params.beta()),
      exponent_(0.5 * (params.alpha() + params.beta()) - 1.0) {
  log_norm_ = std::numbers::ln2 - numerics::ln_gamma(params.alpha()) -
              numerics::ln_gamma(params.beta()) +
              0.5 * (params.alpha() + params.beta()) * std::log(alpha_beta_);
}

double GammaGammaPdf::operator()(double irradiance) const {
  if (!(irradiance > 0.0)) {
    throw DomainError("gg_pdf: irradiance must be positive, got " + std::to_string(irradiance));
  }
  const double z = 2.0 * std::sqrt(alpha_beta_ * irradiance);
  // K_ν(z) < 1e-300 past this point; the density is zero to double precision.
  if (z > 690.0) return 0.0;
  return std::exp(log_norm_ + exponent_ * std::log(irradiance)) * numerics::bessel_k(order_, z);
}

double gg_pdf(const TurbulenceParams& params, double irradiance) {
  return GammaGammaPdf(params)(irradiance);
}

GammaGammaSampler::GammaGammaSampler(const TurbulenceParams& params)
    : large_(params.alpha(), 1.0 / params.alpha()), small_(params.beta(), 1.0 / params.beta()) {}

double gg_sample(const TurbulenceParams& params, RngStream& rng) {
  return GammaGammaSampler(params)(rng);
}

ChannelMatrix::ChannelMatrix(int receivers, int transmitters) {
  if (receivers < 1 || transmitters < 1) {
    throw DimensionError("channel matrix needs at least one receiver and one transmitter");
  }
  gains_ = Eigen::MatrixXcd::Zero(receivers, transmitters);
  irradiance_ = Eigen::MatrixXd::Zero(receivers, transmitters);
}

void ChannelMatrix::set(int n, int m, double irradiance, std::complex<double> phasor) {
  if (!std::isfinite(irradiance) || irradiance < 0.0) {
    throw DomainError("channel entry irradiance must be finite and non-negative");
  }
  irradiance_(n, m) = irradiance;
  gains_(n, m) = std::sqrt(irradiance) * phasor;
}

ChannelMatrix ChannelMatrix::from_gains(const Eigen::MatrixXcd& gains) {
  ChannelMatrix h(static_cast<int>(gains.rows()), static_cast<int>(gains.cols()));
  if (!gains.allFinite()) throw DomainError("channel gains must be finite");
  h.gains_ = gains;
  h.irradiance_ = gains.cwiseAbs2();
  return h;
}

void sample_channel_into(ChannelMatrix& out, const GammaGammaSampler& sampler, RngStream& rng) {
  for (int n = 0; n < out.receivers(); ++n) {
    for (int m = 0; m < out.transmitters(); ++m) {
      const double irradiance = sampler(rng);
      out.set(n, m, irradiance, rng.unit_phasor());
    }
  }
}

void sample_unit_channel_into(ChannelMatrix& out, RngStream& rng) {
  for (int n = 0; n < out.receivers(); ++n) {
    for (int m = 0; m < out.transmitters(); ++m) out.set(n, m, 1.0, rng.unit_phasor());
  }
}

ChannelMatrix sample_channel(int transmitters, int receivers, const TurbulenceParams& params,
                             RngStream& rng) {
  ChannelMatrix h(receivers, transmitters);
  sample_channel_into(h, GammaGammaSampler(params), rng);
  return h;
}

double snr_from_physical(const PhysicalLinkParams& link) {
  const double fields[] = {link.symbol_period_s, link.responsivity_a_per_w,
                           link.mean_irradiance_w_m2, link.photon_energy_j};
  for (double v : fields) {
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw DomainError("physical link parameters must all be positive and finite");
    }
  }
  return 2.0 * link.symbol_period_s * link.responsivity_a_per_w * link.mean_irradiance_w_m2 /
         link.photon_energy_j;
}

}  // namespace turbosim
