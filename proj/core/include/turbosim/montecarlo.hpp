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

// Deterministic Monte-Carlo estimators: BER curves, pairwise error events,
// effective-radius cdf, ergodic capacity and FEC-limited throughput.

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "turbosim/channel.hpp"
#include "turbosim/curve.hpp"
#include "turbosim/rng.hpp"
#include "turbosim/signalchain.hpp"

namespace turbosim {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);

struct SimConfig {
  SchemeConfig scheme;
  TurbulenceParams params;
  std::vector<double> snr_grid_db;
  std::uint64_t max_trials = 10'000'000;
  std::uint64_t min_bit_errors = 100;
  std::uint64_t seed = 1;
  int workers = 1;
  /// Trials per RNG block. Part of the result's identity, unlike `workers`.
  std::uint64_t block_trials = 4096;
  MldMethod detector = MldMethod::kAuto;
  /// Debug path: every irradiance fixed at 1.
  bool unit_irradiance = false;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Canonical text of every result-affecting field (workers excluded).
  std::string canonical() const;
  std::uint64_t fingerprint() const { return fnv1a64(canonical()); }
};

/// Simulates grid point `index` of `config`.
BerPoint simulate_ber_point(const SimConfig& config, std::size_t index);

/// Per point: sample channel, draw random bits, encode, transmit, detect and
/// count bit errors, until min_bit_errors or max_trials. The result depends
/// only on the config and seed, never on `workers`.
BerCurve simulate_ber(const SimConfig& config);

enum class PepForm {
  kPairwiseMetric,  ///< ‖y - aHS‖² > ‖y - aHS'‖² with y = aHS + n
  kProjectedNoise,  ///< real n ~ N(0, 1/(2 snr)) exceeds ½‖aH(S - S')‖
};

struct PepEstimate {
  double snr_db = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t events = 0;
  double probability = 0.0;
  double std_error = 0.0;
};

/// Frequency of the pairwise event "target beats sent" at every grid SNR,
/// `trials` channel draws per point. Throws DomainError if the blocks are
/// identical.
std::vector<PepEstimate> estimate_pep(const SimConfig& config, const CodewordBlock& sent,
                                      const CodewordBlock& target, std::uint64_t trials,
                                      PepForm form = PepForm::kPairwiseMetric);

enum class CdfEstimator {
  kDirect,       ///< count ½‖HΔs‖ < r per channel draw
  kCrossPaired,  ///< pair rows 1..N-1 of draw i with row N of draw j ≠ i
  kAuto,         ///< direct for N = 1, cross-paired otherwise
};

/// Empirical P{½‖HΔs‖ < r} for each r in `r_grid`, over `trials` N×M channel
/// draws. Rows of H are i.i.d., so the cross-paired estimator is unbiased
/// and has far lower variance in the small-r tail than direct counting.
std::vector<double> empirical_effective_cdf(const TurbulenceParams& params,
                                            std::span<const std::complex<double>> delta_s,
                                            int receivers, std::span<const double> r_grid,
                                            std::uint64_t trials, const RngStream& rng,
                                            int workers = 1,
                                            CdfEstimator estimator = CdfEstimator::kAuto);

struct CapacityEstimate {
  double bits = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
};

/// Mean of log2 det(I_N + snr·p·HH†) with p = 1 (per-antenna) or 1/M (total).
/// Throws DomainError for trials < 10⁴ or snr < 0.
CapacityEstimate estimate_capacity(const TurbulenceParams& params, int transmitters, int receivers,
                                   double snr, std::uint64_t trials, const RngStream& rng,
                                   int workers = 1,
                                   PowerNormalization power = PowerNormalization::kPerAntenna,
                                   bool unit_irradiance = false);

/// Schemes of one family ordered by increasing rate.
struct Ladder {
  std::string name;
  std::vector<SchemeConfig> rungs;
};

/// V-BLAST q-QAM, A-STBC q^M-QAM and SISO ladders for throughput
/// comparisons, V-BLAST and A-STBC matched in bits per channel use.
std::vector<Ladder> standard_ladders(int transmitters, int receivers,
                                     PowerNormalization power = PowerNormalization::kPerAntenna);

struct ThroughputConfig {
  TurbulenceParams params;
  std::vector<double> snr_grid_db;
  double fec = 1e-3;
  std::uint64_t max_trials = 200'000;
  std::uint64_t min_bit_errors = 100;
  std::uint64_t seed = 1;
  int workers = 1;
  std::uint64_t block_trials = 1024;
  MldMethod detector = MldMethod::kAuto;

  void validate() const;
};

struct RungResult {
  std::string label;  ///< e.g. "16-QAM"
  double bits_per_use = 0.0;
  /// One entry per grid point; empty where the outcome was implied by
  /// monotonicity and no simulation ran.
  std::vector<std::optional<BerPoint>> points;
  std::vector<bool> pass;
  /// SNR (dB) where the BER crosses `fec`, log-linear between the bracketing
  /// simulated points; empty if the rung never passes or passes everywhere.
  std::optional<double> threshold_db;
};

struct ThroughputCurve {
  std::string name;
  std::vector<double> snr_db;
  std::vector<double> bits_per_use;  ///< best passing rung, 0 when none pass
  std::vector<RungResult> rungs;
};

/// At every SNR, the rate of the largest rung whose simulated BER ≤ fec.
/// A rung is not simulated where the next lower rung already fails, nor
/// once the upper end of its BER interval has dropped to fec/10.
std::vector<ThroughputCurve> throughput_at_fec(const std::vector<Ladder>& ladders,
                                               const ThroughputConfig& config);

/// First SNR where `high` overtakes `low` on the polylines through each
/// family's (threshold_db, bits_per_use) points.
std::optional<double> locate_crossover(const ThroughputCurve& low, const ThroughputCurve& high);

}  // namespace turbosim
