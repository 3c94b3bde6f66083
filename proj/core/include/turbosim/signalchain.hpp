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

// Constellations, space-time schemes, the AWGN link y = Hs + n and
// maximum-likelihood detection.

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "turbosim/channel.hpp"
#include "turbosim/rng.hpp"

namespace turbosim {

enum class ModulationKind { kPsk, kQam };
enum class SchemeKind { kVblast, kAstbc, kSiso };
enum class PowerNormalization { kPerAntenna, kTotal };

std::string to_string(ModulationKind kind);
std::string to_string(SchemeKind kind);
std::string to_string(PowerNormalization p);
ModulationKind parse_modulation(std::string_view text);
SchemeKind parse_scheme_kind(std::string_view text);
PowerNormalization parse_power_normalization(std::string_view text);

/// Unit-average-energy signal set. Points are stored by bit label, so
/// `point(label)` is the symbol transmitted for that label. Labels are
/// binary-reflected Gray codes: along the circle for PSK, per axis for
/// square QAM. PSK starts at -1 so that BPSK maps bit 1 to +1.
class Constellation {
 public:
  /// PSK: any power of two q ≥ 2. QAM: q ∈ {2, 4, 16, 64, 256, 1024, 4096};
  /// QAM with q = 2 is BPSK. Throws DomainError otherwise.
  static Constellation build(ModulationKind kind, int q);

  ModulationKind kind() const noexcept { return kind_; }
  int size() const noexcept { return q_; }
  int bits_per_symbol() const noexcept { return bits_; }

  std::complex<double> point(std::uint32_t label) const { return points_[label]; }
  const std::vector<std::complex<double>>& points() const noexcept { return points_; }
  std::string bit_label(std::uint32_t label) const;

  /// Label of the minimum-distance point (O(1) slicer).
  std::uint32_t nearest(std::complex<double> z) const noexcept;

  friend bool operator==(const Constellation& a, const Constellation& b) {
    return a.kind_ == b.kind_ && a.q_ == b.q_;
  }

 private:
  Constellation() = default;

  ModulationKind kind_ = ModulationKind::kPsk;
  int q_ = 0;
  int bits_ = 0;
  bool circular_ = true;  // PSK geometry (also used for 2-QAM)
  int side_ = 0;          // square QAM: points per axis
  double scale_ = 1.0;    // square QAM: integer grid -> unit energy divisor
  std::vector<std::complex<double>> points_;
  std::vector<std::uint32_t> gray_;  // level/position index -> Gray code
};

/// Transmission scheme: V-BLAST spatial multiplexing, 2×N Alamouti
/// (A-STBC) or SISO.
class SchemeConfig {
 public:
  /// Throws DomainError when the antenna counts do not suit `kind`.
  SchemeConfig(SchemeKind kind, int transmitters, int receivers, Constellation constellation,
               PowerNormalization power = PowerNormalization::kPerAntenna);

  SchemeKind kind() const noexcept { return kind_; }
  int transmitters() const noexcept { return transmitters_; }
  int receivers() const noexcept { return receivers_; }
  const Constellation& constellation() const noexcept { return constellation_; }
  PowerNormalization power() const noexcept { return power_; }

  /// Time slots per codeword block (T).
  int slots() const noexcept { return kind_ == SchemeKind::kAstbc ? 2 : 1; }
  /// Source symbols per block.
  int symbols_per_block() const noexcept;
  int bits_per_block() const noexcept { return symbols_per_block() * constellation_.bits_per_symbol(); }
  double bits_per_channel_use() const noexcept {
    return static_cast<double>(bits_per_block()) / slots();
  }
  /// Size of the block codebook searched by exhaustive detection.
  std::uint64_t candidate_count() const noexcept;
  /// Per-antenna amplitude: 1, or 1/√M under total-power normalisation.
  double tx_amplitude() const noexcept;

  /// "<KIND>-<MODULATION>", e.g. "VBLAST-PSK".
  std::string name() const;

 private:
  SchemeKind kind_;
  int transmitters_;
  int receivers_;
  Constellation constellation_;
  PowerNormalization power_;
};

/// One space-time codeword: M×T symbol matrix plus the source labels and bits.
struct CodewordBlock {
  Eigen::MatrixXcd symbols;
  std::vector<std::uint32_t> labels;
  std::vector<std::uint8_t> bits;
};

std::vector<std::uint8_t> bits_from_string(std::string_view text);
std::string bits_to_string(std::span<const std::uint8_t> bits);

/// Maps bits (MSB first per symbol) onto a codeword. V-BLAST: M symbols in
/// one column. A-STBC: (s1, s2) -> [[s1, -s2*], [s2, s1*]]. SISO: one symbol.
/// Throws DimensionError on a length mismatch.
CodewordBlock encode(const SchemeConfig& scheme, std::span<const std::uint8_t> bits);

/// Same as encode() but from symbol labels, writing into `out` to reuse storage.
void encode_labels_into(const SchemeConfig& scheme, std::span<const std::uint32_t> labels,
                        CodewordBlock& out);

/// y = a·H·S + n per slot, noise CN(0, 1/snr) per entry, H fixed over the
/// block. `snr` may be +inf for a noiseless link.
Eigen::MatrixXcd transmit(const CodewordBlock& block, const ChannelMatrix& h, double snr,
                          double amplitude, RngStream& rng);
void transmit_into(const CodewordBlock& block, const ChannelMatrix& h, double snr,
                   double amplitude, RngStream& rng, Eigen::MatrixXcd& y);
Eigen::MatrixXcd transmit(const CodewordBlock& block, const ChannelMatrix& h,
                          const SchemeConfig& scheme, double snr, RngStream& rng);

enum class MldMethod {
  kExhaustive,          ///< scan all candidate_count() codewords
  kConditionalSlicing,  ///< exact ML: enumerate antennas 1..M-1, slice the last; A-STBC decouples
  kAuto,                ///< exhaustive up to kAutoExhaustiveLimit candidates
};
inline constexpr std::uint64_t kAutoExhaustiveLimit = 256;

std::string to_string(MldMethod m);
MldMethod parse_mld_method(std::string_view text);

/// Whether kConditionalSlicing applies to this scheme.
bool supports_conditional_slicing(const SchemeConfig& scheme) noexcept;

/// Reusable ML detector; holds per-channel product tables so the hot loop
/// does not allocate.
class MlDetector {
 public:
  MlDetector(const SchemeConfig& scheme, MldMethod method);

  MldMethod method() const noexcept { return method_; }

  /// Detects the codeword in `y` (N×T). Writes one label per source symbol
  /// into `labels` and returns the winning candidate index. Candidates are
  /// enumerated with the first antenna's (or s1's) label as the most
  /// significant digit; ties go to the lowest index.
  std::uint64_t detect(const Eigen::MatrixXcd& y, const ChannelMatrix& h,
                       std::span<std::uint32_t> labels);

  /// ‖y - aHS‖² of the last detection's winner.
  double last_metric() const noexcept { return last_metric_; }
  /// Metric evaluations performed since construction.
  std::uint64_t evaluations() const noexcept { return evaluations_; }

 private:
  std::uint64_t detect_vblast_exhaustive(const Eigen::MatrixXcd& y, const ChannelMatrix& h,
                                         std::span<std::uint32_t> labels);
  std::uint64_t detect_vblast_slicing(const Eigen::MatrixXcd& y, const ChannelMatrix& h,
                                      std::span<std::uint32_t> labels);
  std::uint64_t detect_astbc_exhaustive(const Eigen::MatrixXcd& y, const ChannelMatrix& h,
                                        std::span<std::uint32_t> labels);
  std::uint64_t detect_astbc_slicing(const Eigen::MatrixXcd& y, const ChannelMatrix& h,
                                     std::span<std::uint32_t> labels);
  void check_dims(const Eigen::MatrixXcd& y, const ChannelMatrix& h) const;

  SchemeConfig scheme_;
  MldMethod method_;
  std::vector<std::complex<double>> products_;
  std::vector<std::uint32_t> digits_;
  double last_metric_ = 0.0;
  std::uint64_t evaluations_ = 0;
};

struct Detection {
  CodewordBlock block;
  std::uint64_t candidate_index = 0;
  double metric = 0.0;
  std::uint64_t metric_evaluations = 0;
};

/// argmin over the scheme's codebook of Σ_t ‖y_t - a·H·s_t‖², assuming
/// perfect channel knowledge. Throws DimensionError on shape mismatch.
Detection mld_detect(const Eigen::MatrixXcd& y, const ChannelMatrix& h,
                     const SchemeConfig& scheme, MldMethod method = MldMethod::kExhaustive);

/// Hamming distance between the source bits of two blocks.
std::size_t count_bit_errors(const CodewordBlock& sent, const CodewordBlock& detected);

/// Hamming distance between label sequences (same value as count_bit_errors
/// for blocks carrying these labels).
std::size_t label_bit_errors(std::span<const std::uint32_t> sent,
                             std::span<const std::uint32_t> detected) noexcept;

}  // namespace turbosim
