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

#include "turbosim/signalchain.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "turbosim/errors.hpp"

namespace turbosim {

namespace {

std::string lowercase(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

constexpr std::uint32_t gray(std::uint32_t k) noexcept { return k ^ (k >> 1); }

bool is_power_of_two(int q) { return q > 0 && std::has_single_bit(static_cast<unsigned>(q)); }

}  // namespace

std::string to_string(ModulationKind kind) { return kind == ModulationKind::kPsk ? "PSK" : "QAM"; }

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kVblast: return "VBLAST";
    case SchemeKind::kAstbc: return "ASTBC";
    case SchemeKind::kSiso: return "SISO";
  }
  return "?";
}

std::string to_string(PowerNormalization p) {
  return p == PowerNormalization::kPerAntenna ? "per-antenna" : "total";
}

std::string to_string(MldMethod m) {
  switch (m) {
    case MldMethod::kExhaustive: return "exhaustive";
    case MldMethod::kConditionalSlicing: return "slicing";
    case MldMethod::kAuto: return "auto";
  }
  return "?";
}

ModulationKind parse_modulation(std::string_view text) {
  const std::string t = lowercase(text);
  if (t == "psk" || t == "bpsk") return ModulationKind::kPsk;
  if (t == "qam") return ModulationKind::kQam;
  throw ConfigError("modulation", "expected PSK or QAM, got '" + std::string(text) + "'");
}

SchemeKind parse_scheme_kind(std::string_view text) {
  const std::string t = lowercase(text);
  if (t == "vblast" || t == "v-blast") return SchemeKind::kVblast;
  if (t == "astbc" || t == "a-stbc" || t == "alamouti") return SchemeKind::kAstbc;
  if (t == "siso") return SchemeKind::kSiso;
  throw ConfigError("scheme", "expected VBLAST, ASTBC or SISO, got '" + std::string(text) + "'");
}

PowerNormalization parse_power_normalization(std::string_view text) {
  const std::string t = lowercase(text);
  if (t == "per-antenna" || t == "per_antenna") return PowerNormalization::kPerAntenna;
  if (t == "total") return PowerNormalization::kTotal;
  throw ConfigError("power_normalization",
                    "expected per-antenna or total, got '" + std::string(text) + "'");
}

MldMethod parse_mld_method(std::string_view text) {
  const std::string t = lowercase(text);
  if (t == "exhaustive") return MldMethod::kExhaustive;
  if (t == "slicing" || t == "conditional-slicing") return MldMethod::kConditionalSlicing;
  if (t == "auto") return MldMethod::kAuto;
  throw ConfigError("detector", "expected exhaustive, slicing or auto, got '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Constellation

Constellation Constellation::build(ModulationKind kind, int q) {
  if (!is_power_of_two(q) || q < 2) {
    throw DomainError("constellation size must be a power of two >= 2, got " + std::to_string(q));
  }
  const int bits = std::countr_zero(static_cast<unsigned>(q));
  if (kind == ModulationKind::kQam && q != 2 && (bits % 2 != 0 || q > 4096)) {
    throw DomainError("square QAM supports q in {2, 4, 16, 64, 256, 1024, 4096}, got " +
                      std::to_string(q));
  }
  if (bits > 24) throw DomainError("constellation size too large: " + std::to_string(q));

  Constellation c;
  c.kind_ = kind;
  c.q_ = q;
  c.bits_ = bits;
  c.points_.assign(static_cast<std::size_t>(q), {});
  c.circular_ = kind == ModulationKind::kPsk || q == 2;
  if (c.circular_) {
    c.gray_.resize(static_cast<std::size_t>(q));
    for (int k = 0; k < q; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / q + std::numbers::pi;
      const std::uint32_t label = gray(static_cast<std::uint32_t>(k));
      c.gray_[static_cast<std::size_t>(k)] = label;
      // Exact values on the axes so BPSK and QPSK carry no rounding residue.
      std::complex<double> p{std::cos(angle), std::sin(angle)};
      if (std::abs(p.real()) < 1e-15) p.real(0.0);
      if (std::abs(p.imag()) < 1e-15) p.imag(0.0);
      c.points_[label] = p;
    }
  } else {
    const int side = 1 << (bits / 2);
    c.side_ = side;
    c.scale_ = std::sqrt(2.0 * (q - 1) / 3.0);
    c.gray_.resize(static_cast<std::size_t>(side));
    for (int i = 0; i < side; ++i) c.gray_[static_cast<std::size_t>(i)] = gray(static_cast<std::uint32_t>(i));
    for (int ix = 0; ix < side; ++ix) {
      for (int iy = 0; iy < side; ++iy) {
        const std::uint32_t label = (c.gray_[static_cast<std::size_t>(ix)] << (bits / 2)) |
                                    c.gray_[static_cast<std::size_t>(iy)];
        c.points_[label] = {(2.0 * ix - (side - 1)) / c.scale_, (2.0 * iy - (side - 1)) / c.scale_};
      }
    }
  }
  return c;
}

std::string Constellation::bit_label(std::uint32_t label) const {
  std::string s(static_cast<std::size_t>(bits_), '0');
  for (int b = 0; b < bits_; ++b) {
    if ((label >> (bits_ - 1 - b)) & 1u) s[static_cast<std::size_t>(b)] = '1';
  }
  return s;
}

std::uint32_t Constellation::nearest(std::complex<double> z) const noexcept {
  if (circular_) {
    if (q_ == 2) return z.real() >= 0.0 ? 1u : 0u;
    const double turns = (std::arg(z) - std::numbers::pi) * q_ / (2.0 * std::numbers::pi);
    long k = std::lround(turns) % q_;
    if (k < 0) k += q_;
    return gray_[static_cast<std::size_t>(k)];
  }
  const auto axis = [this](double v) {
    const long i = std::lround((v * scale_ + (side_ - 1)) * 0.5);
    return gray_[static_cast<std::size_t>(std::clamp(i, 0L, static_cast<long>(side_ - 1)))];
  };
  return (axis(z.real()) << (bits_ / 2)) | axis(z.imag());
}

// ---------------------------------------------------------------------------
// SchemeConfig

SchemeConfig::SchemeConfig(SchemeKind kind, int transmitters, int receivers,
                           Constellation constellation, PowerNormalization power)
    : kind_(kind),
      transmitters_(transmitters),
      receivers_(receivers),
      constellation_(std::move(constellation)),
      power_(power) {
  if (transmitters < 1 || receivers < 1) {
    throw DomainError("scheme needs M >= 1 and N >= 1");
  }
  if (kind == SchemeKind::kAstbc && transmitters != 2) {
    throw DomainError("ASTBC requires M = 2, got M = " + std::to_string(transmitters));
  }
  if (kind == SchemeKind::kSiso && (transmitters != 1 || receivers != 1)) {
    throw DomainError("SISO requires M = N = 1");
  }
  if (static_cast<double>(transmitters) * constellation_.bits_per_symbol() > 63.0) {
    throw DomainError("codebook too large: M*log2(q) must not exceed 63");
  }
}

int SchemeConfig::symbols_per_block() const noexcept {
  return kind_ == SchemeKind::kAstbc ? 2 : transmitters_;
}

std::uint64_t SchemeConfig::candidate_count() const noexcept {
  return std::uint64_t{1} << (symbols_per_block() * constellation_.bits_per_symbol());
}

double SchemeConfig::tx_amplitude() const noexcept {
  return power_ == PowerNormalization::kTotal ? 1.0 / std::sqrt(static_cast<double>(transmitters_))
                                              : 1.0;
}

std::string SchemeConfig::name() const { return to_string(kind_) + "-" + to_string(constellation_.kind()); }

// ---------------------------------------------------------------------------
// Encoding and transmission

std::vector<std::uint8_t> bits_from_string(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c == '0' || c == '1') {
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    } else {
      throw DomainError("bit string may only contain '0' and '1'");
    }
  }
  return bits;
}

std::string bits_to_string(std::span<const std::uint8_t> bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

void encode_labels_into(const SchemeConfig& scheme, std::span<const std::uint32_t> labels,
                        CodewordBlock& out) {
  const int k = scheme.symbols_per_block();
  if (labels.size() != static_cast<std::size_t>(k)) {
    throw DimensionError("encode: expected " + std::to_string(k) + " symbols, got " +
                         std::to_string(labels.size()));
  }
  const Constellation& c = scheme.constellation();
  const int b = c.bits_per_symbol();
  out.labels.assign(labels.begin(), labels.end());
  out.bits.resize(static_cast<std::size_t>(k * b));
  for (int i = 0; i < k; ++i) {
    if (labels[static_cast<std::size_t>(i)] >= static_cast<std::uint32_t>(c.size())) {
      throw DomainError("encode: symbol label out of range");
    }
    for (int j = 0; j < b; ++j) {
      out.bits[static_cast<std::size_t>(i * b + j)] =
          static_cast<std::uint8_t>((labels[static_cast<std::size_t>(i)] >> (b - 1 - j)) & 1u);
    }
  }
  const int m = scheme.transmitters();
  if (scheme.kind() == SchemeKind::kAstbc) {
    const auto s1 = c.point(labels[0]);
    const auto s2 = c.point(labels[1]);
    out.symbols.resize(2, 2);
    out.symbols(0, 0) = s1;
    out.symbols(1, 0) = s2;
    out.symbols(0, 1) = -std::conj(s2);
    out.symbols(1, 1) = std::conj(s1);
  } else {
    out.symbols.resize(m, 1);
    for (int i = 0; i < m; ++i) out.symbols(i, 0) = c.point(labels[static_cast<std::size_t>(i)]);
  }
}

CodewordBlock encode(const SchemeConfig& scheme, std::span<const std::uint8_t> bits) {
  const int k = scheme.symbols_per_block();
  const int b = scheme.constellation().bits_per_symbol();
  if (bits.size() != static_cast<std::size_t>(k * b)) {
    throw DimensionError("encode: scheme " + scheme.name() + " takes " + std::to_string(k * b) +
                         " bits per block, got " + std::to_string(bits.size()));
  }
  std::vector<std::uint32_t> labels(static_cast<std::size_t>(k), 0u);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < b; ++j) {
      const auto bit = bits[static_cast<std::size_t>(i * b + j)];
      if (bit > 1) throw DomainError("encode: bits must be 0 or 1");
      labels[static_cast<std::size_t>(i)] = (labels[static_cast<std::size_t>(i)] << 1) | bit;
    }
  }
  CodewordBlock block;
  encode_labels_into(scheme, labels, block);
  return block;
}

void transmit_into(const CodewordBlock& block, const ChannelMatrix& h, double snr,
                   double amplitude, RngStream& rng, Eigen::MatrixXcd& y) {
  if (block.symbols.rows() != h.transmitters()) {
    throw DimensionError("transmit: channel has " + std::to_string(h.transmitters()) +
                         " transmit apertures, block has " + std::to_string(block.symbols.rows()));
  }
  if (!(snr > 0.0)) throw DomainError("transmit: snr must be positive");
  y.noalias() = amplitude * (h.gains() * block.symbols);
  if (std::isinf(snr)) return;
  const double variance = 1.0 / snr;
  for (Eigen::Index t = 0; t < y.cols(); ++t) {
    for (Eigen::Index n = 0; n < y.rows(); ++n) y(n, t) += rng.complex_normal(variance);
  }
}

Eigen::MatrixXcd transmit(const CodewordBlock& block, const ChannelMatrix& h, double snr,
                          double amplitude, RngStream& rng) {
  Eigen::MatrixXcd y;
  transmit_into(block, h, snr, amplitude, rng, y);
  return y;
}

Eigen::MatrixXcd transmit(const CodewordBlock& block, const ChannelMatrix& h,
                          const SchemeConfig& scheme, double snr, RngStream& rng) {
  return transmit(block, h, snr, scheme.tx_amplitude(), rng);
}

// ---------------------------------------------------------------------------
// Detection

bool supports_conditional_slicing(const SchemeConfig&) noexcept { return true; }

MlDetector::MlDetector(const SchemeConfig& scheme, MldMethod method)
    : scheme_(scheme), method_(method) {
  if (method_ == MldMethod::kAuto) {
    method_ = scheme.candidate_count() <= kAutoExhaustiveLimit ? MldMethod::kExhaustive
                                                               : MldMethod::kConditionalSlicing;
  }
  if (method_ == MldMethod::kExhaustive && scheme.candidate_count() > (std::uint64_t{1} << 32)) {
    throw DomainError("exhaustive detection over " + std::to_string(scheme.candidate_count()) +
                      " candidates is not supported; use slicing");
  }
  const auto q = static_cast<std::size_t>(scheme.constellation().size());
  const auto n = static_cast<std::size_t>(scheme.receivers());
  const auto m = static_cast<std::size_t>(scheme.transmitters());
  products_.resize(scheme.kind() == SchemeKind::kAstbc ? 4 * q * n : m * q * n);
  digits_.resize(m);
}

void MlDetector::check_dims(const Eigen::MatrixXcd& y, const ChannelMatrix& h) const {
  if (h.receivers() != scheme_.receivers() || h.transmitters() != scheme_.transmitters()) {
    throw DimensionError("mld_detect: channel is " + std::to_string(h.receivers()) + "x" +
                         std::to_string(h.transmitters()) + ", scheme expects " +
                         std::to_string(scheme_.receivers()) + "x" +
                         std::to_string(scheme_.transmitters()));
  }
  if (y.rows() != scheme_.receivers() || y.cols() != scheme_.slots()) {
    throw DimensionError("mld_detect: received block must be " + std::to_string(scheme_.receivers()) +
                         "x" + std::to_string(scheme_.slots()));
  }
}

std::uint64_t MlDetector::detect(const Eigen::MatrixXcd& y, const ChannelMatrix& h,
                                 std::span<std::uint32_t> labels) {
  check_dims(y, h);
  if (labels.size() != static_cast<std::size_t>(scheme_.symbols_per_block())) {
    throw DimensionError("mld_detect: label buffer has the wrong size");
  }
  if (scheme_.kind() == SchemeKind::kAstbc) {
    return method_ == MldMethod::kExhaustive ? detect_astbc_exhaustive(y, h, labels)
                                             : detect_astbc_slicing(y, h, labels);
  }
  return method_ == MldMethod::kExhaustive ? detect_vblast_exhaustive(y, h, labels)
                                           : detect_vblast_slicing(y, h, labels);
}

// products_[(m*q + l)*N + n] = a·h_nm·point(l)
std::uint64_t MlDetector::detect_vblast_exhaustive(const Eigen::MatrixXcd& y,
                                                   const ChannelMatrix& h,
                                                   std::span<std::uint32_t> labels) {
  const Constellation& c = scheme_.constellation();
  const int q = c.size();
  const int nr = scheme_.receivers();
  const int mt = scheme_.transmitters();
  const double a = scheme_.tx_amplitude();
  for (int m = 0; m < mt; ++m) {
    for (int l = 0; l < q; ++l) {
      const auto s = a * c.point(static_cast<std::uint32_t>(l));
      for (int n = 0; n < nr; ++n) {
        products_[static_cast<std::size_t>((m * q + l) * nr + n)] = h(n, m) * s;
      }
    }
  }
  std::fill(digits_.begin(), digits_.end(), 0u);
  const std::uint64_t total = scheme_.candidate_count();
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t best_index = 0;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    double metric = 0.0;
    for (int n = 0; n < nr; ++n) {
      std::complex<double> r = y(n, 0);
      for (int m = 0; m < mt; ++m) {
        r -= products_[static_cast<std::size_t>((m * q + static_cast<int>(digits_[static_cast<std::size_t>(m)])) * nr + n)];
      }
      metric += std::norm(r);
    }
    if (metric < best) {
      best = metric;
      best_index = idx;
    }
    // Odometer with antenna 0 as the most significant digit.
    for (int m = mt - 1; m >= 0; --m) {
      auto& d = digits_[static_cast<std::size_t>(m)];
      if (++d < static_cast<std::uint32_t>(q)) break;
      d = 0;
    }
  }
  evaluations_ += total;
  last_metric_ = best;
  std::uint64_t rest = best_index;
  for (int m = mt - 1; m >= 0; --m) {
    labels[static_cast<std::size_t>(m)] = static_cast<std::uint32_t>(rest % static_cast<std::uint64_t>(q));
    rest /= static_cast<std::uint64_t>(q);
  }
  return best_index;
}

// Exact ML: for fixed labels on antennas 0..M-2 the metric in the last symbol
// is a²‖h_last‖²·|z - s|² plus a constant, so the best s is the nearest point to z.
std::uint64_t MlDetector::detect_vblast_slicing(const Eigen::MatrixXcd& y, const ChannelMatrix& h,
                                                std::span<std::uint32_t> labels) {
  const Constellation& c = scheme_.constellation();
  const int q = c.size();
  const int nr = scheme_.receivers();
  const int mt = scheme_.transmitters();
  const int last = mt - 1;
  const double a = scheme_.tx_amplitude();
  double gain = 0.0;
  for (int n = 0; n < nr; ++n) gain += std::norm(h(n, last));
  if (!(gain > 0.0)) return detect_vblast_exhaustive(y, h, labels);

  for (int m = 0; m < last; ++m) {
    for (int l = 0; l < q; ++l) {
      const auto s = a * c.point(static_cast<std::uint32_t>(l));
      for (int n = 0; n < nr; ++n) {
        products_[static_cast<std::size_t>((m * q + l) * nr + n)] = h(n, m) * s;
      }
    }
  }
  std::fill(digits_.begin(), digits_.end(), 0u);
  std::uint64_t outer = 1;
  for (int m = 0; m < last; ++m) outer *= static_cast<std::uint64_t>(q);
  const double inv = 1.0 / (a * gain);

  double best = std::numeric_limits<double>::infinity();
  std::uint64_t best_index = 0;
  std::complex<double> residual[64];
  std::vector<std::complex<double>> heap_residual;
  std::complex<double>* r = residual;
  if (nr > 64) {
    heap_residual.resize(static_cast<std::size_t>(nr));
    r = heap_residual.data();
  }
  for (std::uint64_t idx = 0; idx < outer; ++idx) {
    std::complex<double> proj{};
    for (int n = 0; n < nr; ++n) {
      std::complex<double> v = y(n, 0);
      for (int m = 0; m < last; ++m) {
        v -= products_[static_cast<std::size_t>((m * q + static_cast<int>(digits_[static_cast<std::size_t>(m)])) * nr + n)];
      }
      r[n] = v;
      proj += std::conj(h(n, last)) * v;
    }
    const std::uint32_t l_last = c.nearest(proj * inv);
    const auto s_last = a * c.point(l_last);
    double metric = 0.0;
    for (int n = 0; n < nr; ++n) metric += std::norm(r[n] - h(n, last) * s_last);
    const std::uint64_t full = idx * static_cast<std::uint64_t>(q) + l_last;
    if (metric < best || (metric == best && full < best_index)) {
      best = metric;
      best_index = full;
    }
    for (int m = last - 1; m >= 0; --m) {
      auto& d = digits_[static_cast<std::size_t>(m)];
      if (++d < static_cast<std::uint32_t>(q)) break;
      d = 0;
    }
  }
  evaluations_ += outer;
  last_metric_ = best;
  std::uint64_t rest = best_index;
  for (int m = mt - 1; m >= 0; --m) {
    labels[static_cast<std::size_t>(m)] = static_cast<std::uint32_t>(rest % static_cast<std::uint64_t>(q));
    rest /= static_cast<std::uint64_t>(q);
  }
  return best_index;
}

// Tables per label l (each N entries): A0 = a·h0·p, A1 = a·h1·p,
// B0 = a·h0·p*, B1 = a·h1·p*. Slot 0 = A0[l1] + A1[l2]; slot 1 = -B0[l2] + B1[l1].
std::uint64_t MlDetector::detect_astbc_exhaustive(const Eigen::MatrixXcd& y, const ChannelMatrix& h,
                                                  std::span<std::uint32_t> labels) {
  const Constellation& c = scheme_.constellation();
  const auto q = static_cast<std::size_t>(c.size());
  const auto nr = static_cast<std::size_t>(scheme_.receivers());
  const double a = scheme_.tx_amplitude();
  const auto at = [&](std::size_t table, std::size_t l, std::size_t n) -> std::complex<double>& {
    return products_[(table * q + l) * nr + n];
  };
  for (std::size_t l = 0; l < q; ++l) {
    const auto p = a * c.point(static_cast<std::uint32_t>(l));
    for (std::size_t n = 0; n < nr; ++n) {
      const auto h0 = h(static_cast<int>(n), 0);
      const auto h1 = h(static_cast<int>(n), 1);
      at(0, l, n) = h0 * p;
      at(1, l, n) = h1 * p;
      at(2, l, n) = h0 * std::conj(p);
      at(3, l, n) = h1 * std::conj(p);
    }
  }
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t best_index = 0;
  for (std::size_t l1 = 0; l1 < q; ++l1) {
    for (std::size_t l2 = 0; l2 < q; ++l2) {
      double metric = 0.0;
      for (std::size_t n = 0; n < nr; ++n) {
        const int ni = static_cast<int>(n);
        metric += std::norm(y(ni, 0) - at(0, l1, n) - at(1, l2, n));
        metric += std::norm(y(ni, 1) + at(2, l2, n) - at(3, l1, n));
      }
      if (metric < best) {
        best = metric;
        best_index = l1 * q + l2;
      }
    }
  }
  evaluations_ += q * q;
  last_metric_ = best;
  labels[0] = static_cast<std::uint32_t>(best_index / q);
  labels[1] = static_cast<std::uint32_t>(best_index % q);
  return best_index;
}

// The Alamouti block metric separates into a²g(|s1 - z1|² + |s2 - z2|²) + const
// with g = ‖H‖_F², so each symbol is sliced on its own.
std::uint64_t MlDetector::detect_astbc_slicing(const Eigen::MatrixXcd& y, const ChannelMatrix& h,
                                               std::span<std::uint32_t> labels) {
  const Constellation& c = scheme_.constellation();
  const double a = scheme_.tx_amplitude();
  const double g = h.gains().squaredNorm();
  if (!(g > 0.0)) return detect_astbc_exhaustive(y, h, labels);
  std::complex<double> c1{}, c2{};
  for (int n = 0; n < scheme_.receivers(); ++n) {
    const auto h0 = h(n, 0);
    const auto h1 = h(n, 1);
    c1 += std::conj(h0) * y(n, 0) + h1 * std::conj(y(n, 1));
    c2 += std::conj(h1) * y(n, 0) - h0 * std::conj(y(n, 1));
  }
  const double inv = 1.0 / (a * g);
  labels[0] = c.nearest(c1 * inv);
  labels[1] = c.nearest(c2 * inv);
  const auto s1 = a * c.point(labels[0]);
  const auto s2 = a * c.point(labels[1]);
  double metric = 0.0;
  for (int n = 0; n < scheme_.receivers(); ++n) {
    metric += std::norm(y(n, 0) - h(n, 0) * s1 - h(n, 1) * s2);
    metric += std::norm(y(n, 1) + h(n, 0) * std::conj(s2) - h(n, 1) * std::conj(s1));
  }
  evaluations_ += 1;
  last_metric_ = metric;
  return static_cast<std::uint64_t>(labels[0]) * static_cast<std::uint64_t>(c.size()) + labels[1];
}

Detection mld_detect(const Eigen::MatrixXcd& y, const ChannelMatrix& h, const SchemeConfig& scheme,
                     MldMethod method) {
  MlDetector detector(scheme, method);
  std::vector<std::uint32_t> labels(static_cast<std::size_t>(scheme.symbols_per_block()));
  Detection d;
  d.candidate_index = detector.detect(y, h, labels);
  d.metric = detector.last_metric();
  d.metric_evaluations = detector.evaluations();
  encode_labels_into(scheme, labels, d.block);
  return d;
}

std::size_t count_bit_errors(const CodewordBlock& sent, const CodewordBlock& detected) {
  if (sent.bits.size() != detected.bits.size()) {
    throw DimensionError("count_bit_errors: blocks carry different bit counts");
  }
  std::size_t errors = 0;
  for (std::size_t i = 0; i < sent.bits.size(); ++i) errors += sent.bits[i] != detected.bits[i];
  return errors;
}

std::size_t label_bit_errors(std::span<const std::uint32_t> sent,
                             std::span<const std::uint32_t> detected) noexcept {
  std::size_t errors = 0;
  const std::size_t k = std::min(sent.size(), detected.size());
  for (std::size_t i = 0; i < k; ++i) errors += static_cast<std::size_t>(std::popcount(sent[i] ^ detected[i]));
  return errors;
}

}  // namespace turbosim
