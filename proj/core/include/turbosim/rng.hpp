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

#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace turbosim {

/// Reproducible random stream built on the Philox4x32-10 counter-based
/// generator. The key is the 64-bit seed; the 128-bit counter is
/// (stream_id, block index), so (seed, stream_id) fixes the whole sequence
/// and distinct stream ids never share a counter value.
///
/// Value type: copy it to fork an identical sequence, never share one
/// instance between threads.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  /// Number of 64-bit words consumed so far.
  std::uint64_t draw_counter() const noexcept { return draw_counter_; }

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1]; safe as a log() argument.
  double uniform_open_low() noexcept { return 1.0 - uniform(); }

  /// Standard normal (Box-Muller; the second variate of each pair is kept).
  double normal() noexcept;

  /// Circularly-symmetric complex normal with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance) noexcept;

  /// Uniform phase e^{jθ}, θ ~ U[0, 2π).
  std::complex<double> unit_phasor() noexcept;

  /// Independent child stream, a pure function of (seed, stream_id, index).
  RngStream substream(std::uint64_t index) const noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t draw_counter_ = 0;
  std::uint64_t cached_block_ = ~std::uint64_t{0};
  std::array<std::uint32_t, 4> block_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Philox4x32-10 bijection, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// SplitMix64 finalizer; used to derive stream ids.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Gamma(shape, scale) sampler (Marsaglia-Tsang) with its constants
/// precomputed for a fixed shape.
class GammaSampler {
 public:
  GammaSampler(double shape, double scale);

  double shape() const noexcept { return shape_; }
  double scale() const noexcept { return scale_; }

  double operator()(RngStream& rng) const noexcept;

 private:
  double shape_;
  double scale_;
  double d_;
  double c_;
  bool boost_;  // shape < 1: sample shape + 1 and multiply by U^{1/shape}
};

/// One Gamma(shape, scale) draw. Throws DomainError on non-positive parameters.
double sample_gamma(double shape, double scale, RngStream& rng);

}  // namespace turbosim
