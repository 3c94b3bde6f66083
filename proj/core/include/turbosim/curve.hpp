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

// BER curve containers shared by the simulator, the fitting routines and I/O.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace turbosim {

struct BerPoint {
  double snr_db = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t bit_errors = 0;
  int bits_per_trial = 0;
  double ber = 0.0;
  double ci_low = 0.0;   ///< 95% Wilson interval
  double ci_high = 0.0;
  /// Stopped at max_trials before reaching min_bit_errors.
  bool low_confidence = false;

  friend bool operator==(const BerPoint&, const BerPoint&) = default;
};

struct BerCurve {
  std::string scheme;  ///< "<KIND>-<MODULATION>", e.g. "VBLAST-PSK"
  int transmitters = 0;
  int receivers = 0;
  double alpha = 0.0;
  double beta = 0.0;
  int q = 0;
  std::uint64_t seed = 0;
  /// Hash of the canonical run configuration, seed included.
  std::uint64_t fingerprint = 0;
  std::vector<BerPoint> points;

  friend bool operator==(const BerCurve&, const BerCurve&) = default;
};

}  // namespace turbosim
