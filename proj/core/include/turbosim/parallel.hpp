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

// Deterministic block-sharded execution shared by the Monte-Carlo estimators.

#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "turbosim/errors.hpp"
#include "turbosim/rng.hpp"

namespace turbosim::detail {

/// Counter-space layout for block streams: 8 bits of estimator domain,
/// 20 bits of grid point, 36 bits of block index.
inline std::uint64_t block_stream_id(std::uint64_t domain, std::uint64_t point,
                                     std::uint64_t block) noexcept {
  return (domain << 56) | ((point & 0xFFFFFull) << 36) | (block & 0xFFFFFFFFFull);
}

/// Stream for one block of an estimator whose family is fixed by `base`.
inline RngStream block_stream(const RngStream& base, std::uint64_t domain, std::uint64_t point,
                              std::uint64_t block) noexcept {
  return RngStream(base.seed(), mix64(base.stream_id() ^ block_stream_id(domain, point, block)));
}

inline void check_workers(int workers) {
  if (workers < 1) throw ConfigError("workers", "must be at least 1, got " + std::to_string(workers));
}

/// Evaluates `work(b)` for blocks b = 0, 1, ... < block_count, `workers` at a
/// time, and hands each result to `consume(b, result)` strictly in block
/// order. `consume` returns true to stop; results of later blocks from the
/// same round are dropped. The consumed sequence therefore never depends on
/// the worker count.
template <class Result, class Work, class Consume>
void run_ordered_blocks(std::uint64_t block_count, int workers, Work&& work, Consume&& consume) {
  check_workers(workers);
  if (workers == 1) {
    for (std::uint64_t b = 0; b < block_count; ++b) {
      if (consume(b, work(b))) return;
    }
    return;
  }
  std::vector<std::optional<Result>> results(static_cast<std::size_t>(workers));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (std::uint64_t first = 0; first < block_count; first += static_cast<std::uint64_t>(workers)) {
    const std::uint64_t count =
        std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), block_count - first);
    {
      std::vector<std::jthread> threads;
      threads.reserve(static_cast<std::size_t>(count));
      for (std::uint64_t i = 0; i < count; ++i) {
        threads.emplace_back([&, i] {
          try {
            results[i].emplace(work(first + i));
          } catch (...) {
            errors[i] = std::current_exception();
          }
        });
      }
    }
    for (std::uint64_t i = 0; i < count; ++i) {
      if (errors[i]) std::rethrow_exception(errors[i]);
      const bool stop = consume(first + i, std::move(*results[i]));
      results[i].reset();
      if (stop) return;
    }
  }
}

}  // namespace turbosim::detail
