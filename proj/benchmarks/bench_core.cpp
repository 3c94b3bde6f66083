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

#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "turbosim/channel.hpp"
#include "turbosim/montecarlo.hpp"
#include "turbosim/signalchain.hpp"

namespace {

using namespace turbosim;

void BM_GammaGammaSample(benchmark::State& state) {
  const GammaGammaSampler sampler(TurbulenceParams(4.0, 2.0));
  RngStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sampler(rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GammaGammaSample);

void BM_ChannelMatrix(benchmark::State& state) {
  const GammaGammaSampler sampler(TurbulenceParams(4.0, 2.0));
  ChannelMatrix h(2, 2);
  RngStream rng(1, 0);
  for (auto _ : state) {
    sample_channel_into(h, sampler, rng);
    benchmark::DoNotOptimize(h.gains().data());
  }
}
BENCHMARK(BM_ChannelMatrix);

// Arguments: scheme kind, QAM order, detector.
void BM_MlDetect(benchmark::State& state) {
  const auto kind = static_cast<SchemeKind>(state.range(0));
  const int q = static_cast<int>(state.range(1));
  const auto method = static_cast<MldMethod>(state.range(2));
  const SchemeConfig scheme(kind, 2, 2, Constellation::build(ModulationKind::kQam, q));
  MlDetector detector(scheme, method);
  RngStream rng(3, 0);
  const GammaGammaSampler sampler(TurbulenceParams(4.0, 2.0));
  ChannelMatrix h(2, 2);
  sample_channel_into(h, sampler, rng);
  std::vector<std::uint32_t> labels(static_cast<std::size_t>(scheme.symbols_per_block()));
  for (auto& l : labels) l = static_cast<std::uint32_t>(rng.next_u64() % static_cast<std::uint64_t>(q));
  CodewordBlock block;
  encode_labels_into(scheme, labels, block);
  const Eigen::MatrixXcd y = transmit(block, h, scheme, 100.0, rng);
  std::vector<std::uint32_t> out(labels.size());
  for (auto _ : state) benchmark::DoNotOptimize(detector.detect(y, h, out));
  state.SetLabel(scheme.name() + " q=" + std::to_string(q) + " " + to_string(method));
}
BENCHMARK(BM_MlDetect)
    ->ArgsProduct({{static_cast<int>(SchemeKind::kVblast)}, {4, 16, 64},
                   {static_cast<int>(MldMethod::kExhaustive), static_cast<int>(MldMethod::kConditionalSlicing)}})
    ->Args({static_cast<int>(SchemeKind::kAstbc), 16, static_cast<int>(MldMethod::kExhaustive)})
    ->Args({static_cast<int>(SchemeKind::kAstbc), 16, static_cast<int>(MldMethod::kConditionalSlicing)})
    ->Args({static_cast<int>(SchemeKind::kAstbc), 4096, static_cast<int>(MldMethod::kConditionalSlicing)});

// Full trial loop: channel, bits, encode, transmit, detect, count.
void BM_BerTrials(benchmark::State& state) {
  SimConfig c{.scheme = SchemeConfig(SchemeKind::kVblast, 2, static_cast<int>(state.range(0)),
                                     Constellation::build(ModulationKind::kPsk, 2)),
              .params = TurbulenceParams(4.0, 2.0),
              .snr_grid_db = {30.0},
              .max_trials = 65536,
              .min_bit_errors = ~std::uint64_t{0}};
  for (auto _ : state) benchmark::DoNotOptimize(simulate_ber_point(c, 0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.max_trials));
}
BENCHMARK(BM_BerTrials)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
