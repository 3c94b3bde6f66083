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

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "turbosim/asymptotics.hpp"
#include "turbosim/errors.hpp"
#include "turbosim/montecarlo.hpp"
#include "turbosim/numerics.hpp"

namespace {

using namespace turbosim;
using cd = std::complex<double>;

SchemeConfig scheme(SchemeKind kind, int m, int n, ModulationKind mod = ModulationKind::kPsk,
                    int q = 2) {
  return SchemeConfig(kind, m, n, Constellation::build(mod, q));
}

SimConfig base_config(SchemeConfig s, std::vector<double> grid) {
  return SimConfig{.scheme = std::move(s),
                   .params = TurbulenceParams(4.0, 2.0),
                   .snr_grid_db = std::move(grid),
                   .max_trials = 200000,
                   .min_bit_errors = 500,
                   .seed = 11};
}

double bpsk_awgn(double snr) { return 0.5 * std::erfc(std::sqrt(snr)); }

TEST(SimulateBer, IndependentOfWorkerCount) {
  auto c = base_config(scheme(SchemeKind::kVblast, 2, 2), {4.0, 8.0, 12.0});
  c.block_trials = 512;
  const auto one = simulate_ber(c);
  c.workers = 4;
  const auto four = simulate_ber(c);
  EXPECT_EQ(one, four);
  EXPECT_EQ(one.fingerprint, four.fingerprint);
}

TEST(SimulateBer, FingerprintTracksResultFields) {
  auto c = base_config(scheme(SchemeKind::kSiso, 1, 1), {0.0});
  const auto f = c.fingerprint();
  c.workers = 3;
  EXPECT_EQ(c.fingerprint(), f);
  c.seed = 12;
  EXPECT_NE(c.fingerprint(), f);
}

TEST(SimulateBer, SeedChangesResult) {
  auto c = base_config(scheme(SchemeKind::kSiso, 1, 1), {6.0});
  const auto a = simulate_ber(c);
  c.seed = 99;
  const auto b = simulate_ber(c);
  EXPECT_NE(a.points[0].bit_errors, b.points[0].bit_errors);
}

TEST(SimulateBer, CoinFlipAtVanishingSnr) {
  auto c = base_config(scheme(SchemeKind::kVblast, 2, 1, ModulationKind::kQam, 16), {-60.0});
  c.min_bit_errors = 20000;
  const auto p = simulate_ber(c).points[0];
  EXPECT_LE(p.ci_low, 0.5);
  EXPECT_GE(p.ci_high, 0.5);
  EXPECT_NEAR(p.ber, 0.5, 0.02);
}

TEST(SimulateBer, UnitIrradianceSisoMatchesAwgn) {
  auto c = base_config(scheme(SchemeKind::kSiso, 1, 1), {0.0, 4.0, 7.0});
  c.unit_irradiance = true;
  c.min_bit_errors = 2000;
  c.max_trials = 2000000;
  for (const auto& p : simulate_ber(c).points) {
    const double exact = bpsk_awgn(numerics::db_to_linear(p.snr_db));
    const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(p.trials));
    EXPECT_LT(std::abs(p.ber - exact), 4.0 * se) << p.snr_db;
  }
}

TEST(SimulateBer, GammaGammaSisoMatchesAveragedErrorRate) {
  const TurbulenceParams params(4.0, 2.0);
  const GammaGammaPdf pdf(params);
  auto c = base_config(scheme(SchemeKind::kSiso, 1, 1), {5.0, 10.0, 15.0});
  c.min_bit_errors = 3000;
  c.max_trials = 3000000;
  for (const auto& p : simulate_ber(c).points) {
    const double snr = numerics::db_to_linear(p.snr_db);
    const double exact =
        numerics::integrate_semi_infinite([&](double i) { return pdf(i) * bpsk_awgn(snr * i); }).value;
    const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(p.trials));
    EXPECT_LT(std::abs(p.ber - exact), 4.0 * se) << p.snr_db;
  }
}

TEST(SimulateBer, StopsOnBlockBoundary) {
  auto c = base_config(scheme(SchemeKind::kSiso, 1, 1), {0.0, 60.0});
  c.block_trials = 1000;
  c.min_bit_errors = 100;
  c.max_trials = 50000;
  const auto curve = simulate_ber(c);
  const auto& easy = curve.points[0];
  EXPECT_GE(easy.bit_errors, 100u);
  EXPECT_EQ(easy.trials % 1000, 0u);
  EXPECT_LT(easy.trials, 50000u);
  const auto& hard = curve.points[1];
  EXPECT_EQ(hard.trials, 50000u);
  EXPECT_TRUE(hard.low_confidence);
  EXPECT_EQ(hard.bits_per_trial, 1u);
}

TEST(SimulateBer, SlicingAndExhaustiveAgree) {
  auto c = base_config(scheme(SchemeKind::kVblast, 2, 2, ModulationKind::kQam, 16), {10.0, 16.0});
  c.max_trials = 20000;
  c.detector = MldMethod::kExhaustive;
  const auto a = simulate_ber(c);
  c.detector = MldMethod::kConditionalSlicing;
  const auto b = simulate_ber(c);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].bit_errors, b.points[i].bit_errors);
    EXPECT_EQ(a.points[i].trials, b.points[i].trials);
  }
}

TEST(SimulateBer, BerFallsWithSnr) {
  const auto curve = simulate_ber(base_config(scheme(SchemeKind::kAstbc, 2, 2), {0.0, 5.0, 10.0}));
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    EXPECT_LT(curve.points[i].ber, curve.points[i - 1].ber);
  }
}

TEST(SimConfig, Validation) {
  auto c = base_config(scheme(SchemeKind::kSiso, 1, 1), {});
  try {
    c.validate();
    FAIL() << "empty grid accepted";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "sim.snr_db");
  }
  c.snr_grid_db = {0.0, std::nan("")};
  EXPECT_THROW(c.validate(), ConfigError);
  c.snr_grid_db = {0.0};
  c.workers = 0;
  try {
    c.validate();
    FAIL() << "zero workers accepted";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "workers");
  }
  c.workers = 1;
  c.block_trials = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(WilsonInterval, CoverageCalibration) {
  constexpr int kReps = 10000;
  constexpr int kN = 1000;
  constexpr double kP = 0.3;
  RngStream rng(2024, 7);
  int covered = 0;
  for (int r = 0; r < kReps; ++r) {
    int k = 0;
    for (int i = 0; i < kN; ++i) k += rng.uniform() < kP;
    const auto [lo, hi] = numerics::wilson_interval(static_cast<std::uint64_t>(k), kN);
    covered += lo <= kP && kP <= hi;
  }
  EXPECT_NEAR(static_cast<double>(covered) / kReps, 0.95, 0.01);
}

TEST(EstimatePep, FormsAgree) {
  const auto s = scheme(SchemeKind::kVblast, 2, 2);
  auto c = base_config(s, {6.0, 10.0});
  const auto sent = encode(s, bits_from_string("11"));
  const auto target = encode(s, bits_from_string("01"));
  const auto a = estimate_pep(c, sent, target, 200000, PepForm::kPairwiseMetric);
  const auto b = estimate_pep(c, sent, target, 200000, PepForm::kProjectedNoise);
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_GT(a[i].events, 50u);
    EXPECT_LT(std::abs(a[i].probability - b[i].probability),
              3.0 * std::hypot(a[i].std_error, b[i].std_error));
  }
  EXPECT_THROW(estimate_pep(c, sent, sent, 1000), DomainError);
}

TEST(EstimatePep, ApproachesAsymptote) {
  // Both antennas of a 2×1 link in error, N=1: P ≈ C/(4 snr).
  const auto s = scheme(SchemeKind::kVblast, 2, 1);
  auto c = base_config(s, {40.0});
  const auto sent = encode(s, bits_from_string("11"));
  const auto target = encode(s, bits_from_string("00"));
  const auto est = estimate_pep(c, sent, target, 2000000)[0];
  const CrValue cr = cr_closed_form(c.params);
  const double asym = pep_asymptote(cr, 1, numerics::db_to_linear(40.0));
  EXPECT_LT(std::abs(est.probability - asym), 4.0 * est.std_error + 0.1 * asym);
}

TEST(EmpiricalCdf, SingleReceiverSlope) {
  const TurbulenceParams params(4.0, 2.0);
  const cd ds[] = {2.0, 2.0};
  const std::vector<double> r{0.01, 0.02, 0.04, 0.08};
  const auto f = empirical_effective_cdf(params, ds, 1, r, 2000000, RngStream(3, 0));
  std::vector<double> db;
  for (double x : r) db.push_back(20.0 * std::log10(x));
  const auto fit = fit_log_log_slope(db, f, db.front(), db.back());
  EXPECT_NEAR(fit.fitted_slope, 1.0, 0.05);  // F ∝ r² and x = 20 log10 r / 10
  const double cr = cr_closed_form(params).value;
  EXPECT_NEAR(f[1] / (r[1] * r[1]), cr, 0.05 * cr);
}

TEST(EmpiricalCdf, LargeRadiusIsOne) {
  const cd ds[] = {2.0, 2.0};
  const double r[] = {1e6};
  for (auto est : {CdfEstimator::kDirect, CdfEstimator::kCrossPaired}) {
    const auto f = empirical_effective_cdf(TurbulenceParams(4.0, 2.0), ds, 2, r, 20000, RngStream(1, 0),
                                           1, est);
    EXPECT_DOUBLE_EQ(f[0], 1.0);
  }
}

TEST(EmpiricalCdf, EstimatorsAgree) {
  const TurbulenceParams params(3.0, 2.5);
  const cd ds[] = {2.0, 2.0};
  const double r[] = {0.3, 0.6};
  const auto d = empirical_effective_cdf(params, ds, 2, r, 200000, RngStream(5, 0), 1, CdfEstimator::kDirect);
  const auto x = empirical_effective_cdf(params, ds, 2, r, 200000, RngStream(5, 0), 1, CdfEstimator::kCrossPaired);
  for (int i = 0; i < 2; ++i) {
    const double se = std::sqrt(d[i] * (1.0 - d[i]) / 200000.0);
    EXPECT_LT(std::abs(d[i] - x[i]), 4.0 * se) << r[i];
  }
}

TEST(EmpiricalCdf, IndependentOfWorkers) {
  const cd ds[] = {2.0, 2.0};
  const double r[] = {0.05, 0.1};
  const auto a = empirical_effective_cdf(TurbulenceParams(4.0, 2.0), ds, 2, r, 30000, RngStream(8, 0), 1);
  const auto b = empirical_effective_cdf(TurbulenceParams(4.0, 2.0), ds, 2, r, 30000, RngStream(8, 0), 4);
  EXPECT_EQ(a, b);
}

TEST(Capacity, ScalarUnitChannel) {
  for (double snr : {0.5, 10.0, 1000.0}) {
    const auto c = estimate_capacity(TurbulenceParams(4.0, 2.0), 1, 1, snr, 10000, RngStream(1, 0), 1,
                                     PowerNormalization::kPerAntenna, true);
    EXPECT_NEAR(c.bits, std::log2(1.0 + snr), 1e-12);
    EXPECT_NEAR(c.std_error, 0.0, 1e-12);
  }
}

TEST(Capacity, UnitChannelMimo) {
  // Unit irradiance and random phases: 2×1 per-antenna gives log2(1 + 2 snr) exactly.
  const auto c = estimate_capacity(TurbulenceParams(4.0, 2.0), 2, 1, 10.0, 10000, RngStream(1, 0), 1,
                                   PowerNormalization::kPerAntenna, true);
  EXPECT_NEAR(c.bits, std::log2(21.0), 1e-12);
}

TEST(Capacity, ZeroSnrAndValidation) {
  const auto c = estimate_capacity(TurbulenceParams(4.0, 2.0), 2, 2, 0.0, 10000, RngStream(1, 0));
  EXPECT_EQ(c.bits, 0.0);
  EXPECT_THROW(estimate_capacity(TurbulenceParams(4.0, 2.0), 2, 2, 1.0, 9999, RngStream(1, 0)),
               DomainError);
  EXPECT_THROW(estimate_capacity(TurbulenceParams(4.0, 2.0), 2, 2, -1.0, 10000, RngStream(1, 0)),
               DomainError);
}

TEST(Capacity, BoundedByJensen) {
  // E log det ≤ log det E: for 2×2 per-antenna, E[HH†] = 2I.
  const double snr = 10.0;
  const auto c = estimate_capacity(TurbulenceParams(4.0, 2.0), 2, 2, snr, 50000, RngStream(2, 0));
  EXPECT_LT(c.bits, 2.0 * std::log2(1.0 + 2.0 * snr));
  EXPECT_GT(c.bits, 0.0);
}

TEST(StandardLadders, RatesMatched) {
  const auto ladders = standard_ladders(2, 2);
  ASSERT_EQ(ladders.size(), 3u);
  EXPECT_EQ(ladders[0].name, "VBLAST");
  EXPECT_EQ(ladders[1].name, "ASTBC");
  EXPECT_EQ(ladders[2].name, "SISO");
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_EQ(ladders[0].rungs[r].bits_per_channel_use(), ladders[1].rungs[r].bits_per_channel_use());
  }
  EXPECT_EQ(standard_ladders(3, 1).size(), 2u);
}

TEST(Throughput, LenientTargetGivesTopRung) {
  auto ladders = standard_ladders(2, 2);
  ladders.erase(ladders.begin(), ladders.begin() + 2);
  ThroughputConfig c{.params = TurbulenceParams(4.0, 2.0), .snr_grid_db = {60.0}, .fec = 0.5,
                     .max_trials = 2000, .min_bit_errors = 10};
  const auto curves = throughput_at_fec(ladders, c);
  ASSERT_EQ(curves.size(), 1u);
  EXPECT_EQ(curves[0].bits_per_use[0], 12.0);
}

TEST(Throughput, ZeroWhenNothingPasses) {
  auto ladders = standard_ladders(2, 2);
  ladders.resize(1);
  ThroughputConfig c{.params = TurbulenceParams(4.0, 2.0), .snr_grid_db = {-20.0, -10.0}, .fec = 1e-3,
                     .max_trials = 2000, .min_bit_errors = 10};
  const auto curve = throughput_at_fec(ladders, c)[0];
  EXPECT_EQ(curve.bits_per_use, (std::vector<double>{0.0, 0.0}));
  // Higher rungs were never simulated once 4-QAM failed.
  for (std::size_t r = 1; r < curve.rungs.size(); ++r) {
    for (const auto& p : curve.rungs[r].points) EXPECT_FALSE(p.has_value());
  }
}

TEST(Throughput, MonotoneInSnr) {
  auto ladders = standard_ladders(2, 2);
  ladders.resize(1);
  ThroughputConfig c{.params = TurbulenceParams(4.0, 2.0), .snr_grid_db = {5.0, 15.0, 25.0, 35.0},
                     .fec = 1e-2, .max_trials = 20000, .min_bit_errors = 50};
  const auto curve = throughput_at_fec(ladders, c)[0];
  for (std::size_t i = 1; i < curve.bits_per_use.size(); ++i) {
    EXPECT_GE(curve.bits_per_use[i], curve.bits_per_use[i - 1]);
  }
}

TEST(Throughput, Validation) {
  ThroughputConfig c{.params = TurbulenceParams(4.0, 2.0), .snr_grid_db = {0.0}, .fec = 0.0};
  try {
    c.validate();
    FAIL() << "fec = 0 accepted";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "compare.fec");
  }
  c.fec = 0.6;
  EXPECT_THROW(c.validate(), ConfigError);
}

ThroughputCurve synthetic(std::string name, std::vector<std::pair<double, double>> knots) {
  ThroughputCurve c;
  c.name = std::move(name);
  for (auto [x, y] : knots) {
    RungResult r;
    r.bits_per_use = y;
    r.threshold_db = x;
    c.rungs.push_back(r);
  }
  return c;
}

TEST(LocateCrossover, Synthetic) {
  const auto low = synthetic("a", {{10, 4}, {20, 8}, {30, 12}});
  const auto high = synthetic("b", {{14, 4}, {22, 8}, {26, 12}});
  // b - a: at 20 -> (8 - 8)... b(20) = 4 + 6/8*4 = 7, a(20) = 8, d=-1; at 22: b=8, a=8.8, d=-0.8;
  // at 26: b=12, a=10.4, d=1.6. Crossing between 22 and 26: 22 + 4*0.8/2.4.
  const auto x = locate_crossover(low, high);
  ASSERT_TRUE(x.has_value());
  EXPECT_NEAR(*x, 22.0 + 4.0 / 3.0, 1e-12);
  EXPECT_FALSE(locate_crossover(high, low).has_value());
  EXPECT_FALSE(locate_crossover(synthetic("c", {{10, 4}}), high).has_value());
}

}  // namespace
