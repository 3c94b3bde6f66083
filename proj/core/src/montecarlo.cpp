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

#include "turbosim/montecarlo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>

#include "turbosim/errors.hpp"
#include "turbosim/numerics.hpp"
#include "turbosim/parallel.hpp"

namespace turbosim {

namespace {

// Estimator domains keep the block streams of different estimators apart.
constexpr std::uint64_t kBerDomain = 0;
constexpr std::uint64_t kPepDomain = 2;
constexpr std::uint64_t kCdfDomain = 3;
constexpr std::uint64_t kCapacityDomain = 4;

constexpr std::uint64_t kCdfBlockTrials = 8192;
constexpr std::uint64_t kCapacityBlockTrials = 4096;

std::uint64_t block_count(std::uint64_t trials, std::uint64_t per_block) {
  return (trials + per_block - 1) / per_block;
}

std::uint32_t random_label(RngStream& rng, int bits) noexcept {
  return static_cast<std::uint32_t>(rng.next_u64() >> (64 - bits));
}

void check_grid(const std::vector<double>& grid, const std::string& key) {
  if (grid.empty()) throw ConfigError(key, "SNR grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw ConfigError(key, "SNR values must be finite");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigError(key, "SNR grid must be strictly increasing");
  }
}

struct ErrorCounts {
  std::uint64_t trials = 0;
  std::uint64_t errors = 0;
};

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// BER

void SimConfig::validate() const {
  check_grid(snr_grid_db, "sim.snr_db");
  if (max_trials < 1) throw ConfigError("sim.max_trials", "must be at least 1");
  if (min_bit_errors < 1) throw ConfigError("sim.min_bit_errors", "must be at least 1");
  if (block_trials < 1) throw ConfigError("sim.block_trials", "must be at least 1");
  detail::check_workers(workers);
}

std::string SimConfig::canonical() const {
  std::string s;
  s += "scheme=" + scheme.name();
  s += ";M=" + std::to_string(scheme.transmitters());
  s += ";N=" + std::to_string(scheme.receivers());
  s += ";q=" + std::to_string(scheme.constellation().size());
  s += ";power=" + to_string(scheme.power());
  s += ";alpha=" + format_double(params.alpha());
  s += ";beta=" + format_double(params.beta());
  s += ";snr_db=";
  for (std::size_t i = 0; i < snr_grid_db.size(); ++i) {
    if (i) s += ',';
    s += format_double(snr_grid_db[i]);
  }
  s += ";max_trials=" + std::to_string(max_trials);
  s += ";min_bit_errors=" + std::to_string(min_bit_errors);
  s += ";seed=" + std::to_string(seed);
  s += ";block_trials=" + std::to_string(block_trials);
  s += ";detector=" + to_string(detector);
  s += ";unit_irradiance=" + std::string(unit_irradiance ? "1" : "0");
  return s;
}

BerPoint simulate_ber_point(const SimConfig& config, std::size_t index) {
  config.validate();
  if (index >= config.snr_grid_db.size()) throw DimensionError("simulate_ber_point: index out of range");
  const SchemeConfig& scheme = config.scheme;
  const double snr = numerics::db_to_linear(config.snr_grid_db[index]);
  const double amplitude = scheme.tx_amplitude();
  const int bits = scheme.constellation().bits_per_symbol();
  const auto symbols = static_cast<std::size_t>(scheme.symbols_per_block());
  const GammaGammaSampler sampler(config.params);
  const RngStream base(config.seed, 0);

  ErrorCounts total;
  detail::run_ordered_blocks<ErrorCounts>(
      block_count(config.max_trials, config.block_trials), config.workers,
      [&](std::uint64_t b) {
        RngStream rng = detail::block_stream(base, kBerDomain, index, b);
        ChannelMatrix h(scheme.receivers(), scheme.transmitters());
        MlDetector detector(scheme, config.detector);
        CodewordBlock block;
        Eigen::MatrixXcd y;
        std::vector<std::uint32_t> sent(symbols);
        std::vector<std::uint32_t> detected(symbols);
        const std::uint64_t begin = b * config.block_trials;
        const std::uint64_t end = std::min(config.max_trials, begin + config.block_trials);
        ErrorCounts counts;
        for (std::uint64_t t = begin; t < end; ++t) {
          if (config.unit_irradiance) {
            sample_unit_channel_into(h, rng);
          } else {
            sample_channel_into(h, sampler, rng);
          }
          for (auto& l : sent) l = random_label(rng, bits);
          encode_labels_into(scheme, sent, block);
          transmit_into(block, h, snr, amplitude, rng, y);
          detector.detect(y, h, detected);
          counts.errors += label_bit_errors(sent, detected);
          ++counts.trials;
        }
        return counts;
      },
      [&](std::uint64_t, ErrorCounts c) {
        total.trials += c.trials;
        total.errors += c.errors;
        return total.errors >= config.min_bit_errors;
      });

  BerPoint p;
  p.snr_db = config.snr_grid_db[index];
  p.trials = total.trials;
  p.bit_errors = total.errors;
  p.bits_per_trial = scheme.bits_per_block();
  const double n_bits = static_cast<double>(total.trials) * p.bits_per_trial;
  p.ber = static_cast<double>(total.errors) / n_bits;
  const auto ci = numerics::wilson_interval(static_cast<double>(total.errors), n_bits);
  p.ci_low = ci.low;
  p.ci_high = ci.high;
  p.low_confidence = total.errors < config.min_bit_errors;
  return p;
}

BerCurve simulate_ber(const SimConfig& config) {
  config.validate();
  BerCurve curve;
  curve.scheme = config.scheme.name();
  curve.transmitters = config.scheme.transmitters();
  curve.receivers = config.scheme.receivers();
  curve.alpha = config.params.alpha();
  curve.beta = config.params.beta();
  curve.q = config.scheme.constellation().size();
  curve.seed = config.seed;
  curve.fingerprint = config.fingerprint();
  curve.points.reserve(config.snr_grid_db.size());
  for (std::size_t i = 0; i < config.snr_grid_db.size(); ++i) {
    curve.points.push_back(simulate_ber_point(config, i));
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Pairwise error events

std::vector<PepEstimate> estimate_pep(const SimConfig& config, const CodewordBlock& sent,
                                      const CodewordBlock& target, std::uint64_t trials,
                                      PepForm form) {
  config.validate();
  const SchemeConfig& scheme = config.scheme;
  const int m = scheme.transmitters();
  if (sent.symbols.rows() != m || target.symbols.rows() != m ||
      sent.symbols.cols() != scheme.slots() || target.symbols.cols() != scheme.slots()) {
    throw DimensionError("estimate_pep: codewords do not match the scheme");
  }
  const Eigen::MatrixXcd diff = sent.symbols - target.symbols;
  if (diff.squaredNorm() == 0.0) throw DomainError("estimate_pep: sent and target must differ");
  if (trials < 1) throw DomainError("estimate_pep: trials must be positive");

  const double amplitude = scheme.tx_amplitude();
  const GammaGammaSampler sampler(config.params);
  const RngStream base(config.seed, 0);
  std::vector<PepEstimate> out;
  for (std::size_t i = 0; i < config.snr_grid_db.size(); ++i) {
    const double snr = numerics::db_to_linear(config.snr_grid_db[i]);
    const double variance = 1.0 / snr;
    const double sigma_projected = std::sqrt(0.5 / snr);
    ErrorCounts total;
    detail::run_ordered_blocks<ErrorCounts>(
        block_count(trials, config.block_trials), config.workers,
        [&](std::uint64_t b) {
          RngStream rng = detail::block_stream(base, kPepDomain, i, b);
          ChannelMatrix h(scheme.receivers(), m);
          Eigen::MatrixXcd d;
          const std::uint64_t begin = b * config.block_trials;
          const std::uint64_t end = std::min(trials, begin + config.block_trials);
          ErrorCounts c;
          for (std::uint64_t t = begin; t < end; ++t) {
            if (config.unit_irradiance) {
              sample_unit_channel_into(h, rng);
            } else {
              sample_channel_into(h, sampler, rng);
            }
            d.noalias() = amplitude * (h.gains() * diff);
            bool event;
            if (form == PepForm::kPairwiseMetric) {
              double sent_metric = 0.0;
              double target_metric = 0.0;
              for (Eigen::Index col = 0; col < d.cols(); ++col) {
                for (Eigen::Index row = 0; row < d.rows(); ++row) {
                  const auto n = rng.complex_normal(variance);
                  sent_metric += std::norm(n);
                  target_metric += std::norm(n + d(row, col));
                }
              }
              event = sent_metric > target_metric;
            } else {
              event = sigma_projected * rng.normal() > 0.5 * d.norm();
            }
            c.errors += event;
            ++c.trials;
          }
          return c;
        },
        [&](std::uint64_t, ErrorCounts c) {
          total.trials += c.trials;
          total.errors += c.errors;
          return false;
        });
    PepEstimate e;
    e.snr_db = config.snr_grid_db[i];
    e.trials = total.trials;
    e.events = total.errors;
    e.probability = static_cast<double>(total.errors) / static_cast<double>(total.trials);
    e.std_error = std::sqrt(e.probability * (1.0 - e.probability) / static_cast<double>(total.trials));
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Effective-radius cdf

std::vector<double> empirical_effective_cdf(const TurbulenceParams& params,
                                            std::span<const std::complex<double>> delta_s,
                                            int receivers, std::span<const double> r_grid,
                                            std::uint64_t trials, const RngStream& rng, int workers,
                                            CdfEstimator estimator) {
  if (receivers < 1) throw DomainError("empirical_effective_cdf: N must be at least 1");
  if (delta_s.empty()) throw DomainError("empirical_effective_cdf: delta_s is empty");
  if (trials < 2) throw DomainError("empirical_effective_cdf: need at least 2 trials");
  double r_max = 0.0;
  for (double r : r_grid) {
    if (!(r >= 0.0)) throw DomainError("empirical_effective_cdf: radii must be non-negative");
    r_max = std::max(r_max, r);
  }
  if (estimator == CdfEstimator::kAuto) {
    estimator = receivers == 1 ? CdfEstimator::kDirect : CdfEstimator::kCrossPaired;
  }
  const bool paired = estimator == CdfEstimator::kCrossPaired && receivers >= 2;
  const double cut = r_max * r_max;
  const GammaGammaSampler sampler(params);
  const int m = static_cast<int>(delta_s.size());

  // Per draw: head = Σ_{n<N-1} |x_n|², tail = |x_{N-1}|², x_n = ½ Σ_m h_nm Δs_m.
  // Only values below r_max² can contribute, so only those are kept.
  struct Kept {
    std::vector<double> head;
    std::vector<double> tail;
    std::vector<double> total;
  };
  Kept all;
  detail::run_ordered_blocks<Kept>(
      block_count(trials, kCdfBlockTrials), workers,
      [&](std::uint64_t b) {
        RngStream stream = detail::block_stream(rng, kCdfDomain, 0, b);
        ChannelMatrix h(receivers, m);
        const std::uint64_t begin = b * kCdfBlockTrials;
        const std::uint64_t end = std::min(trials, begin + kCdfBlockTrials);
        Kept k;
        for (std::uint64_t t = begin; t < end; ++t) {
          sample_channel_into(h, sampler, stream);
          double head = 0.0;
          double tail = 0.0;
          for (int n = 0; n < receivers; ++n) {
            std::complex<double> x{};
            for (int j = 0; j < m; ++j) x += h(n, j) * delta_s[static_cast<std::size_t>(j)];
            const double e = 0.25 * std::norm(x);
            if (n + 1 < receivers) head += e; else tail = e;
          }
          if (paired) {
            if (head < cut) k.head.push_back(head);
            if (tail < cut) k.tail.push_back(tail);
          }
          if (head + tail < cut) k.total.push_back(head + tail);
        }
        return k;
      },
      [&](std::uint64_t, Kept k) {
        all.head.insert(all.head.end(), k.head.begin(), k.head.end());
        all.tail.insert(all.tail.end(), k.tail.begin(), k.tail.end());
        all.total.insert(all.total.end(), k.total.begin(), k.total.end());
        return false;
      });
  std::sort(all.head.begin(), all.head.end());
  std::sort(all.tail.begin(), all.tail.end());
  std::sort(all.total.begin(), all.total.end());

  const double n = static_cast<double>(trials);
  std::vector<double> out;
  out.reserve(r_grid.size());
  for (double r : r_grid) {
    const double r2 = r * r;
    const auto direct = static_cast<double>(
        std::lower_bound(all.total.begin(), all.total.end(), r2) - all.total.begin());
    if (!paired) {
      out.push_back(direct / n);
      continue;
    }
    // #{(i, j) : head_i + tail_j < r²}, two pointers over the sorted lists.
    double pairs = 0.0;
    std::size_t j = all.tail.size();
    for (double a : all.head) {
      while (j > 0 && a + all.tail[j - 1] >= r2) --j;
      if (j == 0) break;
      pairs += static_cast<double>(j);
    }
    out.push_back((pairs - direct) / (n * (n - 1.0)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Capacity

CapacityEstimate estimate_capacity(const TurbulenceParams& params, int transmitters, int receivers,
                                   double snr, std::uint64_t trials, const RngStream& rng,
                                   int workers, PowerNormalization power, bool unit_irradiance) {
  if (transmitters < 1 || receivers < 1) throw DomainError("estimate_capacity: M and N must be >= 1");
  if (trials < 10000) throw DomainError("estimate_capacity: at least 1e4 trials required");
  if (!(snr >= 0.0) || !std::isfinite(snr)) throw DomainError("estimate_capacity: snr must be finite and >= 0");
  if (snr == 0.0) return {0.0, 0.0, trials};
  const double rho =
      power == PowerNormalization::kTotal ? snr / static_cast<double>(transmitters) : snr;
  const GammaGammaSampler sampler(params);

  numerics::RunningMoments total;
  detail::run_ordered_blocks<numerics::RunningMoments>(
      block_count(trials, kCapacityBlockTrials), workers,
      [&](std::uint64_t b) {
        RngStream stream = detail::block_stream(rng, kCapacityDomain, 0, b);
        ChannelMatrix h(receivers, transmitters);
        Eigen::MatrixXcd gram(receivers, receivers);
        Eigen::LLT<Eigen::MatrixXcd> llt(receivers);
        const std::uint64_t begin = b * kCapacityBlockTrials;
        const std::uint64_t end = std::min(trials, begin + kCapacityBlockTrials);
        numerics::RunningMoments s;
        for (std::uint64_t t = begin; t < end; ++t) {
          if (unit_irradiance) {
            sample_unit_channel_into(h, stream);
          } else {
            sample_channel_into(h, sampler, stream);
          }
          double bits;
          if (receivers == 1) {
            bits = std::log2(1.0 + rho * h.gains().squaredNorm());
          } else {
            gram.noalias() = rho * (h.gains() * h.gains().adjoint());
            gram.diagonal().array() += 1.0;
            llt.compute(gram);
            double log_det = 0.0;
            for (int n = 0; n < receivers; ++n) log_det += std::log(llt.matrixLLT()(n, n).real());
            bits = 2.0 * log_det / std::numbers::ln2;
          }
          s.push(bits);
        }
        return s;
      },
      [&](std::uint64_t, const numerics::RunningMoments& s) {
        total.merge(s);
        return false;
      });
  return {total.mean, total.std_error(), total.n};
}

// ---------------------------------------------------------------------------
// Throughput at the FEC limit

std::vector<Ladder> standard_ladders(int transmitters, int receivers, PowerNormalization power) {
  std::vector<Ladder> ladders;
  Ladder vblast{"VBLAST", {}};
  for (int q : {4, 16, 64}) {
    vblast.rungs.emplace_back(SchemeKind::kVblast, transmitters, receivers,
                              Constellation::build(ModulationKind::kQam, q), power);
  }
  ladders.push_back(std::move(vblast));
  if (transmitters == 2) {
    Ladder astbc{"ASTBC", {}};
    for (int q : {16, 256, 4096}) {
      astbc.rungs.emplace_back(SchemeKind::kAstbc, 2, receivers,
                               Constellation::build(ModulationKind::kQam, q), power);
    }
    ladders.push_back(std::move(astbc));
  }
  Ladder siso{"SISO", {}};
  for (int q : {4, 16, 64, 256, 1024, 4096}) {
    siso.rungs.emplace_back(SchemeKind::kSiso, 1, 1, Constellation::build(ModulationKind::kQam, q),
                            power);
  }
  ladders.push_back(std::move(siso));
  return ladders;
}

void ThroughputConfig::validate() const {
  check_grid(snr_grid_db, "compare.snr_db");
  if (!(fec > 0.0) || !(fec <= 0.5)) throw ConfigError("compare.fec", "must lie in (0, 0.5]");
  if (max_trials < 1) throw ConfigError("compare.max_trials", "must be at least 1");
  if (min_bit_errors < 1) throw ConfigError("compare.min_bit_errors", "must be at least 1");
  if (block_trials < 1) throw ConfigError("compare.block_trials", "must be at least 1");
  detail::check_workers(workers);
}

std::vector<ThroughputCurve> throughput_at_fec(const std::vector<Ladder>& ladders,
                                               const ThroughputConfig& config) {
  config.validate();
  const std::size_t points = config.snr_grid_db.size();
  std::vector<ThroughputCurve> curves;
  for (std::size_t l = 0; l < ladders.size(); ++l) {
    const Ladder& ladder = ladders[l];
    ThroughputCurve curve;
    curve.name = ladder.name;
    curve.snr_db = config.snr_grid_db;
    curve.bits_per_use.assign(points, 0.0);

    std::vector<SimConfig> sims;
    for (std::size_t r = 0; r < ladder.rungs.size(); ++r) {
      const SchemeConfig& scheme = ladder.rungs[r];
      sims.push_back(SimConfig{scheme, config.params, config.snr_grid_db, config.max_trials,
                               config.min_bit_errors, mix64(config.seed ^ mix64((l << 16) | r)),
                               config.workers, config.block_trials, config.detector, false});
      RungResult rung;
      rung.label = std::to_string(scheme.constellation().size()) + "-" +
                   to_string(scheme.constellation().kind());
      rung.bits_per_use = scheme.bits_per_channel_use();
      rung.points.assign(points, std::nullopt);
      rung.pass.assign(points, false);
      curve.rungs.push_back(std::move(rung));
    }

    std::vector<bool> settled(ladder.rungs.size(), false);
    for (std::size_t i = 0; i < points; ++i) {
      for (std::size_t r = 0; r < ladder.rungs.size(); ++r) {
        RungResult& rung = curve.rungs[r];
        if (r > 0 && !curve.rungs[r - 1].pass[i]) continue;  // implied fail
        if (settled[r]) {
          rung.pass[i] = true;
          continue;
        }
        const BerPoint p = simulate_ber_point(sims[r], i);
        rung.points[i] = p;
        rung.pass[i] = p.ber <= config.fec;
        if (p.ci_high <= config.fec / 10.0) settled[r] = true;
      }
      for (const auto& rung : curve.rungs) {
        if (rung.pass[i]) curve.bits_per_use[i] = std::max(curve.bits_per_use[i], rung.bits_per_use);
      }
    }

    for (std::size_t r = 0; r < curve.rungs.size(); ++r) {
      RungResult& rung = curve.rungs[r];
      std::size_t first = points;
      for (std::size_t i = 1; i < points; ++i) {
        if (rung.pass[i] && !rung.pass[i - 1]) {
          first = i;
          break;
        }
      }
      if (first == points) continue;
      if (!rung.points[first - 1]) rung.points[first - 1] = simulate_ber_point(sims[r], first - 1);
      const BerPoint& lo = *rung.points[first - 1];
      const BerPoint& hi = *rung.points[first];
      const auto floor_ber = [](const BerPoint& p) {
        return p.bit_errors > 0 ? p.ber : 0.5 / (static_cast<double>(p.trials) * p.bits_per_trial);
      };
      const double b0 = std::log10(floor_ber(lo));
      const double b1 = std::log10(floor_ber(hi));
      const double target = std::log10(config.fec);
      double frac = b0 > b1 ? (b0 - target) / (b0 - b1) : 0.5;
      frac = std::clamp(frac, 0.0, 1.0);
      rung.threshold_db = lo.snr_db + frac * (hi.snr_db - lo.snr_db);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

namespace {

struct Polyline {
  std::vector<double> x;
  std::vector<double> y;

  double at(double v) const {
    auto it = std::upper_bound(x.begin(), x.end(), v);
    if (it == x.begin()) return y.front();
    if (it == x.end()) return y.back();
    const auto k = static_cast<std::size_t>(it - x.begin());
    const double t = (v - x[k - 1]) / (x[k] - x[k - 1]);
    return y[k - 1] + t * (y[k] - y[k - 1]);
  }
};

Polyline threshold_polyline(const ThroughputCurve& curve) {
  Polyline p;
  for (const auto& rung : curve.rungs) {
    if (!rung.threshold_db) continue;
    if (!p.x.empty() && !(*rung.threshold_db > p.x.back())) continue;
    p.x.push_back(*rung.threshold_db);
    p.y.push_back(rung.bits_per_use);
  }
  return p;
}

}  // namespace

std::optional<double> locate_crossover(const ThroughputCurve& low, const ThroughputCurve& high) {
  const Polyline a = threshold_polyline(low);
  const Polyline b = threshold_polyline(high);
  if (a.x.size() < 2 || b.x.size() < 2) return std::nullopt;
  const double start = std::max(a.x.front(), b.x.front());
  const double stop = std::min(a.x.back(), b.x.back());
  if (!(stop > start)) return std::nullopt;
  std::vector<double> knots{start, stop};
  for (double v : a.x) if (v > start && v < stop) knots.push_back(v);
  for (double v : b.x) if (v > start && v < stop) knots.push_back(v);
  std::sort(knots.begin(), knots.end());
  double prev_x = knots.front();
  double prev_d = b.at(prev_x) - a.at(prev_x);
  for (std::size_t k = 1; k < knots.size(); ++k) {
    const double x = knots[k];
    const double d = b.at(x) - a.at(x);
    if (prev_d <= 0.0 && d > 0.0) {
      return prev_x + (x - prev_x) * (0.0 - prev_d) / (d - prev_d);
    }
    prev_x = x;
    prev_d = d;
  }
  return std::nullopt;
}

}  // namespace turbosim
