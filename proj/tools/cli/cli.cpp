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

#include "cli.hpp"

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "turbosim/asymptotics.hpp"
#include "turbosim/errors.hpp"
#include "turbosim/io.hpp"
#include "turbosim/montecarlo.hpp"

namespace turbosim::cli {

namespace {

namespace fs = std::filesystem;
using cd = std::complex<double>;

constexpr std::string_view kDefaultSnrGrid = "0:40:0.5";

// Every key any subcommand reads. A recipe may carry keys for several
// subcommands; anything outside this list is a typo.
constexpr std::string_view kKnownKeys[] = {
    "scheme.kind",          "scheme.modulation",     "scheme.q",
    "scheme.transmitters",  "scheme.receivers",      "scheme.power_normalization",
    "scheme.vblast.q",      "scheme.astbc.q",        "scheme.siso.q",
    "channel.alpha",        "channel.beta",
    "sim.snr_db",           "sim.max_trials",        "sim.min_bit_errors",
    "sim.seed",             "sim.workers",           "sim.block_trials",
    "sim.detector",         "sim.unit_irradiance",
    "pep.sent",             "pep.target",            "pep.trials",
    "pep.form",             "pep.cr_trials",
    "cdf.delta_s",          "cdf.r",                 "cdf.trials",
    "cdf.estimator",
    "cr.delta_s",           "cr.trials",
    "capacity.trials",
    "compare.snr_db",       "compare.fec",           "compare.max_trials",
    "compare.min_bit_errors", "compare.block_trials",
    "output.prefix",        "output.svg",
};

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out_dir = "out";
  bool svg = false;
  std::optional<std::string> power;
  std::vector<std::string> assignments;
  std::optional<std::string> alpha;
  std::optional<std::string> beta;
  std::optional<std::string> n_list;
};

struct Output {
  std::string name;
  std::string text;
};

struct Context {
  std::string command;
  io::Config config;
  bool svg = false;
  int workers = 1;
  std::uint64_t seed = 1;
  std::string prefix;
  std::vector<Output> outputs;
};

// Re-keys errors from enum parsers so the message names the config key.
template <class F>
auto keyed(const std::string& key, F&& parse) {
  try {
    return parse();
  } catch (const ConfigError& e) {
    throw ConfigError(key, e.what());
  }
}

std::vector<double> doubles(const io::Config& c, const std::string& key, std::string_view fallback) {
  return io::parse_number_list(c.has(key) ? c.get_string(key) : std::string(fallback), key);
}

std::vector<int> ints(const io::Config& c, const std::string& key, std::string_view fallback) {
  std::vector<int> out;
  for (double v : doubles(c, key, fallback)) {
    if (v != std::floor(v) || std::abs(v) > 1e6) {
      throw ConfigError(key, "expected integers, got " + format_double(v));
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::uint64_t count(const io::Config& c, const std::string& key, std::uint64_t fallback) {
  if (!c.has(key)) return fallback;
  // Accept 1e7 as well as 10000000.
  const double v = c.get_double(key);
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e18) {
    throw ConfigError(key, "expected a positive integer, got " + c.get_string(key));
  }
  return static_cast<std::uint64_t>(v);
}

std::vector<TurbulenceParams> channels(const io::Config& c) {
  std::vector<TurbulenceParams> out;
  const auto alphas = doubles(c, "channel.alpha", "4");
  const auto betas = doubles(c, "channel.beta", "2");
  if (alphas.empty()) throw ConfigError("channel.alpha", "empty list");
  if (betas.empty()) throw ConfigError("channel.beta", "empty list");
  for (double a : alphas) {
    for (double b : betas) {
      if (!(a > 0.0)) throw ConfigError("channel.alpha", "must be positive");
      if (!(b > 0.0)) throw ConfigError("channel.beta", "must be positive");
      out.emplace_back(a, b);
    }
  }
  return out;
}

PowerNormalization power(const io::Config& c) {
  return keyed("scheme.power_normalization", [&] {
    return parse_power_normalization(c.get_string("scheme.power_normalization", "per-antenna"));
  });
}

std::vector<SchemeConfig> schemes(const io::Config& c) {
  std::vector<SchemeConfig> out;
  const auto kinds = c.has("scheme.kind") ? c.get_string_list("scheme.kind")
                                          : std::vector<std::string>{"vblast"};
  const auto modulation = keyed("scheme.modulation", [&] {
    return parse_modulation(c.get_string("scheme.modulation", "psk"));
  });
  const auto pn = power(c);
  for (const auto& kind_text : kinds) {
    const SchemeKind kind = keyed("scheme.kind", [&] { return parse_scheme_kind(kind_text); });
    std::string q_key = "scheme." + to_string(kind) + ".q";
    for (auto& ch : q_key) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (!c.has(q_key)) q_key = "scheme.q";
    const auto qs = ints(c, q_key, "2");
    const auto ms = kind == SchemeKind::kSiso ? std::vector<int>{1}
                    : kind == SchemeKind::kAstbc ? std::vector<int>{2}
                                                 : ints(c, "scheme.transmitters", "2");
    const auto ns = kind == SchemeKind::kSiso ? std::vector<int>{1} : ints(c, "scheme.receivers", "1");
    if (qs.empty()) throw ConfigError(q_key, "empty list");
    if (ms.empty()) throw ConfigError("scheme.transmitters", "empty list");
    if (ns.empty()) throw ConfigError("scheme.receivers", "empty list");
    for (int q : qs) {
      const Constellation constellation =
          keyed(q_key, [&] {
            try {
              return Constellation::build(modulation, q);
            } catch (const DomainError& e) {
              throw ConfigError(q_key, e.what());
            }
          });
      for (int m : ms) {
        for (int n : ns) {
          try {
            out.emplace_back(kind, m, n, constellation, pn);
          } catch (const DomainError& e) {
            throw ConfigError("scheme.transmitters", e.what());
          }
        }
      }
    }
  }
  return out;
}

MldMethod detector(const io::Config& c) {
  return keyed("sim.detector", [&] { return parse_mld_method(c.get_string("sim.detector", "auto")); });
}

// Tokens are "mag" or "mag@deg".
std::vector<cd> parse_delta_s(const io::Config& c, const std::string& key, std::string_view fallback) {
  const std::string text = c.has(key) ? c.get_string(key) : std::string(fallback);
  std::vector<cd> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    std::string token = text.substr(start, comma - start);
    token.erase(0, token.find_first_not_of(" \t"));
    token.erase(token.find_last_not_of(" \t") + 1);
    if (token.empty()) throw ConfigError(key, "empty entry");
    try {
      const auto at = token.find('@');
      const double mag = io::parse_double(token.substr(0, at));
      const double deg = at == std::string::npos ? 0.0 : io::parse_double(token.substr(at + 1));
      out.push_back(std::polar(mag, deg * std::numbers::pi / 180.0));
    } catch (const std::exception&) {
      throw ConfigError(key, "bad entry '" + token + "' (expected mag or mag@deg)");
    }
    start = comma + 1;
  }
  return out;
}

std::size_t nonzero(std::span<const cd> v) {
  std::size_t k = 0;
  for (auto z : v) k += z != 0.0;
  return k;
}

// C_r for a difference vector: closed form for a two-entry BPSK-magnitude
// pattern, Monte-Carlo otherwise. Empty when fewer than two entries differ.
std::optional<CrValue> cr_for(const TurbulenceParams& p, std::span<const cd> delta_s, std::uint64_t trials,
                              const Context& ctx) {
  std::vector<cd> k;
  for (auto z : delta_s) if (z != 0.0) k.push_back(z);
  if (k.size() < 2) return std::nullopt;
  if (k.size() == 2 && std::abs(std::abs(k[0]) - 2.0) < 1e-12 && std::abs(std::abs(k[1]) - 2.0) < 1e-12 &&
      p.alpha() > 0.5 && p.beta() > 0.5) {
    return cr_closed_form(p);
  }
  return cr_general(p, k, trials, RngStream(ctx.seed, 0), ctx.workers);
}

std::string fmt(double v) { return format_double(v); }

void add(Context& ctx, const std::string& name, std::string text) {
  ctx.outputs.push_back({ctx.prefix + name, std::move(text)});
}

void add_svg(Context& ctx, const std::string& name, const std::string& csv, const io::PlotSpec& spec) {
  if (ctx.svg) add(ctx, name, io::render_svg(csv, spec));
}

// ---------------------------------------------------------------------------

void cmd_simulate(Context& ctx) {
  const auto& c = ctx.config;
  const auto grid = doubles(c, "sim.snr_db", kDefaultSnrGrid);
  std::vector<SimConfig> jobs;
  for (const auto& p : channels(c)) {
    for (const auto& s : schemes(c)) {
      SimConfig job{.scheme = s, .params = p, .snr_grid_db = grid};
      job.max_trials = count(c, "sim.max_trials", job.max_trials);
      job.min_bit_errors = count(c, "sim.min_bit_errors", job.min_bit_errors);
      job.block_trials = count(c, "sim.block_trials", job.block_trials);
      job.seed = ctx.seed;
      job.workers = ctx.workers;
      job.detector = detector(c);
      job.unit_irradiance = c.get_bool("sim.unit_irradiance", false);
      job.validate();
      jobs.push_back(std::move(job));
    }
  }
  std::vector<BerCurve> curves;
  for (const auto& job : jobs) curves.push_back(simulate_ber(job));
  const std::string csv = io::ber_csv(curves);
  add(ctx, "ber.csv", csv);
  add_svg(ctx, "ber.svg", csv,
          {"BER", "snr_db", {"ber"}, {"scheme", "M", "N", "alpha", "beta", "q"}, true, "SNR (dB)", "BER"});
}

void cmd_asymptote(Context& ctx) {
  const auto& c = ctx.config;
  const auto grid = doubles(c, "sim.snr_db", kDefaultSnrGrid);
  if (grid.empty()) throw ConfigError("sim.snr_db", "empty SNR grid");
  const auto ns = ints(c, "scheme.receivers", "1");
  for (int n : ns) {
    if (n < 1) throw ConfigError("scheme.receivers", "N must be at least 1");
  }
  std::vector<io::AsymptoteRow> rows;
  for (const auto& p : channels(c)) {
    const CrValue cr = cr_closed_form(p);
    for (int n : ns) {
      const auto model = ber_asymptote(cr, n);
      for (double s : grid) {
        rows.push_back({p.alpha(), p.beta(), n, model.coefficient(), s, model.evaluate_db(s)});
      }
    }
  }
  const std::string csv = io::asymptote_csv(rows);
  add(ctx, "asymptote.csv", csv);
  add_svg(ctx, "asymptote.svg", csv,
          {"BER asymptote", "snr_db", {"ber_asymptote"}, {"alpha", "beta", "N"}, true, "SNR (dB)", "BER"});
}

void cmd_pep(Context& ctx) {
  const auto& c = ctx.config;
  const auto grid = doubles(c, "sim.snr_db", kDefaultSnrGrid);
  const std::string sent_bits = c.get_string("pep.sent", "11");
  const std::string target_bits = c.get_string("pep.target", "00");
  const auto trials = count(c, "pep.trials", 1'000'000);
  const auto cr_trials = count(c, "pep.cr_trials", 1'000'000);
  const PepForm form = [&] {
    const auto f = c.get_string("pep.form", "pairwise");
    if (f == "pairwise") return PepForm::kPairwiseMetric;
    if (f == "projected") return PepForm::kProjectedNoise;
    throw ConfigError("pep.form", "expected pairwise or projected, got '" + f + "'");
  }();

  struct Job {
    SimConfig config;
    CodewordBlock sent{};
    CodewordBlock target{};
    std::vector<cd> delta{};
  };
  std::vector<Job> jobs;
  for (const auto& p : channels(c)) {
    for (const auto& s : schemes(c)) {
      Job job{.config = SimConfig{.scheme = s, .params = p, .snr_grid_db = grid}};
      job.config.seed = ctx.seed;
      job.config.workers = ctx.workers;
      job.config.validate();
      try {
        job.sent = encode(s, keyed("pep.sent", [&] { return bits_from_string(sent_bits); }));
        job.target = encode(s, keyed("pep.target", [&] { return bits_from_string(target_bits); }));
      } catch (const DimensionError& e) {
        throw ConfigError("pep.sent", std::string(e.what()) + " for " + s.name());
      }
      if (job.sent.symbols == job.target.symbols) throw ConfigError("pep.target", "equals pep.sent");
      if (s.kind() == SchemeKind::kVblast) {
        for (int m = 0; m < s.transmitters(); ++m) {
          job.delta.push_back(s.tx_amplitude() * (job.sent.symbols(m, 0) - job.target.symbols(m, 0)));
        }
      }
      jobs.push_back(std::move(job));
    }
  }

  io::CsvTable t;
  t.header = {"scheme", "M", "N", "alpha", "beta", "q", "sent", "target", "snr_db",
              "trials", "events", "probability", "std_error", "asymptote"};
  for (const auto& job : jobs) {
    const auto& s = job.config.scheme;
    const auto cr = cr_for(job.config.params, job.delta, cr_trials, ctx);
    for (const auto& e : estimate_pep(job.config, job.sent, job.target, trials, form)) {
      const std::string asym =
          cr ? fmt(pep_asymptote(*cr, s.receivers(), numerics::db_to_linear(e.snr_db))) : "";
      t.rows.push_back({s.name(), std::to_string(s.transmitters()), std::to_string(s.receivers()),
                        fmt(job.config.params.alpha()), fmt(job.config.params.beta()),
                        std::to_string(s.constellation().size()), sent_bits, target_bits, fmt(e.snr_db),
                        std::to_string(e.trials), std::to_string(e.events), fmt(e.probability),
                        fmt(e.std_error), asym});
    }
  }
  const std::string csv = t.to_string();
  add(ctx, "pep.csv", csv);
  add_svg(ctx, "pep.svg", csv,
          {"Pairwise error probability", "snr_db", {"probability", "asymptote"},
           {"scheme", "M", "N", "alpha", "beta"}, true, "SNR (dB)", "P"});
}

void cmd_cdf(Context& ctx) {
  const auto& c = ctx.config;
  const auto delta = parse_delta_s(c, "cdf.delta_s", "2,2");
  if (nonzero(delta) == 0) throw ConfigError("cdf.delta_s", "all entries are zero");
  const auto rs = doubles(c, "cdf.r", "0.02,0.05,0.1");
  if (rs.empty()) throw ConfigError("cdf.r", "empty list");
  for (double r : rs) {
    if (!(r >= 0.0)) throw ConfigError("cdf.r", "radii must be non-negative");
  }
  const auto ns = ints(c, "scheme.receivers", "1");
  for (int n : ns) {
    if (n < 1) throw ConfigError("scheme.receivers", "N must be at least 1");
  }
  const auto trials = count(c, "cdf.trials", 1'000'000);
  const CdfEstimator estimator = [&] {
    const auto e = c.get_string("cdf.estimator", "auto");
    if (e == "auto") return CdfEstimator::kAuto;
    if (e == "direct") return CdfEstimator::kDirect;
    if (e == "cross-paired") return CdfEstimator::kCrossPaired;
    throw ConfigError("cdf.estimator", "expected auto, direct or cross-paired, got '" + e + "'");
  }();
  const auto params = channels(c);

  io::CsvTable t;
  t.header = {"alpha", "beta", "N", "r", "empirical", "asymptote"};
  for (const auto& p : params) {
    const auto cr = cr_for(p, delta, count(c, "cr.trials", 1'000'000), ctx);
    for (int n : ns) {
      const auto f = empirical_effective_cdf(p, delta, n, rs, trials, RngStream(ctx.seed, 0), ctx.workers,
                                             estimator);
      for (std::size_t i = 0; i < rs.size(); ++i) {
        const std::string asym = cr && rs[i] <= 0.1 ? fmt(effective_cdf(rs[i], n, *cr)) : "";
        t.rows.push_back({fmt(p.alpha()), fmt(p.beta()), std::to_string(n), fmt(rs[i]), fmt(f[i]), asym});
      }
    }
  }
  const std::string csv = t.to_string();
  add(ctx, "cdf.csv", csv);
  add_svg(ctx, "cdf.svg", csv,
          {"Effective-radius cdf", "r", {"empirical", "asymptote"}, {"alpha", "beta", "N"}, true, "r", "F(r)"});
}

void cmd_capacity(Context& ctx) {
  const auto& c = ctx.config;
  const auto grid = doubles(c, "sim.snr_db", kDefaultSnrGrid);
  if (grid.empty()) throw ConfigError("sim.snr_db", "empty SNR grid");
  const auto ms = ints(c, "scheme.transmitters", "2");
  const auto ns = ints(c, "scheme.receivers", "2");
  const auto trials = count(c, "capacity.trials", 100'000);
  const bool unit = c.get_bool("sim.unit_irradiance", false);
  const auto pn = power(c);
  for (int m : ms) {
    if (m < 1) throw ConfigError("scheme.transmitters", "M must be at least 1");
  }
  for (int n : ns) {
    if (n < 1) throw ConfigError("scheme.receivers", "N must be at least 1");
  }
  if (trials < 10'000) throw ConfigError("capacity.trials", "must be at least 10000");
  const auto params = channels(c);

  io::CsvTable t;
  t.header = {"alpha", "beta", "M", "N", "snr_db", "bits", "std_error"};
  for (const auto& p : params) {
    for (int m : ms) {
      for (int n : ns) {
        for (double s : grid) {
          const auto e = estimate_capacity(p, m, n, numerics::db_to_linear(s), trials, RngStream(ctx.seed, 0),
                                           ctx.workers, pn, unit);
          t.rows.push_back({fmt(p.alpha()), fmt(p.beta()), std::to_string(m), std::to_string(n), fmt(s),
                            fmt(e.bits), fmt(e.std_error)});
        }
      }
    }
  }
  const std::string csv = t.to_string();
  add(ctx, "capacity.csv", csv);
  add_svg(ctx, "capacity.svg", csv,
          {"Ergodic capacity", "snr_db", {"bits"}, {"alpha", "beta", "M", "N"}, false, "SNR (dB)",
           "bits/channel use"});
}

void cmd_cr(Context& ctx) {
  const auto& c = ctx.config;
  const auto params = channels(c);
  std::optional<std::vector<cd>> delta;
  if (c.has("cr.delta_s")) {
    delta = parse_delta_s(c, "cr.delta_s", "");
    if (nonzero(*delta) < 2) throw ConfigError("cr.delta_s", "needs at least two nonzero entries");
  }
  const auto trials = count(c, "cr.trials", 1'000'000);
  if (delta && trials < 10'000) throw ConfigError("cr.trials", "must be at least 10000");

  io::CsvTable t;
  t.header = {"alpha", "beta", "method", "value", "std_error"};
  auto row = [&](const TurbulenceParams& p, const CrValue& v) {
    t.rows.push_back({fmt(p.alpha()), fmt(p.beta()), to_string(v.method), fmt(v.value), fmt(v.std_error)});
  };
  for (const auto& p : params) {
    row(p, cr_closed_form(p));
    row(p, cr_quadrature_bpsk(p));
    if (delta) {
      std::vector<cd> k;
      for (auto z : *delta) if (z != 0.0) k.push_back(z);
      row(p, cr_general(p, k, trials, RngStream(ctx.seed, 0), ctx.workers));
    }
  }
  add(ctx, "cr.csv", t.to_string());
}

void cmd_compare(Context& ctx) {
  const auto& c = ctx.config;
  const auto params = channels(c);
  if (params.size() != 1) throw ConfigError("channel.alpha", "compare takes a single (alpha, beta)");
  const auto ms = ints(c, "scheme.transmitters", "2");
  const auto ns = ints(c, "scheme.receivers", "2");
  if (ms.size() != 1 || ms[0] < 1) throw ConfigError("scheme.transmitters", "compare takes a single M");
  if (ns.size() != 1 || ns[0] < 1) throw ConfigError("scheme.receivers", "compare takes a single N");
  ThroughputConfig tc{.params = params[0],
                      .snr_grid_db = doubles(c, "compare.snr_db", c.get_string("sim.snr_db", "0:40:1"))};
  if (c.has("compare.fec")) tc.fec = c.get_double("compare.fec");
  tc.max_trials = count(c, "compare.max_trials", tc.max_trials);
  tc.min_bit_errors = count(c, "compare.min_bit_errors", tc.min_bit_errors);
  tc.block_trials = count(c, "compare.block_trials", tc.block_trials);
  tc.seed = ctx.seed;
  tc.workers = ctx.workers;
  tc.detector = detector(c);
  tc.validate();
  const auto cap_trials = count(c, "capacity.trials", 100'000);
  if (cap_trials < 10'000) throw ConfigError("capacity.trials", "must be at least 10000");
  const bool unit = c.get_bool("sim.unit_irradiance", false);
  const auto pn = power(c);

  const auto ladders = standard_ladders(ms[0], ns[0], pn);
  const auto curves = throughput_at_fec(ladders, tc);
  std::vector<double> capacity;
  for (double s : tc.snr_grid_db) {
    capacity.push_back(estimate_capacity(tc.params, ms[0], ns[0], numerics::db_to_linear(s), cap_trials,
                                         RngStream(ctx.seed, 0), ctx.workers, pn, unit)
                           .bits);
  }
  const std::string csv = io::compare_csv(curves, capacity);
  add(ctx, "compare.csv", csv);
  add(ctx, "compare_rungs.csv", io::rungs_csv(curves));
  io::PlotSpec spec{"Throughput at FEC limit", "snr_db", {}, {}, false, "SNR (dB)", "bits/channel use"};
  for (const auto& curve : curves) spec.y_columns.push_back(curve.name);
  spec.y_columns.push_back("capacity");
  add_svg(ctx, "compare.svg", csv, spec);
}

using Handler = void (*)(Context&);

struct Command {
  const char* name;
  const char* help;
  Handler handler;
};

constexpr Command kCommands[] = {
    {"simulate", "Monte-Carlo BER curves", cmd_simulate},
    {"asymptote", "high-SNR BER asymptote lines", cmd_asymptote},
    {"pep", "pairwise error probability of one codeword pair", cmd_pep},
    {"cdf", "empirical effective-radius cdf against its small-r law", cmd_cdf},
    {"compare", "throughput at the FEC limit for the QAM ladders", cmd_compare},
    {"capacity", "ergodic MIMO capacity", cmd_capacity},
    {"cr", "turbulence constant C_r by every available method", cmd_cr},
};

int workers_from_env() {
  const char* env = std::getenv("TURBOSIM_WORKERS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) {
    throw ConfigError("TURBOSIM_WORKERS", std::string("expected a positive integer, got '") + env + "'");
  }
  return static_cast<int>(v);
}

io::Config effective_config(const Options& o) {
  io::Config c = o.config_path.empty() ? io::Config{} : io::Config::load(o.config_path);
  for (const auto& a : o.assignments) c.set_assignment(a);
  if (o.seed) c.set("sim.seed", std::to_string(*o.seed));
  if (o.workers) c.set("sim.workers", std::to_string(*o.workers));
  if (o.power) c.set("scheme.power_normalization", *o.power);
  if (o.alpha) c.set("channel.alpha", *o.alpha);
  if (o.beta) c.set("channel.beta", *o.beta);
  if (o.n_list) c.set("scheme.receivers", *o.n_list);
  if (o.svg) c.set("output.svg", "true");
  c.require_known(kKnownKeys);
  return c;
}

std::uint64_t config_hash(const std::string& command, const io::Config& c) {
  std::string text = "command=" + command + "\n";
  for (const auto& [k, v] : c.values()) {
    if (k != "sim.workers") text += k + "=" + v + "\n";
  }
  return fnv1a64(text);
}

int execute(const Command& cmd, const Options& o, std::ostream& out) {
  Context ctx;
  ctx.command = cmd.name;
  ctx.config = effective_config(o);
  ctx.svg = ctx.config.get_bool("output.svg", false);
  ctx.seed = ctx.config.get_u64("sim.seed", 1);
  ctx.workers = ctx.config.has("sim.workers") ? ctx.config.get_int("sim.workers", 1) : workers_from_env();
  if (ctx.workers < 1) throw ConfigError("sim.workers", "must be at least 1");
  ctx.prefix = ctx.config.get_string("output.prefix", "");

  io::RunManifest manifest;
  manifest.command = cmd.name;
  manifest.config_hash = config_hash(cmd.name, ctx.config);
  manifest.seed = ctx.seed;
  manifest.tool_version = io::version();
  manifest.started_at = io::utc_timestamp();
  cmd.handler(ctx);
  manifest.finished_at = io::utc_timestamp();

  const fs::path dir(o.out_dir);
  for (const auto& f : ctx.outputs) {
    io::write_text_file(dir / f.name, f.text);
    manifest.outputs.push_back((dir / f.name).generic_string());
    out << "wrote " << (dir / f.name).generic_string() << "\n";
  }
  const fs::path manifest_path = dir / (ctx.prefix + cmd.name + ".manifest.json");
  io::write_text_file(manifest_path, io::manifest_json(manifest));
  out << "wrote " << manifest_path.generic_string() << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte-Carlo and asymptotic BER tools for MIMO links over Gamma-Gamma turbulence", "turbosim"};
  app.set_version_flag("--version", std::string(io::version()));
  app.require_subcommand(1);

  Options o;
  const Command* selected = nullptr;
  for (const auto& cmd : kCommands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", o.config_path, "key = value run configuration");
    sub->add_option("--seed", o.seed, "master seed (sim.seed)");
    sub->add_option("--workers", o.workers, "worker threads (sim.workers; default $TURBOSIM_WORKERS or 1)");
    sub->add_option("--out", o.out_dir, "output directory")->capture_default_str();
    sub->add_flag("--svg", o.svg, "also write SVG plots");
    sub->add_option("--power-normalization", o.power, "per-antenna or total")
        ->check(CLI::IsMember({"per-antenna", "total"}));
    sub->add_option("--set", o.assignments, "override a config key, e.g. --set sim.max_trials=1e6");
    sub->add_option("--alpha", o.alpha, "channel.alpha (list)");
    sub->add_option("--beta", o.beta, "channel.beta (list)");
    sub->add_option("--n-list", o.n_list, "scheme.receivers (list)");
    sub->callback([&selected, &cmd] { selected = &cmd; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    return execute(*selected, o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DimensionError& e) {
    err << "dimension error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ConvergenceError& e) {
    err << "did not converge: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace turbosim::cli
