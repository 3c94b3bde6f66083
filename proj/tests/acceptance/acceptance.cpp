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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.
//
//   turbosim_acceptance [--only 1,4,9] [--out DIR]

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "turbosim/asymptotics.hpp"
#include "turbosim/io.hpp"
#include "turbosim/montecarlo.hpp"
#include "turbosim/numerics.hpp"

namespace {

using namespace turbosim;
using cd = std::complex<double>;

constexpr std::uint64_t kSeed = 20240601;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::optional<std::filesystem::path> g_out;

void save(const std::string& name, const std::string& text) {
  if (g_out) io::write_text_file(*g_out / name, text);
}

SchemeConfig bpsk_vblast(int m, int n) {
  return SchemeConfig(SchemeKind::kVblast, m, n, Constellation::build(ModulationKind::kPsk, 2));
}

// Simulates grid points in order and stops after the first point that ends
// at max_trials with fewer than min_report errors, or whose BER drops below
// `floor`.
BerCurve simulate_until(const SimConfig& c, std::uint64_t min_report, double floor = 0.0) {
  BerCurve curve;
  curve.scheme = c.scheme.name();
  curve.transmitters = c.scheme.transmitters();
  curve.receivers = c.scheme.receivers();
  curve.alpha = c.params.alpha();
  curve.beta = c.params.beta();
  curve.q = c.scheme.constellation().size();
  curve.seed = c.seed;
  curve.fingerprint = c.fingerprint();
  for (std::size_t i = 0; i < c.snr_grid_db.size(); ++i) {
    curve.points.push_back(simulate_ber_point(c, i));
    const auto& p = curve.points.back();
    if (p.bit_errors < min_report || p.ber < floor) break;
  }
  return curve;
}

// Log-linear interpolation of the SNR where the curve first falls to `target`.
std::optional<double> snr_at_ber(const BerCurve& curve, double target) {
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    if (a.ber >= target && b.ber < target && b.bit_errors > 0) {
      const double t = (std::log10(a.ber) - std::log10(target)) / (std::log10(a.ber) - std::log10(b.ber));
      return a.snr_db + t * (b.snr_db - a.snr_db);
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Shared runs, parameterised by worker count for the determinism check.

std::string run_cdf(int workers, std::vector<std::vector<double>>* values = nullptr) {
  const TurbulenceParams params(4.0, 2.0);
  const cd ds[] = {2.0, 2.0};
  const std::vector<double> r{0.02, 0.05, 0.1};
  io::CsvTable t;
  t.header = {"N", "r", "empirical"};
  for (int n : {1, 2}) {
    const auto f = empirical_effective_cdf(params, ds, n, r, 10'000'000, RngStream(kSeed, n), workers);
    if (values) values->push_back(f);
    for (std::size_t i = 0; i < r.size(); ++i) {
      t.rows.push_back({std::to_string(n), format_double(r[i]), format_double(f[i])});
    }
  }
  return t.to_string();
}

double ac3_snr_db() {
  const auto model = ber_asymptote(cr_closed_form(TurbulenceParams(4.0, 2.0)), 2);
  return numerics::linear_to_db(model.snr_at(1e-4));
}

std::string run_pep(int workers, std::vector<PepEstimate>* out, const std::vector<double>& grid,
                    const std::string& target_bits, std::uint64_t trials) {
  const auto s = bpsk_vblast(2, 2);
  SimConfig c{.scheme = s, .params = TurbulenceParams(4.0, 2.0), .snr_grid_db = grid};
  c.seed = kSeed;
  c.workers = workers;
  const auto est = estimate_pep(c, encode(s, bits_from_string("11")), encode(s, bits_from_string(target_bits)),
                                trials);
  if (out) *out = est;
  io::CsvTable t;
  t.header = {"target", "snr_db", "trials", "events", "probability", "std_error"};
  for (const auto& e : est) {
    t.rows.push_back({target_bits, format_double(e.snr_db), std::to_string(e.trials), std::to_string(e.events),
                      format_double(e.probability), format_double(e.std_error)});
  }
  return t.to_string();
}

SimConfig ac4_config(int n, int workers) {
  SimConfig c{.scheme = bpsk_vblast(2, n), .params = TurbulenceParams(4.0, 2.0), .snr_grid_db = {}};
  c.snr_grid_db = n == 2 ? io::parse_number_list("10:22:0.5", "grid") : io::parse_number_list("30:47:1", "grid");
  c.max_trials = 10'000'000;
  c.min_bit_errors = 1000;
  c.seed = kSeed;
  c.workers = workers;
  return c;
}

std::vector<ThroughputCurve> run_throughput(int workers) {
  ThroughputConfig tc{.params = TurbulenceParams(4.0, 2.0), .snr_grid_db = io::parse_number_list("0:40:1", "grid")};
  tc.fec = 1e-3;
  tc.max_trials = 200'000;
  tc.seed = kSeed;
  tc.workers = workers;
  return throughput_at_fec(standard_ladders(2, 2), tc);
}

std::string throughput_csv(const std::vector<ThroughputCurve>& curves) {
  const std::vector<double> no_capacity(curves.front().snr_db.size(), 0.0);
  return io::compare_csv(curves, no_capacity) + io::rungs_csv(curves);
}

// Results reused by the determinism criterion.
struct Cache {
  std::optional<std::string> cdf_csv;
  std::optional<std::string> pep_csv;
  std::optional<BerCurve> ber_2x2;
  std::optional<BerCurve> ber_2x1;
  std::optional<std::string> throughput_csv;
  std::optional<CrValue> cr_general_44;
};

Cache g_cache;

const BerCurve& ber_curve(int n) {
  auto& slot = n == 2 ? g_cache.ber_2x2 : g_cache.ber_2x1;
  if (!slot) {
    slot = simulate_until(ac4_config(n, 1), 100);
    save("ber_2x" + std::to_string(n) + ".csv", io::ber_csv(std::vector<BerCurve>{*slot}));
  }
  return *slot;
}

// ---------------------------------------------------------------------------

Verdict ac1() {
  const auto start = std::chrono::steady_clock::now();
  const cd ds[] = {2.0, 2.0};
  double worst_rel = 0.0, worst_sigma = 0.0;
  std::uint64_t stream = 0;
  for (double a : {2.0, 3.0, 4.0}) {
    for (double b : {1.5, 2.0, 2.5}) {
      const TurbulenceParams p(a, b);
      const double closed = cr_closed_form(p).value;
      worst_rel = std::max(worst_rel, rel(cr_quadrature_bpsk(p).value, closed));
      const auto mc = cr_general(p, ds, 1'000'000, RngStream(kSeed, ++stream));
      if (a == 4.0 && b == 2.0) g_cache.cr_general_44 = mc;
      worst_sigma = std::max(worst_sigma, std::abs(mc.value - closed) / mc.std_error);
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst_rel <= 1e-8 && worst_sigma <= 3.0 && secs < 60.0,
          "max rel(quad, closed)=" + num(worst_rel, 3) + " (<=1e-8), max |MC-closed|/se=" + num(worst_sigma, 3) +
              " (<=3), runtime " + num(secs, 3) + " s (<60)"};
}

Verdict ac2() {
  std::vector<std::vector<double>> f;
  g_cache.cdf_csv = run_cdf(1, &f);
  save("cdf.csv", *g_cache.cdf_csv);
  const CrValue cr = cr_closed_form(TurbulenceParams(4.0, 2.0));
  const std::vector<double> r{0.02, 0.05, 0.1};
  bool pass = true;
  std::string detail;
  for (int n : {1, 2}) {
    double worst = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, rel(f[n - 1][i], effective_cdf(r[i], n, cr)));
    std::vector<double> db;
    for (double x : r) db.push_back(10.0 * std::log10(x));  // fit abscissa becomes log10 r
    const double slope = fit_log_log_slope(db, f[n - 1], db.front(), db.back()).fitted_slope;
    pass = pass && worst <= 0.05 && std::abs(slope - 2.0 * n) <= 0.05;
    detail += "N=" + std::to_string(n) + ": max rel err " + num(worst, 3) + " (<=0.05), slope " + num(slope, 4) +
              " (" + std::to_string(2 * n) + "+-0.05); ";
  }
  return {pass, detail};
}

Verdict ac3() {
  const double snr_db = ac3_snr_db();
  std::vector<PepEstimate> est;
  g_cache.pep_csv = run_pep(1, &est, {snr_db}, "00", 10'000'000);
  save("pep.csv", *g_cache.pep_csv);
  const CrValue cr = cr_closed_form(TurbulenceParams(4.0, 2.0));
  const double predicted = pep_asymptote(cr, 2, numerics::db_to_linear(snr_db));
  const double r = est[0].probability / predicted;
  return {std::abs(r - 1.0) <= 0.15, "SNR " + num(snr_db, 4) + " dB, MC " + num(est[0].probability) + " (" +
                                         std::to_string(est[0].events) + " events) vs " + num(predicted) +
                                         ", ratio " + num(r) + " (1+-0.15)"};
}

Verdict ac4() {
  const CrValue cr = cr_closed_form(TurbulenceParams(4.0, 2.0));
  bool pass = true;
  std::string detail;
  for (int n : {2, 1}) {
    const auto& curve = ber_curve(n);
    const BerPoint* top = nullptr;
    for (const auto& p : curve.points) {
      if (p.bit_errors >= 100) top = &p;
    }
    if (!top) return {false, "2x" + std::to_string(n) + ": no point with >=100 errors"};
    const double line = ber_asymptote(cr, n).evaluate_db(top->snr_db);
    const double r = top->ber / line;
    pass = pass && std::abs(r - 1.0) <= 0.25;
    detail += "2x" + std::to_string(n) + " @" + num(top->snr_db) + " dB: BER " + num(top->ber) + " (" +
              std::to_string(top->bit_errors) + " errors) vs line " + num(line) + ", ratio " + num(r) +
              " (1+-0.25); ";
  }
  return {pass, detail};
}

Verdict ac5() {
  bool pass = true;
  std::string detail;
  for (int n : {1, 2}) {
    const auto& curve = ber_curve(n);
    const auto [lo, hi] = top_converged_decade(curve);
    const auto fit = fit_diversity_slope(curve, lo, hi);
    const double d = fit.diversity();
    pass = pass && std::abs(d - n) <= 0.15;
    detail += "N=" + std::to_string(n) + ": window " + num(lo) + "-" + num(hi) + " dB (" +
              std::to_string(fit.points) + " pts), diversity " + num(d) + " (" + std::to_string(n) +
              "+-0.15; N*min(a,b)=" + std::to_string(2 * n) + "); ";
  }
  return {pass, detail};
}

Verdict ac6() {
  std::string detail;
  std::vector<double> gaps;
  for (double beta : {1.0, 2.5}) {
    SimConfig c{.scheme = bpsk_vblast(2, 2), .params = TurbulenceParams(4.0, beta),
                .snr_grid_db = io::parse_number_list("0:40:0.5", "grid")};
    c.max_trials = 10'000'000;
    c.min_bit_errors = 1000;
    c.seed = kSeed;
    const auto curve = simulate_until(c, 100, 1e-4);
    save("ber_beta" + format_double(beta) + ".csv", io::ber_csv(std::vector<BerCurve>{curve}));
    const auto sim = snr_at_ber(curve, 1e-3);
    const double line = numerics::linear_to_db(ber_asymptote(cr_closed_form(c.params), 2).snr_at(1e-3));
    if (!sim) return {false, "beta=" + format_double(beta) + ": curve never reached 1e-3"};
    gaps.push_back(*sim - line);
    detail += "beta=" + format_double(beta) + ": sim " + num(*sim) + " dB vs line " + num(line) + " dB, gap " +
              num(gaps.back(), 3) + " dB; ";
  }
  detail += "(need beta=1 gap >= 2, |beta=2.5 gap| <= 1)";
  return {gaps[0] >= 2.0 && std::abs(gaps[1]) <= 1.0, detail};
}

Verdict ac7() {
  const std::vector<double> grid{10.0, 12.0, 14.0};
  std::vector<PepEstimate> single, dbl;
  save("pep_single.csv", run_pep(1, &single, grid, "01", 10'000'000));
  save("pep_double.csv", run_pep(1, &dbl, grid, "00", 10'000'000));
  auto slope = [&](const std::vector<PepEstimate>& e) {
    std::vector<double> x, y;
    for (const auto& p : e) {
      x.push_back(p.snr_db);
      y.push_back(p.probability);
    }
    return fit_log_log_slope(x, y, grid.front(), grid.back()).fitted_slope;
  };
  const double s1 = std::abs(slope(single));
  const double s2 = std::abs(slope(dbl));
  std::string events;
  for (const auto& p : single) events += std::to_string(p.events) + " ";
  return {s1 - s2 >= 1.0, "window " + num(grid.front()) + "-" + num(grid.back()) + " dB: |slope| single " + num(s1) +
                              " (events " + events + "), double " + num(s2) + ", difference " + num(s1 - s2) +
                              " (>=1)"};
}

Verdict ac8() {
  const TurbulenceParams params(4.0, 2.0);
  double worst = 0.0;
  for (double snr_db : {-10.0, 0.0, 10.0, 20.0, 40.0}) {
    const double snr = numerics::db_to_linear(snr_db);
    const auto c = estimate_capacity(params, 1, 1, snr, 10'000, RngStream(kSeed, 0), 1,
                                     PowerNormalization::kPerAntenna, true);
    worst = std::max(worst, std::abs(c.bits - std::log2(1.0 + snr)));
  }
  const auto c30 = estimate_capacity(params, 2, 2, 1e3, 100'000, RngStream(kSeed, 1));
  const auto c40 = estimate_capacity(params, 2, 2, 1e4, 100'000, RngStream(kSeed, 1));
  const double slope = (c40.bits - c30.bits) * 3.0 / 10.0;

  const auto curves = run_throughput(1);
  g_cache.throughput_csv = throughput_csv(curves);
  save("throughput.csv", *g_cache.throughput_csv);
  const auto cross = locate_crossover(curves[1], curves[0]);
  std::string detail = "scalar max |err| " + num(worst, 3) + " (<=1e-12); 2x2 slope " + num(slope) +
                       " bits/3dB (2+-0.2); crossover ";
  detail += cross ? num(*cross) + " dB (18+-3)" : "not found";
  return {worst <= 1e-12 && std::abs(slope - 2.0) <= 0.2 && cross && std::abs(*cross - 18.0) <= 3.0, detail};
}

Verdict ac9() {
  constexpr int kWorkers = 4;
  std::vector<std::string> diffs;
  std::string checked;
  auto check = [&](const std::string& name, const std::string& a, const std::string& b) {
    checked += name + " ";
    if (a != b) diffs.push_back(name);
  };
  if (!g_cache.cdf_csv) g_cache.cdf_csv = run_cdf(1);
  check("cdf", *g_cache.cdf_csv, run_cdf(kWorkers));
  if (!g_cache.pep_csv) g_cache.pep_csv = run_pep(1, nullptr, {ac3_snr_db()}, "00", 10'000'000);
  check("pep", *g_cache.pep_csv, run_pep(kWorkers, nullptr, {ac3_snr_db()}, "00", 10'000'000));
  {
    const auto& one = ber_curve(2);
    const auto four = simulate_until(ac4_config(2, kWorkers), 100);
    check("ber_2x2", io::ber_csv(std::vector<BerCurve>{one}), io::ber_csv(std::vector<BerCurve>{four}));
  }
  if (!g_cache.throughput_csv) g_cache.throughput_csv = throughput_csv(run_throughput(1));
  check("throughput", *g_cache.throughput_csv, throughput_csv(run_throughput(kWorkers)));
  {
    const cd ds[] = {2.0, 2.0};
    const auto a = cr_general(TurbulenceParams(4.0, 2.0), ds, 1'000'000, RngStream(kSeed, 7), 1);
    const auto b = cr_general(TurbulenceParams(4.0, 2.0), ds, 1'000'000, RngStream(kSeed, 7), kWorkers);
    check("cr_general", format_double(a.value) + format_double(a.std_error),
          format_double(b.value) + format_double(b.std_error));
  }
  std::string detail = "workers 1 vs " + std::to_string(kWorkers) + " on: " + checked;
  if (!diffs.empty()) {
    detail += "; differing:";
    for (const auto& d : diffs) detail += " " + d;
  } else {
    detail += "; all byte-identical";
  }
  return {diffs.empty(), detail};
}

Verdict ac10() {
  using numerics::bessel_k;
  using numerics::ln_gamma;
  std::vector<std::string> failures;
  double worst_lg = 0.0;
  for (double x = 0.5; x <= 50.0; x += 0.5) {
    worst_lg = std::max(worst_lg, std::abs(ln_gamma(x + 1.0) - ln_gamma(x) - std::log(x)));
  }
  if (worst_lg >= 1e-12) failures.push_back("lnGamma recurrence");
  if (ln_gamma(1.0) != 0.0 && std::abs(ln_gamma(1.0)) > 1e-15) failures.push_back("lnGamma(1)");
  const double ln_sqrt_pi = 0.5 * std::log(std::numbers::pi);
  if (rel(ln_gamma(0.5), ln_sqrt_pi) >= 1e-13) failures.push_back("lnGamma(1/2)");
  double worst_half = 0.0;
  {
    double g = std::sqrt(std::numbers::pi);  // Γ(1/2)
    for (int k = 0; k < 60; ++k) {
      const double x = k + 0.5;
      worst_half = std::max(worst_half, rel(ln_gamma(x), std::log(g)));
      g *= x;
    }
  }
  if (worst_half >= 1e-13) failures.push_back("lnGamma half-integers");

  double worst_k = 0.0;
  for (double x : {0.05, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0}) {
    const double e = std::exp(-x) * std::sqrt(std::numbers::pi / (2.0 * x));
    worst_k = std::max(worst_k, rel(bessel_k(0.5, x), e));
    worst_k = std::max(worst_k, rel(bessel_k(1.5, x), e * (1.0 + 1.0 / x)));
    worst_k = std::max(worst_k, rel(bessel_k(2.5, x), e * (1.0 + 3.0 / x + 3.0 / (x * x))));
    for (double nu = 1.0; nu <= 9.0; nu += 0.25) {
      const double rhs = bessel_k(nu - 1.0, x) + 2.0 * nu / x * bessel_k(nu, x);
      worst_k = std::max(worst_k, rel(bessel_k(nu + 1.0, x), rhs));
    }
  }
  worst_k = std::max(worst_k, rel(bessel_k(-1.3, 2.0), bessel_k(1.3, 2.0)));
  worst_k = std::max(worst_k, rel(bessel_k(2.0, 1.0), bessel_k(0.0, 1.0) + 2.0 * bessel_k(1.0, 1.0)));
  if (worst_k >= 1e-10) failures.push_back("bessel_k identities");

  std::string detail = "lnGamma recurrence max " + num(worst_lg, 3) + " (<1e-12), half-integer rel " +
                       num(worst_half, 3) + " (<1e-13); K identities max rel " + num(worst_k, 3) + " (<1e-10)";
  for (const auto& f : failures) detail += "; FAILED " + f;
  return {failures.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      for (double v : io::parse_number_list(argv[++i], "--only")) only.insert(static_cast<int>(v));
    } else if (a == "--out" && i + 1 < argc) {
      g_out = std::filesystem::path(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only 1,2,...] [--out DIR]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
      {1, ac1}, {2, ac2}, {3, ac3}, {4, ac4}, {5, ac5},
      {6, ac6}, {7, ac7}, {8, ac8}, {9, ac9}, {10, ac10},
  };
  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("AC%d %s %s [%.1f s]\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
