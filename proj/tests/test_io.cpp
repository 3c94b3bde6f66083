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
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"
#include "turbosim/errors.hpp"
#include "turbosim/io.hpp"

namespace {

using namespace turbosim;
namespace fs = std::filesystem;

std::string key_of(auto&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no throw>";
}

TEST(Config, SectionsCommentsAndTypes) {
  const auto c = io::Config::parse(R"(
# leading comment
; another
seed = 7
[sim]
scheme = vblast   # trailing comment
snr_db = 0:10:2.5
max_trials = 0x100
unit = true
[channel]
alpha = 4
)");
  EXPECT_EQ(c.get_u64("seed"), 7u);
  EXPECT_EQ(c.get_string("sim.scheme"), "vblast");
  EXPECT_EQ(c.get_double_list("sim.snr_db"), (std::vector<double>{0, 2.5, 5, 7.5, 10}));
  EXPECT_EQ(c.get_u64("sim.max_trials"), 256u);
  EXPECT_TRUE(c.get_bool("sim.unit", false));
  EXPECT_EQ(c.get_double("channel.alpha"), 4.0);
  EXPECT_EQ(c.get_double("channel.beta", 2.5), 2.5);
  EXPECT_EQ(c.get_string("missing", "x"), "x");
}

TEST(Config, ErrorsNameTheKey) {
  EXPECT_EQ(key_of([] { io::Config::parse("a = 1\na = 2\n"); }), "a");
  EXPECT_EQ(key_of([] { io::Config::parse("[sim]\nbad key = 1\n"); }), "sim.bad key");
  const auto c = io::Config::parse("[sim]\nmax_trials = lots\nsnr_db = 1,x\n");
  EXPECT_EQ(key_of([&] { c.get_u64("sim.max_trials"); }), "sim.max_trials");
  EXPECT_EQ(key_of([&] { c.get_double_list("sim.snr_db"); }), "sim.snr_db");
  EXPECT_EQ(key_of([&] { c.get_double("sim.absent"); }), "sim.absent");
  const std::string_view allowed[] = {"sim.max_trials"};
  EXPECT_EQ(key_of([&] { c.require_known(allowed); }), "sim.snr_db");
  EXPECT_THROW(io::Config::parse("no equals sign\n"), ConfigError);
  EXPECT_THROW(io::Config::parse("[open\n"), ConfigError);
}

TEST(Config, OverridesAndCanonicalHash) {
  auto a = io::Config::parse("[sim]\nseed = 1\nsnr_db = 0:4:1\n");
  const auto b = io::Config::parse("# same content\n[sim]\nsnr_db=0:4:1\n\n  seed   =   1\n");
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_EQ(a.hash(), b.hash());
  a.set_assignment("sim.seed=2");
  EXPECT_EQ(a.get_u64("sim.seed"), 2u);
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_THROW(a.set_assignment("novalue"), ConfigError);
}

TEST(Config, LoadMissingFile) {
  EXPECT_EQ(key_of([] { io::Config::load("/nonexistent/turbosim.ini"); }), "config");
}

TEST(NumberList, Forms) {
  EXPECT_EQ(io::parse_number_list("1, 2.5,4", "k"), (std::vector<double>{1, 2.5, 4}));
  const auto r = io::parse_number_list("0:1:0.1", "k");
  ASSERT_EQ(r.size(), 11u);
  EXPECT_EQ(r[3], 0.3);
  EXPECT_EQ(r.back(), 1.0);
  EXPECT_EQ(io::parse_number_list("5:5:1", "k"), (std::vector<double>{5}));
  EXPECT_THROW(io::parse_number_list("0:1:0", "k"), ConfigError);
  EXPECT_THROW(io::parse_number_list("1:0:1", "k"), ConfigError);
  EXPECT_TRUE(io::parse_number_list("", "k").empty());
}

TEST(Csv, ParseAndColumns) {
  const auto t = io::parse_csv("a,b\n1,2\n3,4\n");
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.column("b"), 1u);
  EXPECT_THROW(t.column("c"), DimensionError);
  EXPECT_EQ(t.to_string(), "a,b\n1,2\n3,4\n");
  EXPECT_THROW(io::parse_csv("a,b\n1\n"), DimensionError);
}

BerCurve small_curve() {
  SimConfig c{.scheme = SchemeConfig(SchemeKind::kVblast, 2, 2, Constellation::build(ModulationKind::kQam, 4)),
              .params = TurbulenceParams(4.0, 2.0),
              .snr_grid_db = {0.0, 3.5, 7.0},
              .max_trials = 3000,
              .min_bit_errors = 100,
              .seed = 3};
  return simulate_ber(c);
}

TEST(BerCsv, RoundTrip) {
  auto curve = small_curve();
  const std::vector<BerCurve> curves{curve};
  const std::string text = io::ber_csv(curves);
  EXPECT_EQ(text.substr(0, text.find('\n')), io::kBerHeader);
  auto back = io::parse_ber_csv(text);
  ASSERT_EQ(back.size(), 1u);
  curve.seed = 0;
  curve.fingerprint = 0;
  EXPECT_EQ(back[0], curve);
  EXPECT_EQ(io::ber_csv(back), text);
}

TEST(BerCsv, RejectsWrongHeader) {
  EXPECT_THROW(io::parse_ber_csv("scheme,M\nVBLAST-PSK,2\n"), DimensionError);
}

TEST(AsymptoteCsv, RoundTrip) {
  const std::vector<io::AsymptoteRow> rows{{4.0, 2.0, 1, 0.12698412698412698, 10.0, 0.0126984},
                                           {4.0, 2.0, 2, 0.0483749, 12.5, 2.7e-5}};
  const std::string text = io::asymptote_csv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), io::kAsymptoteHeader);
  EXPECT_EQ(io::parse_asymptote_csv(text), rows);
}

TEST(Svg, DeterministicFromCsv) {
  const std::string csv = io::ber_csv(std::vector<BerCurve>{small_curve()});
  const io::PlotSpec spec{"BER", "snr_db", {"ber"}, {"scheme", "M", "N"}, true, "SNR (dB)", "BER"};
  const std::string a = io::render_svg(csv, spec);
  EXPECT_EQ(a, io::render_svg(csv, spec));
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
  EXPECT_NE(a.find("<polyline"), std::string::npos);
  auto missing = spec;
  missing.y_columns = {"nope"};
  EXPECT_THROW(io::render_svg(csv, missing), DimensionError);
}

TEST(CompareCsv, Layout) {
  ThroughputCurve a;
  a.name = "VBLAST";
  a.snr_db = {0.0, 10.0};
  a.bits_per_use = {0.0, 4.0};
  RungResult r;
  r.label = "4-QAM";
  r.bits_per_use = 4.0;
  r.threshold_db = 7.25;
  a.rungs = {r};
  const std::vector<ThroughputCurve> curves{a};
  const std::vector<double> cap{1.5, 6.25};
  EXPECT_EQ(io::compare_csv(curves, cap), "snr_db,VBLAST,capacity\n0,0,1.5\n10,4,6.25\n");
  EXPECT_EQ(io::rungs_csv(curves), "scheme,rung,bits_per_use,threshold_db\nVBLAST,4-QAM,4,7.25\n");
}

TEST(Manifest, ValidJson) {
  io::RunManifest m{"simulate", 0xabcdefull, 42, io::version(), io::utc_timestamp(), io::utc_timestamp(),
                    {"out/ber.csv", "out/ber.svg"}};
  const auto j = nlohmann::json::parse(io::manifest_json(m));
  EXPECT_EQ(j.at("command"), "simulate");
  EXPECT_EQ(j.at("config_hash"), "0000000000abcdef");
  EXPECT_EQ(j.at("seed"), 42);
  EXPECT_EQ(j.at("outputs").size(), 2u);
  EXPECT_EQ(j.at("started_at").get<std::string>().back(), 'Z');
}

TEST(Files, WriteReadCreatesDirectories) {
  const fs::path dir = fs::temp_directory_path() / "turbosim_test_io";
  fs::remove_all(dir);
  const fs::path file = dir / "nested" / "x.csv";
  io::write_text_file(file, "a\r\nb\n");
  EXPECT_EQ(io::read_text_file(file), "a\r\nb\n");
  fs::remove_all(dir);
}

}  // namespace
