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

// Run configuration, CSV tables, SVG plots and run manifests.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "turbosim/curve.hpp"
#include "turbosim/montecarlo.hpp"

namespace turbosim::io {

const char* version() noexcept;

/// Flat `key = value` configuration. `[section]` lines prefix the following
/// keys with "section."; `#` and `;` start comments. Lists are
/// comma-separated; a numeric list may also be written `start:stop:step`.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  /// Inserts or replaces a key (command-line overrides).
  void set(const std::string& key, const std::string& value);
  /// Parses "key=value" and calls set(). Throws ConfigError if malformed.
  void set_assignment(std::string_view assignment);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<int> get_int_list(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key) const;

  /// Throws ConfigError naming the first key not in `allowed`.
  void require_known(std::span<const std::string_view> allowed) const;

  /// Sorted "key=value" lines; equal for configs that differ only in
  /// layout, comments or key order.
  std::string canonical() const;
  std::uint64_t hash() const { return fnv1a64(canonical()); }

 private:
  std::map<std::string, std::string> values_;
};

/// Parses "start:stop:step" or a comma list into numbers. `key` names the
/// source in error messages.
std::vector<double> parse_number_list(std::string_view text, const std::string& key);

/// Minimal CSV: no quoting, comma separators, LF line endings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
  /// Index of `name` in the header. Throws DimensionError if absent.
  std::size_t column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);

double parse_double(std::string_view text);
std::uint64_t parse_u64(std::string_view text);

inline constexpr std::string_view kBerHeader =
    "scheme,M,N,alpha,beta,q,snr_db,trials,bit_errors,ber,ci_low,ci_high";
inline constexpr std::string_view kAsymptoteHeader = "alpha,beta,N,coefficient,snr_db,ber_asymptote";

std::string ber_csv(std::span<const BerCurve> curves);
/// Inverse of ber_csv(). Seed and fingerprint are not part of the schema (the
/// manifest carries them) and come back as 0; low_confidence is recomputed
/// from `min_bit_errors`.
std::vector<BerCurve> parse_ber_csv(std::string_view text, std::uint64_t min_bit_errors = 100);

struct AsymptoteRow {
  double alpha = 0.0;
  double beta = 0.0;
  int n = 0;
  double coefficient = 0.0;
  double snr_db = 0.0;
  double ber_asymptote = 0.0;

  friend bool operator==(const AsymptoteRow&, const AsymptoteRow&) = default;
};

std::string asymptote_csv(std::span<const AsymptoteRow> rows);
std::vector<AsymptoteRow> parse_asymptote_csv(std::string_view text);

/// snr_db, one bits-per-use column per curve (named after it), capacity.
std::string compare_csv(std::span<const ThroughputCurve> curves, std::span<const double> capacity);
/// scheme,rung,bits_per_use,threshold_db (empty when the rung never crosses).
std::string rungs_csv(std::span<const ThroughputCurve> curves);

struct PlotSpec {
  std::string title;
  std::string x_column;
  std::vector<std::string> y_columns;
  /// Columns whose joint value separates rows into series.
  std::vector<std::string> group_by;
  bool log_y = false;
  std::string x_label;
  std::string y_label;
};

/// Renders line plots from CSV text only.
std::string render_svg(std::string_view csv_text, const PlotSpec& spec);

struct RunManifest {
  std::string command;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string started_at;   ///< ISO-8601 UTC
  std::string finished_at;
  std::vector<std::string> outputs;
};

std::string manifest_json(const RunManifest& manifest);
std::string utc_timestamp();

/// Writes bytes verbatim (no newline translation), creating parent directories.
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace turbosim::io
