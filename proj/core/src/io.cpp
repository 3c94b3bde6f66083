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

#include "turbosim/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "turbosim/errors.hpp"

#ifndef TURBOSIM_VERSION
#define TURBOSIM_VERSION "0.0.0"
#endif

namespace turbosim::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  });
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

int bits_for_scheme(std::string_view scheme, int m, int q) {
  const int b = std::countr_zero(static_cast<unsigned>(q));
  if (scheme.starts_with("ASTBC")) return 2 * b;
  if (scheme.starts_with("SISO")) return b;
  return m * b;
}

}  // namespace

const char* version() noexcept { return TURBOSIM_VERSION; }

// ---------------------------------------------------------------------------
// Config

Config Config::parse(std::string_view text) {
  Config config;
  std::string section;
  int line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty() || line.front() == ';') continue;
    const std::string where = "line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("", where + ": unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!section.empty() && !valid_key(section)) {
        throw ConfigError(section, where + ": invalid section name");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("", where + ": expected key = value");
    const std::string local(trim(line.substr(0, eq)));
    const std::string key = section.empty() ? local : section + "." + local;
    if (!valid_key(local)) throw ConfigError(key, where + ": invalid key");
    if (config.has(key)) throw ConfigError(key, where + ": duplicate key");
    config.values_[key] = std::string(trim(line.substr(eq + 1)));
  }
  return config;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError(key, "invalid key");
  values_[key] = value;
}

void Config::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(std::string(assignment), "override must have the form key=value");
  }
  set(std::string(trim(assignment.substr(0, eq))), std::string(trim(assignment.substr(eq + 1))));
}

std::string Config::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key, "required key is missing");
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    return parse_double(v);
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    return parse_u64(v);
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
  }
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? get_u64(key) : fallback;
}

int Config::get_int(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
  return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key, "expected a boolean, got '" + v + "'");
}

std::vector<double> Config::get_double_list(const std::string& key) const {
  return parse_number_list(get_string(key), key);
}

std::vector<int> Config::get_int_list(const std::string& key) const {
  std::vector<int> out;
  for (double v : get_double_list(key)) {
    if (v != std::floor(v) || std::abs(v) > 1e9) {
      throw ConfigError(key, "expected integers, got " + format_double(v));
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<std::string> Config::get_string_list(const std::string& key) const {
  std::vector<std::string> out;
  for (auto part : split(get_string(key), ',')) {
    const auto t = trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

void Config::require_known(std::span<const std::string_view> allowed) const {
  for (const auto& [key, value] : values_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(key, "unknown configuration key");
    }
  }
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + "=" + value + "\n";
  return out;
}

std::vector<double> parse_number_list(std::string_view text, const std::string& key) {
  const auto t = trim(text);
  std::vector<double> out;
  if (t.empty()) return out;
  try {
    if (t.find(':') != std::string_view::npos) {
      const auto parts = split(t, ':');
      if (parts.size() != 3) throw ConfigError(key, "range must be start:stop:step");
      const double start = parse_double(trim(parts[0]));
      const double stop = parse_double(trim(parts[1]));
      const double step = parse_double(trim(parts[2]));
      if (!(step > 0.0) || !(stop >= start)) throw ConfigError(key, "range needs step > 0 and stop >= start");
      const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
      if (count > 1000000) throw ConfigError(key, "range has too many points");
      for (long k = 0; k <= count; ++k) {
        // Round away binary residue so 0.1-steps print as written.
        out.push_back(std::round((start + static_cast<double>(k) * step) * 1e9) / 1e9);
      }
      return out;
    }
    for (auto part : split(t, ',')) {
      const auto p = trim(part);
      if (p.empty()) continue;
      out.push_back(parse_double(p));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError(key, "malformed number list '" + std::string(t) + "'");
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

std::string CsvTable::to_string() const {
  std::string out;
  const auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return out;
}

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DimensionError("CSV has no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  bool first = true;
  for (std::string_view line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    for (auto c : split(line, ',')) cells.emplace_back(c);
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != table.header.size()) {
        throw DimensionError("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                             std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

double parse_double(std::string_view text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double out = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw DomainError("not a number: '" + std::string(text) + "'");
  }
  return out;
}

std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t out = 0;
  int base = 10;
  if (text.starts_with("0x") || text.starts_with("0X")) {
    text.remove_prefix(2);
    base = 16;
  }
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out, base);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw DomainError("not an unsigned integer: '" + std::string(text) + "'");
  }
  return out;
}

std::string ber_csv(std::span<const BerCurve> curves) {
  CsvTable t;
  for (auto h : split(kBerHeader, ',')) t.header.emplace_back(h);
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      t.rows.push_back({c.scheme, std::to_string(c.transmitters), std::to_string(c.receivers),
                        format_double(c.alpha), format_double(c.beta), std::to_string(c.q),
                        format_double(p.snr_db), std::to_string(p.trials),
                        std::to_string(p.bit_errors), format_double(p.ber), format_double(p.ci_low),
                        format_double(p.ci_high)});
    }
  }
  return t.to_string();
}

std::vector<BerCurve> parse_ber_csv(std::string_view text, std::uint64_t min_bit_errors) {
  const CsvTable t = parse_csv(text);
  std::string joined;
  for (std::size_t i = 0; i < t.header.size(); ++i) joined += (i ? "," : "") + t.header[i];
  if (joined != kBerHeader) throw DimensionError("not a BER CSV: header is '" + joined + "'");
  std::vector<BerCurve> curves;
  for (const auto& row : t.rows) {
    BerCurve key;
    key.scheme = row[0];
    key.transmitters = static_cast<int>(parse_u64(row[1]));
    key.receivers = static_cast<int>(parse_u64(row[2]));
    key.alpha = parse_double(row[3]);
    key.beta = parse_double(row[4]);
    key.q = static_cast<int>(parse_u64(row[5]));
    if (curves.empty() || curves.back().scheme != key.scheme ||
        curves.back().transmitters != key.transmitters || curves.back().receivers != key.receivers ||
        curves.back().alpha != key.alpha || curves.back().beta != key.beta ||
        curves.back().q != key.q) {
      curves.push_back(key);
    }
    BerPoint p;
    p.snr_db = parse_double(row[6]);
    p.trials = parse_u64(row[7]);
    p.bit_errors = parse_u64(row[8]);
    p.bits_per_trial = bits_for_scheme(key.scheme, key.transmitters, key.q);
    p.ber = parse_double(row[9]);
    p.ci_low = parse_double(row[10]);
    p.ci_high = parse_double(row[11]);
    p.low_confidence = p.bit_errors < min_bit_errors;
    curves.back().points.push_back(p);
  }
  return curves;
}

std::string asymptote_csv(std::span<const AsymptoteRow> rows) {
  CsvTable t;
  for (auto h : split(kAsymptoteHeader, ',')) t.header.emplace_back(h);
  for (const auto& r : rows) {
    t.rows.push_back({format_double(r.alpha), format_double(r.beta), std::to_string(r.n),
                      format_double(r.coefficient), format_double(r.snr_db),
                      format_double(r.ber_asymptote)});
  }
  return t.to_string();
}

std::vector<AsymptoteRow> parse_asymptote_csv(std::string_view text) {
  const CsvTable t = parse_csv(text);
  std::vector<AsymptoteRow> rows;
  const auto ia = t.column("alpha"), ib = t.column("beta"), in = t.column("N"),
             ic = t.column("coefficient"), is = t.column("snr_db"), iv = t.column("ber_asymptote");
  for (const auto& row : t.rows) {
    rows.push_back({parse_double(row[ia]), parse_double(row[ib]), static_cast<int>(parse_u64(row[in])),
                    parse_double(row[ic]), parse_double(row[is]), parse_double(row[iv])});
  }
  return rows;
}

std::string compare_csv(std::span<const ThroughputCurve> curves, std::span<const double> capacity) {
  CsvTable t;
  t.header.push_back("snr_db");
  for (const auto& c : curves) t.header.push_back(c.name);
  t.header.push_back("capacity");
  if (curves.empty()) return t.to_string();
  const auto& grid = curves.front().snr_db;
  if (capacity.size() != grid.size()) throw DimensionError("compare_csv: capacity column length mismatch");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<std::string> row{format_double(grid[i])};
    for (const auto& c : curves) row.push_back(format_double(c.bits_per_use.at(i)));
    row.push_back(format_double(capacity[i]));
    t.rows.push_back(std::move(row));
  }
  return t.to_string();
}

std::string rungs_csv(std::span<const ThroughputCurve> curves) {
  CsvTable t;
  t.header = {"scheme", "rung", "bits_per_use", "threshold_db"};
  for (const auto& c : curves) {
    for (const auto& r : c.rungs) {
      t.rows.push_back({c.name, r.label, format_double(r.bits_per_use),
                        r.threshold_db ? format_double(*r.threshold_db) : std::string()});
    }
  }
  return t.to_string();
}

// ---------------------------------------------------------------------------
// SVG

namespace {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

std::vector<double> nice_ticks(double lo, double hi, int target) {
  const double span = hi - lo;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
    ticks.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
  }
  return ticks;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string render_svg(std::string_view csv_text, const PlotSpec& spec) {
  const CsvTable t = parse_csv(csv_text);
  const std::size_t xi = t.column(spec.x_column);
  std::vector<std::size_t> gi;
  for (const auto& g : spec.group_by) gi.push_back(t.column(g));

  std::vector<Series> series;
  for (const auto& yname : spec.y_columns) {
    const std::size_t yi = t.column(yname);
    std::vector<std::string> order;
    std::map<std::string, std::size_t> index;
    for (const auto& row : t.rows) {
      std::string key;
      for (std::size_t g = 0; g < gi.size(); ++g) {
        key += (g ? " " : "") + spec.group_by[g] + "=" + row[gi[g]];
      }
      if (spec.y_columns.size() > 1 || key.empty()) key = yname + (key.empty() ? "" : " " + key);
      if (!index.count(key)) {
        index[key] = series.size();
        series.push_back({key, {}, {}});
      }
      if (row[yi].empty()) continue;
      const double x = parse_double(row[xi]);
      double y = parse_double(row[yi]);
      if (spec.log_y) {
        if (!(y > 0.0)) continue;
        y = std::log10(y);
      }
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      auto& s = series[index[key]];
      s.x.push_back(x);
      s.y.push_back(y);
    }
  }

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (spec.log_y) {
    y0 = std::floor(y0);
    y1 = std::ceil(y1);
  }
  if (y1 == y0) y1 = y0 + 1;

  constexpr double W = 760, H = 500, L = 80, R = 200, T = 40, B = 60;
  const double pw = W - L - R, ph = H - T - B;
  const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
  const auto py = [&](double y) { return T + (1.0 - (y - y0) / (y1 - y0)) * ph; };
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fmt(L + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << xml_escape(spec.title) << "</text>\n";
  o << "<rect x=\"" << fmt(L) << "\" y=\"" << fmt(T) << "\" width=\"" << fmt(pw) << "\" height=\""
    << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double v : nice_ticks(x0, x1, 8)) {
    o << "<line x1=\"" << fmt(px(v)) << "\" y1=\"" << fmt(T) << "\" x2=\"" << fmt(px(v)) << "\" y2=\""
      << fmt(T + ph) << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << fmt(px(v)) << "\" y=\"" << fmt(T + ph + 16)
      << "\" text-anchor=\"middle\">" << tick_label(v) << "</text>\n";
  }
  std::vector<double> yt;
  if (spec.log_y) {
    for (double v = y0; v <= y1 + 1e-9; v += 1.0) yt.push_back(v);
  } else {
    yt = nice_ticks(y0, y1, 6);
  }
  for (double v : yt) {
    o << "<line x1=\"" << fmt(L) << "\" y1=\"" << fmt(py(v)) << "\" x2=\"" << fmt(L + pw) << "\" y2=\""
      << fmt(py(v)) << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << fmt(L - 6) << "\" y=\"" << fmt(py(v) + 4) << "\" text-anchor=\"end\">"
      << (spec.log_y ? "1e" + tick_label(v) : tick_label(v)) << "</text>\n";
  }
  o << "<text x=\"" << fmt(L + pw / 2) << "\" y=\"" << fmt(H - 18) << "\" text-anchor=\"middle\">"
    << xml_escape(spec.x_label.empty() ? spec.x_column : spec.x_label) << "</text>\n";
  o << "<text transform=\"translate(20," << fmt(T + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << xml_escape(spec.y_label) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    if (!s.x.empty()) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        o << (i ? " " : "") << fmt(px(s.x[i])) << "," << fmt(py(s.y[i]));
      }
      o << "\"/>\n";
    }
    const double ly = T + 14 + 16.0 * static_cast<double>(k);
    o << "<line x1=\"" << fmt(L + pw + 10) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(L + pw + 30)
      << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << fmt(L + pw + 34) << "\" y=\"" << fmt(ly) << "\" font-size=\"10\">"
      << xml_escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

// ---------------------------------------------------------------------------
// Manifest and files

std::string manifest_json(const RunManifest& m) {
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(m.config_hash));
  nlohmann::json j;
  j["command"] = m.command;
  j["config_hash"] = hash;
  j["seed"] = m.seed;
  j["tool_version"] = m.tool_version;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["outputs"] = m.outputs;
  return j.dump(2) + "\n";
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace turbosim::io
