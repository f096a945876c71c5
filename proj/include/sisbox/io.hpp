#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "catalog.hpp"
#include "decomposition.hpp"
#include "grid.hpp"
#include "signal.hpp"

namespace sisbox::io {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + p.string() + "'", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out << text;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool to_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

/// Numeric rows of a three-column CSV; blank lines, '#' comments and one header row are skipped.
struct Row {
  int line;
  double v[3];
};

inline std::vector<Row> parse_csv3(const std::string& text, std::string_view what) {
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool seen_data = false, seen_header = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = s.find(',', start);
      fields.push_back(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    Row r{line, {0, 0, 0}};
    bool numeric = fields.size() == 3;
    for (std::size_t i = 0; numeric && i < 3; ++i) numeric = to_double(fields[i], r.v[i]);
    if (!numeric) {
      if (!seen_data && !seen_header && fields.size() == 3) {
        seen_header = true;
        continue;
      }
      throw ParseError("malformed " + std::string(what) + " row '" + std::string(s) + "', expected three numbers", line);
    }
    seen_data = true;
    rows.push_back(r);
  }
  return rows;
}

inline std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

inline int json_line(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

inline nlohmann::json parse_json(const std::string& text, std::string_view what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("malformed " + std::string(what) + " JSON: " + e.what(), json_line(text, e.byte));
  }
}

}  // namespace detail

/// [{"a":..,"b":..,"re":..,"im":..}, ...]
inline PiecewiseConstantSpectrum parse_spectrum_json(const std::string& text) {
  const auto j = detail::parse_json(text, "spectrum");
  if (!j.is_array()) throw ParseError("spectrum JSON must be a list of {a, b, re, im} records", 1);
  std::vector<PiecewiseConstantSpectrum::Interval> iv;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& r = j[i];
    try {
      iv.push_back({r.at("a").get<double>(), r.at("b").get<double>(), cplx{r.value("re", 0.0), r.value("im", 0.0)}});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("spectrum record " + std::to_string(i) + ": " + e.what(), 0);
    }
  }
  try {
    return PiecewiseConstantSpectrum::from_intervals(iv);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("invalid spectrum: ") + e.what(), 0);
  }
}

inline std::string spectrum_to_json(const PiecewiseConstantSpectrum& pc) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& iv : pc.intervals()) j.push_back({{"a", iv.a}, {"b", iv.b}, {"re", iv.value.real()}, {"im", iv.value.imag()}});
  return j.dump(2) + "\n";
}

/// Rows "omega,re,im" placed on the grid; missing points are zero.
inline GridSpectrum parse_grid_csv(const std::string& text, const FrequencyGrid& grid) {
  GridSpectrum g{grid, std::vector<cplx>(grid.size())};
  for (const auto& r : detail::parse_csv3(text, "grid spectrum")) {
    const double pos = (r.v[0] + grid.K) * grid.N;
    const double j = std::round(pos);
    if (std::abs(pos - j) > 1e-6) throw ParseError("omega " + detail::fmt(r.v[0]) + " is not a grid point", r.line);
    if (j < 0 || j >= static_cast<double>(grid.size())) throw ParseError("omega " + detail::fmt(r.v[0]) + " lies outside [-K, K)", r.line);
    g.values[static_cast<std::size_t>(j)] = {r.v[1], r.v[2]};
  }
  return g;
}

inline std::string grid_csv(const std::vector<cplx>& values, const FrequencyGrid& grid, bool nonzero_only = true) {
  std::string out = "omega,re,im\n";
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (nonzero_only && values[j] == cplx{}) continue;
    out += detail::fmt(grid.omega(j)) + "," + detail::fmt(values[j].real()) + "," + detail::fmt(values[j].imag()) + "\n";
  }
  return out;
}

/// Rows "omega,re,im" over [0, 1).
inline std::string periodic_csv(const PeriodicSpectrum& p) {
  std::string out = "omega,re,im\n";
  for (std::size_t u = 0; u < p.size(); ++u)
    out += detail::fmt(p.omega(static_cast<int>(u))) + "," + detail::fmt(p[u].real()) + "," + detail::fmt(p[u].imag()) + "\n";
  return out;
}

inline PeriodicSpectrum parse_periodic_csv(const std::string& text, int n) {
  PeriodicSpectrum p(n);
  for (const auto& r : detail::parse_csv3(text, "periodic spectrum")) {
    const double u = std::round(r.v[0] * n);
    if (std::abs(r.v[0] * n - u) > 1e-6 || u < 0 || u >= n) throw ParseError("omega " + detail::fmt(r.v[0]) + " is not a point of the unit grid", r.line);
    p[static_cast<std::size_t>(u)] = {r.v[1], r.v[2]};
  }
  return p;
}

/// Rows "k,re,im"; indices with |k| beyond the window feed tail_energy.
inline TimeSamples parse_samples_csv(const std::string& text, int k_max) {
  auto s = TimeSamples::window(k_max);
  for (const auto& r : detail::parse_csv3(text, "samples")) {
    if (r.v[0] != std::floor(r.v[0])) throw ParseError("sample index " + detail::fmt(r.v[0]) + " is not an integer", r.line);
    const cplx v{r.v[1], r.v[2]};
    if (std::abs(r.v[0]) > std::numeric_limits<int>::max()) {
      s.tail_energy += std::norm(v);
      continue;
    }
    const int k = static_cast<int>(r.v[0]);
    if (k < s.first || k > s.last())
      s.tail_energy += std::norm(v);
    else
      s.ref(k) = v;
  }
  return s;
}

inline std::string samples_csv(const TimeSamples& s, bool nonzero_only = true) {
  std::string out = "k,re,im\n";
  for (int k = s.first; k <= s.last(); ++k) {
    const cplx v = s.at(k);
    if (nonzero_only && v == cplx{}) continue;
    out += std::to_string(k) + "," + detail::fmt(v.real()) + "," + detail::fmt(v.imag()) + "\n";
  }
  return out;
}

/// Rows "x,re,im".
inline std::string reconstruction_csv(std::span<const double> xs, std::span<const cplx> values) {
  if (xs.size() != values.size()) throw Error("reconstruction sizes differ");
  std::string out = "x,re,im\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    out += detail::fmt(xs[i]) + "," + detail::fmt(values[i].real()) + "," + detail::fmt(values[i].imag()) + "\n";
  return out;
}

inline std::pair<std::vector<double>, std::vector<cplx>> parse_reconstruction_csv(const std::string& text) {
  std::pair<std::vector<double>, std::vector<cplx>> out;
  for (const auto& r : detail::parse_csv3(text, "reconstruction")) {
    out.first.push_back(r.v[0]);
    out.second.emplace_back(r.v[1], r.v[2]);
  }
  return out;
}

/// Maximal runs of true points, as [a, b) subintervals of [0, 1).
inline std::vector<std::pair<double, double>> mask_intervals(const SupportMask& m) {
  std::vector<std::pair<double, double>> out;
  const int n = m.resolution();
  int u = 0;
  while (u < n) {
    if (!m[static_cast<std::size_t>(u)]) {
      ++u;
      continue;
    }
    int v = u;
    while (v < n && m[static_cast<std::size_t>(v)]) ++v;
    out.emplace_back(static_cast<double>(u) / n, static_cast<double>(v) / n);
    u = v;
  }
  return out;
}

inline nlohmann::json mask_to_json(const SupportMask& m) {
  nlohmann::json j = nlohmann::json::array();
  for (auto [a, b] : mask_intervals(m)) j.push_back({a, b});
  return j;
}

inline SupportMask mask_from_json(const nlohmann::json& j, int n) {
  if (!j.is_array()) throw ParseError("a mask must be a list of [a, b) intervals", 0);
  std::vector<std::pair<double, double>> iv;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw ParseError("mask interval must be a pair of numbers [a, b)", 0);
    const double a = p[0].get<double>(), b = p[1].get<double>();
    if (!(a >= 0 && b <= 1 && a <= b)) throw ParseError("mask interval must satisfy 0 <= a <= b <= 1", 0);
    iv.emplace_back(a, b);
  }
  return SupportMask::from_intervals(n, iv);
}

/// [[[a, b], ...], ...]: one list of subintervals of [0, 1) per partition set.
inline PeriodicPartition parse_partition_json(const std::string& text, int n) {
  const auto j = detail::parse_json(text, "partition");
  if (!j.is_array()) throw ParseError("partition JSON must be a list of masks", 1);
  PeriodicPartition p;
  for (const auto& m : j) p.parts.push_back(mask_from_json(m, n));
  return p;
}

inline std::string partition_to_json(const PeriodicPartition& p) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& m : p.parts) j.push_back(mask_to_json(m));
  return j.dump() + "\n";
}

/// A catalog name, a piecewise-constant spectrum file (.json) or a grid spectrum file (.csv).
inline Signal load_signal(const std::string& spec, const Settings& s, int n_max = 60) {
  if (catalog::find(spec)) return catalog::make(spec, s, n_max);
  const std::filesystem::path p(spec);
  if (!std::filesystem::exists(p)) throw CatalogError("unknown signal '" + spec + "'; catalog: " + catalog::names() + ", or a .json/.csv spectrum file");
  const auto text = read_file(p);
  const auto name = p.stem().string();
  if (p.extension() == ".csv") return Signal(parse_grid_csv(text, s.grid), name, true);
  auto pc = parse_spectrum_json(text);
  if (pc.required_bandwidth() > s.grid.K) throw BandwidthOverflow(pc.required_bandwidth(), s.grid.K);
  return Signal(std::move(pc), name);
}

}  // namespace sisbox::io
