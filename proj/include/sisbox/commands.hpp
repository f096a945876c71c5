#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "decomposition.hpp"
#include "document.hpp"
#include "io.hpp"
#include "membership.hpp"
#include "sampling_space.hpp"

namespace sisbox::commands {

struct Options {
  Settings settings;
  int n_max = 60;
  /// K was fixed by the caller; otherwise it is raised to fit the inputs.
  bool k_explicit = false;
  std::vector<std::string> argv;
};

namespace detail {

class Timer {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

inline ReportDocument start(const Options& o) {
  ReportDocument d;
  d.command = o.argv;
  d.settings = o.settings;
  d.n_max = o.n_max;
  return d;
}

inline void finish(ReportDocument& d, const Timer& t) {
  d.finalize();
  d.timing.value = t.seconds();
}

}  // namespace detail

/// Raises K until every input fits, unless K was given explicitly.
inline Options fit_grid(Options o, const std::vector<std::string>& signals) {
  for (bool again = true; again;) {
    again = false;
    for (const auto& spec : signals) {
      try {
        (void)io::load_signal(spec, o.settings, o.n_max);
      } catch (const BandwidthOverflow& e) {
        if (o.k_explicit) throw;
        o.settings.grid.K = e.required_k();
        again = true;
        break;
      }
    }
  }
  return o;
}

inline ConditionReport frame_report(const SamplingSpace& sp) {
  ConditionReport r;
  r.title = "frame";
  const auto& g = sp.grammian;
  double mean = 0;
  for (std::size_t u = 0; u < g.size(); ++u) mean += g[u].real();
  mean /= static_cast<double>(g.size());
  r.conditions.push_back({"frame_sequence",
                          verdict_of(sp.bounds.lower > sp.settings.eps * sp.bounds.upper),
                          {{"A", {sp.bounds.lower, sp.settings.eps * sp.bounds.upper}},
                           {"B", {sp.bounds.upper, std::numeric_limits<double>::infinity()}},
                           {"measure_E", {sp.mask.measure(), 1.0 / sp.grid().N}},
                           {"grammian_mean", {mean, 0.0}}},
                          "A > eps B certifies a frame sequence at grid resolution"});
  r.finalize();
  return r;
}

/// Grammian statistics, frame bounds and the sampling-space check.
inline ReportDocument analyze(const Options& opt, const std::string& signal, const std::string& csv_path = {}) {
  detail::Timer t;
  const auto o = fit_grid(opt, {signal});
  auto d = detail::start(o);
  const auto f = io::load_signal(signal, o.settings, o.n_max);
  const auto sp = build_space(f, o.settings, {.unchecked = true});
  d.reports.push_back(frame_report(sp));
  d.reports.push_back(sp.sz99.to_report());
  double zdev = 0;
  for (std::size_t u = 0; u < sp.zak.size(); ++u) zdev = std::max(zdev, std::abs(sp.zak[u] - 1.0));
  d.values["zak_max_deviation_from_1"] = {zdev, 0.0};
  d.values["spectrum_integrable"] = {f.integrable_spectrum() ? 1.0 : 0.0, 0.0};
  if (!csv_path.empty()) {
    std::string out = "omega,grammian,abs_zak\n";
    for (std::size_t u = 0; u < sp.grammian.size(); ++u)
      out += io::detail::fmt(sp.grammian.omega(static_cast<int>(u))) + "," + io::detail::fmt(sp.grammian[u].real()) + "," +
             io::detail::fmt(std::abs(sp.zak[u])) + "\n";
    io::write_file(csv_path, out);
    d.outputs.push_back(csv_path);
  }
  detail::finish(d, t);
  return d;
}

enum class Theorem { one, two, five, sz04 };

inline Theorem parse_theorem(const std::string& s) {
  if (s == "1") return Theorem::one;
  if (s == "2") return Theorem::two;
  if (s == "5") return Theorem::five;
  if (s == "sz04") return Theorem::sz04;
  throw ParseError("--theorem must be one of 1, 2, 5, sz04 (got '" + s + "')", 0);
}

inline ConditionReport induced_report(const SamplingSpace& sp, const Signal& f) {
  ConditionReport r;
  r.title = "theorem1";
  const double res = membership_residual(f, sp);
  r.conditions.push_back({"member", verdict_of(res <= kMembershipTolerance), {{"residual", {res, kMembershipTolerance}}}, ""});
  if (res > kMembershipTolerance) {
    r.finalize();
    return r;
  }
  const auto ind = induced_subspace(sp, f);
  r.conditions.push_back({"masked_sampling_function", verdict_of(ind.masked_spectrum_error < 1e-9), {{"max_error", {ind.masked_spectrum_error, 1e-9}}}, "s_f^ = s^ chi_{E_f}"});
  r.conditions.push_back({"projection_identity", verdict_of(ind.projection_error < 1e-9), {{"norm_error", {ind.projection_error, 1e-9}}}, "s_f = P_{S(f)} s"});
  r.conditions.push_back({"measure_E_f", verdict_of(!ind.support.empty()), {{"measure", {ind.support.measure(), 1.0 / sp.grid().N}}}, ""});
  r.finalize();
  return r;
}

inline ReportDocument membership(const Options& opt, const std::string& signal, Theorem th, const std::string& space = {},
                                 Theorem2Normalization norm = Theorem2Normalization::zak, const std::string& emit_s = {}) {
  detail::Timer t;
  std::vector<std::string> inputs{signal};
  if (!space.empty()) inputs.push_back(space);
  const auto o = fit_grid(opt, inputs);
  auto d = detail::start(o);
  const auto f = io::load_signal(signal, o.settings, o.n_max);
  switch (th) {
    case Theorem::one: {
      if (space.empty()) throw ParseError("--theorem 1 needs --space", 0);
      const auto sp = build_space(io::load_signal(space, o.settings, o.n_max), o.settings);
      d.reports.push_back(induced_report(sp, f));
      break;
    }
    case Theorem::two:
      d.reports.push_back(check_theorem2(f, o.settings, norm));
      break;
    case Theorem::five: {
      auto r = check_theorem5(f, o.settings);
      if (r.passed() && !emit_s.empty()) {
        const auto cs = construct_s_from_f(f, o.settings);
        io::write_file(emit_s, io::grid_csv(*cs.space.sampling_function.spectrum(o.settings.grid), o.settings.grid));
        d.outputs.push_back(emit_s);
        d.values["factorization_error"] = {cs.factorization_error, 1e-6};
        d.values["delta_error"] = {cs.delta_error, 1e-6};
      }
      d.reports.push_back(std::move(r));
      break;
    }
    case Theorem::sz04:
      d.reports.push_back(check_sz04(f, o.settings));
      break;
  }
  detail::finish(d, t);
  return d;
}

struct XRange {
  double lo = -8;
  double hi = 8;
  int count = 201;

  std::vector<double> points() const {
    std::vector<double> xs(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) xs[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    return xs;
  }
};

inline XRange parse_xrange(const std::string& s) {
  XRange r;
  double a, b, n;
  const auto p1 = s.find(':'), p2 = s.rfind(':');
  if (p1 == std::string::npos || p1 == p2 || !io::detail::to_double(s.substr(0, p1), a) ||
      !io::detail::to_double(s.substr(p1 + 1, p2 - p1 - 1), b) || !io::detail::to_double(s.substr(p2 + 1), n) || n < 1 ||
      n != std::floor(n))
    throw ParseError("--x must look like lo:hi:count (got '" + s + "')", 0);
  r.lo = a, r.hi = b, r.count = static_cast<int>(n);
  return r;
}

inline ReportDocument reconstruct(const Options& opt, const std::string& space, const std::string& samples_path,
                                  const XRange& xr, const std::string& out_csv, std::optional<std::pair<double, double>> lattice = {}) {
  detail::Timer t;
  const auto o = fit_grid(opt, {space});
  auto d = detail::start(o);
  const auto g = io::load_signal(space, o.settings, o.n_max);
  const auto sp = build_space(g, o.settings);
  const auto samples = io::parse_samples_csv(io::read_file(samples_path), o.settings.k_max);
  const auto xs = xr.points();
  std::vector<cplx> values;
  ReconstructionInfo info;
  if (lattice) {
    values = lattice_rescale(sp, lattice->first, lattice->second).reconstruct(samples, xs);
    d.values["lattice_a"] = {lattice->first, 0.0};
    d.values["lattice_b"] = {lattice->second, 0.0};
  } else {
    values = sisbox::reconstruct(sp, samples, xs, &info);
    d.values["tail_bound"] = {info.tail_bound, std::numeric_limits<double>::infinity()};
  }
  ConditionReport r;
  r.title = "reconstruction";
  r.conditions.push_back({"certified_space", verdict_of(sp.certified), {}, "space passed the sampling-space check"});
  r.tails["sample_window"] = samples.tail_energy;
  r.finalize();
  d.reports.push_back(sp.sz99.to_report());
  d.reports.push_back(std::move(r));
  io::write_file(out_csv, io::reconstruction_csv(xs, values));
  d.outputs.push_back(out_csv);
  detail::finish(d, t);
  return d;
}

inline ReportDocument decompose(const Options& opt, const std::string& space, const std::string& partition_path,
                                const std::string& out_dir) {
  detail::Timer t;
  const auto o = fit_grid(opt, {space});
  auto d = detail::start(o);
  const auto sp = build_space(io::load_signal(space, o.settings, o.n_max), o.settings);
  const auto partition = io::parse_partition_json(io::read_file(partition_path), o.settings.grid.N);
  const auto comps = sisbox::decompose(sp, partition);
  ConditionReport r;
  r.title = "decomposition";
  std::vector<Signal> parts;
  for (std::size_t j = 0; j < comps.size(); ++j) {
    const auto& c = comps[j];
    const std::string name = "component_" + std::to_string(j);
    if (!c.space) {
      r.conditions.push_back({name, Verdict::fail, {{"measure", {c.mask.measure(), 1.0 / o.settings.grid.N}}}, c.rejection});
      continue;
    }
    parts.push_back(c.space->sampling_function);
    const auto path = (std::filesystem::path(out_dir) / (name + ".csv")).string();
    io::write_file(path, io::grid_csv(*c.space->sampling_function.spectrum(o.settings.grid), o.settings.grid));
    d.outputs.push_back(path);
    r.conditions.push_back({name,
                            verdict_of(c.space->certified && c.masked_sampling_error < 1e-9),
                            {{"masked_sampling_error", {c.masked_sampling_error, 1e-9}},
                             {"measure", {c.mask.measure(), 1.0 / o.settings.grid.N}}},
                            ""});
  }
  const double sum_err = parts.empty() ? spectral_norm(sp.sampling_function, o.settings.grid)
                                       : sisbox::detail::max_spectrum_diff(sum_signals(parts, o.settings.grid.N), sp.sampling_function, o.settings.grid);
  r.conditions.push_back({"sampling_function_sum", verdict_of(sum_err < 1e-9), {{"max_error", {sum_err, 1e-9}}}, "sum_j s_j^ = s^"});
  r.finalize();
  d.reports.push_back(std::move(r));
  detail::finish(d, t);
  return d;
}

inline ReportDocument determine(const Options& opt, const std::string& space, const std::vector<std::string>& functions,
                                const std::string& out_dir) {
  detail::Timer t;
  std::vector<std::string> inputs{space};
  inputs.insert(inputs.end(), functions.begin(), functions.end());
  const auto o = fit_grid(opt, inputs);
  auto d = detail::start(o);
  const auto sp = build_space(io::load_signal(space, o.settings, o.n_max), o.settings);
  std::vector<Signal> fs;
  for (const auto& f : functions) fs.push_back(io::load_signal(f, o.settings, o.n_max));
  const auto rep = check_determining_set(sp, fs);
  ConditionReport r;
  r.title = "determining_set";
  r.conditions.push_back({"support_cover", rep.verdict, {{"symmetric_difference", {rep.symmetric_difference, 1.0 / o.settings.grid.N}}}, ""});
  if (rep.passed()) {
    r.conditions.push_back({"expansion", verdict_of(rep.expansion_error < 1e-9), {{"max_error", {rep.expansion_error, 1e-9}}}, "s^ = sum alpha_i f_i^"});
    nlohmann::json blocks = nlohmann::json::array();
    for (std::size_t i = 0; i < rep.blocks.size(); ++i) {
      blocks.push_back({{"function", rep.order[i]}, {"mask", io::mask_to_json(rep.blocks[i])}});
      const auto path = (std::filesystem::path(out_dir) / ("alpha_" + std::to_string(i) + ".csv")).string();
      io::write_file(path, io::periodic_csv(rep.alphas[i]));
      d.outputs.push_back(path);
    }
    const auto path = (std::filesystem::path(out_dir) / "blocks.json").string();
    io::write_file(path, blocks.dump(2) + "\n");
    d.outputs.push_back(path);
  }
  r.finalize();
  d.reports.push_back(std::move(r));
  detail::finish(d, t);
  return d;
}

}  // namespace sisbox::commands
