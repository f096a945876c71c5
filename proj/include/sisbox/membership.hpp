#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "report.hpp"
#include "sampling_space.hpp"

namespace sisbox {

inline constexpr double kMembershipTolerance = 1e-6;

/// S(f) inside V(phi), with its sampling function s_f = h.
struct InducedSubspace {
  SamplingSpace parent;
  Signal member;
  SupportMask support;  // E_f
  SamplingSpace space;  // S(f) = V(h)
  Signal sampling_function;
  double masked_spectrum_error = 0;  // max |s_f^ - s^ chi_{E_f}|
  double projection_error = 0;       // ||s_f - P_{S(f)} s||
};

namespace detail {

/// 1/Z on the mask where |Z| clears the guard, 0 elsewhere.
inline PeriodicSpectrum guarded_inverse(const PeriodicSpectrum& z, const SupportMask& mask, double eps) {
  double zmax = 0;
  for (std::size_t u = 0; u < z.size(); ++u)
    if (mask[u]) zmax = std::max(zmax, std::abs(z[u]));
  PeriodicSpectrum m(z.resolution());
  for (std::size_t u = 0; u < z.size(); ++u)
    if (mask[u] && std::abs(z[u]) > eps * zmax) m[u] = 1.0 / z[u];
  return m;
}

inline PeriodicSpectrum indicator(const SupportMask& mask) {
  PeriodicSpectrum m(mask.resolution());
  for (std::size_t u = 0; u < m.size(); ++u)
    if (mask[u]) m[u] = 1.0;
  return m;
}

inline double max_spectrum_diff(const Signal& a, const Signal& b, const FrequencyGrid& grid) {
  return max_abs_diff(*a.spectrum(grid), *b.spectrum(grid));
}

}  // namespace detail

/// 64 uniform and 64 seeded random points of [0, 1).
inline std::vector<double> theorem5_probes(std::uint64_t seed, int uniform = 64, int random = 64) {
  auto xs = uniform_probes(uniform);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int i = 0; i < random; ++i) xs.push_back(dist(rng));
  return xs;
}

/// Builds S(f) for a member f of V(phi): h^ = f^ / Z_f(0,.) on E_f.
inline InducedSubspace induced_subspace(const SamplingSpace& sp, const Signal& f) {
  const double res = membership_residual(f, sp);
  if (res > kMembershipTolerance) throw NotInSpace(f.name(), res);
  const auto& s = sp.settings;
  InducedSubspace out;
  out.parent = sp;
  out.member = f;
  out.support = support_mask(grammian(f, s.grid), s.eps);
  if (out.support.empty()) throw DegenerateSpace("member '" + f.name() + "' is zero; S(f) is trivial");
  const auto zf = zak_fiber(f, s);
  const Signal h = modulate(f, detail::guarded_inverse(zf, out.support, s.eps), "h[" + f.name() + "]");
  out.space = build_space(h, s);
  out.sampling_function = h;
  const Signal masked = modulate(sp.sampling_function, detail::indicator(out.support));
  out.masked_spectrum_error = detail::max_spectrum_diff(h, masked, s.grid);
  out.projection_error = spectral_distance(h, project(sp.sampling_function, out.space), s.grid);
  return out;
}

enum class Theorem2Normalization { zak, grammian };

inline const char* to_string(Theorem2Normalization n) {
  return n == Theorem2Normalization::zak ? "h = f/Z_f(0,.) on E_f" : "h = f/G_f on E_f";
}

/// Continuity, bounded shift sums and A chi_{E_f} <= |Z_h(0,.)| <= B chi_{E_f} for the normalized h.
inline ConditionReport check_theorem2(const Signal& f, const Settings& s,
                                      Theorem2Normalization norm = Theorem2Normalization::zak) {
  ConditionReport r;
  r.title = "theorem2";
  r.normalization = to_string(norm);
  const auto g = grammian(f, s.grid);
  const auto ef = support_mask(g, s.eps);
  r.tails["spectrum_truncation"] = f.truncation_tail(s.grid);
  if (ef.empty()) {
    r.conditions.push_back({"support", Verdict::pass, {{"measure", {0.0, 0.0}}}, "E_f is empty; conditions hold vacuously"});
    r.finalize();
    return r;
  }
  const auto zf = zak_fiber(f, s);
  PeriodicSpectrum m(s.grid.N);
  if (norm == Theorem2Normalization::zak) {
    m = detail::guarded_inverse(zf, ef, s.eps);
  } else {
    for (std::size_t u = 0; u < m.size(); ++u)
      if (ef[u]) m[u] = 1.0 / g[u].real();
  }
  const Signal h = modulate(f, m, "h[" + f.name() + "]");
  const auto rep = detail::sz99_from_parts(h, ef, zak_fiber(h, s), s);
  r.conditions.push_back({"continuity",
                          rep.continuity.verdict,
                          {{"max_jump", {rep.continuity.max_jump, rep.continuity.threshold}}},
                          "heuristic falsifier on h"});
  r.conditions.push_back({"shift_square_sum", rep.shift_verdict, {{"bound", {rep.shift_sum.max_sum, std::numeric_limits<double>::infinity()}}}, ""});
  r.conditions.push_back({"zak_two_sided",
                          rep.zak_verdict,
                          {{"A", {rep.zak_lower, s.eps * rep.zak_upper}},
                           {"B", {rep.zak_upper, std::numeric_limits<double>::infinity()}},
                           {"off_support", {rep.zak_off_support, s.eps * std::max(rep.zak_upper, 1.0)}},
                           {"measure_E_f", {ef.measure(), 1.0 / s.grid.N}}},
                          ""});
  r.finalize();
  return r;
}

/**
 * Conditions a) to d) for f with integrable spectrum:
 *  a) samples square-summable; b) A |Z|^2 <= G <= B |Z|^2 on E_f;
 *  c) int_{E_f} sum |f^(w+k)| / |Z| finite; d) sup_x int_{E_f} |Z_{f^}(w,-x) / Z|^2 <= L.
 */
inline ConditionReport check_theorem5(const Signal& f, const Settings& s, const std::vector<double>& x_probe) {
  if (!f.integrable_spectrum())
    throw PreconditionError("'" + f.name() + "' does not have an integrable spectrum; use check_theorem2 instead");
  constexpr double inf = std::numeric_limits<double>::infinity();
  ConditionReport r;
  r.title = "theorem5";
  r.tails["spectrum_truncation"] = f.truncation_tail(s.grid);
  const auto samples = integer_samples(f, s);
  r.tails["sample_window"] = samples.tail_energy;
  const double energy = samples.energy();
  r.conditions.push_back({"a_samples_l2", verdict_of(std::isfinite(energy)), {{"l2_norm_sq", {energy, inf}}, {"tail", {samples.tail_energy, inf}}}, ""});

  const auto g = grammian(f, s.grid);
  const auto ef = support_mask(g, s.eps);
  if (ef.empty()) {
    for (const char* name : {"b_grammian_ratio", "c_integral", "d_zak_dual"})
      r.conditions.push_back({name, Verdict::pass, {}, "E_f is empty; vacuous"});
    r.finalize();
    return r;
  }
  const auto z = zak_time_fiber(samples, s.grid.N);
  double zmax = 0;
  for (std::size_t u = 0; u < z.size(); ++u)
    if (ef[u]) zmax = std::max(zmax, std::abs(z[u]));
  bool z_ok = true;
  double a = inf, b = 0;
  for (std::size_t u = 0; u < z.size(); ++u) {
    if (!ef[u]) continue;
    const double zz = std::abs(z[u]);
    if (zz <= s.eps * zmax) {
      z_ok = false;
      continue;
    }
    const double ratio = g[u].real() / (zz * zz);
    a = std::min(a, ratio);
    b = std::max(b, ratio);
  }
  if (!z_ok) a = 0, b = inf;
  r.conditions.push_back({"b_grammian_ratio", verdict_of(z_ok && a > 0 && std::isfinite(b)), {{"A", {a, 0.0}}, {"B", {b, inf}}}, "G_f / |Z_f(0,.)|^2 on E_f"});

  const auto spec = f.spectrum(s.grid);
  PeriodicSpectrum abs_sum(s.grid.N);
  for (std::size_t j = 0; j < spec->size(); ++j) abs_sum[static_cast<std::size_t>(s.grid.unit_index(j))] += std::abs((*spec)[j]);
  double integral = 0;
  for (std::size_t u = 0; u < z.size(); ++u)
    if (ef[u]) integral += z_ok ? abs_sum[u].real() / std::abs(z[u]) : inf;
  integral /= s.grid.N;
  r.conditions.push_back({"c_integral", verdict_of(std::isfinite(integral)), {{"integral", {integral, inf}}}, ""});

  double big_l = 0, arg = 0;
  if (z_ok) {
    for (double x : x_probe) {
      const auto zd = zak_dual_fiber(f, x, s.grid);
      double acc = 0;
      for (std::size_t u = 0; u < z.size(); ++u)
        if (ef[u]) acc += std::norm(zd[u] / z[u]);
      acc /= s.grid.N;
      if (acc > big_l) big_l = acc, arg = x;
    }
  } else {
    big_l = inf;
  }
  r.conditions.push_back({"d_zak_dual", verdict_of(std::isfinite(big_l)), {{"L", {big_l, inf}}, {"argmax_x", {arg, 0.0}}, {"probes", {static_cast<double>(x_probe.size()), 0.0}}}, ""});
  r.finalize();
  return r;
}

inline ConditionReport check_theorem5(const Signal& f, const Settings& s) {
  return check_theorem5(f, s, theorem5_probes(s.seed));
}

struct ConstructedSpace {
  SamplingSpace space;
  ConditionReport theorem5;
  double factorization_error = 0;  // max |f^ - Z_f(0,.) s^|
  double delta_error = 0;          // max |s(k) - delta_{0k}|
};

/// s^ = f^/Z_f(0,.) on E_f, 1 on [0,1) \ E_f, 0 elsewhere; certified through build_space.
inline ConstructedSpace construct_s_from_f(const Signal& f, const Settings& s) {
  ConstructedSpace out;
  out.theorem5 = check_theorem5(f, s);
  if (!out.theorem5.passed()) throw ReportError("construction refused: theorem 5 conditions fail for '" + f.name() + "'", out.theorem5);
  const auto ef = support_mask(grammian(f, s.grid), s.eps);
  if (ef.empty()) throw DegenerateSpace("'" + f.name() + "' is zero; E_f is empty");
  const auto zf = zak_fiber(f, s);
  std::vector<Signal> parts{modulate(f, detail::guarded_inverse(zf, ef, s.eps))};
  if (!(~ef).empty()) parts.push_back(modulate(catalog::unit_box(), detail::indicator(~ef)));
  const Signal shat = sum_signals(parts, s.grid.N, "s[" + f.name() + "]");
  out.space = build_space(shat, s);

  const auto fs = f.spectrum(s.grid);
  const auto ss = out.space.sampling_function.spectrum(s.grid);
  for (std::size_t j = 0; j < fs->size(); ++j)
    out.factorization_error = std::max(out.factorization_error, std::abs((*fs)[j] - zf[static_cast<std::size_t>(s.grid.unit_index(j))] * (*ss)[j]));
  const auto samples = integer_samples(out.space.sampling_function, s);
  for (int k = samples.first; k <= samples.last(); ++k)
    out.delta_error = std::max(out.delta_error, std::abs(samples.at(k) - (k == 0 ? cplx{1.0} : cplx{})));
  return out;
}

/// Fiber statistics at one frequency: |sum f^|, sum |f^|, sum |f^|^2.
struct FiberStats {
  double sum_abs = 0;
  double abs_sum = 0;
  double square_sum = 0;
};

inline constexpr double kSZ04BoundLimit = 20.0;

/**
 * Both sufficient inequalities A |sum f^|^2 <= sum |f^|^2 and
 * (sum |f^|)^2 <= B |sum f^|^2 on the grid. B beyond bound_limit fails.
 * Piecewise constant spectra are also swept exactly, fiber by fiber, plus any
 * extra fractions given.
 */
inline ConditionReport check_sz04(const Signal& f, const Settings& s, const std::vector<double>& exact_probes = {},
                                  double bound_limit = kSZ04BoundLimit) {
  if (!f.integrable_spectrum())
    throw PreconditionError("'" + f.name() + "' does not have an integrable spectrum; use check_theorem2 instead");
  constexpr double inf = std::numeric_limits<double>::infinity();
  ConditionReport r;
  r.title = "sz04";
  r.tails["spectrum_truncation"] = f.truncation_tail(s.grid);
  const auto spec = f.spectrum(s.grid);
  std::vector<FiberStats> fib(static_cast<std::size_t>(s.grid.N));
  PeriodicSpectrum sum(s.grid.N);
  for (std::size_t j = 0; j < spec->size(); ++j) {
    const auto u = static_cast<std::size_t>(s.grid.unit_index(j));
    sum[u] += (*spec)[j];
    fib[u].abs_sum += std::abs((*spec)[j]);
    fib[u].square_sum += std::norm((*spec)[j]);
  }
  for (std::size_t u = 0; u < fib.size(); ++u) fib[u].sum_abs = std::abs(sum[u]);

  double a = inf, b = 0, b_at = 0;
  auto absorb = [&](const FiberStats& fs, double w) {
    if (fs.square_sum == 0) return;
    const double scale = fs.abs_sum;
    if (fs.sum_abs <= 1e-14 * scale) {
      a = 0, b = inf, b_at = w;
      return;
    }
    const double s2 = fs.sum_abs * fs.sum_abs;
    a = std::min(a, fs.square_sum / s2);
    const double ratio = fs.abs_sum * fs.abs_sum / s2;
    if (ratio > b) b = ratio, b_at = w;
  };
  for (std::size_t u = 0; u < fib.size(); ++u) absorb(fib[u], static_cast<double>(u) / s.grid.N);

  double probe_ratio = 0;
  if (const auto* pc = f.get_if<PiecewiseConstantSpectrum>()) {
    // Fibers are constant between consecutive piece edges; one midpoint per gap covers them all.
    std::vector<double> edges{0.0, 1.0};
    for (const auto& p : pc->pieces()) edges.push_back(p.lo), edges.push_back(p.hi);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::vector<double> probes = exact_probes;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) probes.push_back(0.5 * (edges[i] + edges[i + 1]));
    for (double w : probes) {
      const auto fb = pc->fiber(w - std::floor(w));
      const FiberStats fs{std::abs(fb.sum), fb.abs_sum, fb.square_sum};
      absorb(fs, w);
      if (fs.sum_abs > 0) probe_ratio = std::max(probe_ratio, fs.abs_sum * fs.abs_sum / (fs.sum_abs * fs.sum_abs));
    }
  }
  if (a == inf) a = 0, b = 0;  // f = 0
  const bool vacuous = b == 0 && a == 0;
  r.conditions.push_back({"lower_inequality", verdict_of(vacuous || a > 0), {{"A", {a, 0.0}}}, "A |sum f^|^2 <= sum |f^|^2"});
  r.conditions.push_back({"upper_inequality",
                          verdict_of(vacuous || b <= bound_limit),
                          {{"B", {b, bound_limit}}, {"argmax_omega", {b_at, 0.0}}, {"exact_probe_ratio", {probe_ratio, bound_limit}}},
                          "(sum |f^|)^2 <= B |sum f^|^2"});
  r.finalize();
  return r;
}

}  // namespace sisbox
