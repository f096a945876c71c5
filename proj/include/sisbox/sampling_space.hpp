#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "report.hpp"
#include "signal.hpp"
#include "spectral_core.hpp"

namespace sisbox {

/// Continuity, bounded shift-square sums and two-sided Zak bounds of a candidate generator.
struct SZ99Report {
  ContinuityResult continuity;
  ShiftSum shift_sum;
  double zak_lower = 0;        // min |Z(0,.)| on E
  double zak_upper = 0;        // max |Z(0,.)| on E
  double zak_off_support = 0;  // max |Z(0,.)| off E
  Verdict zak_verdict = Verdict::fail;
  Verdict shift_verdict = Verdict::fail;
  Verdict overall = Verdict::fail;
  double eps = 0;
  double truncation_tail = 0;

  bool passed() const { return overall == Verdict::pass; }

  ConditionReport to_report(const std::string& title = "sz99") const {
    ConditionReport r;
    r.title = title;
    r.conditions.push_back({"continuity",
                            continuity.verdict,
                            {{"max_jump", {continuity.max_jump, continuity.threshold}}, {"dx", {continuity.dx, 0}}},
                            "heuristic falsifier: relative jump between adjacent samples"});
    r.conditions.push_back({"shift_square_sum", shift_verdict, {{"bound", {shift_sum.max_sum, std::numeric_limits<double>::infinity()}}}, ""});
    r.conditions.push_back({"zak_two_sided",
                            zak_verdict,
                            {{"A", {zak_lower, eps * zak_upper}}, {"B", {zak_upper, std::numeric_limits<double>::infinity()}},
                             {"off_support", {zak_off_support, eps * std::max(zak_upper, 1.0)}}},
                            ""});
    r.tails["spectrum_truncation"] = truncation_tail;
    r.finalize();
    return r;
  }
};

namespace detail {

inline SZ99Report sz99_from_parts(const Signal& f, const SupportMask& mask, const PeriodicSpectrum& zak, const Settings& s) {
  SZ99Report r;
  r.eps = s.eps;
  r.truncation_tail = f.truncation_tail(s.grid);
  r.continuity = continuity_check(f);
  const auto xs = uniform_probes(64);
  r.shift_sum = shift_square_sum(f, xs, s);
  r.shift_verdict = verdict_of(std::isfinite(r.shift_sum.max_sum));
  double lo = std::numeric_limits<double>::infinity(), hi = 0, off = 0;
  for (std::size_t u = 0; u < zak.size(); ++u) {
    const double a = std::abs(zak[u]);
    if (mask[u])
      lo = std::min(lo, a), hi = std::max(hi, a);
    else
      off = std::max(off, a);
  }
  if (mask.empty()) lo = 0;
  r.zak_lower = lo;
  r.zak_upper = hi;
  r.zak_off_support = off;
  r.zak_verdict = verdict_of(!mask.empty() && lo > s.eps * hi && off <= s.eps * std::max(hi, 1.0));
  const bool ok = r.continuity.verdict == Verdict::pass && r.shift_verdict == Verdict::pass && r.zak_verdict == Verdict::pass;
  r.overall = verdict_of(ok);
  return r;
}

}  // namespace detail

/// Checks continuity, bounded shift-square sums and A chi_E <= |Z(0,.)| <= B chi_E.
inline SZ99Report check_sz99(const Signal& candidate, const Settings& s) {
  const auto g = grammian(candidate, s.grid);
  const auto mask = support_mask(g, s.eps);
  return detail::sz99_from_parts(candidate, mask, zak_fiber(candidate, s), s);
}

class SpaceRejected : public Error {
 public:
  SpaceRejected(const std::string& what, SZ99Report report) : Error(what), report_(std::move(report)) {}
  const SZ99Report& report() const { return report_; }

 private:
  SZ99Report report_;
};

/// V(phi) with its cached Grammian, support, frame bounds and sampling function.
struct SamplingSpace {
  Signal generator;
  Settings settings;
  PeriodicSpectrum grammian;
  SupportMask mask;
  FrameBounds bounds;
  PeriodicSpectrum zak;
  Signal sampling_function;
  SZ99Report sz99;
  bool certified = false;

  const FrequencyGrid& grid() const { return settings.grid; }
};

struct BuildOptions {
  /// Construct even when the SZ99 check fails; reconstruct() then refuses.
  bool unchecked = false;
};

/// phi^ = psi^ / G_psi^{1/2} on E_psi, 0 elsewhere.
inline Signal tight_frame_generator(const Signal& psi, const Settings& s) {
  const auto g = grammian(psi, s.grid);
  const auto mask = support_mask(g, s.eps);
  if (mask.empty()) throw DegenerateSpace("tight frame of a zero generator");
  PeriodicSpectrum m(s.grid.N);
  for (std::size_t u = 0; u < m.size(); ++u)
    if (mask[u]) m[u] = 1.0 / std::sqrt(g[u].real());
  return modulate(psi, m, psi.name().empty() ? "" : "tight(" + psi.name() + ")");
}

/// Builds V(psi) and its sampling function s^ = psi^ / Z_psi(0,.) chi_E.
inline SamplingSpace build_space(const Signal& psi, const Settings& s, BuildOptions opt = {}) {
  SamplingSpace sp;
  sp.generator = psi;
  sp.settings = s;
  sp.grammian = grammian(psi, s.grid);
  sp.mask = support_mask(sp.grammian, s.eps);
  if (sp.mask.empty()) throw DegenerateSpace("generator '" + psi.name() + "' has an empty spectral support");
  sp.bounds = essential_bounds(sp.grammian, sp.mask);
  if (!(sp.bounds.lower > s.eps * sp.bounds.upper) && !opt.unchecked)
    throw DegenerateSpace("translates of '" + psi.name() + "' are not a frame sequence at grid resolution");
  sp.zak = zak_fiber(psi, s);
  double zmax = 0;
  for (std::size_t u = 0; u < sp.zak.size(); ++u)
    if (sp.mask[u]) zmax = std::max(zmax, std::abs(sp.zak[u]));
  PeriodicSpectrum m(s.grid.N);
  for (std::size_t u = 0; u < m.size(); ++u) {
    if (!sp.mask[u]) continue;
    if (std::abs(sp.zak[u]) <= s.eps * zmax) {
      if (!opt.unchecked)
        throw NotASamplingSpace("Z(0,.) of '" + psi.name() + "' vanishes on the support at omega=" +
                                    std::to_string(sp.zak.omega(static_cast<int>(u))),
                                sp.zak.omega(static_cast<int>(u)));
      continue;
    }
    m[u] = 1.0 / sp.zak[u];
  }
  sp.sampling_function = modulate(psi, m, "s[" + psi.name() + "]");
  sp.sz99 = detail::sz99_from_parts(psi, sp.mask, sp.zak, s);
  sp.certified = sp.sz99.passed();
  if (!sp.certified && !opt.unchecked) throw SpaceRejected("V(" + psi.name() + ") fails the sampling-space check", sp.sz99);
  return sp;
}

/// f = sum_k c_k phi(. - k).
inline Signal synthesize(const SamplingSpace& sp, std::span<const std::pair<int, cplx>> coeffs, std::string name = {}) {
  return shift_combination(sp.generator, coeffs, sp.grid().N, std::move(name));
}

inline Signal synthesize(const SamplingSpace& sp, const TimeSamples& c, std::string name = {}) {
  std::vector<std::pair<int, cplx>> coeffs;
  for (int k = c.first; k <= c.last(); ++k)
    if (c.at(k) != cplx{}) coeffs.emplace_back(k, c.at(k));
  return synthesize(sp, coeffs, std::move(name));
}

struct ReconstructionInfo {
  double tail_bound = 0;
  bool direct_route = false;
};

namespace detail {

inline bool has_exact_time_route(const Signal& f) {
  if (const auto* mod = f.modulated()) {
    for (const auto& t : mod->terms())
      if (!t.has_sparse() && !t.base.get_if<TimeKernel>()) return false;
  }
  return true;
}

}  // namespace detail

/// f(x) = sum_k f(k) s(x - k) on each x; refuses uncertified spaces.
inline std::vector<cplx> reconstruct(const SamplingSpace& sp, const TimeSamples& samples, std::span<const double> xs,
                                     ReconstructionInfo* info = nullptr) {
  if (!sp.certified) throw SpaceRejected("reconstruction refused: space is not certified", sp.sz99);
  std::vector<cplx> out(xs.size());
  const auto& s = sp.sampling_function;
  const bool direct = detail::has_exact_time_route(s);
  if (direct) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      cplx acc{};
      for (int k = samples.first; k <= samples.last(); ++k) {
        const cplx c = samples.at(k);
        if (c != cplx{}) acc += c * s.evaluate(xs[i] - k);
      }
      out[i] = acc;
    }
  } else {
    // Spectral identity f^ = Z_f(0,.) s^.
    const auto& g = sp.grid();
    const auto z = zak_time_fiber(samples, g.N);
    const auto shat = s.spectrum(g);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      cplx acc{};
      for (std::size_t j = 0; j < shat->size(); ++j)
        if ((*shat)[j] != cplx{}) acc += z[static_cast<std::size_t>(g.unit_index(j))] * (*shat)[j] * unit_phase(g.omega(j) * xs[i]);
      out[i] = acc / static_cast<double>(g.N);
    }
  }
  if (info) {
    info->direct_route = direct;
    const auto xs0 = uniform_probes(16);
    const double ssum = shift_square_sum(s, xs0, sp.settings).max_sum;
    info->tail_bound = std::sqrt(samples.tail_energy * ssum);
  }
  return out;
}

/// Orthogonal projection: r phi^ with r = [f^, phi^] / G_phi on E_phi.
inline Signal project(const Signal& f, const SamplingSpace& sp) {
  const auto b = bracket(f, sp.generator, sp.grid());
  PeriodicSpectrum r(sp.grid().N);
  for (std::size_t u = 0; u < r.size(); ++u)
    if (sp.mask[u]) r[u] = b[u] / sp.grammian[u].real();
  return modulate(sp.generator, r, f.name().empty() ? "" : "P(" + f.name() + ")");
}

/// L2 distance of two spectra on the grid.
inline double spectral_distance(const Signal& a, const Signal& b, const FrequencyGrid& grid) {
  const auto x = a.spectrum(grid);
  const auto y = b.spectrum(grid);
  double e = 0;
  for (std::size_t j = 0; j < x->size(); ++j) e += std::norm((*x)[j] - (*y)[j]);
  return std::sqrt(e / grid.N);
}

inline double spectral_norm(const Signal& a, const FrequencyGrid& grid) {
  return grid_l2_norm(*a.spectrum(grid), grid.N);
}

/// ||f - P f|| / ||f||, or the absolute residual when f vanishes.
inline double membership_residual(const Signal& f, const SamplingSpace& sp) {
  const double nf = spectral_norm(f, sp.grid());
  const double d = spectral_distance(f, project(f, sp), sp.grid());
  return nf > 0 ? d / nf : d;
}

/**
 * Extreme eigenvalues of the T x T Gram matrix of the translates psi(. - k).
 * Entries come from time-domain quadrature for time kernels and from the
 * Fourier coefficients of the Grammian otherwise.
 */
inline FrameBounds gram_matrix_bounds_oracle(const Signal& psi, const Settings& s, int t) {
  if (t < 2) throw TruncationError("Gram matrix oracle needs T >= 2");
  if (t > s.k_max) throw TruncationError("Gram matrix size T=" + std::to_string(t) + " exceeds k_max=" + std::to_string(s.k_max));
  std::vector<cplx> c(static_cast<std::size_t>(t));
  if (const auto* tk = psi.get_if<TimeKernel>()) {
    for (int n = 0; n < t; ++n) {
      const double lo = std::max(tk->lo, tk->lo - n), hi = std::min(tk->hi, tk->hi - n);
      if (!(lo < hi)) continue;
      auto edges = tk->panel_edges();
      for (double e : tk->panel_edges()) edges.push_back(e - n);
      std::erase_if(edges, [&](double v) { return v < lo || v > hi; });
      edges.push_back(lo);
      edges.push_back(hi);
      std::sort(edges.begin(), edges.end());
      edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
      const auto rule = quad::composite(edges, tk->quad_order);
      cplx acc{};
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double y = rule.nodes[q];
        acc += rule.weights[q] * tk->evaluate(y) * std::conj(tk->evaluate(y + n));
      }
      c[static_cast<std::size_t>(n)] = acc;
    }
  } else {
    const auto g = grammian(psi, s.grid);
    const int nres = s.grid.N;
    for (int n = 0; n < t; ++n) {
      cplx acc{};
      for (int u = 0; u < nres; ++u) acc += g[static_cast<std::size_t>(u)] * std::polar(1.0, -kTwoPi * static_cast<double>((static_cast<long>(n) * u) % nres) / nres);
      c[static_cast<std::size_t>(n)] = acc / static_cast<double>(nres);
    }
  }
  double scale = 0;
  for (const auto& v : c) scale = std::max(scale, std::abs(v));
  if (scale == 0) throw DegenerateSpace("Gram matrix of a zero generator");
  Eigen::MatrixXcd gm(t, t);
  for (int j = 0; j < t; ++j)
    for (int k = 0; k < t; ++k) gm(j, k) = j >= k ? c[static_cast<std::size_t>(j - k)] : std::conj(c[static_cast<std::size_t>(k - j)]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gm, Eigen::EigenvaluesOnly);
  return {es.eigenvalues()(0), es.eigenvalues()(t - 1)};
}

}  // namespace sisbox
