#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "grid.hpp"
#include "signal.hpp"

namespace sisbox {

namespace detail {

inline std::vector<cplx> twiddles(int n, double sign) {
  std::vector<cplx> tw(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) tw[static_cast<std::size_t>(u)] = std::polar(1.0, sign * kTwoPi * u / n);
  return tw;
}

inline std::size_t mod_index(long v, int n) { return static_cast<std::size_t>(((v % n) + n) % n); }

/// Fiber sums of a grid spectrum: out(u) = sum_m weight(m) * op(spec(u + m)).
template <class Op>
PeriodicSpectrum fiber_reduce(const std::vector<cplx>& spec, const FrequencyGrid& grid, Op op) {
  PeriodicSpectrum out(grid.N);
  for (int m = -grid.K; m < grid.K; ++m) {
    const cplx* row = spec.data() + grid.index(m, 0);
    for (int u = 0; u < grid.N; ++u) out[static_cast<std::size_t>(u)] += op(m, row[u]);
  }
  return out;
}

/// Samples f(k), k in the window, whose Fourier series is the periodic function p.
inline void add_series_coefficients(const PeriodicSpectrum& p, TimeSamples& s) {
  const int n = p.resolution();
  const auto tw = twiddles(n, +1.0);
  for (int k = s.first; k <= s.last(); ++k) {
    cplx acc{};
    for (int u = 0; u < n; ++u) acc += p[static_cast<std::size_t>(u)] * tw[mod_index(static_cast<long>(k) * u, n)];
    s.ref(k) += acc / static_cast<double>(n);
  }
}

}  // namespace detail

/// sum_m f^(omega + m) on the unit grid.
inline PeriodicSpectrum periodize(const Signal& f, const FrequencyGrid& grid) {
  const auto spec = f.spectrum(grid);
  return detail::fiber_reduce(*spec, grid, [](int, cplx v) { return v; });
}

/// sum_m |f^(omega + m)|^2; real and nonnegative.
inline PeriodicSpectrum grammian(const Signal& f, const FrequencyGrid& grid) {
  const auto spec = f.spectrum(grid);
  return detail::fiber_reduce(*spec, grid, [](int, cplx v) { return cplx{std::norm(v)}; });
}

/// [f, g](omega) = sum_m f^(omega + m) conj(g^(omega + m)).
inline PeriodicSpectrum bracket(const Signal& f, const Signal& g, const FrequencyGrid& grid) {
  const auto a = f.spectrum(grid);
  const auto b = g.spectrum(grid);
  if (a->size() != b->size()) throw GridMismatch("bracket of spectra on different grids");
  PeriodicSpectrum out(grid.N);
  for (std::size_t j = 0; j < a->size(); ++j) out[static_cast<std::size_t>(grid.unit_index(j))] += (*a)[j] * std::conj((*b)[j]);
  return out;
}

/// Zak transform at x: sum_m f^(omega + m) e^{2 pi i m x}.
inline PeriodicSpectrum zak_dual_fiber(const Signal& f, double x, const FrequencyGrid& grid) {
  const auto spec = f.spectrum(grid);
  return detail::fiber_reduce(*spec, grid, [x](int m, cplx v) { return v == cplx{} ? v : v * unit_phase(m * x); });
}

/// Z_f(0, omega) = sum_k f(k) e^{-2 pi i k omega}.
inline PeriodicSpectrum zak_time_fiber(const TimeSamples& samples, int n) {
  PeriodicSpectrum out(n);
  const auto tw = detail::twiddles(n, -1.0);
  for (int k = samples.first; k <= samples.last(); ++k) {
    const cplx c = samples.at(k);
    if (c == cplx{}) continue;
    for (int u = 0; u < n; ++u) out[static_cast<std::size_t>(u)] += c * tw[detail::mod_index(static_cast<long>(k) * u, n)];
  }
  return out;
}

/**
 * Integer samples f(k) for k in [-k_max, k_max).
 *
 * Spectral representations are sampled through the Fourier series of their
 * periodization (the trapezoidal inverse transform at integers), so with
 * 2 k_max = N the Zak fiber of the samples reproduces the periodization on the
 * grid. Time kernels are sampled directly.
 */
inline TimeSamples integer_samples(const Signal& f, const Settings& s) {
  auto out = TimeSamples::window(s.k_max);
  const int n = s.grid.N;
  auto add_kernel_term = [&](const TimeKernel& tk, const ModulatedTerm* term) {
    const int p0 = static_cast<int>(std::ceil(tk.lo));
    const int p1 = static_cast<int>(std::floor(tk.hi));
    for (int p = p0; p <= p1; ++p) {
      const cplx v = tk.evaluate(p);
      if (v == cplx{}) continue;
      if (!term) {
        if (p >= out.first && p <= out.last()) out.ref(p) += v;
      } else if (term->has_sparse()) {
        for (auto [k, d] : term->sparse)
          if (p + k >= out.first && p + k <= out.last()) out.ref(p + k) += v * d;
      } else {
        for (int k = out.first; k <= out.last(); ++k) out.ref(k) += v * term->coefficient(k - p);
      }
    }
  };
  if (const auto* tk = f.get_if<TimeKernel>()) {
    add_kernel_term(*tk, nullptr);
    out.tail_energy = (tk->lo >= out.first && tk->hi <= out.last()) ? 0.0 : out.edge_energy();
    return out;
  }
  if (const auto* mod = f.modulated()) {
    PeriodicSpectrum spectral(n);
    bool any_spectral = false;
    for (const auto& t : mod->terms()) {
      if (const auto* tk = t.base.get_if<TimeKernel>()) {
        add_kernel_term(*tk, &t);
      } else {
        const auto p = periodize(t.base, s.grid);
        for (int u = 0; u < n; ++u) spectral[static_cast<std::size_t>(u)] += t.multiplier[static_cast<std::size_t>(u)] * p[static_cast<std::size_t>(u)];
        any_spectral = true;
      }
    }
    if (any_spectral) detail::add_series_coefficients(spectral, out);
  } else {
    detail::add_series_coefficients(periodize(f, s.grid), out);
  }
  out.tail_energy = out.edge_energy();
  return out;
}

/// Z_f(0, .) computed from the integer samples of f.
inline PeriodicSpectrum zak_fiber(const Signal& f, const Settings& s) {
  return zak_time_fiber(integer_samples(f, s), s.grid.N);
}

/// Inverse Fourier transform at x: exact for piecewise constant spectra,
/// trapezoidal for grid spectra, direct for time kernels.
inline cplx inverse_fourier_evaluate(const Signal& f, double x) { return f.evaluate(x); }

/// True where G exceeds eps * max(G).
inline SupportMask support_mask(const PeriodicSpectrum& g, double eps) {
  if (!(eps > 0)) throw Error("support mask tolerance must be positive");
  double mx = 0;
  for (std::size_t u = 0; u < g.size(); ++u) mx = std::max(mx, g[u].real());
  SupportMask mask(g.resolution(), false, eps);
  for (std::size_t u = 0; u < g.size(); ++u) {
    const double v = g[u].real();
    if (v < -eps * std::max(mx, 1.0)) throw NotAGrammian("negative value " + std::to_string(v) + " at omega=" + std::to_string(g.omega(static_cast<int>(u))));
    if (mx > 0 && v > eps * mx) mask.set(u, true);
  }
  return mask;
}

struct FrameBounds {
  double lower = 0;
  double upper = 0;
};

/// Minimum and maximum of G over the masked points.
inline FrameBounds essential_bounds(const PeriodicSpectrum& g, const SupportMask& mask) {
  if (mask.resolution() != g.resolution()) throw GridMismatch("mask and spectrum resolutions differ");
  FrameBounds b{std::numeric_limits<double>::infinity(), 0.0};
  bool any = false;
  for (std::size_t u = 0; u < g.size(); ++u) {
    if (!mask[u]) continue;
    any = true;
    b.lower = std::min(b.lower, g[u].real());
    b.upper = std::max(b.upper, g[u].real());
  }
  if (!any) throw DegenerateSpace("empty support mask");
  if (!(b.upper > 0)) throw DegenerateSpace("grammian vanishes on the support mask");
  return b;
}

struct ShiftSum {
  double max_sum = 0;
  double tail = 0;
  double argmax = 0;
};

/// max over x of sum_{|k| <= k_max} |f(x + k)|^2 by direct evaluation.
template <class F>
ShiftSum shift_square_sum(F&& f, std::span<const double> xs, int k_max) {
  ShiftSum r;
  const int edge = std::max(1, k_max / 8);
  for (double x : xs) {
    double total = 0, outer = 0;
    for (int k = -k_max; k <= k_max; ++k) {
      const double v = std::norm(f(x + k));
      total += v;
      if (std::abs(k) > k_max - edge) outer += v;
    }
    if (total > r.max_sum) r.max_sum = total, r.argmax = x;
    r.tail = std::max(r.tail, outer);
  }
  return r;
}

/**
 * Shift-square sum of a signal. Time kernels are summed directly over every
 * shift meeting the support; spectral signals use the fiber identity
 * sum_k |f(x+k)|^2 = int_0^1 |sum_m f^(w+m) e^{2 pi i m x}|^2 dw.
 */
inline ShiftSum shift_square_sum(const Signal& f, std::span<const double> xs, const Settings& s) {
  if (const auto* tk = f.get_if<TimeKernel>()) {
    ShiftSum r;
    for (double x : xs) {
      double total = 0;
      const int k0 = static_cast<int>(std::ceil(tk->lo - x));
      const int k1 = static_cast<int>(std::floor(tk->hi - x));
      for (int k = k0; k <= k1; ++k) total += std::norm(tk->evaluate(x + k));
      if (total > r.max_sum) r.max_sum = total, r.argmax = x;
    }
    return r;
  }
  ShiftSum r;
  for (double x : xs) {
    const auto z = zak_dual_fiber(f, x, s.grid);
    double e = 0;
    for (std::size_t u = 0; u < z.size(); ++u) e += std::norm(z[u]);
    e /= s.grid.N;
    if (e > r.max_sum) r.max_sum = e, r.argmax = x;
  }
  return r;
}

enum class Verdict { pass, fail, indeterminate };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "indeterminate";
  }
}

/// Largest jump between adjacent samples on a dense x-grid, relative to max |f|.
/// A falsifier only: a pass does not prove continuity.
struct ContinuityResult {
  Verdict verdict = Verdict::indeterminate;
  double max_jump = 0;
  double threshold = 0;
  double dx = 0;
};

inline constexpr double kContinuityConstant = 2.0;

inline ContinuityResult continuity_check(const Signal& f, double dx = 1.0 / 256) {
  double lo = -4, hi = 4;
  if (const auto* tk = f.get_if<TimeKernel>()) lo = tk->lo - 0.5, hi = tk->hi + 0.5;
  ContinuityResult r;
  r.dx = dx;
  r.threshold = kContinuityConstant * std::sqrt(dx);
  const int n = static_cast<int>(std::ceil((hi - lo) / dx));
  double peak = 0, jump = 0;
  cplx prev = f.evaluate(lo);
  peak = std::abs(prev);
  for (int i = 1; i <= n; ++i) {
    const cplx cur = f.evaluate(lo + i * dx);
    jump = std::max(jump, std::abs(cur - prev));
    peak = std::max(peak, std::abs(cur));
    prev = cur;
  }
  if (peak < 1e-300) {
    r.verdict = Verdict::indeterminate;
    return r;
  }
  r.max_jump = jump / peak;
  r.verdict = r.max_jump <= r.threshold ? Verdict::pass : Verdict::fail;
  return r;
}

/// Uniform probe points in [0, 1).
inline std::vector<double> uniform_probes(int count) {
  std::vector<double> xs(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) xs[static_cast<std::size_t>(i)] = static_cast<double>(i) / count;
  return xs;
}

}  // namespace sisbox
