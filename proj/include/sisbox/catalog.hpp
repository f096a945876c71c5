#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "signal.hpp"

namespace sisbox::catalog {

/// Sinc kernel: spectrum chi_[-1/2, 1/2).
inline Signal shannon() {
  const std::vector<PiecewiseConstantSpectrum::Interval> iv{{-0.5, 0.5, 1.0}};
  return Signal(PiecewiseConstantSpectrum::from_intervals(iv), "shannon");
}

/// Unit box spectrum chi_[0, 1).
inline Signal unit_box(std::string name = "box") {
  const std::vector<PiecewiseConstantSpectrum::Interval> iv{{0.0, 1.0, 1.0}};
  return Signal(PiecewiseConstantSpectrum::from_intervals(iv), std::move(name));
}

/// Band-limited triangle spectrum (1 - 2|w|) chi_[-1/2, 1/2), sampled on the grid.
inline Signal blhat(const FrequencyGrid& grid) {
  auto g = GridSpectrum::from_function(grid, [](double w) -> cplx {
    return (w >= -0.5 && w < 0.5) ? cplx{1.0 - 2.0 * std::abs(w)} : cplx{};
  });
  return Signal(std::move(g), "blhat", true);
}

/// Analytic inverse transform of blhat: sinc^2(x/2) / 2.
inline double blhat_time(double x) {
  const double s = sinc(0.5 * x);
  return 0.5 * s * s;
}

/// Blocks (-1)^n/(n+1) on [n, n + 2^-n), n = 0..n_max.
inline Signal ex2(int n_max = 60) {
  if (n_max < 0) throw CatalogError("ex2 needs n_max >= 0");
  std::vector<SpectrumPiece> pieces;
  for (int n = 0; n <= n_max; ++n) pieces.push_back({n, 0.0, std::ldexp(1.0, -n), cplx{(n % 2 ? -1.0 : 1.0) / (n + 1)}});
  return Signal(PiecewiseConstantSpectrum(std::move(pieces)), "ex2");
}

/// L2 energy of the blocks beyond n_max: sum_{n > n_max} 2^-n / (n+1)^2.
inline double ex2_tail_energy(int n_max) {
  double e = 0;
  for (int n = n_max + 1; n < n_max + 200; ++n) e += std::ldexp(1.0, -n) / ((n + 1.0) * (n + 1.0));
  return e;
}

/// Partial sums over the blocks met by a fiber in (2^-(n+1), 2^-n].
struct Ex2Fiber {
  double sum = 0;         // sum_{k<=n} (-1)^k/(k+1)
  double abs_sum = 0;     // sum_{k<=n} 1/(k+1)
  double square_sum = 0;  // sum_{k<=n} 1/(k+1)^2
};

inline Ex2Fiber ex2_fiber_oracle(int n) {
  Ex2Fiber f;
  for (int k = 0; k <= n; ++k) {
    const double v = 1.0 / (k + 1);
    f.sum += (k % 2 ? -v : v);
    f.abs_sum += v;
    f.square_sum += v * v;
  }
  return f;
}

/// Piecewise sine kernel: 1 on [-1/2, 1/2], |sin(pi x)| ramps to 0 at +-1.
inline Signal ex3(int quad_order = 2048) {
  TimeKernel k;
  k.lo = -1;
  k.hi = 1;
  k.breakpoints = {-0.5, 0.5};
  k.quad_order = quad_order;
  k.fn = [](double x) -> cplx {
    if (x < -0.5) return -std::sin(std::numbers::pi * x);
    if (x <= 0.5) return 1.0;
    return std::sin(std::numbers::pi * x);
  };
  return Signal(std::move(k), false, "ex3");
}

/// Triangle 1 - |x| on [-1, 1].
inline Signal hat(int quad_order = 2048) {
  TimeKernel k;
  k.lo = -1;
  k.hi = 1;
  k.breakpoints = {0.0};
  k.quad_order = quad_order;
  k.fn = [](double x) -> cplx { return 1.0 - std::abs(x); };
  return Signal(std::move(k), true, "hat");
}

struct Entry {
  std::string name;
  std::string description;
  std::function<Signal(const Settings&, int n_max)> make;
  std::function<int(int n_max)> required_k;
};

inline const std::vector<Entry>& entries() {
  static const std::vector<Entry> list{
      {"shannon", "sinc kernel, spectrum chi[-1/2,1/2)", [](const Settings&, int) { return shannon(); },
       [](int) { return 1; }},
      {"blhat", "band-limited triangle spectrum (1-2|w|) on [-1/2,1/2)",
       [](const Settings& s, int) { return blhat(s.grid); }, [](int) { return 1; }},
      {"ex2", "alternating blocks (-1)^n/(n+1) on [n, n+2^-n), n <= nmax",
       [](const Settings&, int n) { return ex2(n); }, [](int n) { return next_power_of_two(n + 1); }},
      {"ex3", "piecewise sine kernel on [-1,1], interpolating, spectrum not integrable",
       [](const Settings& s, int) { return ex3(s.quad_order); }, [](int) { return 1; }},
      {"hat", "triangle 1-|x| on [-1,1]", [](const Settings& s, int) { return hat(s.quad_order); },
       [](int) { return 1; }},
  };
  return list;
}

inline std::string names() {
  std::string out;
  for (const auto& e : entries()) out += (out.empty() ? "" : ", ") + e.name;
  return out;
}

inline const Entry* find(const std::string& name) {
  for (const auto& e : entries())
    if (e.name == name) return &e;
  return nullptr;
}

inline Signal make(const std::string& name, const Settings& s, int n_max = 60) {
  const auto* e = find(name);
  if (!e) throw CatalogError("unknown signal '" + name + "'; catalog: " + names());
  const int need = e->required_k(n_max);
  if (need > s.grid.K) throw BandwidthOverflow(need, s.grid.K);
  return e->make(s, n_max);
}

}  // namespace sisbox::catalog
