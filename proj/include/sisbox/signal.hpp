#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "grid.hpp"
#include "quadrature.hpp"

namespace sisbox {

inline double sinc(double t) {
  if (std::abs(t) < 1e-12) return 1.0;
  const double a = std::numbers::pi * t;
  return std::sin(a) / a;
}

/// Constant value on [cell + lo, cell + hi), with 0 <= lo < hi <= 1.
struct SpectrumPiece {
  int cell = 0;
  double lo = 0;
  double hi = 1;
  cplx value{};
};

/**
 * Spectrum made of finitely many disjoint half-open intervals with constant
 * complex values. Intervals are stored relative to their integer cell so that
 * very short blocks near a large integer keep their exact width.
 */
class PiecewiseConstantSpectrum {
 public:
  struct Interval {
    double a = 0;
    double b = 0;
    cplx value{};
  };

  PiecewiseConstantSpectrum() = default;

  explicit PiecewiseConstantSpectrum(std::vector<SpectrumPiece> pieces) : pieces_(std::move(pieces)) {
    std::erase_if(pieces_, [](const SpectrumPiece& p) { return p.value == cplx{}; });
    for (const auto& p : pieces_)
      if (!(p.lo >= 0 && p.hi <= 1 && p.lo < p.hi)) throw Error("spectrum piece outside its unit cell");
    std::sort(pieces_.begin(), pieces_.end(), [](const auto& x, const auto& y) {
      return x.cell != y.cell ? x.cell < y.cell : x.lo < y.lo;
    });
    for (std::size_t i = 1; i < pieces_.size(); ++i) {
      const auto& a = pieces_[i - 1];
      const auto& b = pieces_[i];
      if (a.cell == b.cell && a.hi > b.lo) throw Error("spectrum intervals overlap");
    }
  }

  static PiecewiseConstantSpectrum from_intervals(std::span<const Interval> intervals) {
    std::vector<SpectrumPiece> pieces;
    for (const auto& iv : intervals) {
      if (!(iv.a < iv.b)) throw Error("spectrum interval must satisfy a < b");
      const int first = static_cast<int>(std::floor(iv.a));
      const int last = static_cast<int>(std::ceil(iv.b)) - 1;
      for (int m = first; m <= last; ++m) {
        const double lo = std::max(iv.a - m, 0.0);
        const double hi = std::min(iv.b - m, 1.0);
        if (hi > lo) pieces.push_back({m, lo, hi, iv.value});
      }
    }
    return PiecewiseConstantSpectrum(std::move(pieces));
  }

  const std::vector<SpectrumPiece>& pieces() const { return pieces_; }

  std::vector<Interval> intervals() const {
    std::vector<Interval> out;
    for (const auto& p : pieces_) out.push_back({p.cell + p.lo, p.cell + p.hi, p.value});
    return out;
  }

  /// Smallest power-of-two K with the spectrum inside [-K, K).
  int required_bandwidth() const {
    int need = 1;
    for (const auto& p : pieces_) need = std::max({need, p.cell + 1, -p.cell});
    return next_power_of_two(need);
  }

  cplx value_at(int cell, double frac) const {
    for (const auto& p : pieces_)
      if (p.cell == cell && frac >= p.lo && frac < p.hi) return p.value;
    return {};
  }

  cplx value_at(double omega) const {
    const double c = std::floor(omega);
    return value_at(static_cast<int>(c), omega - c);
  }

  /// Average of the one-sided limits at cell + frac.
  cplx jump_average_at(int cell, double frac) const {
    cplx left{}, right = value_at(cell, frac);
    for (const auto& p : pieces_) {
      if (p.cell == cell && frac > p.lo && frac <= p.hi) left = p.value;
      if (frac == 0 && p.cell == cell - 1 && p.hi == 1) left = p.value;
    }
    return 0.5 * (left + right);
  }

  struct Fiber {
    cplx sum{};
    double abs_sum = 0;
    double square_sum = 0;
  };

  /// Exact fiber sums over all integer shifts at frac in [0, 1).
  Fiber fiber(double frac) const {
    Fiber f;
    for (const auto& p : pieces_) {
      if (frac >= p.lo && frac < p.hi) {
        f.sum += p.value;
        f.abs_sum += std::abs(p.value);
        f.square_sum += std::norm(p.value);
      }
    }
    return f;
  }

  /// Exact inverse Fourier transform at x.
  cplx evaluate(double x) const {
    cplx acc{};
    for (const auto& p : pieces_) {
      const double width = p.hi - p.lo;
      const double centre = 0.5 * (p.lo + p.hi);
      acc += p.value * width * sinc(width * x) * unit_phase(p.cell * x + centre * x);
    }
    return acc;
  }

  double l2_norm() const {
    double e = 0;
    for (const auto& p : pieces_) e += std::norm(p.value) * (p.hi - p.lo);
    return std::sqrt(e);
  }

 private:
  std::vector<SpectrumPiece> pieces_;
};

/// Complex value per point of a FrequencyGrid.
struct GridSpectrum {
  FrequencyGrid grid;
  std::vector<cplx> values;

  template <class F>
  static GridSpectrum from_function(const FrequencyGrid& grid, F&& f) {
    GridSpectrum g{grid, std::vector<cplx>(grid.size())};
    for (std::size_t j = 0; j < grid.size(); ++j) g.values[j] = f(grid.omega(j));
    return g;
  }

  /// Trapezoidal inverse transform (1/N) sum_j v_j e^{2 pi i omega_j x}.
  cplx evaluate(double x) const {
    cplx acc{};
    for (std::size_t j = 0; j < values.size(); ++j)
      if (values[j] != cplx{}) acc += values[j] * unit_phase(grid.omega(j) * x);
    return acc / static_cast<double>(grid.N);
  }
};

enum class JumpRule { left_closed, average };

/// Point samples of a piecewise constant spectrum on a grid.
inline GridSpectrum sample_piecewise(const PiecewiseConstantSpectrum& pc, const FrequencyGrid& grid,
                                     JumpRule rule = JumpRule::left_closed) {
  if (pc.required_bandwidth() > grid.K) throw BandwidthOverflow(pc.required_bandwidth(), grid.K);
  GridSpectrum g{grid, std::vector<cplx>(grid.size())};
  for (const auto& p : pc.pieces()) {
    const int u0 = static_cast<int>(std::ceil(p.lo * grid.N));
    const int u1 = std::min(grid.N, static_cast<int>(std::ceil(p.hi * grid.N)));
    for (int u = u0; u < u1; ++u) g.values[grid.index(p.cell, u)] = p.value;
  }
  if (rule == JumpRule::average) {
    for (const auto& p : pc.pieces()) {
      for (double edge : {p.lo, p.hi}) {
        const double scaled = edge * grid.N;
        if (scaled != std::floor(scaled)) continue;
        int cell = p.cell, u = static_cast<int>(scaled);
        if (u == grid.N) cell += 1, u = 0;
        if (cell < -grid.K || cell >= grid.K) continue;
        g.values[grid.index(cell, u)] = pc.jump_average_at(cell, static_cast<double>(u) / grid.N);
      }
    }
  }
  return g;
}

/// Compactly supported continuous time function.
struct TimeKernel {
  double lo = -1;
  double hi = 1;
  std::vector<double> breakpoints;
  std::function<cplx(double)> fn;
  int quad_order = 2048;

  cplx evaluate(double x) const { return (x >= lo && x <= hi) ? fn(x) : cplx{}; }

  std::vector<double> panel_edges() const {
    std::vector<double> e = breakpoints;
    e.push_back(lo);
    e.push_back(hi);
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    std::erase_if(e, [&](double v) { return v < lo || v > hi; });
    return e;
  }

  double l2_norm() const {
    const auto rule = quad::composite(panel_edges(), quad_order);
    double e = 0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) e += rule.weights[q] * std::norm(fn(rule.nodes[q]));
    return std::sqrt(e);
  }
};

class Modulated;

/**
 * A square-integrable function of one real variable, known through one of
 * several representations. Immutable; copies share state, and grid spectra are
 * computed once per grid and cached.
 */
class Signal {
 public:
  using Representation = std::variant<PiecewiseConstantSpectrum, GridSpectrum, TimeKernel, std::shared_ptr<const Modulated>>;

  Signal();
  Signal(PiecewiseConstantSpectrum pc, std::string name = {});
  Signal(GridSpectrum g, std::string name = {}, bool integrable = true);
  Signal(TimeKernel k, bool integrable, std::string name = {});
  Signal(Modulated m, std::string name = {});

  const Representation& representation() const;
  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&representation());
  }
  const Modulated* modulated() const;

  bool integrable_spectrum() const;
  const std::string& name() const;
  Signal renamed(std::string name) const;

  /// Spectrum values on every grid point; cached.
  std::shared_ptr<const std::vector<cplx>> spectrum(const FrequencyGrid& grid) const;

  /// Time-domain value f(x).
  cplx evaluate(double x) const;

  /// Power-of-two K the spectrum needs, or 0 when it is truncated to any grid.
  int required_bandwidth() const;

  /// Energy discarded by restricting the spectrum to the grid band.
  double truncation_tail(const FrequencyGrid& grid) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// One term m(omega) * base(omega), with base never itself modulated.
struct ModulatedTerm {
  Signal base;
  PeriodicSpectrum multiplier;
  /// Exact integer-shift coefficients d_k, m(w) = sum_k d_k e^{-2 pi i k w}, when few.
  std::vector<std::pair<int, cplx>> sparse;
  /// N-periodic DFT coefficients indexed by k mod N otherwise.
  std::vector<cplx> dense;

  bool has_sparse() const { return dense.empty(); }

  cplx coefficient(int k) const {
    if (has_sparse()) {
      for (auto [i, d] : sparse)
        if (i == k) return d;
      return {};
    }
    const int n = static_cast<int>(dense.size());
    return dense[static_cast<std::size_t>(((k % n) + n) % n)];
  }
};

/**
 * Sum of periodic multiples of base signals. This is how members of a
 * shift-invariant space are carried: f = sum_k c_k g(. - k) has spectrum
 * (sum_k c_k e^{-2 pi i k w}) g^(w).
 */
class Modulated {
 public:
  explicit Modulated(std::vector<ModulatedTerm> terms) : terms_(std::move(terms)) {}
  const std::vector<ModulatedTerm>& terms() const { return terms_; }

 private:
  std::vector<ModulatedTerm> terms_;
};

namespace detail {

inline constexpr std::size_t kSparseLimit = 64;

/// d_k = (1/N) sum_u m(u/N) e^{2 pi i k u / N}, k in [-N/2, N/2).
inline std::vector<cplx> multiplier_coefficients(const PeriodicSpectrum& m) {
  const int n = m.resolution();
  std::vector<cplx> tw(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) tw[static_cast<std::size_t>(u)] = std::polar(1.0, kTwoPi * u / n);
  std::vector<cplx> d(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    cplx acc{};
    for (int u = 0; u < n; ++u) acc += m[static_cast<std::size_t>(u)] * tw[static_cast<std::size_t>((static_cast<long>(k) * u) % n)];
    d[static_cast<std::size_t>(k)] = acc / static_cast<double>(n);
  }
  return d;
}

inline PeriodicSpectrum multiplier_from_coefficients(int n, std::span<const std::pair<int, cplx>> coeffs) {
  PeriodicSpectrum m(n);
  for (auto [k, c] : coeffs) {
    if (c == cplx{}) continue;
    for (int u = 0; u < n; ++u)
      m[static_cast<std::size_t>(u)] += c * std::polar(1.0, -kTwoPi * static_cast<double>((static_cast<long>(k) * u) % n) / n);
  }
  return m;
}

inline ModulatedTerm term_from_multiplier(Signal base, PeriodicSpectrum m) {
  ModulatedTerm t{std::move(base), std::move(m), {}, {}};
  auto d = multiplier_coefficients(t.multiplier);
  const int n = t.multiplier.resolution();
  double mx = 0;
  for (const auto& v : d) mx = std::max(mx, std::abs(v));
  std::vector<std::pair<int, cplx>> sp;
  for (int k = 0; k < n; ++k)
    if (std::abs(d[static_cast<std::size_t>(k)]) > 1e-13 * mx) sp.emplace_back(k < n / 2 ? k : k - n, d[static_cast<std::size_t>(k)]);
  if (sp.size() <= kSparseLimit)
    t.sparse = std::move(sp);
  else
    t.dense = std::move(d);
  return t;
}

}  // namespace detail

struct Signal::Impl {
  Representation rep;
  bool integrable = true;
  std::string name;
  mutable std::mutex mu;
  mutable std::vector<std::pair<FrequencyGrid, std::shared_ptr<const std::vector<cplx>>>> cache;
};

inline Signal::Signal() : Signal(PiecewiseConstantSpectrum{}, "zero") {}

inline Signal::Signal(PiecewiseConstantSpectrum pc, std::string name) {
  auto impl = std::make_shared<Impl>();
  impl->rep = std::move(pc);
  impl->name = std::move(name);
  impl_ = std::move(impl);
}

inline Signal::Signal(GridSpectrum g, std::string name, bool integrable) {
  g.grid.validate();
  if (g.values.size() != g.grid.size()) throw GridMismatch("grid spectrum size does not match its grid");
  auto impl = std::make_shared<Impl>();
  impl->rep = std::move(g);
  impl->integrable = integrable;
  impl->name = std::move(name);
  impl_ = std::move(impl);
}

inline Signal::Signal(TimeKernel k, bool integrable, std::string name) {
  if (!(k.lo < k.hi) || !k.fn) throw Error("time kernel needs a bounded support and an evaluator");
  auto impl = std::make_shared<Impl>();
  impl->rep = std::move(k);
  impl->integrable = integrable;
  impl->name = std::move(name);
  impl_ = std::move(impl);
}

inline Signal::Signal(Modulated m, std::string name) {
  auto impl = std::make_shared<Impl>();
  bool integrable = true;
  for (const auto& t : m.terms()) {
    if (t.base.modulated()) throw Error("modulated term bases must not be modulated");
    integrable = integrable && t.base.integrable_spectrum();
  }
  impl->rep = std::make_shared<const Modulated>(std::move(m));
  impl->integrable = integrable;
  impl->name = std::move(name);
  impl_ = std::move(impl);
}

inline const Signal::Representation& Signal::representation() const { return impl_->rep; }

inline const Modulated* Signal::modulated() const {
  auto p = std::get_if<std::shared_ptr<const Modulated>>(&impl_->rep);
  return p ? p->get() : nullptr;
}

inline bool Signal::integrable_spectrum() const { return impl_->integrable; }
inline const std::string& Signal::name() const { return impl_->name; }

inline Signal Signal::renamed(std::string name) const {
  auto impl = std::make_shared<Impl>();
  impl->rep = impl_->rep;
  impl->integrable = impl_->integrable;
  impl->name = std::move(name);
  Signal s;
  s.impl_ = std::move(impl);
  return s;
}

inline int Signal::required_bandwidth() const {
  return std::visit(
      [](const auto& r) -> int {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PiecewiseConstantSpectrum>)
          return r.required_bandwidth();
        else if constexpr (std::is_same_v<T, GridSpectrum>)
          return r.grid.K;
        else if constexpr (std::is_same_v<T, TimeKernel>)
          return 0;
        else {
          int k = 0;
          for (const auto& t : r->terms()) k = std::max(k, t.base.required_bandwidth());
          return k;
        }
      },
      impl_->rep);
}

namespace detail {

inline std::vector<cplx> time_kernel_spectrum(const TimeKernel& k, const FrequencyGrid& grid) {
  const auto rule = quad::composite(k.panel_edges(), k.quad_order);
  std::vector<cplx> out(grid.size());
  const int n = grid.N;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double x = rule.nodes[q];
    const cplx fw = k.fn(x) * rule.weights[q];
    if (fw == cplx{}) continue;
    const cplx step = std::polar(1.0, -kTwoPi * x / n);
    for (int m = -grid.K; m < grid.K; ++m) {
      cplx ph = unit_phase(-x * m);
      cplx* row = out.data() + grid.index(m, 0);
      for (int u = 0; u < n; ++u) {
        row[u] += fw * ph;
        ph *= step;
      }
    }
  }
  return out;
}

}  // namespace detail

inline std::shared_ptr<const std::vector<cplx>> Signal::spectrum(const FrequencyGrid& grid) const {
  grid.validate();
  {
    std::lock_guard lock(impl_->mu);
    for (const auto& [g, v] : impl_->cache)
      if (g == grid) return v;
  }
  auto computed = std::visit(
      [&](const auto& r) -> std::vector<cplx> {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PiecewiseConstantSpectrum>) {
          return sample_piecewise(r, grid).values;
        } else if constexpr (std::is_same_v<T, GridSpectrum>) {
          if (!(r.grid == grid)) throw GridMismatch("grid spectrum was sampled on a different grid");
          return r.values;
        } else if constexpr (std::is_same_v<T, TimeKernel>) {
          return detail::time_kernel_spectrum(r, grid);
        } else {
          std::vector<cplx> out(grid.size());
          for (const auto& t : r->terms()) {
            if (t.multiplier.resolution() != grid.N) throw GridMismatch("periodic multiplier resolution differs from grid N");
            auto base = t.base.spectrum(grid);
            for (std::size_t j = 0; j < out.size(); ++j)
              if ((*base)[j] != cplx{}) out[j] += t.multiplier[static_cast<std::size_t>(grid.unit_index(j))] * (*base)[j];
          }
          return out;
        }
      },
      impl_->rep);
  auto ptr = std::make_shared<const std::vector<cplx>>(std::move(computed));
  std::lock_guard lock(impl_->mu);
  impl_->cache.emplace_back(grid, ptr);
  return ptr;
}

inline double Signal::truncation_tail(const FrequencyGrid& grid) const {
  const auto* k = get_if<TimeKernel>();
  if (!k) return 0.0;
  const double total = std::pow(k->l2_norm(), 2);
  const auto spec = spectrum(grid);
  double kept = 0;
  for (const auto& v : *spec) kept += std::norm(v);
  return std::max(0.0, total - kept / grid.N);
}

inline cplx Signal::evaluate(double x) const {
  return std::visit(
      [&](const auto& r) -> cplx {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PiecewiseConstantSpectrum> || std::is_same_v<T, GridSpectrum> ||
                      std::is_same_v<T, TimeKernel>) {
          return r.evaluate(x);
        } else {
          cplx acc{};
          for (const auto& t : r->terms()) {
            if (const auto* tk = t.base.template get_if<TimeKernel>()) {
              if (t.has_sparse()) {
                for (auto [k, d] : t.sparse) acc += d * tk->evaluate(x - k);
              } else {
                const int k0 = static_cast<int>(std::ceil(x - tk->hi));
                const int k1 = static_cast<int>(std::floor(x - tk->lo));
                for (int k = k0; k <= k1; ++k) acc += t.coefficient(k) * tk->evaluate(x - k);
              }
            } else if (t.has_sparse()) {
              for (auto [k, d] : t.sparse) acc += d * t.base.evaluate(x - k);
            } else {
              // Trapezoidal route on the base's own band.
              const int n = t.multiplier.resolution();
              const FrequencyGrid g{std::max(1, t.base.required_bandwidth()), n};
              const auto base = t.base.spectrum(g);
              cplx sum{};
              for (std::size_t j = 0; j < base->size(); ++j)
                if ((*base)[j] != cplx{})
                  sum += t.multiplier[static_cast<std::size_t>(g.unit_index(j))] * (*base)[j] * unit_phase(g.omega(j) * x);
              acc += sum / static_cast<double>(n);
            }
          }
          return acc;
        }
      },
      impl_->rep);
}

/// Periodic multiple m * f, flattened so that bases stay unmodulated.
inline Signal modulate(const Signal& f, const PeriodicSpectrum& m, std::string name = {}) {
  std::vector<ModulatedTerm> terms;
  if (const auto* mod = f.modulated()) {
    for (const auto& t : mod->terms()) {
      if (t.multiplier.resolution() != m.resolution()) throw GridMismatch("periodic multiplier resolutions differ");
      PeriodicSpectrum prod(m.resolution());
      for (std::size_t u = 0; u < prod.size(); ++u) prod[u] = m[u] * t.multiplier[u];
      terms.push_back(detail::term_from_multiplier(t.base, std::move(prod)));
    }
  } else {
    terms.push_back(detail::term_from_multiplier(f, m));
  }
  return Signal(Modulated(std::move(terms)), std::move(name));
}

/// sum_k c_k f(. - k) with the coefficients kept exactly.
inline Signal shift_combination(const Signal& f, std::span<const std::pair<int, cplx>> coeffs, int n,
                                std::string name = {}) {
  auto m = detail::multiplier_from_coefficients(n, coeffs);
  if (f.modulated()) return modulate(f, m, std::move(name));
  ModulatedTerm t{f, std::move(m), {}, {}};
  for (auto [k, c] : coeffs)
    if (c != cplx{}) t.sparse.emplace_back(k, c);
  return Signal(Modulated({std::move(t)}), std::move(name));
}

/// Sum of signals as one modulated signal.
inline Signal sum_signals(std::span<const Signal> parts, int n, std::string name = {}) {
  std::vector<ModulatedTerm> terms;
  for (const auto& p : parts) {
    if (const auto* mod = p.modulated()) {
      for (const auto& t : mod->terms()) terms.push_back(t);
    } else {
      terms.push_back(ModulatedTerm{p, PeriodicSpectrum(n, cplx{1.0}), {{0, cplx{1.0}}}, {}});
    }
  }
  return Signal(Modulated(std::move(terms)), std::move(name));
}

}  // namespace sisbox
