#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace sisbox {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

inline int next_power_of_two(int v) {
  int p = 1;
  while (p < v) p <<= 1;
  return p;
}

/// e^{2 pi i t}, with t reduced modulo 1 first so large arguments keep full precision.
inline cplx unit_phase(double t) {
  const double r = t - std::floor(t);
  return std::polar(1.0, kTwoPi * r);
}

/**
 * Discretization of the frequency line: points omega_j = -K + j/N, 0 <= j < 2KN.
 *
 * Index layout is j = (m + K) * N + u, so omega_j = m + u/N with m the integer
 * shift and u the position inside the unit interval. Integer frequency shifts
 * are therefore exact index shifts by multiples of N.
 */
struct FrequencyGrid {
  int K = 32;
  int N = 1024;

  void validate() const {
    if (!is_power_of_two(K) || !is_power_of_two(N))
      throw Error("grid parameters K and N must be powers of two (K=" + std::to_string(K) +
                  ", N=" + std::to_string(N) + ")");
  }

  std::size_t size() const { return static_cast<std::size_t>(2) * K * N; }
  double step() const { return 1.0 / N; }
  double omega(std::size_t j) const { return -K + static_cast<double>(j) / N; }
  std::size_t index(int shift, int u) const {
    return static_cast<std::size_t>(shift + K) * N + static_cast<std::size_t>(u);
  }
  int unit_index(std::size_t j) const { return static_cast<int>(j % N); }
  int shift_of(std::size_t j) const { return static_cast<int>(j / N) - K; }

  friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;
};

/// Knobs shared by every operation.
struct Settings {
  FrequencyGrid grid{};
  double eps = 1e-9;
  int k_max = 512;
  int quad_order = 2048;
  std::uint64_t seed = 20061;
};

/// A 1-periodic function stored at u/N, u = 0..N-1.
class PeriodicSpectrum {
 public:
  PeriodicSpectrum() = default;
  explicit PeriodicSpectrum(int n, cplx fill = {}) : values_(static_cast<std::size_t>(n), fill) {}
  explicit PeriodicSpectrum(std::vector<cplx> values) : values_(std::move(values)) {}

  int resolution() const { return static_cast<int>(values_.size()); }
  std::size_t size() const { return values_.size(); }
  double omega(int u) const { return static_cast<double>(u) / resolution(); }

  const cplx& operator[](std::size_t u) const { return values_[u]; }
  cplx& operator[](std::size_t u) { return values_[u]; }

  /// Periodic lookup: at(w) == at(w + m) for every integer m.
  cplx at(double w) const {
    const double frac = w - std::floor(w);
    auto u = static_cast<std::size_t>(std::floor(frac * resolution()));
    if (u >= values_.size()) u = 0;
    return values_[u];
  }

  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }

  double max_abs() const {
    double m = 0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  std::vector<cplx> values_;
};

/// Boolean per unit-grid point; discretization of a periodic set.
class SupportMask {
 public:
  SupportMask() = default;
  SupportMask(int n, bool fill, double eps = 0.0)
      : bits_(static_cast<std::size_t>(n), fill ? 1 : 0), eps_(eps) {}
  SupportMask(std::vector<std::uint8_t> bits, double eps) : bits_(std::move(bits)), eps_(eps) {}

  /// Union of half-open subintervals [a, b) of [0, 1).
  static SupportMask from_intervals(int n, std::span<const std::pair<double, double>> intervals) {
    SupportMask mask(n, false);
    for (auto [a, b] : intervals) {
      for (int u = 0; u < n; ++u) {
        const double w = static_cast<double>(u) / n;
        if (w >= a && w < b) mask.bits_[static_cast<std::size_t>(u)] = 1;
      }
    }
    return mask;
  }

  int resolution() const { return static_cast<int>(bits_.size()); }
  bool operator[](std::size_t u) const { return bits_[u] != 0; }
  void set(std::size_t u, bool v) { bits_[u] = v ? 1 : 0; }
  double tolerance() const { return eps_; }

  std::size_t count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)); }
  double measure() const { return bits_.empty() ? 0.0 : static_cast<double>(count()) / resolution(); }
  bool empty() const { return count() == 0; }

  SupportMask operator|(const SupportMask& o) const { return combine(o, [](bool a, bool b) { return a || b; }); }
  SupportMask operator&(const SupportMask& o) const { return combine(o, [](bool a, bool b) { return a && b; }); }
  SupportMask operator^(const SupportMask& o) const { return combine(o, [](bool a, bool b) { return a != b; }); }
  SupportMask operator-(const SupportMask& o) const { return combine(o, [](bool a, bool b) { return a && !b; }); }
  SupportMask operator~() const {
    SupportMask r = *this;
    for (auto& b : r.bits_) b = b ? 0 : 1;
    return r;
  }

  friend bool operator==(const SupportMask& a, const SupportMask& b) { return a.bits_ == b.bits_; }

 private:
  template <class Op>
  SupportMask combine(const SupportMask& o, Op op) const {
    if (o.bits_.size() != bits_.size()) throw GridMismatch("support masks have different resolutions");
    SupportMask r(resolution(), false, std::max(eps_, o.eps_));
    for (std::size_t u = 0; u < bits_.size(); ++u) r.bits_[u] = op(bits_[u] != 0, o.bits_[u] != 0) ? 1 : 0;
    return r;
  }

  std::vector<std::uint8_t> bits_;
  double eps_ = 0.0;
};

/**
 * Integer samples f(k) on the contiguous window first .. first + size - 1.
 * Values outside the window are treated as zero; tail_energy records an
 * estimate of the discarded energy.
 */
struct TimeSamples {
  int first = 0;
  std::vector<cplx> values;
  double tail_energy = 0.0;

  static TimeSamples window(int k_max) {
    TimeSamples s;
    s.first = -k_max;
    s.values.assign(static_cast<std::size_t>(2 * k_max), cplx{});
    return s;
  }

  int last() const { return first + static_cast<int>(values.size()) - 1; }
  cplx at(int k) const {
    if (k < first || k > last()) return {};
    return values[static_cast<std::size_t>(k - first)];
  }
  cplx& ref(int k) { return values[static_cast<std::size_t>(k - first)]; }

  double energy() const {
    double e = 0;
    for (const auto& v : values) e += std::norm(v);
    return e;
  }

  /// Energy in the outer eighth of the window, used as a proxy for what lies beyond it.
  double edge_energy() const {
    const auto n = values.size();
    const auto edge = std::max<std::size_t>(1, n / 16);
    double e = 0;
    for (std::size_t i = 0; i < std::min(edge, n); ++i) e += std::norm(values[i]) + std::norm(values[n - 1 - i]);
    return e;
  }
};

/// Max modulus difference between two equally sized sequences.
inline double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw GridMismatch("sequence sizes differ");
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// L2 norm of a grid spectrum with quadrature weight 1/N.
inline double grid_l2_norm(std::span<const cplx> v, int n) {
  double e = 0;
  for (const auto& x : v) e += std::norm(x);
  return std::sqrt(e / n);
}

}  // namespace sisbox
