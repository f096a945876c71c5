#pragma once

// Independent reference computations. Nothing here calls into the library's
// transforms; values come from closed forms or plain summation.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

inline double sinc(double t) { return t == 0 ? 1.0 : std::sin(pi * t) / (pi * t); }

struct Box {
  double a, b;
  cplx v;
};

/// Value of a sum of half-open boxes at w.
inline cplx boxes_at(const std::vector<Box>& bs, double w) {
  cplx acc{};
  for (const auto& b : bs)
    if (w >= b.a && w < b.b) acc += b.v;
  return acc;
}

/// sum over all integer shifts m in [-m_max, m_max] of f^(w + m).
inline cplx periodize(const std::vector<Box>& bs, double w, int m_max = 80) {
  cplx acc{};
  for (int m = -m_max; m <= m_max; ++m) acc += boxes_at(bs, w + m);
  return acc;
}

inline double grammian(const std::vector<Box>& bs, double w, int m_max = 80) {
  double acc = 0;
  for (int m = -m_max; m <= m_max; ++m) acc += std::norm(boxes_at(bs, w + m));
  return acc;
}

/// Exact inverse transform of a box: int_a^b v e^{2 pi i w x} dw.
inline cplx box_inverse(const Box& b, double x) {
  if (x == 0) return b.v * (b.b - b.a);
  const cplx i{0, 1};
  return b.v * (std::exp(2 * pi * i * b.b * x) - std::exp(2 * pi * i * b.a * x)) / (2 * pi * i * x);
}

inline cplx boxes_inverse(const std::vector<Box>& bs, double x) {
  cplx acc{};
  for (const auto& b : bs) acc += box_inverse(b, x);
  return acc;
}

/// Shifted sincs: sum_k c_k sinc(x - k).
inline cplx sinc_series(const std::vector<std::pair<int, cplx>>& c, double x) {
  cplx acc{};
  for (auto [k, v] : c) acc += v * sinc(x - k);
  return acc;
}

/// Inverse transform of (1 - 2|w|) on [-1/2, 1/2].
inline double blhat(double x) { return 0.5 * sinc(0.5 * x) * sinc(0.5 * x); }

/// The interpolating piecewise-sine kernel.
inline double ex3(double x) {
  if (x < -1 || x > 1) return 0;
  if (x < -0.5) return -std::sin(pi * x);
  if (x <= 0.5) return 1;
  return std::sin(pi * x);
}

inline double hat(double x) { return std::abs(x) <= 1 ? 1 - std::abs(x) : 0; }

/// sum_k |g(x + k)|^2 for a kernel supported in [-1, 1].
template <class G>
double shift_square_sum(G g, double x) {
  double acc = 0;
  for (int k = -3; k <= 3; ++k) acc += g(x + k) * g(x + k);
  return acc;
}

/// Example-2 partial sums over k = 0..n.
inline double alternating_harmonic(int n) {
  double s = 0;
  for (int k = 0; k <= n; ++k) s += (k % 2 ? -1.0 : 1.0) / (k + 1);
  return s;
}
inline double harmonic(int n) {
  double s = 0;
  for (int k = 0; k <= n; ++k) s += 1.0 / (k + 1);
  return s;
}
inline double harmonic2(int n) {
  double s = 0;
  for (int k = 0; k <= n; ++k) s += 1.0 / ((k + 1.0) * (k + 1.0));
  return s;
}

/// Z(0, w) = sum_k c_k e^{-2 pi i k w}.
inline cplx trig_series(const std::vector<std::pair<int, cplx>>& c, double w) {
  cplx acc{};
  for (auto [k, v] : c) acc += v * std::polar(1.0, -2 * pi * k * w);
  return acc;
}

inline std::vector<std::pair<int, cplx>> random_coefficients(std::mt19937_64& rng, int count, int spread) {
  std::uniform_int_distribution<int> pos(-spread, spread);
  std::normal_distribution<double> val(0.0, 1.0);
  std::vector<std::pair<int, cplx>> c;
  while (static_cast<int>(c.size()) < count) {
    const int k = pos(rng);
    bool dup = false;
    for (auto& [j, v] : c) dup = dup || j == k;
    if (!dup) c.emplace_back(k, cplx{val(rng), val(rng)});
  }
  return c;
}

inline std::vector<double> random_points(std::mt19937_64& rng, int count, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> xs(static_cast<std::size_t>(count));
  for (auto& x : xs) x = d(rng);
  return xs;
}

}  // namespace oracle
