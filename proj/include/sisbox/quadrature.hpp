#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "grid.hpp"

namespace sisbox::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
inline Rule gauss_legendre(int n) {
  Rule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1 - x * x) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return r;
}

/**
 * Composite Gauss-Legendre nodes over the breakpoints of a piecewise smooth
 * function. Roughly `order` nodes in total, 16 per panel, panels never straddle
 * a breakpoint.
 */
inline Rule composite(const std::vector<double>& breakpoints, int order) {
  constexpr int kPanel = 16;
  static const Rule base = gauss_legendre(kPanel);
  Rule r;
  if (breakpoints.size() < 2) return r;
  const double total = breakpoints.back() - breakpoints.front();
  const int panels = std::max(1, order / kPanel);
  for (std::size_t s = 0; s + 1 < breakpoints.size(); ++s) {
    const double a = breakpoints[s], b = breakpoints[s + 1];
    if (b <= a) continue;
    const int p = std::max(1, static_cast<int>(std::lround(panels * (b - a) / total)));
    const double w = (b - a) / p;
    for (int q = 0; q < p; ++q) {
      const double lo = a + q * w;
      for (int i = 0; i < kPanel; ++i) {
        r.nodes.push_back(lo + 0.5 * w * (base.nodes[static_cast<std::size_t>(i)] + 1));
        r.weights.push_back(0.5 * w * base.weights[static_cast<std::size_t>(i)]);
      }
    }
  }
  return r;
}

}  // namespace sisbox::quad
