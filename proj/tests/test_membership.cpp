#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <sisbox/catalog.hpp>
#include <sisbox/membership.hpp>

#include "oracles.hpp"

using namespace sisbox;
using Catch::Approx;

namespace {

Signal boxes(std::vector<PiecewiseConstantSpectrum::Interval> iv, std::string name = "f") {
  return Signal(PiecewiseConstantSpectrum::from_intervals(iv), std::move(name));
}

Settings wide() {
  Settings s;
  s.grid.K = 64;
  return s;
}

PeriodicSpectrum band_multiplier(int n, double a, double b) {
  PeriodicSpectrum m(n);
  for (int u = 0; u < n; ++u) {
    const double w = static_cast<double>(u) / n;
    if (w >= a && w < b) m[static_cast<std::size_t>(u)] = 1.0;
  }
  return m;
}

}  // namespace

TEST_CASE("induced subspace", "[membership][theorem1]") {
  const Settings s;
  const auto sp = build_space(catalog::shannon(), s);
  SECTION("the sampling function induces the whole space") {
    const auto ind = induced_subspace(sp, sp.sampling_function);
    REQUIRE(ind.support == sp.mask);
    REQUIRE(ind.masked_spectrum_error < 1e-9);
    REQUIRE(ind.projection_error < 1e-9);
  }
  SECTION("a half mask restricts the sampling function") {
    const auto f = modulate(sp.sampling_function, band_multiplier(s.grid.N, 0.0, 0.5), "half");
    const auto ind = induced_subspace(sp, f);
    REQUIRE(ind.support.measure() == 0.5);
    const auto spec = ind.sampling_function.spectrum(s.grid);
    for (std::size_t j = 0; j < spec->size(); ++j) {
      const double w = s.grid.omega(j);
      const bool inside = w >= 0 && w < 0.5;
      REQUIRE(std::abs((*spec)[j] - (inside ? 1.0 : 0.0)) < 1e-12);
    }
  }
  SECTION("random member with a vanishing sub-band") {
    std::mt19937_64 rng(12);
    const auto f0 = synthesize(sp, oracle::random_coefficients(rng, 9, 10));
    const auto f = modulate(f0, band_multiplier(s.grid.N, 0.2, 0.7), "sub");
    const auto ind = induced_subspace(sp, f);
    REQUIRE(ind.support.measure() < sp.mask.measure());
    REQUIRE(ind.masked_spectrum_error < 1e-9);
    REQUIRE(ind.projection_error < 1e-9);
  }
  SECTION("non members are rejected with their residual") {
    try {
      (void)induced_subspace(sp, boxes({{0.5, 1.5, 1.0}}, "outside"));
      FAIL("expected rejection");
    } catch (const NotInSpace& e) {
      REQUIRE(e.residual() == Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("theorem 2", "[membership][theorem2]") {
  const Settings s;
  SECTION("sinc passes with unit bounds") {
    const auto r = check_theorem2(catalog::shannon(), s);
    REQUIRE(r.passed());
    REQUIRE(r.constant("zak_two_sided", "A") == Approx(1.0).margin(1e-12));
    REQUIRE(r.constant("zak_two_sided", "B") == Approx(1.0).margin(1e-12));
    REQUIRE(r.normalization == to_string(Theorem2Normalization::zak));
  }
  SECTION("zero passes vacuously") {
    const auto r = check_theorem2(Signal(), s);
    REQUIRE(r.passed());
    REQUIRE(r.constant("support", "measure") == 0.0);
  }
  SECTION("Zak zero on half of the support fails under both normalizations") {
    const auto f = boxes({{0.0, 1.0, 1.0}, {1.5, 2.0, -1.0}});
    REQUIRE_FALSE(check_theorem2(f, s).passed());
    const auto r = check_theorem2(f, s, Theorem2Normalization::grammian);
    REQUIRE_FALSE(r.passed());
    REQUIRE(r.normalization == to_string(Theorem2Normalization::grammian));
  }
  SECTION("the unit box has delta samples and passes") { REQUIRE(check_theorem2(boxes({{0.0, 1.0, 1.0}}), s).passed()); }
  SECTION("the piecewise sine kernel passes without an integrable spectrum") {
    REQUIRE(check_theorem2(catalog::ex3(), s).passed());
  }
}

TEST_CASE("theorem 5", "[membership][theorem5]") {
  const Settings s;
  SECTION("band-limited functions pass with Z = f^") {
    const auto f = catalog::blhat(s.grid);
    const auto r = check_theorem5(f, s);
    REQUIRE(r.passed());
    const auto z = zak_fiber(f, s);
    const auto spec = f.spectrum(s.grid);
    for (int u = 0; u < s.grid.N / 2; u += 7) REQUIRE(std::abs(z[static_cast<std::size_t>(u)] - (*spec)[s.grid.index(0, u)]) < 1e-12);
  }
  SECTION("alternating blocks pass with the partial-sum constants") {
    const auto w = wide();
    const auto r = check_theorem5(catalog::ex2(60), w);
    REQUIRE(r.passed());
    double lo = 1e300, hi = 0;
    for (int n = 0; n <= 60; ++n) {
      const double ratio = oracle::harmonic2(n) / std::pow(oracle::alternating_harmonic(n), 2);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    REQUIRE(r.constant("b_grammian_ratio", "A") == Approx(lo).epsilon(1e-12));
    REQUIRE(r.constant("b_grammian_ratio", "B") <= hi + 1e-12);
    REQUIRE(r.constant("b_grammian_ratio", "B") <= 6.6);
    REQUIRE(std::isfinite(r.constant("c_integral", "integral")));
    REQUIRE(std::isfinite(r.constant("d_zak_dual", "L")));
  }
  SECTION("zero passes vacuously") {
    const auto r = check_theorem5(Signal(), s);
    REQUIRE(r.passed());
    REQUIRE(r.constant("a_samples_l2", "l2_norm_sq") == 0.0);
  }
  SECTION("non-integrable spectra are a precondition error") {
    REQUIRE_THROWS_AS(check_theorem5(catalog::ex3(), s), PreconditionError);
  }
  SECTION("condition d is stable under probe resampling") {
    const auto f = catalog::blhat(s.grid);
    std::mt19937_64 rng(77);
    const auto a = check_theorem5(f, s, oracle::random_points(rng, 64, 0, 1)).constant("d_zak_dual", "L");
    const auto b = check_theorem5(f, s, oracle::random_points(rng, 64, 0, 1)).constant("d_zak_dual", "L");
    REQUIRE(std::abs(a - b) < 0.1 * std::max(a, b));
  }
  SECTION("members of certified spaces satisfy all four conditions") {
    std::mt19937_64 rng(5);
    for (const auto* name : {"shannon", "blhat", "hat"}) {
      const auto sp = build_space(catalog::make(name, s), s);
      const auto f = synthesize(sp, oracle::random_coefficients(rng, 5, 8));
      REQUIRE(check_theorem5(f, s).passed());
    }
    const auto w = wide();
    const auto sp = build_space(catalog::ex2(60), w);
    REQUIRE(check_theorem5(synthesize(sp, oracle::random_coefficients(rng, 5, 8)), w).passed());
  }
}

TEST_CASE("sampling function from a member", "[membership][construct]") {
  const Settings s;
  SECTION("sinc gives back the sinc kernel") {
    const auto c = construct_s_from_f(catalog::shannon(), s);
    REQUIRE(c.space.certified);
    REQUIRE(max_abs_diff(*c.space.sampling_function.spectrum(s.grid), *catalog::shannon().spectrum(s.grid)) < 1e-12);
    REQUIRE(c.delta_error < 1e-12);
  }
  SECTION("alternating blocks give an interpolating kernel") {
    const auto w = wide();
    const auto c = construct_s_from_f(catalog::ex2(60), w);
    REQUIRE(c.space.certified);
    REQUIRE(c.delta_error < 1e-6);
    REQUIRE(c.factorization_error < 1e-9);
  }
  SECTION("a half-band member completes the band with the unit box") {
    const auto c = construct_s_from_f(boxes({{0.0, 0.5, 2.0}}), s);
    const auto spec = c.space.sampling_function.spectrum(s.grid);
    for (int u = 0; u < s.grid.N; u += 17) REQUIRE(std::abs((*spec)[s.grid.index(0, u)] - 1.0) < 1e-12);
    REQUIRE(c.delta_error < 1e-12);
  }
  SECTION("zero is degenerate") { REQUIRE_THROWS_AS(construct_s_from_f(Signal(), s), DegenerateSpace); }
  SECTION("round trip through the constructed space") {
    std::mt19937_64 rng(19);
    for (const auto& f : {catalog::blhat(s.grid), catalog::hat()}) {
      const auto c = construct_s_from_f(f, s);
      REQUIRE(membership_residual(f, c.space) < 1e-6);
      const auto xs = oracle::random_points(rng, 32, -6, 6);
      const auto v = reconstruct(c.space, integer_samples(f, s), xs);
      for (std::size_t i = 0; i < xs.size(); ++i) REQUIRE(std::abs(v[i] - f.evaluate(xs[i])) < 1e-4);
    }
  }
}

TEST_CASE("sz04 sufficient conditions", "[membership][sz04]") {
  const Settings s;
  SECTION("sinc passes with unit constants") {
    const auto r = check_sz04(catalog::shannon(), s);
    REQUIRE(r.passed());
    REQUIRE(r.constant("lower_inequality", "A") == 1.0);
    REQUIRE(r.constant("upper_inequality", "B") == 1.0);
  }
  SECTION("alternating blocks fail the upper inequality") {
    const auto w = wide();
    const auto r = check_sz04(catalog::ex2(60), w);
    REQUIRE_FALSE(r.passed());
    double oracle_ratio = 0;
    for (int m = 0; m <= 60; ++m) oracle_ratio = std::max(oracle_ratio, std::pow(oracle::harmonic(m) / oracle::alternating_harmonic(m), 2));
    REQUIRE(oracle_ratio > 20);
    REQUIRE(r.constant("upper_inequality", "exact_probe_ratio") == Approx(oracle_ratio).epsilon(1e-12));
    REQUIRE(check_theorem5(catalog::ex2(60), w).passed());
  }
  SECTION("the ratio grows with the number of blocks") {
    const auto w = wide();
    double prev = 0;
    for (int n : {4, 16, 60}) {
      const double b = check_sz04(catalog::ex2(n), w).constant("upper_inequality", "B");
      REQUIRE(b > prev);
      prev = b;
    }
  }
  SECTION("zero passes vacuously") { REQUIRE(check_sz04(Signal(), s).passed()); }
  SECTION("passing the sufficient conditions implies theorem 5") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> v(0.2, 1.0);
    std::vector<Signal> fs{catalog::shannon(), catalog::blhat(s.grid), catalog::hat()};
    for (int i = 0; i < 4; ++i) fs.push_back(boxes({{-0.5, 0.0, v(rng)}, {0.0, 0.5, v(rng)}, {0.5, 1.25, v(rng)}}));
    for (const auto& f : fs)
      if (check_sz04(f, s).passed()) REQUIRE(check_theorem5(f, s).passed());
  }
  SECTION("non-integrable spectra are a precondition error") {
    REQUIRE_THROWS_AS(check_sz04(catalog::ex3(), s), PreconditionError);
  }
}
