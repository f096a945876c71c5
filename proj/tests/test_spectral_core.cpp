#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <sisbox/catalog.hpp>
#include <sisbox/spectral_core.hpp>

#include "oracles.hpp"

using namespace sisbox;
using Catch::Approx;

namespace {

Signal boxes(std::vector<PiecewiseConstantSpectrum::Interval> iv, std::string name = "f") {
  return Signal(PiecewiseConstantSpectrum::from_intervals(iv), std::move(name));
}

std::vector<oracle::Box> as_boxes(const std::vector<PiecewiseConstantSpectrum::Interval>& iv) {
  std::vector<oracle::Box> out;
  for (const auto& i : iv) out.push_back({i.a, i.b, i.value});
  return out;
}

Settings ex2_settings() {
  Settings s;
  s.grid.K = 64;
  return s;
}

}  // namespace

TEST_CASE("frequency grid layout", "[grid]") {
  const FrequencyGrid g{4, 8};
  REQUIRE(g.size() == 64);
  REQUIRE(g.omega(0) == -4.0);
  REQUIRE(g.omega(g.index(2, 3)) == 2.0 + 3.0 / 8);
  SECTION("integer shifts are index shifts by N") {
    for (std::size_t j = 0; j + 8 < g.size(); ++j) REQUIRE(g.omega(j + 8) == g.omega(j) + 1);
  }
  SECTION("non powers of two are rejected") {
    REQUIRE_THROWS_AS((FrequencyGrid{3, 8}.validate()), Error);
    REQUIRE_THROWS_AS((FrequencyGrid{4, 10}.validate()), Error);
  }
}

TEST_CASE("periodic spectrum lookup is 1-periodic", "[grid]") {
  PeriodicSpectrum p(16);
  for (int u = 0; u < 16; ++u) p[static_cast<std::size_t>(u)] = cplx{double(u), -double(u)};
  for (double w : {0.0, 0.3, 0.9999, 0.5}) {
    REQUIRE(p.at(w) == p.at(w + 3));
    REQUIRE(p.at(w) == p.at(w - 7));
  }
}

TEST_CASE("support mask set algebra", "[grid]") {
  const std::vector<std::pair<double, double>> a{{0.0, 0.5}}, b{{0.25, 0.75}};
  const auto ma = SupportMask::from_intervals(64, a), mb = SupportMask::from_intervals(64, b);
  REQUIRE(ma.measure() == 0.5);
  REQUIRE((ma | mb).measure() == 0.75);
  REQUIRE((ma & mb).measure() == 0.25);
  REQUIRE((ma ^ mb).measure() == 0.5);
  REQUIRE((ma - mb).measure() == 0.25);
  REQUIRE((~ma).measure() == 0.5);
  REQUIRE(((ma ^ mb) | (ma & mb)) == (ma | mb));
}

TEST_CASE("gauss-legendre quadrature", "[quadrature]") {
  const auto r = quad::gauss_legendre(16);
  for (int p = 0; p <= 31; ++p) {
    double acc = 0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * std::pow(r.nodes[i], p);
    const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
    REQUIRE(acc == Approx(exact).margin(1e-14));
  }
  const auto c = quad::composite({-1.0, 0.0, 2.0}, 256);
  double acc = 0;
  for (std::size_t i = 0; i < c.nodes.size(); ++i) acc += c.weights[i] * std::abs(c.nodes[i]);
  REQUIRE(acc == Approx(2.5).epsilon(1e-14));
}

TEST_CASE("periodize", "[spectral_core][periodize]") {
  const Settings s;
  SECTION("unit band gives the constant 1") {
    const auto p = periodize(catalog::shannon(), s.grid);
    for (std::size_t u = 0; u < p.size(); ++u) REQUIRE(std::abs(p[u] - 1.0) < 1e-15);
  }
  SECTION("zero spectrum gives 0") {
    const auto p = periodize(Signal(PiecewiseConstantSpectrum{}, "zero"), s.grid);
    REQUIRE(p.max_abs() == 0.0);
  }
  SECTION("alternating blocks on (1/4, 1/2) sum to 1 - 1/2") {
    const auto es = ex2_settings();
    const auto p = periodize(catalog::ex2(60), es.grid);
    for (int u = 257; u < 512; ++u) REQUIRE(p[static_cast<std::size_t>(u)].real() == Approx(0.5).margin(1e-15));
  }
  SECTION("fiber sums match the partial-sum oracle on every dyadic band") {
    const auto es = ex2_settings();
    const auto p = periodize(catalog::ex2(60), es.grid);
    for (int n = 0; n < 10; ++n) {
      const int u = static_cast<int>(std::ldexp(1.0, 10 - n)) - 1;  // just below 2^-n
      REQUIRE(p[static_cast<std::size_t>(u)].real() == Approx(oracle::alternating_harmonic(n)).margin(1e-14));
    }
  }
  SECTION("random piecewise spectra match direct summation") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pos(-6, 6), val(-1, 1);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<PiecewiseConstantSpectrum::Interval> iv;
      double a = -6.5;
      for (int i = 0; i < 6; ++i) {
        const double w = 0.125 * (1 + static_cast<int>(8 * std::abs(val(rng))));
        iv.push_back({a, a + w, cplx{val(rng), val(rng)}});
        a += w + 0.25;
      }
      const auto p = periodize(boxes(iv), s.grid);
      const auto ob = as_boxes(iv);
      for (int u = 0; u < s.grid.N; u += 37) {
        const double w = static_cast<double>(u) / s.grid.N;
        REQUIRE(std::abs(p[static_cast<std::size_t>(u)] - oracle::periodize(ob, w)) < 1e-13);
      }
    }
  }
  SECTION("spectra beyond the band name the required K") {
    try {
      (void)periodize(catalog::ex2(60), s.grid);
      FAIL("expected bandwidth overflow");
    } catch (const BandwidthOverflow& e) {
      REQUIRE(e.required_k() == 64);
    }
  }
}

TEST_CASE("grammian", "[spectral_core][grammian]") {
  const Settings s;
  SECTION("unit band") {
    const auto g = grammian(catalog::shannon(), s.grid);
    for (std::size_t u = 0; u < g.size(); ++u) REQUIRE(g[u].real() == 1.0);
  }
  SECTION("alternating blocks on (1/4, 1/2) give 1 + 1/4") {
    const auto es = ex2_settings();
    const auto g = grammian(catalog::ex2(60), es.grid);
    for (int u = 257; u < 512; ++u) REQUIRE(g[static_cast<std::size_t>(u)].real() == Approx(1.25).margin(1e-15));
  }
  SECTION("zero") { REQUIRE(grammian(Signal(), s.grid).max_abs() == 0.0); }
  SECTION("nonnegative and real for every catalog signal") {
    for (const auto* name : {"shannon", "blhat", "ex3", "hat"}) {
      const auto g = grammian(catalog::make(name, s), s.grid);
      for (std::size_t u = 0; u < g.size(); ++u) {
        REQUIRE(g[u].real() >= 0.0);
        REQUIRE(g[u].imag() == 0.0);
      }
    }
  }
  SECTION("triangle kernel matches sum of sinc^4") {
    const auto g = grammian(catalog::hat(), s.grid);
    for (int u : {0, 100, 512, 900}) {
      const double w = static_cast<double>(u) / s.grid.N;
      double ref = 0;
      for (int m = -s.grid.K; m < s.grid.K; ++m) ref += std::pow(oracle::sinc(w + m), 4);
      REQUIRE(g[static_cast<std::size_t>(u)].real() == Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("bracket", "[spectral_core][bracket]") {
  const Settings s;
  const auto f = boxes({{0.0, 0.5, cplx{1, 2}}, {1.25, 1.5, -0.5}});
  const auto g = boxes({{0.0, 1.0, 1.0}});
  SECTION("self bracket is the grammian") {
    const auto b = bracket(f, f, s.grid);
    const auto gf = grammian(f, s.grid);
    REQUIRE(max_abs_diff(b.values(), gf.values()) < 1e-15);
  }
  SECTION("spectrally disjoint functions bracket to 0") {
    const auto h = boxes({{2.5, 3.0, 4.0}});
    REQUIRE(bracket(f, h, s.grid).max_abs() == 0.0);
  }
  SECTION("half band against unit band") {
    const auto b = bracket(boxes({{0.0, 0.5, 1.0}}), g, s.grid);
    for (int u = 0; u < s.grid.N; ++u) REQUIRE(b[static_cast<std::size_t>(u)].real() == (u < s.grid.N / 2 ? 1.0 : 0.0));
  }
  SECTION("hermitian symmetry and linearity") {
    const auto fg = bracket(f, g, s.grid), gf = bracket(g, f, s.grid);
    for (std::size_t u = 0; u < fg.size(); ++u) REQUIRE(std::abs(fg[u] - std::conj(gf[u])) < 1e-15);
    const std::pair<int, cplx> two[] = {{0, cplx{2.0, 0.0}}};
    const auto b2 = bracket(shift_combination(f, two, s.grid.N), g, s.grid);
    for (std::size_t u = 0; u < fg.size(); ++u) REQUIRE(std::abs(b2[u] - 2.0 * fg[u]) < 1e-14);
  }
  SECTION("mismatched grid spectra are rejected") {
    const Signal a(GridSpectrum::from_function(FrequencyGrid{1, 64}, [](double) { return cplx{1.0}; }));
    REQUIRE_THROWS_AS(bracket(a, a, FrequencyGrid{2, 64}), GridMismatch);
  }
}

TEST_CASE("zak time fiber", "[spectral_core][zak]") {
  const int n = 256;
  SECTION("delta at 0 gives 1") {
    auto t = TimeSamples::window(8);
    t.ref(0) = 1.0;
    const auto z = zak_time_fiber(t, n);
    for (std::size_t u = 0; u < z.size(); ++u) REQUIRE(std::abs(z[u] - 1.0) < 1e-15);
  }
  SECTION("delta at 1 gives e^{-2 pi i w}") {
    auto t = TimeSamples::window(8);
    t.ref(1) = 1.0;
    const auto z = zak_time_fiber(t, n);
    for (int u = 0; u < n; ++u) REQUIRE(std::abs(z[static_cast<std::size_t>(u)] - std::polar(1.0, -kTwoPi * u / n)) < 1e-14);
  }
  SECTION("random samples match direct summation") {
    std::mt19937_64 rng(11);
    const auto c = oracle::random_coefficients(rng, 12, 20);
    auto t = TimeSamples::window(32);
    for (auto [k, v] : c) t.ref(k) = v;
    const auto z = zak_time_fiber(t, n);
    for (int u = 0; u < n; u += 5) REQUIRE(std::abs(z[static_cast<std::size_t>(u)] - oracle::trig_series(c, double(u) / n)) < 1e-12);
  }
  SECTION("sinc samples are a delta") {
    const auto z = zak_fiber(catalog::shannon(), Settings{});
    for (std::size_t u = 0; u < z.size(); ++u) REQUIRE(std::abs(z[u] - 1.0) < 1e-12);
  }
}

TEST_CASE("zak dual fiber", "[spectral_core][zak]") {
  const Settings s;
  SECTION("x = 0 is the periodization, bit for bit") {
    const auto f = boxes({{-0.3, 0.9, cplx{1, -1}}, {1.5, 2.25, 0.7}});
    const auto a = zak_dual_fiber(f, 0.0, s.grid), b = periodize(f, s.grid);
    for (std::size_t u = 0; u < a.size(); ++u) REQUIRE(a[u] == b[u]);
  }
  SECTION("unit band has modulus 1 for every x") {
    for (double x : {0.1, 0.37, 0.5}) {
      const auto z = zak_dual_fiber(catalog::shannon(), x, s.grid);
      for (std::size_t u = 0; u < z.size(); ++u) REQUIRE(std::abs(z[u]) == Approx(1.0).margin(1e-14));
    }
  }
  SECTION("alternating blocks at x = 1/2 on (1/4, 1/2) give 3/2") {
    const auto es = ex2_settings();
    const auto z = zak_dual_fiber(catalog::ex2(60), 0.5, es.grid);
    for (int u = 257; u < 512; ++u) REQUIRE(std::abs(z[static_cast<std::size_t>(u)] - 1.5) < 1e-14);
  }
}

TEST_CASE("inverse fourier evaluation", "[spectral_core][inverse]") {
  SECTION("unit band") {
    const auto f = catalog::shannon();
    REQUIRE(std::abs(inverse_fourier_evaluate(f, 0.0) - 1.0) < 1e-15);
    for (int k = 1; k < 20; ++k) {
      REQUIRE(std::abs(inverse_fourier_evaluate(f, k)) < 1e-15);
      REQUIRE(std::abs(inverse_fourier_evaluate(f, -k)) < 1e-15);
    }
  }
  SECTION("zero") { REQUIRE(inverse_fourier_evaluate(Signal(), 1.3) == cplx{}); }
  SECTION("piecewise constant matches the exact box integrals") {
    const std::vector<PiecewiseConstantSpectrum::Interval> iv{{-1.25, 0.5, cplx{1, 0.5}}, {0.75, 1.875, -2.0}};
    const auto f = boxes(iv);
    const auto ob = as_boxes(iv);
    std::mt19937_64 rng(3);
    for (double x : oracle::random_points(rng, 32, -8, 8)) REQUIRE(std::abs(f.evaluate(x) - oracle::boxes_inverse(ob, x)) < 1e-13);
  }
  SECTION("piecewise constant agrees with a fine grid quadrature") {
    const std::vector<PiecewiseConstantSpectrum::Interval> iv{{0.0, 1.0, 1.0}, {1.5, 2.0, -1.0}};
    const PiecewiseConstantSpectrum pc = PiecewiseConstantSpectrum::from_intervals(iv);
    const FrequencyGrid fine{4, 1 << 17};
    const Signal exact(pc), gridded(sample_piecewise(pc, fine, JumpRule::average));
    std::mt19937_64 rng(5);
    for (double x : oracle::random_points(rng, 32, -8, 8)) REQUIRE(std::abs(exact.evaluate(x) - gridded.evaluate(x)) < 1e-6);
  }
  SECTION("band-limited triangle on the grid matches its closed form") {
    const Settings s;
    const auto f = catalog::blhat(s.grid);
    for (double x : {0.0, 0.3, 1.0, 2.5, 7.9}) REQUIRE(std::abs(f.evaluate(x) - oracle::blhat(x)) < 1e-6);
  }
  SECTION("time kernel spectrum of the triangle is sinc^2") {
    const Settings s;
    const auto spec = catalog::hat().spectrum(s.grid);
    for (std::size_t j : {std::size_t{0}, std::size_t{5000}, s.grid.size() / 2, s.grid.size() / 2 + 77, s.grid.size() - 1}) {
      const double w = s.grid.omega(j);
      REQUIRE(std::abs((*spec)[j] - std::pow(oracle::sinc(w), 2)) < 1e-12);
    }
  }
}

TEST_CASE("support mask", "[spectral_core][mask]") {
  SECTION("constant one") {
    const auto m = support_mask(PeriodicSpectrum(64, 1.0), 1e-9);
    REQUIRE(m.measure() == 1.0);
    REQUIRE(m.tolerance() == 1e-9);
  }
  SECTION("constant zero") { REQUIRE(support_mask(PeriodicSpectrum(64, 0.0), 1e-9).measure() == 0.0); }
  SECTION("half band") {
    const Settings s;
    const auto g = grammian(boxes({{0.0, 0.5, 1.0}}), s.grid);
    REQUIRE(std::abs(support_mask(g, s.eps).measure() - 0.5) <= 1.0 / s.grid.N);
  }
  SECTION("negative values are not a grammian") {
    PeriodicSpectrum g(8, 1.0);
    g[3] = -0.5;
    REQUIRE_THROWS_AS(support_mask(g, 1e-9), NotAGrammian);
  }
}

TEST_CASE("essential bounds", "[spectral_core][bounds]") {
  SECTION("constant one") {
    const auto b = essential_bounds(PeriodicSpectrum(32, 1.0), SupportMask(32, true));
    REQUIRE(b.lower == 1.0);
    REQUIRE(b.upper == 1.0);
  }
  SECTION("alternating blocks stay inside the partial-sum bounds") {
    const auto es = ex2_settings();
    const auto g = grammian(catalog::ex2(60), es.grid);
    const auto m = support_mask(g, es.eps);
    const auto b = essential_bounds(g, m);
    REQUIRE(b.lower >= 1.0 - 1e-15);
    REQUIRE(b.upper <= std::numbers::pi * std::numbers::pi / 6);
    REQUIRE(b.upper == Approx(oracle::harmonic2(60)).epsilon(1e-14));
    for (std::size_t u = 0; u < g.size(); ++u)
      if (m[u]) REQUIRE((b.lower <= g[u].real() && g[u].real() <= b.upper));
  }
  SECTION("empty mask and vanishing grammian are degenerate") {
    REQUIRE_THROWS_AS(essential_bounds(PeriodicSpectrum(8, 1.0), SupportMask(8, false)), DegenerateSpace);
    REQUIRE_THROWS_AS(essential_bounds(PeriodicSpectrum(8, 0.0), SupportMask(8, true)), DegenerateSpace);
  }
}

TEST_CASE("shift square sums", "[spectral_core][shift]") {
  const Settings s;
  const auto xs = uniform_probes(64);
  SECTION("piecewise sine kernel peaks at 2 for x = 1/2") {
    const auto r = shift_square_sum(catalog::ex3(), xs, s);
    double ref = 0;
    for (double x : xs) ref = std::max(ref, oracle::shift_square_sum(oracle::ex3, x));
    REQUIRE(r.max_sum == Approx(ref).epsilon(1e-14));
    REQUIRE(r.max_sum == Approx(2.0).epsilon(1e-14));
    REQUIRE(r.argmax == 0.5);
  }
  SECTION("zero kernel") {
    TimeKernel k{-1, 1, {}, [](double) { return cplx{}; }, 64};
    REQUIRE(shift_square_sum(Signal(k, true, "zero"), xs, s).max_sum == 0.0);
  }
  SECTION("sinc at x = 0 sums to 1") {
    const double x0[] = {0.0};
    REQUIRE(shift_square_sum(catalog::shannon(), x0, s).max_sum == Approx(1.0).epsilon(1e-12));
  }
  SECTION("direct and fiber routes agree for the triangle") {
    const auto direct = shift_square_sum(catalog::hat(), xs, s);
    const auto spectral = shift_square_sum([](double x) { return oracle::hat(x); }, xs, 8);
    REQUIRE(direct.max_sum == Approx(spectral.max_sum).epsilon(1e-14));
  }
}

TEST_CASE("poisson consistency", "[spectral_core][poisson]") {
  auto check = [](const Signal& f, const Settings& s, double tol) {
    const auto z = zak_fiber(f, s);
    const auto p = periodize(f, s.grid);
    REQUIRE(max_abs_diff(z.values(), p.values()) < tol);
  };
  const Settings s;
  SECTION("unit band") { check(catalog::shannon(), s, 1e-6); }
  SECTION("band-limited triangle") { check(catalog::blhat(s.grid), s, 1e-6); }
  SECTION("alternating blocks") { check(catalog::ex2(60), ex2_settings(), 1e-6); }
  SECTION("triangle kernel deviates only by the truncated sinc^2 tail") {
    for (int k : {32, 64}) {
      Settings sk;
      sk.grid.K = k;
      // sum_{|m| >= K} sinc^2(w + m) <= 2 / (pi^2 (K - 2))
      check(catalog::hat(), sk, 2.0 / (std::numbers::pi * std::numbers::pi * (k - 2)));
    }
  }
}

TEST_CASE("modulated signals", "[signal]") {
  const Settings s;
  const auto f = catalog::shannon();
  std::mt19937_64 rng(9);
  const auto c = oracle::random_coefficients(rng, 9, 12);
  const auto g = shift_combination(f, c, s.grid.N);
  SECTION("time evaluation is the shifted sinc sum") {
    for (double x : oracle::random_points(rng, 32, -10, 10)) REQUIRE(std::abs(g.evaluate(x) - oracle::sinc_series(c, x)) < 1e-12);
  }
  SECTION("spectrum is the trigonometric multiplier times the generator") {
    const auto spec = g.spectrum(s.grid);
    for (std::size_t j = s.grid.index(-1, 512); j < s.grid.index(0, 512); j += 13)
      REQUIRE(std::abs((*spec)[j] - oracle::trig_series(c, s.grid.omega(j))) < 1e-12);
  }
  SECTION("nested modulation flattens onto the base") {
    const auto twice = modulate(g, PeriodicSpectrum(s.grid.N, 2.0));
    REQUIRE(twice.modulated()->terms().size() == 1);
    REQUIRE(twice.modulated()->terms()[0].base.get_if<PiecewiseConstantSpectrum>() != nullptr);
    REQUIRE(std::abs(twice.evaluate(0.3) - 2.0 * g.evaluate(0.3)) < 1e-12);
  }
  SECTION("dense multipliers evaluate through the spectrum") {
    PeriodicSpectrum m(s.grid.N);
    for (int u = 0; u < s.grid.N / 2; ++u) m[static_cast<std::size_t>(u)] = 1.0;
    const auto half = modulate(f, m);
    REQUIRE_FALSE(half.modulated()->terms()[0].has_sparse());
    const std::vector<oracle::Box> ob{{0.0, 0.5, 1.0}};
    for (double x : {0.0, 0.7, -3.2}) REQUIRE(std::abs(half.evaluate(x) - oracle::boxes_inverse(ob, x)) < 5e-3);
  }
}
