#include <doctest.h>

#include <cmath>

#include "fkpi/random.hpp"
#include "fkpi/second_iterate.hpp"

using namespace fkpi;

namespace {

// Midpoint-rule evaluation of the same norm in global coordinates, straight from
// the definition: u2^(xi, eta) = xi * prefactor * int_{D1} 1_{D2}(p - p1) kernel(Omega).
double brute_force_norm(const DispersionParams& p, double n, double gamma, double t, int m) {
  const auto boxes = illposedness_boxes(p, n, gamma);
  const FreqBoxSpec& d1 = boxes[0];
  const FreqBoxSpec& d2 = boxes[1];
  const double area1 = 2 * (d1.xi_hi - d1.xi_lo) * (d1.eta_hi - d1.eta_lo);
  const double area2 = 2 * (d2.xi_hi - d2.xi_lo) * (d2.eta_hi - d2.eta_lo);
  const double pref = 1.0 / std::sqrt(area1 * area2);
  const double x0 = n - gamma, x1 = n + 2 * gamma;
  const double e0 = d2.eta_lo + d1.eta_lo, e1 = d2.eta_hi + d1.eta_hi;
  const double hx = (x1 - x0) / m, he = (e1 - e0) / m;
  const double ix0 = -gamma, ix1 = gamma;
  const double hix = (ix1 - ix0) / m, hie = (d1.eta_hi - d1.eta_lo) / m;
  double total = 0;
  for (int a = 0; a < m; ++a) {
    const double xi = x0 + (a + 0.5) * hx;
    for (int b = 0; b < m; ++b) {
      const double eta = e0 + (b + 0.5) * he;
      std::complex<double> inner = 0;
      for (int c = 0; c < m; ++c) {
        const double xi1 = ix0 + (c + 0.5) * hix;
        for (int d = 0; d < m; ++d) {
          const double eta1 = d1.eta_lo + (d + 0.5) * hie;
          if (!d1.contains(xi1, eta1)) continue;
          const double xi2 = xi - xi1, eta2 = eta - eta1;
          if (!(xi2 >= d2.xi_lo && xi2 <= d2.xi_hi && eta2 >= d2.eta_lo && eta2 <= d2.eta_hi)) continue;
          const double w = resonance_fraction(p, {{xi1, eta1}, {xi2, eta2}});
          inner += hix * hie * duhamel_kernel(w, t);
        }
      }
      const double amp = xi * pref * std::abs(inner);
      total += hx * he * amp * amp;
    }
  }
  return std::sqrt(total);
}

}  // namespace

TEST_CASE("boxes and gamma") {
  const DispersionParams p(2.0);
  CHECK(illposedness_gamma(p, 256, 0.05) == doctest::Approx(std::pow(256.0, -0.55)));
  const auto b = illposedness_boxes(p, 256, 0.1);
  CHECK(b[0].xi_lo == 0.05);
  CHECK(b[0].eta_hi == doctest::Approx(std::sqrt(3.0) * 0.01));
  CHECK(b[1].eta_lo == doctest::Approx(std::sqrt(3.0) * 256 * 256));
  CHECK_THROWS_AS(illposedness_boxes(p, 1, 2), std::invalid_argument);
}

TEST_CASE("box data norms are of unit size") {
  for (double a : {2.0, 2.2, 2.6}) {
    const DispersionParams p(a);
    for (double n : {256.0, 1024.0, 8192.0}) {
      const double g = illposedness_gamma(p, n, 0.05);
      for (AnisoIndex s : {AnisoIndex{0, 0}, AnisoIndex{1, 0.5}}) {
        const auto norms = box_data_norms(p, n, g, s);
        for (double v : norms) {
          CHECK(v >= 0.25);
          CHECK(v <= 4.0);
        }
      }
      // L^2 case in closed form: gamma^{-3/2} sqrt(area).
      const auto l2 = box_data_norms(p, n, g, {0, 0});
      CHECK(l2[0] == doctest::Approx(std::sqrt(2 * std::sqrt(1 + a))).epsilon(1e-10));
      CHECK(l2[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    }
  }
}

TEST_CASE("Duhamel kernel") {
  CHECK(duhamel_kernel(3.0, 0.0) == std::complex<double>(0, 0));
  // Series and closed form agree across the switch.
  for (double w : {0.9e-4, 1.1e-4}) {
    const std::complex<double> exact = (std::exp(std::complex<double>(0, -w)) - 1.0) / w;
    CHECK(std::abs(duhamel_kernel(w, 1.0) - exact) < 1e-12);
  }
  CHECK(std::abs(duhamel_kernel(2.0, 1.5) - (std::exp(std::complex<double>(0, -3.0)) - 1.0) / 2.0) < 1e-15);
  CHECK(duhamel_kernel(0.0, 2.0) == std::complex<double>(0, -2));
}

TEST_CASE("local resonance matches the global formula") {
  Rng rng(21);
  for (int k = 0; k < 2000; ++k) {
    const DispersionParams p(rng.uniform(2.0, 4.0));
    const double a = p.alpha();
    const double n = 16;
    const double g = illposedness_gamma(p, n, 0.05);
    const double eta_c = std::sqrt(1 + a) * std::pow(n, (a + 2) / 2);
    const double xi1 = rng.sign() * rng.uniform(g / 2, g);
    const double eta1 = rng.uniform(-1, 1) * std::sqrt(1 + a) * g * g;
    const double xo = xi1 + rng.uniform(0, g);
    const double eo = eta1 + rng.uniform(0, g * g);
    const FreqPair q{{xi1, eta1}, {n + xo - xi1, eta_c + eo - eta1}};
    const double local = local_resonance(a, n, eta_c, xi1, eta1, xo, eo);
    CHECK(std::abs(local - resonance_fraction(p, q)) <= 1e-9 * resonance_term_scale(p, q));
  }
}

TEST_CASE("second iterate: t = 0, small-t linearity") {
  const DispersionParams p(2.0);
  const double n = 256, g = illposedness_gamma(p, n, 0.05);
  CHECK(second_iterate_norm(p, n, g, {0, 0}, 0.0, 8) == 0.0);
  const double a = second_iterate_norm(p, n, g, {0, 0}, 1e-7, 8);
  const double b = second_iterate_norm(p, n, g, {0, 0}, 2e-7, 8);
  CHECK(b / a == doctest::Approx(2.0).epsilon(1e-6));
  // Kernel ~ -i t: norm = t * N-weighted product of the data norms in L^2.
  CHECK(a > 0);
}

TEST_CASE("second iterate agrees with a brute-force midpoint evaluation") {
  const DispersionParams p(2.0);
  const double n = 4, g = illposedness_gamma(p, n, 0.05);
  const double panel = second_iterate_norm(p, n, g, {0, 0}, 1.0, 16);
  const double brute = brute_force_norm(p, n, g, 1.0, 48);
  MESSAGE("panel quadrature " << panel << ", midpoint " << brute);
  CHECK(std::abs(panel - brute) <= 0.02 * panel);
}

TEST_CASE("second iterate self-convergence and determinism") {
  const DispersionParams p(2.0);
  for (double n : {256.0, 8192.0}) {
    const double g = illposedness_gamma(p, n, 0.05);
    const auto r = second_iterate_boxdata(p, n, g, {0, 0}, 1.0, 8);
    MESSAGE("N = " << n << ": relative change under doubling " << r.relative_change);
    CHECK(r.relative_change < 0.01);
    CHECK(second_iterate_norm(p, n, g, {0, 0}, 1.0, 8, 1) == r.norm);
  }
  CHECK_THROWS_AS(second_iterate_boxdata(p, 256, 0.04, {0, 0}, 1.0, 4), std::invalid_argument);
  // A hopeless tolerance forces the non-convergence error.
  CHECK_THROWS_AS(second_iterate_boxdata(p, 256, 0.04, {0, 0}, 1.0, 8, 0.0), QuadratureError);
}
