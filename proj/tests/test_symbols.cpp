#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fkpi/random.hpp"
#include "fkpi/symbols.hpp"

using namespace fkpi;

namespace {

FreqPair random_pair(Rng& rng) {
  for (;;) {
    FreqPair q{{rng.uniform(-10, 10), rng.uniform(-10, 10)}, {rng.uniform(-10, 10), rng.uniform(-10, 10)}};
    if (std::abs(q.p1.xi) >= 0.1 && std::abs(q.p2.xi) >= 0.1 && std::abs(q.p1.xi + q.p2.xi) >= 0.1) {
      return q;
    }
  }
}

double rel(double a, double b, double scale) { return std::abs(a - b) / scale; }

}  // namespace

TEST_CASE("DispersionParams range") {
  CHECK_NOTHROW(DispersionParams(2.0));
  CHECK_NOTHROW(DispersionParams(3.99));
  CHECK_THROWS_AS(DispersionParams(4.0), std::invalid_argument);
  CHECK_THROWS_AS(DispersionParams(4.0 / 3.0), std::invalid_argument);
  CHECK_THROWS_AS(DispersionParams(4.5), std::invalid_argument);
  CHECK_THROWS_AS(DispersionParams(std::nan("")), std::invalid_argument);
}

TEST_CASE("validation of points and pairs") {
  CHECK_THROWS_AS(validate(FreqPoint{0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(FreqPair{{1.0, 0.0}, {-1.0, 2.0}}), std::invalid_argument);
  CHECK_NOTHROW(validate(FreqPair{{1.0, 0.0}, {2.0, 2.0}}));
}

TEST_CASE("omega hand values") {
  CHECK(omega(DispersionParams(2), {1, 0}) == 1.0);
  CHECK(omega(DispersionParams(3), {1, 2}) == 5.0);
  for (double a : {2.0, 2.3, 3.7}) CHECK(omega(DispersionParams(a), {-1, 0}) == -1.0);
  // Odd in (xi, eta) -> (-xi, -eta).
  const DispersionParams p(2.6);
  CHECK(omega(p, {-1.7, -0.4}) == doctest::Approx(-omega(p, {1.7, 0.4})));
}

TEST_CASE("grad_omega hand values and finite differences") {
  const auto g1 = grad_omega(DispersionParams(2), {1, 0});
  CHECK(g1[0] == 3.0);
  CHECK(g1[1] == 0.0);
  const auto g2 = grad_omega(DispersionParams(2), {1, 1});
  CHECK(g2[0] == 2.0);
  CHECK(g2[1] == 2.0);

  Rng rng(17);
  for (int k = 0; k < 2000; ++k) {
    const DispersionParams p(rng.uniform(2.0, 4.0));
    FreqPoint x{rng.sign() * rng.uniform(0.1, 5.0), rng.uniform(-5, 5)};
    const double h = 1e-6;
    const double dxi = (omega(p, {x.xi + h, x.eta}) - omega(p, {x.xi - h, x.eta})) / (2 * h);
    const double deta = (omega(p, {x.xi, x.eta + h}) - omega(p, {x.xi, x.eta - h})) / (2 * h);
    const auto g = grad_omega(p, x);
    const double scale = std::max(std::hypot(g[0], g[1]), 1.0);
    CHECK(std::hypot(dxi - g[0], deta - g[1]) / scale < 1e-6);
  }
}

TEST_CASE("resonance function examples") {
  const DispersionParams p2(2);
  CHECK(resonance_fraction(p2, {{1, 0}, {1, 0}}) == 6.0);
  CHECK(resonance_difference(p2, {{1, 0}, {1, 0}}) == doctest::Approx(6.0));
  // Collinear group velocities: eta/xi equal, Omega^2 vanishes.
  const DispersionParams p(2.8);
  const FreqPair collinear{{1.5, 3.0}, {0.5, 1.0}};
  CHECK(omega2_part(p, collinear) == 0.0);
  CHECK(resonance_fraction(p, collinear) == omega1_part(p, collinear));
  CHECK(omega2_part(p2, {{1, 0}, {3, 0}}) == 0.0);
  CHECK(omega2_part(p2, {{1, 1}, {1, -1}}) == 2.0);
}

TEST_CASE("partial-fraction identity, split identity, swap symmetry, Galilean shift") {
  Rng rng(5);
  for (int k = 0; k < 20000; ++k) {
    const DispersionParams p(rng.uniform(2.0, 4.0));
    const FreqPair q = random_pair(rng);
    const double frac = resonance_fraction(p, q);
    const double diff = resonance_difference(p, q);
    const double scale = resonance_term_scale(p, q);
    CHECK(rel(frac, diff, scale) < 1e-10);
    const double split_scale = std::max({std::abs(omega1_part(p, q)), std::abs(omega2_part(p, q)),
                                         std::abs(frac)});
    CHECK(rel(omega1_part(p, q) - omega2_part(p, q), frac, split_scale) < 1e-12);

    const FreqPair swapped{q.p2, q.p1};
    CHECK(rel(resonance_fraction(p, swapped), frac, split_scale) < 1e-12);
    CHECK(rel(omega1_part(p, swapped), omega1_part(p, q), split_scale) < 1e-12);
    CHECK(rel(omega2_part(p, swapped), omega2_part(p, q), split_scale) < 1e-12);
    // Swapping p1 and p2 swaps two rows of the determinant: |B| is invariant, the sign flips.
    const double b = normal_determinant_closed(p, q);
    CHECK(rel(normal_determinant_closed(p, swapped), -b, std::max(std::abs(b), 1e-300)) < 1e-12);
    CHECK(rel(normal_determinant_numeric(p, swapped), -normal_determinant_numeric(p, q),
              std::max(std::abs(b), 1e-300)) < 1e-9);

    const double c = rng.uniform(-3, 3);
    const FreqPair shifted{{q.p1.xi, q.p1.eta + c * q.p1.xi}, {q.p2.xi, q.p2.eta + c * q.p2.xi}};
    const double cross = q.p1.eta * q.p2.xi - q.p2.eta * q.p1.xi;
    const double cross_s = shifted.p1.eta * shifted.p2.xi - shifted.p2.eta * shifted.p1.xi;
    const double cross_scale = std::abs(q.p1.eta * q.p2.xi) + std::abs(q.p2.eta * q.p1.xi) +
                               std::abs(c * q.p1.xi * q.p2.xi);
    CHECK(std::abs(cross - cross_s) <= 1e-14 * cross_scale);
  }
}

TEST_CASE("surface normals") {
  const auto n = surface_normal(DispersionParams(2), {1, 0});
  CHECK(n == std::array<double, 3>{1, -3, 0});
  const auto m = surface_normal(DispersionParams(3), {1, 1});
  CHECK(m == std::array<double, 3>{1, -3, -2});
  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const DispersionParams p(rng.uniform(2, 4));
    const FreqPoint x{rng.uniform(0.1, 3), rng.uniform(-3, 3)};
    const auto g = grad_omega(p, x);
    const auto s = surface_normal(p, x);
    CHECK(s[0] == 1.0);
    CHECK(s[1] == -g[0]);
    CHECK(s[2] == -g[1]);
  }
}

TEST_CASE("determinant: hand case, collinear case, closed form") {
  const FreqPair hand{{1, 1}, {1, -1}};
  CHECK(normal_determinant_closed(DispersionParams(2), hand) == doctest::Approx(40.0));
  CHECK(normal_determinant_numeric(DispersionParams(2), hand) == doctest::Approx(40.0));
  const DispersionParams p(3.1);
  const FreqPair collinear{{2.0, 1.0}, {-0.5, -0.25}};
  CHECK(normal_determinant_closed(p, collinear) == 0.0);
  CHECK(std::abs(normal_determinant_numeric(p, collinear)) < 1e-12);

  Rng rng(99);
  for (int k = 0; k < 20000; ++k) {
    const DispersionParams a(rng.uniform(2.0, 4.0));
    const FreqPair q = random_pair(rng);
    const double num = normal_determinant_numeric(a, q);
    const double closed = normal_determinant_closed(a, q);
    CHECK(std::abs(num - closed) <= 1e-10 * std::abs(closed));
  }
}

TEST_CASE("resonance_size_scan determinism and validation") {
  const DispersionParams p(2.2);
  const double n = 256;
  const double gamma = std::pow(n, -0.65);
  const auto a = resonance_size_scan(p, n, gamma, 10000, 7);
  const auto b = resonance_size_scan(p, n, gamma, 10000, 7, 1);
  CHECK(a.omega1_ratio_min == b.omega1_ratio_min);
  CHECK(a.omega1_ratio_max == b.omega1_ratio_max);
  CHECK(a.omega_ratio_min == b.omega_ratio_min);
  CHECK(a.omega_ratio_max == b.omega_ratio_max);
  CHECK(a.theta == doctest::Approx(0.05));
  CHECK(a.omega1_ratio_min >= 0.125);
  CHECK(a.omega1_ratio_max <= 8.0);
  const auto c = resonance_size_scan(p, n, gamma, 10000, 8);
  CHECK(c.omega1_ratio_min != a.omega1_ratio_min);

  CHECK_THROWS_AS(resonance_size_scan(p, n, 0.0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(resonance_size_scan(p, n, 1e-300, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(resonance_size_scan(p, n, n, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(resonance_size_scan(p, n, 0.1, 0, 1), std::invalid_argument);
}

TEST_CASE("transversality_check") {
  const DispersionParams p(3);
  const auto r = transversality_check(p, 64, 4, 1000, 11);
  CHECK(r.accepted == 1000);
  CHECK(r.cross_ratio_min >= 1.0 / 16);
  CHECK(r.cross_ratio_max <= 16);
  CHECK(r.gradient_ratio_min >= 1.0 / 16);
  const auto again = transversality_check(p, 64, 4, 1000, 11, 0.1, 1000, 1);
  CHECK(again.cross_ratio_min == r.cross_ratio_min);
  CHECK(again.gradient_ratio_max == r.gradient_ratio_max);
  CHECK(again.attempts == r.attempts);
  CHECK_THROWS_AS(transversality_check(p, 64, 4, 100, 11, 0.0), std::runtime_error);
  CHECK_THROWS_AS(transversality_check(p, 4, 64, 100, 11), std::invalid_argument);
}
