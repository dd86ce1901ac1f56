#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fkpi/field.hpp"
#include "fkpi/random.hpp"

using namespace fkpi;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralField random_field(const FrequencyGrid& g, std::uint64_t seed, bool zero_mean = true,
                           bool real = true) {
  Rng rng(seed);
  return SpectralField::from_function(g, real, [&](double xi, double) {
    if (zero_mean && xi == 0.0) return Complex{};
    return Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  });
}

// Field whose coefficients vanish outside the 2/3 ball.
SpectralField random_band_limited(const FrequencyGrid& g, std::uint64_t seed) {
  return dealias_truncate(random_field(g, seed));
}

bool zero_mean_exact(const SpectralField& f) {
  for (int j = 0; j < f.grid().modes_y(); ++j) {
    if (f.at(0, j) != Complex{}) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("grid geometry and validation") {
  FrequencyGrid g(2 * kPi * 4, 2 * kPi * 2, 16, 8);
  CHECK(g.dxi() == doctest::Approx(0.25));
  CHECK(g.deta() == doctest::Approx(0.5));
  CHECK(g.kx(0) == 0);
  CHECK(g.kx(7) == 7);
  CHECK(g.kx(8) == -8);
  CHECK(g.kx(15) == -1);
  CHECK(g.mirror_x(3) == 13);
  CHECK(g.dealias_kx() == 5);
  CHECK_THROWS_AS(FrequencyGrid(1.0, 1.0, 6, 8), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyGrid(1.0, 1.0, 9, 8), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyGrid(-1.0, 1.0, 8, 8), std::invalid_argument);
  CHECK(default_grid(8, 8).dxi() == doctest::Approx(1.0 / 128.0));
}

TEST_CASE("to_physical: zero field and single mode") {
  FrequencyGrid g(2 * kPi, 2 * kPi, 16, 8);
  const PhysicalField z = to_physical(SpectralField(g));
  for (const Complex& s : z.samples) CHECK(s == Complex{});

  std::vector<Complex> c(g.size());
  c[g.index(1, 0)] = 0.5;
  c[g.index(g.mirror_x(1), 0)] = 0.5;
  const PhysicalField p = to_physical(SpectralField(g, c, true));
  for (int a = 0; a < 16; ++a) {
    for (int b = 0; b < 8; ++b) {
      const double x = a * g.length_x() / 16;
      CHECK(p.samples[g.index(a, b)].real() == doctest::Approx(std::cos(2 * kPi * x / g.length_x())));
      CHECK(p.samples[g.index(a, b)].imag() == 0.0);
    }
  }
}

TEST_CASE("to_spectral: constant and cosine") {
  FrequencyGrid g(3.0, 5.0, 16, 16);
  std::vector<Complex> ones(g.size(), 1.0);
  const SpectralField one = to_spectral(g, ones, true);
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      if (i == 0 && j == 0) {
        CHECK(one.at(i, j).real() == doctest::Approx(1.0));
      } else {
        CHECK(std::abs(one.at(i, j)) < 1e-15);
      }
    }
  }
  std::vector<Complex> cs(g.size());
  for (int a = 0; a < 16; ++a) {
    for (int b = 0; b < 16; ++b) cs[g.index(a, b)] = std::cos(2 * kPi * a / 16.0);
  }
  const SpectralField f = to_spectral(g, cs, true);
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      const bool expected = j == 0 && (i == 1 || i == 15);
      CHECK((std::abs(f.at(i, j)) > 1e-12) == expected);
    }
  }
  CHECK(f.at(1, 0).real() == doctest::Approx(0.5));
  CHECK_THROWS_AS(to_spectral(g, std::vector<Complex>(10), true), std::invalid_argument);
}

TEST_CASE("round trip and Parseval on random fields") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    FrequencyGrid g(7.0, 3.0, 32, 16);
    const SpectralField f = random_field(g, seed, false);
    CHECK(f.hermitian_exact());
    const SpectralField back = to_spectral(to_physical(f));
    CHECK(relative_difference(back, f) < 1e-12);
    CHECK(back.hermitian_exact());

    const PhysicalField p = to_physical(f);
    double phys = 0;
    for (const Complex& s : p.samples) phys += std::norm(s);
    phys *= g.cell_area();
    const double spec = g.area() * f.coeff_l2() * f.coeff_l2();
    CHECK(std::abs(phys - spec) <= 1e-12 * spec);

    const SpectralField c = random_field(g, seed + 100, false, false);
    CHECK(relative_difference(to_spectral(to_physical(c)), c) < 1e-12);
  }
}

TEST_CASE("Nyquist modes are always zero") {
  FrequencyGrid g(1.0, 1.0, 8, 8);
  std::vector<Complex> c(g.size(), Complex(1.0, 2.0));
  const SpectralField f(g, c, false);
  for (int k = 0; k < 8; ++k) {
    CHECK(f.at(4, k) == Complex{});
    CHECK(f.at(k, 4) == Complex{});
  }
  const SpectralField r(g, c, true);
  CHECK(r.hermitian_exact());
  CHECK(r.at(0, 0).imag() == 0.0);
}

TEST_CASE("x and y derivatives") {
  FrequencyGrid g(2 * kPi * 2, 2 * kPi, 16, 16);
  std::vector<Complex> c(g.size());
  c[g.index(3, 0)] = 1.0;
  c[g.index(g.mirror_x(3), 0)] = 1.0;
  const SpectralField f(g, c, true);
  const SpectralField d = x_derivative(f);
  CHECK(d.at(3, 0).imag() == doctest::Approx(2 * kPi * 3 / g.length_x()));
  CHECK(d.at(3, 0).real() == 0.0);

  std::vector<Complex> one(g.size());
  one[0] = 4.0;
  const SpectralField constant(g, one, true);
  CHECK(x_derivative(constant).max_abs() == 0.0);
  CHECK(y_derivative(constant).max_abs() == 0.0);

  const SpectralField r = random_field(g, 11);
  CHECK(x_derivative(r).hermitian_exact());
  CHECK(y_derivative(r).hermitian_exact());
  CHECK(zero_mean_exact(x_derivative(r)));
  CHECK(zero_mean_exact(y_derivative(r)));
}

TEST_CASE("spectral d/dx of a Gaussian matches centered differences to second order") {
  // Oracle: (u(x+h) - u(x-h)) / 2h on the sample grid has error h^2 u'''/6.
  double previous = 0;
  for (int m : {64, 128, 256}) {
    const double len = 20.0;
    FrequencyGrid g(len, len, m, 8);
    const double h = len / m;
    std::vector<Complex> s(g.size());
    for (int a = 0; a < m; ++a) {
      const double x = a * h - len / 2;
      for (int b = 0; b < 8; ++b) s[g.index(a, b)] = std::exp(-x * x);
    }
    const PhysicalField d = to_physical(x_derivative(to_spectral(g, s, true)));
    double err = 0;
    for (int a = 0; a < m; ++a) {
      const double fd = (s[g.index((a + 1) % m, 0)].real() - s[g.index((a + m - 1) % m, 0)].real()) /
                        (2 * h);
      err = std::max(err, std::abs(d.samples[g.index(a, 0)].real() - fd));
    }
    // |u'''| <= 3.91 for exp(-x^2).
    CHECK(err <= h * h * 3.91 / 6.0 * 1.01);
    if (previous > 0) CHECK(previous / err == doctest::Approx(4.0).epsilon(0.05));
    previous = err;
  }
}

TEST_CASE("x_antiderivative") {
  FrequencyGrid g(2 * kPi * 3, 2 * kPi, 16, 16);
  const SpectralField f = random_field(g, 5);
  CHECK(relative_difference(x_antiderivative(x_derivative(f)), f) < 1e-12);
  CHECK(relative_difference(x_derivative(x_antiderivative(f)), f) < 1e-12);
  CHECK(x_antiderivative(f).hermitian_exact());
  CHECK(zero_mean_exact(x_antiderivative(f)));

  std::vector<Complex> c(g.size());
  c[g.index(1, 2)] = 1.0;
  const SpectralField mode(g, c, false);
  const Complex v = x_antiderivative(mode).at(1, 2);
  const Complex expected = g.length_x() / (2 * kPi * Complex(0, 1));
  CHECK(std::abs(v - expected) < 1e-12 * std::abs(expected));

  std::vector<Complex> bad(g.size());
  bad[g.index(0, 1)] = 1.0;
  CHECK_THROWS_AS(x_antiderivative(SpectralField(g, bad, false)), std::invalid_argument);
}

TEST_CASE("fractional_x_derivative") {
  FrequencyGrid g(2 * kPi * 4, 2 * kPi, 32, 8);
  const SpectralField f = random_field(g, 9);
  CHECK(relative_difference(fractional_x_derivative(f, 0.0), f) == 0.0);

  std::vector<Complex> c(g.size());
  c[g.index(5, 1)] = Complex(1.0, -2.0);
  const SpectralField mode(g, c, false);
  const double xi0 = g.xi(5);
  const double alpha = 2.7;
  CHECK(std::abs(fractional_x_derivative(mode, alpha).at(5, 1) -
                 std::pow(xi0, alpha) * Complex(1.0, -2.0)) < 1e-12 * std::pow(xi0, alpha) * 3);

  // D^1 composed with the multiplier i sign(xi) is d/dx.
  const SpectralField hilbert = apply_multiplier(fractional_x_derivative(f, 1.0), [](double xi, double) {
    return Complex(0.0, xi > 0 ? 1.0 : (xi < 0 ? -1.0 : 0.0));
  });
  CHECK(relative_difference(hilbert, x_derivative(f)) < 1e-14);

  std::vector<Complex> bad(g.size());
  bad[g.index(0, 1)] = 1.0;
  CHECK_THROWS_AS(fractional_x_derivative(SpectralField(g, bad, false), -0.5), std::invalid_argument);
  CHECK_NOTHROW(fractional_x_derivative(SpectralField(g, bad, false), 0.5));
}

TEST_CASE("multipliers commute on zero-x-mean fields") {
  FrequencyGrid g(2 * kPi * 3, 2 * kPi * 2, 32, 16);
  const SpectralField f = random_field(g, 21);
  using Op = SpectralField (*)(const SpectralField&);
  const Op ops[] = {
      x_derivative, y_derivative, x_antiderivative,
      [](const SpectralField& u) { return fractional_x_derivative(u, 1.3); },
      [](const SpectralField& u) { return fractional_x_derivative(u, -0.7); },
      [](const SpectralField& u) { return project_dyadic(u, DyadicBand(1)); }};
  for (Op a : ops) {
    for (Op b : ops) {
      const SpectralField ab = a(b(f));
      const SpectralField ba = b(a(f));
      CHECK(relative_difference(ab, ba) < 1e-12);
      CHECK(ab.hermitian_exact());
      CHECK(zero_mean_exact(ab));
    }
  }
}

TEST_CASE("dyadic bands") {
  CHECK(DyadicBand::from_value(4.0).exponent() == 2);
  CHECK(DyadicBand::from_value(0.125).exponent() == -3);
  CHECK_THROWS_AS(DyadicBand::from_value(3.0), std::invalid_argument);
  CHECK(DyadicBand::containing(3.0).value() == 4.0);
  CHECK(DyadicBand::containing(4.0).value() == 4.0);
  CHECK(DyadicBand::containing(4.0000001).value() == 8.0);
  CHECK(DyadicBand::containing(-0.3).value() == 0.5);
  const DyadicBand b(2);
  CHECK(b.in_wide_band(0.5));
  CHECK(b.in_wide_band(32.0));
  CHECK_FALSE(b.in_wide_band(0.49));
  CHECK_FALSE(b.in_wide_band(32.1));
}

TEST_CASE("dyadic projections partition the coefficients") {
  FrequencyGrid g(2 * kPi * 8, 2 * kPi, 64, 16);
  const SpectralField f = random_field(g, 33);
  SpectralField sum(g);
  double pieces = 0;
  for (DyadicBand b : dyadic_family(g)) {
    const SpectralField p = project_dyadic(f, b);
    CHECK(p.hermitian_exact());
    sum += p;
    pieces += p.coeff_l2() * p.coeff_l2();
  }
  CHECK(relative_difference(sum, f) == 0.0);
  const double total = f.coeff_l2() * f.coeff_l2();
  CHECK(std::abs(pieces - total) <= 1e-12 * total);

  // Support at |xi| = 3: P_4 keeps it, P_2 removes it.
  std::vector<Complex> c(g.size());
  c[g.index(24, 1)] = 1.0;
  c[g.index(g.mirror_x(24), g.mirror_y(1))] = 1.0;
  const SpectralField three(g, c, true);
  REQUIRE(g.xi(24) == doctest::Approx(3.0));
  CHECK(relative_difference(project_dyadic(three, DyadicBand(2)), three) == 0.0);
  CHECK(project_dyadic(three, DyadicBand(1)).max_abs() == 0.0);
}

TEST_CASE("dealiased product") {
  FrequencyGrid g(2 * kPi, 2 * kPi, 16, 16);
  const SpectralField f = random_band_limited(g, 3);
  CHECK(dealiased_product(f, SpectralField(g)).max_abs() == 0.0);

  // cos(x) cos(2x) = (cos(x) + cos(3x))/2.
  std::vector<Complex> a(g.size()), b(g.size());
  a[g.index(1, 0)] = a[g.index(15, 0)] = 0.5;
  b[g.index(2, 0)] = b[g.index(14, 0)] = 0.5;
  const SpectralField p = dealiased_product(SpectralField(g, a, true), SpectralField(g, b, true));
  CHECK(p.is_real());
  CHECK(p.hermitian_exact());
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      const int k = std::abs(g.kx(i));
      const bool expected = j == 0 && (k == 1 || k == 3);
      CHECK((std::abs(p.at(i, j)) > 1e-14) == expected);
    }
  }
  CHECK(p.at(1, 0).real() == doctest::Approx(0.25));
  CHECK(p.at(3, 0).real() == doctest::Approx(0.25));
  CHECK_THROWS_AS(dealiased_product(f, SpectralField(default_grid(16, 16))), std::invalid_argument);
}

TEST_CASE("dealiased product equals the direct truncated convolution") {
  for (std::uint64_t seed = 40; seed < 44; ++seed) {
    FrequencyGrid g(2.0, 3.0, 24, 12);
    const SpectralField f = random_band_limited(g, seed);
    const SpectralField h = random_band_limited(g, seed + 7);
    const SpectralField p = dealiased_product(f, h);
    // Oracle: sum over lattice pairs k1 + k2 = k with both factors in the ball.
    double worst = 0;
    for (int i = 0; i < g.modes_x(); ++i) {
      for (int j = 0; j < g.modes_y(); ++j) {
        Complex direct{};
        if (g.in_dealias_ball(i, j)) {
          for (int i1 = 0; i1 < g.modes_x(); ++i1) {
            for (int j1 = 0; j1 < g.modes_y(); ++j1) {
              const int kx2 = g.kx(i) - g.kx(i1);
              const int ky2 = g.ky(j) - g.ky(j1);
              if (std::abs(kx2) >= g.modes_x() / 2 || std::abs(ky2) >= g.modes_y() / 2) continue;
              const int i2 = (kx2 + g.modes_x()) % g.modes_x();
              const int j2 = (ky2 + g.modes_y()) % g.modes_y();
              direct += f.at(i1, j1) * h.at(i2, j2);
            }
          }
        }
        worst = std::max(worst, std::abs(direct - p.at(i, j)));
      }
    }
    CHECK(worst < 1e-12 * p.max_abs() * 10);
  }
}

TEST_CASE("serialization round trip and layout") {
  FrequencyGrid g(1.5, 2.5, 8, 10);
  const SpectralField f = random_field(g, 77, false);
  const auto bytes = serialize_field(f);
  REQUIRE(bytes.size() == 5 + 16 + 8 + g.size() * 16);
  CHECK(std::string(bytes.begin(), bytes.begin() + 5) == "FKPI1");
  CHECK(bytes[21] == 8);
  CHECK(bytes[25] == 10);
  std::stringstream ss(std::string(bytes.begin(), bytes.end()));
  const SpectralField back = read_field(ss);
  CHECK(back.grid() == g);
  CHECK(back.is_real());
  CHECK(relative_difference(back, f) == 0.0);

  std::stringstream bad("FKPI0");
  CHECK_THROWS(read_field(bad));
}
