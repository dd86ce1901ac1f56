#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "fkpi/lattice.hpp"
#include "fkpi/random.hpp"

using namespace fkpi;

namespace {

const Mat3 kUnit{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

LatticeFunction box(const Mat3& basis, std::array<double, 3> anchor, std::array<int, 3> lo,
                    std::array<int, 3> shape) {
  return LatticeFunction(basis, anchor, lo, shape);
}

void fill_random(LatticeFunction& f, Rng& rng, double zero_fraction = 0.3) {
  for (double& v : f.values) v = rng.uniform() < zero_fraction ? 0.0 : rng.uniform();
}

std::array<int, 3> random_shape(Rng& rng) {
  return {1 + static_cast<int>(rng.uniform() * 16), 1 + static_cast<int>(rng.uniform() * 16),
          1 + static_cast<int>(rng.uniform() * 16)};
}

std::array<int, 3> random_lo(Rng& rng) {
  return {static_cast<int>(rng.uniform(-10, 10)), static_cast<int>(rng.uniform(-10, 10)),
          static_cast<int>(rng.uniform(-10, 10))};
}

}  // namespace

TEST_CASE("trilinear_integral trivial cases") {
  const std::array<int, 3> one{1, 1, 1};
  LatticeFunction a = box(kUnit, {0, 0, 0}, {2, -1, 3}, one);
  LatticeFunction b = box(kUnit, {0, 0, 0}, {1, 4, -2}, one);
  LatticeFunction c = box(kUnit, {0, 0, 0}, {3, 3, 1}, one);
  a.values[0] = b.values[0] = c.values[0] = 1.0;
  CHECK(trilinear_integral(a, b, c) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(trilinear_integral_direct(a, b, c) == 1.0);

  // f3 away from a + b: zero, on both paths.
  LatticeFunction far = box(kUnit, {0, 0, 0}, {3, 3, 2}, one);
  far.values[0] = 1.0;
  CHECK(trilinear_integral(a, b, far) == 0.0);
  CHECK(trilinear_integral_direct(a, b, far) == 0.0);

  Rng rng(5);
  LatticeFunction f = box(kUnit, {0, 0, 0}, {0, 0, 0}, {6, 5, 4});
  LatticeFunction g = box(kUnit, {0, 0, 0}, {0, 0, 0}, {3, 7, 2});
  LatticeFunction h = box(kUnit, {0, 0, 0}, {0, 0, 0}, {9, 12, 6});
  fill_random(f, rng);
  fill_random(h, rng);
  CHECK(trilinear_integral(f, g, h) == 0.0);
  fill_random(g, rng);
  LatticeFunction zero = h;
  for (double& v : zero.values) v = 0.0;
  CHECK(trilinear_integral(f, g, zero) == 0.0);
}

TEST_CASE("trilinear_integral matches the direct double sum on random lattices") {
  Rng rng(20240611);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    // Random oblique basis, anchors consistent up to a random lattice shift.
    Mat3 basis{};
    for (auto& row : basis) {
      for (double& v : row) v = rng.uniform(-1, 1);
    }
    for (int i = 0; i < 3; ++i) basis[i][i] += 2.0;
    const std::array<double, 3> a1{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const std::array<double, 3> a2{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const std::array<int, 3> shift = random_lo(rng);
    std::array<double, 3> a3{};
    for (int i = 0; i < 3; ++i) {
      a3[i] = a1[i] + a2[i];
      for (int j = 0; j < 3; ++j) a3[i] += basis[i][j] * shift[j];
    }
    LatticeFunction f1 = box(basis, a1, random_lo(rng), random_shape(rng));
    LatticeFunction f2 = box(basis, a2, random_lo(rng), random_shape(rng));
    // f3 over the window where f1 * f2 lives (moved by the shift), sometimes clipped.
    std::array<int, 3> lo3{}, shape3{};
    for (int i = 0; i < 3; ++i) {
      lo3[i] = f1.lo[i] + f2.lo[i] - shift[i] + static_cast<int>(rng.uniform(-3, 3));
      shape3[i] = std::min(16, f1.shape[i] + f2.shape[i] - 1 + static_cast<int>(rng.uniform(-2, 3)));
      shape3[i] = std::max(1, shape3[i]);
    }
    LatticeFunction f3 = box(basis, a3, lo3, shape3);
    fill_random(f1, rng);
    fill_random(f2, rng);
    fill_random(f3, rng);
    const double direct = trilinear_integral_direct(f1, f2, f3);
    const double fast = trilinear_integral(f1, f2, f3);
    const double scale = std::max(direct, 1e-300);
    if (direct == 0.0) {
      CHECK(std::abs(fast) <= 1e-12 * f1.sum() * f2.sum());
    } else {
      worst = std::max(worst, std::abs(fast - direct) / scale);
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("trilinear_integral homogeneity and errors") {
  Rng rng(3);
  LatticeFunction f = box(kUnit, {0, 0, 0}, {0, 0, 0}, {5, 5, 5});
  LatticeFunction g = f, h = box(kUnit, {0, 0, 0}, {0, 0, 0}, {9, 9, 9});
  fill_random(f, rng, 0.0);
  fill_random(g, rng, 0.0);
  fill_random(h, rng, 0.0);
  const double base = trilinear_integral(f, g, h);
  CHECK(base > 0.0);
  LatticeFunction f2 = f, g2 = g, h2 = h;
  for (double& v : f2.values) v *= 2.5;
  for (double& v : g2.values) v *= 0.25;
  for (double& v : h2.values) v *= 3.0;
  CHECK(trilinear_integral(f2, g2, h2) == doctest::Approx(base * 2.5 * 0.25 * 3.0).epsilon(1e-12));

  LatticeFunction other = h;
  other.basis[0][0] = 1.5;
  CHECK_THROWS_WITH_AS(trilinear_integral(f, g, other), doctest::Contains("lattice mismatch"),
                       std::invalid_argument);
  LatticeFunction off = h;
  off.anchor = {0.5, 0.0, 0.0};
  CHECK_THROWS_WITH_AS(trilinear_integral(f, g, off), doctest::Contains("lattice mismatch"),
                       std::invalid_argument);
  LatticeFunction neg = h;
  neg.values[3] = -1.0;
  CHECK_THROWS_AS(trilinear_integral(f, g, neg), std::invalid_argument);
  CHECK_THROWS_AS(trilinear_integral_direct(f, g, neg), std::invalid_argument);
  // A whole-lattice-vector anchor offset is fine.
  LatticeFunction moved = h;
  moved.anchor = {2.0, 0.0, -1.0};
  moved.lo = {h.lo[0] - 2, h.lo[1], h.lo[2] + 1};
  CHECK(trilinear_integral(f, g, moved) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("lw_ratio input checks and flags") {
  const DispersionParams p(3.0);
  CHECK_THROWS_AS(lw_ratio(p, 4, 8, 1, 1, 1, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(lw_ratio(p, 8, 2, 3, 1, 1, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(lw_ratio(p, 8, 2, 1, 1, 1, 0, 0), std::invalid_argument);
  // max L <= N1^alpha N2 / 8 = 128 at N1 = 8, N2 = 2.
  CHECK_NOTHROW(lw_ratio(p, 8, 2, 128, 1, 1, 1, 0));
  CHECK_THROWS_WITH_AS(lw_ratio(p, 8, 2, 256, 1, 1, 1, 0), doctest::Contains("modulation"),
                       std::invalid_argument);

  TrilinearOptions zero;
  zero.amplitudes = {1.0, 0.0, 1.0};
  const ExperimentRecord d = lw_ratio(p, 8, 2, 1, 1, 1, 2, 1, zero);
  CHECK(d.flag == "degenerate");
  CHECK(std::isnan(d.ratio));

  TrilinearOptions col;
  col.collinear = true;
  const ExperimentRecord c = lw_ratio(p, 16, 2, 1, 1, 1, 2, 1, col);
  CHECK(c.flag == "outside-hypothesis");
  CHECK_FALSE(c.pass);

  TrilinearOptions coarse;
  coarse.steps_per_l = 0.1;
  CHECK_THROWS_WITH_AS(lw_ratio(p, 8, 2, 1, 1, 1, 1, 0, coarse),
                       doctest::Contains("empty admissible support"), std::runtime_error);
}

TEST_CASE("lw_ratio homogeneity and determinism") {
  const DispersionParams p(3.0);
  const ExperimentRecord a = lw_ratio(p, 16, 2, 1, 1, 1, 2, 9);
  TrilinearOptions scaled;
  scaled.amplitudes = {2.0, 0.5, 7.0};
  const ExperimentRecord b = lw_ratio(p, 16, 2, 1, 1, 1, 2, 9, scaled);
  CHECK(a.flag.empty());
  CHECK(a.ratio > 0.0);
  CHECK(b.ratio == doctest::Approx(a.ratio).epsilon(1e-12));
  CHECK(b.measured == doctest::Approx(a.measured * 7.0).epsilon(1e-12));
  const ExperimentRecord again = lw_ratio(p, 16, 2, 1, 1, 1, 2, 9);
  CHECK(again.measured == a.measured);
  CHECK(again.ratio == a.ratio);
}

TEST_CASE("lw sweep: bounded slope, and the shifted exponent fails") {
  const DispersionParams p(3.0);
  ProbeSweep sweep;
  sweep.alpha = 3.0;
  sweep.dyadic_range = {8, 16, 32};
  sweep.trials_per_point = 2;
  sweep.seed = 11;
  sweep.band_hi = 0.2;
  ProbeResult r = lw_sweep(p, 2.0, 1.0, sweep);
  fit_slope(r.report, 3);
  MESSAGE("lw slope " << r.report.slope);
  CHECK(r.report.slope <= 0.2);
  TrilinearOptions neg;
  neg.exponent_offset = -0.25;
  ProbeResult n = lw_sweep(p, 2.0, 1.0, sweep, neg);
  fit_slope(n.report, 3);
  CHECK(n.report.slope > 0.2);
  CHECK(n.report.slope == doctest::Approx(r.report.slope + 0.25).epsilon(1e-9));
}

TEST_CASE("nonresonant_ratio") {
  const DispersionParams p(3.0);
  CHECK_THROWS_AS(nonresonant_ratio(p, 4, 8, 1, 1, 2048, 1, 0), std::invalid_argument);
  // max L must reach N1 N2^alpha = 512.
  CHECK_THROWS_WITH_AS(nonresonant_ratio(p, 1, 8, 1, 1, 256, 1, 0), doctest::Contains("N1 N2^alpha"),
                       std::invalid_argument);
  TrilinearOptions zero;
  zero.amplitudes = {0.0, 1.0, 1.0};
  CHECK(nonresonant_ratio(p, 1, 8, 1, 1, 2048, 1, 0, zero).flag == "degenerate");
  TrilinearOptions coarse;
  coarse.steps_per_l = 0.1;
  CHECK_THROWS_WITH_AS(nonresonant_ratio(p, 1, 8, 1, 1, 2048, 1, 0, coarse),
                       doctest::Contains("empty admissible support"), std::runtime_error);

  const ExperimentRecord a = nonresonant_ratio(p, 1, 16, 1, 1, 16384, 2, 4);
  TrilinearOptions scaled;
  scaled.amplitudes = {3.0, 0.2, 0.5};
  const ExperimentRecord b = nonresonant_ratio(p, 1, 16, 1, 1, 16384, 2, 4, scaled);
  CHECK(a.ratio > 0.0);
  CHECK(b.ratio == doctest::Approx(a.ratio).epsilon(1e-12));

  ProbeSweep sweep;
  sweep.alpha = 3.0;
  sweep.dyadic_range = {8, 16, 32, 64};
  sweep.trials_per_point = 1;
  sweep.seed = 2;
  sweep.band_hi = 0.2;
  const ProbeResult r = nonresonant_sweep(p, 1.0, sweep);
  MESSAGE("nonresonant slope " << r.report.slope);
  CHECK(r.report.pass);
  TrilinearOptions neg;
  neg.exponent_offset = -0.25;
  CHECK_FALSE(nonresonant_sweep(p, 1.0, sweep, neg).report.pass);
}
