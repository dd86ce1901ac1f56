#include "fkpi/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include "fkpi/fft.hpp"
#include "fkpi/random.hpp"
#include "sweep_support.hpp"

namespace fkpi {

using detail::is_dyadic;

namespace {

double det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3 inverse3(const Mat3& m) {
  const double d = det3(m);
  if (d == 0.0 || !std::isfinite(d)) throw std::invalid_argument("lattice: singular basis");
  Mat3 r{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      // cofactor of (j, i)
      const int a0 = (j + 1) % 3, a1 = (j + 2) % 3, b0 = (i + 1) % 3, b1 = (i + 2) % 3;
      r[i][j] = (m[a0][b0] * m[a1][b1] - m[a0][b1] * m[a1][b0]) / d;
    }
  }
  return r;
}

std::array<double, 3> mat_vec(const Mat3& m, const std::array<double, 3>& v) {
  std::array<double, 3> r{};
  for (int i = 0; i < 3; ++i) r[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
  return r;
}

void check_function(const LatticeFunction& f, const char* name) {
  std::size_t n = 1;
  for (int s : f.shape) {
    if (s <= 0) throw std::invalid_argument(std::string("trilinear_integral: empty shape for ") + name);
    n *= static_cast<std::size_t>(s);
  }
  if (f.values.size() != n) {
    throw std::invalid_argument(std::string("trilinear_integral: value count mismatch for ") + name);
  }
  for (double v : f.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("trilinear_integral: ") + name +
                                  " must be finite and nonnegative");
    }
  }
}

// Integer shift d with f3's lattice index k3 = k1 + k2 + d for the point a + b.
std::array<int, 3> lattice_shift(const LatticeFunction& f1, const LatticeFunction& f2,
                                 const LatticeFunction& f3) {
  check_function(f1, "f1");
  check_function(f2, "f2");
  check_function(f3, "f3");
  double scale = 0.0;
  for (const auto& row : f1.basis) {
    for (double v : row) scale = std::max(scale, std::abs(v));
  }
  for (const LatticeFunction* g : {&f2, &f3}) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (std::abs(g->basis[i][j] - f1.basis[i][j]) > 1e-12 * scale) {
          throw std::invalid_argument("trilinear_integral: lattice mismatch (different bases)");
        }
      }
    }
  }
  std::array<double, 3> diff{};
  double anchor_scale = 0.0;
  for (int i = 0; i < 3; ++i) {
    diff[i] = f1.anchor[i] + f2.anchor[i] - f3.anchor[i];
    anchor_scale = std::max({anchor_scale, std::abs(f1.anchor[i]), std::abs(f2.anchor[i])});
  }
  const auto x = mat_vec(inverse3(f1.basis), diff);
  std::array<int, 3> d{};
  std::array<double, 3> k{};
  for (int i = 0; i < 3; ++i) {
    k[i] = std::round(x[i]);
    d[i] = static_cast<int>(k[i]);
  }
  const auto back = mat_vec(f1.basis, k);
  for (int i = 0; i < 3; ++i) {
    if (std::abs(back[i] - diff[i]) > 1e-9 * (anchor_scale + scale)) {
      throw std::invalid_argument("trilinear_integral: lattice mismatch (f3 anchor is not on the sum lattice)");
    }
  }
  return d;
}

}  // namespace

LatticeFunction::LatticeFunction(const Mat3& b, std::array<double, 3> a, std::array<int, 3> l,
                                 std::array<int, 3> s)
    : basis(b), anchor(a), lo(l), shape(s) {
  for (int v : s) {
    if (v <= 0) throw std::invalid_argument("LatticeFunction: shape entries must be positive");
  }
  values.assign(static_cast<std::size_t>(s[0]) * s[1] * s[2], 0.0);
}

std::array<double, 3> LatticeFunction::point(int i, int j, int k) const {
  const std::array<double, 3> idx{static_cast<double>(lo[0] + i), static_cast<double>(lo[1] + j),
                                  static_cast<double>(lo[2] + k)};
  auto p = mat_vec(basis, idx);
  for (int c = 0; c < 3; ++c) p[c] += anchor[c];
  return p;
}

double LatticeFunction::cell_volume() const { return std::abs(det3(basis)); }

double LatticeFunction::l2_norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(cell_volume() * s);
}

double LatticeFunction::sum() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

double trilinear_integral(const LatticeFunction& f1, const LatticeFunction& f2,
                          const LatticeFunction& f3) {
  const auto d = lattice_shift(f1, f2, f3);
  // Index window of f1 * f2, and its overlap with f3 moved into the same indices.
  std::array<int, 3> clo{}, cn{}, olo{}, ohi{};
  for (int i = 0; i < 3; ++i) {
    clo[i] = f1.lo[i] + f2.lo[i];
    cn[i] = f1.shape[i] + f2.shape[i] - 1;
    olo[i] = std::max(clo[i], f3.lo[i] - d[i]);
    ohi[i] = std::min(clo[i] + cn[i], f3.lo[i] - d[i] + f3.shape[i]);
    if (olo[i] >= ohi[i]) return 0.0;
  }
  const std::size_t total = static_cast<std::size_t>(cn[0]) * cn[1] * cn[2];
  std::vector<std::complex<double>> a(total), b(total);
  auto load = [&](const LatticeFunction& f, std::vector<std::complex<double>>& buf) {
    for (int i = 0; i < f.shape[0]; ++i) {
      for (int j = 0; j < f.shape[1]; ++j) {
        for (int k = 0; k < f.shape[2]; ++k) {
          buf[(static_cast<std::size_t>(i) * cn[1] + j) * cn[2] + k] = f.at(i, j, k);
        }
      }
    }
  };
  load(f1, a);
  load(f2, b);
  fft::transform_3d(cn[0], cn[1], cn[2], a, fft::Direction::forward);
  fft::transform_3d(cn[0], cn[1], cn[2], b, fft::Direction::forward);
  for (std::size_t q = 0; q < total; ++q) a[q] *= b[q];
  fft::transform_3d(cn[0], cn[1], cn[2], a, fft::Direction::backward);
  const double inv = 1.0 / static_cast<double>(total);
  double s = 0.0;
  for (int i = olo[0]; i < ohi[0]; ++i) {
    for (int j = olo[1]; j < ohi[1]; ++j) {
      for (int k = olo[2]; k < ohi[2]; ++k) {
        const double h3 = f3.at(i + d[0] - f3.lo[0], j + d[1] - f3.lo[1], k + d[2] - f3.lo[2]);
        if (h3 == 0.0) continue;
        const std::size_t q =
            (static_cast<std::size_t>(i - clo[0]) * cn[1] + (j - clo[1])) * cn[2] + (k - clo[2]);
        s += a[q].real() * inv * h3;
      }
    }
  }
  return s;
}

double trilinear_integral_direct(const LatticeFunction& f1, const LatticeFunction& f2,
                                 const LatticeFunction& f3) {
  const auto d = lattice_shift(f1, f2, f3);
  double s = 0.0;
  for (int i1 = 0; i1 < f1.shape[0]; ++i1) {
    for (int j1 = 0; j1 < f1.shape[1]; ++j1) {
      for (int k1 = 0; k1 < f1.shape[2]; ++k1) {
        const double v1 = f1.at(i1, j1, k1);
        if (v1 == 0.0) continue;
        for (int i2 = 0; i2 < f2.shape[0]; ++i2) {
          const int i3 = f1.lo[0] + i1 + f2.lo[0] + i2 + d[0] - f3.lo[0];
          if (i3 < 0 || i3 >= f3.shape[0]) continue;
          for (int j2 = 0; j2 < f2.shape[1]; ++j2) {
            const int j3 = f1.lo[1] + j1 + f2.lo[1] + j2 + d[1] - f3.lo[1];
            if (j3 < 0 || j3 >= f3.shape[1]) continue;
            for (int k2 = 0; k2 < f2.shape[2]; ++k2) {
              const int k3 = f1.lo[2] + k1 + f2.lo[2] + k2 + d[2] - f3.lo[2];
              if (k3 < 0 || k3 >= f3.shape[2]) continue;
              s += v1 * f2.at(i2, j2, k2) * f3.at(i3, j3, k3);
            }
          }
        }
      }
    }
  }
  return s;
}

namespace {

void check_modulation(double l, const char* name) {
  if (!(l >= 1.0) || !is_dyadic(l)) {
    throw std::invalid_argument(std::string(name) + " must be a power of two >= 1");
  }
}

bool in_band(double xi, double n) { return std::abs(xi) >= n / 8.0 && std::abs(xi) <= 8.0 * n; }

std::uint64_t stream_id(double a, double b) {
  return static_cast<std::uint64_t>(std::llround(64.0 * std::log2(a) + 4096.0 * (8.0 + std::log2(b))));
}

constexpr int kNodes = 32;  // lattice nodes per axis

}  // namespace

ExperimentRecord lw_ratio(const DispersionParams& params, double n1, double n2, double l1,
                          double l2, double l3, int trials, std::uint64_t seed,
                          const TrilinearOptions& opts) {
  if (!is_dyadic(n1) || !is_dyadic(n2) || !(n2 <= n1)) {
    throw std::invalid_argument("lw_ratio: need dyadic N2 <= N1");
  }
  check_modulation(l1, "lw_ratio: L1");
  check_modulation(l2, "lw_ratio: L2");
  check_modulation(l3, "lw_ratio: L3");
  const double a = params.alpha();
  const std::array<double, 3> ls{l1, l2, l3};
  const double lmax = std::max({l1, l2, l3});
  if (!(lmax <= std::pow(n1, a) * n2 / 8.0)) {
    throw std::invalid_argument("lw_ratio: modulation condition max L <= N1^alpha N2 / 8 fails");
  }
  if (trials < 1) throw std::invalid_argument("lw_ratio: trials must be >= 1");
  if (!(opts.steps_per_l > 0.0)) throw std::invalid_argument("lw_ratio: steps_per_l must be positive");

  ExperimentRecord rec;
  rec.probe = "lw";
  rec.alpha = a;
  rec.set("N1", n1);
  rec.set("N2", n2);
  rec.set("L1", l1);
  rec.set("L2", l2);
  rec.set("L3", l3);
  rec.set("trials", trials);
  rec.set("seed", static_cast<double>(seed));
  rec.set("exponent_offset", opts.exponent_offset);
  if (opts.collinear) rec.set("collinear", "true");
  const double factor = std::pow(n1, -0.75 * a + 0.5 + opts.exponent_offset) / std::sqrt(n2) *
                        std::sqrt(l1 * l2 * l3);
  if (opts.amplitudes[0] == 0.0 || opts.amplitudes[1] == 0.0 || opts.amplitudes[2] == 0.0) {
    rec.flag = "degenerate";
    rec.comparator = 0.0;
    rec.finish_ratio();
    return rec;
  }

  Rng rng = Rng::stream(seed, stream_id(n1, n2));
  double best = -1.0;
  for (int trial = 0; trial < trials; ++trial) {
    // Centres near the lower band edges, where the normalised determinant is smallest.
    const double xi1 = n1 * (1.0 + rng.uniform() / 16.0);
    const double xi2 = n2 * (1.0 + rng.uniform() / 16.0);
    const double eta1 = rng.uniform(-1.0, 1.0) * std::pow(n1, a / 2.0) * xi1;
    const double branch = rng.sign();
    double eta2 = eta1 * xi2 / xi1;
    if (!opts.collinear) {
      // Omega = 0: (eta1 xi2 - eta2 xi1)^2 = Omega^1 xi1 xi2 (xi1 + xi2).
      const double om1 = omega1_part(params, {{xi1, 0.0}, {xi2, 0.0}});
      eta2 -= branch * std::sqrt(om1 * xi1 * xi2 * (xi1 + xi2)) / xi1;
    }
    const FreqPair pair{{xi1, eta1}, {xi2, eta2}};
    const FreqPoint p3 = pair.sum();
    const double det = normal_determinant_numeric(params, pair);
    const double res = resonance_fraction(params, pair);
    const double det_scale = std::pow(n1, 1.5 * a - 1.0) * n2;
    if (std::abs(det) < 1e-3 * det_scale || std::abs(res) > std::min({l1, l2, l3})) {
      // Transversality premise fails at these centres: no verdict.
      rec.flag = "outside-hypothesis";
      rec.set("det_normals", det);
      rec.set("omega_centres", res);
      rec.measured = std::numeric_limits<double>::quiet_NaN();
      rec.comparator = std::numeric_limits<double>::quiet_NaN();
      rec.finish_ratio();
      return rec;
    }
    // Rows n_i: y_i = n_i . (a - c_i) is the linearised modulation of f_i.
    const Mat3 normals{surface_normal(params, pair.p1), surface_normal(params, pair.p2),
                       surface_normal(params, p3)};
    const Mat3 inv = inverse3(normals);
    Mat3 basis{};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) basis[r][c] = inv[r][c] * ls[c] / opts.steps_per_l;
    }
    const std::array<double, 3> c1{omega(params, pair.p1), xi1, eta1};
    const std::array<double, 3> c2{omega(params, pair.p2), xi2, eta2};
    // Cell-centred nodes: the lattice sits half a step off the centres.
    const auto half = mat_vec(basis, {0.5, 0.5, 0.5});
    std::array<double, 3> a1{}, a2{}, a3{};
    for (int i = 0; i < 3; ++i) {
      a1[i] = c1[i] + half[i];
      a2[i] = c2[i] + half[i];
      a3[i] = a1[i] + a2[i];
    }
    const std::array<int, 3> lo{-kNodes / 2, -kNodes / 2, -kNodes / 2};
    const std::array<int, 3> shape{kNodes, kNodes, kNodes};
    std::array<LatticeFunction, 3> f{LatticeFunction(basis, a1, lo, shape),
                                     LatticeFunction(basis, a2, lo, shape),
                                     LatticeFunction(basis, a3, lo, shape)};
    const std::array<double, 3> ns{n1, n2, n1};
    for (int m = 0; m < 3; ++m) {
      std::size_t count = 0;
      for (int i = 0; i < kNodes; ++i) {
        for (int j = 0; j < kNodes; ++j) {
          for (int k = 0; k < kNodes; ++k) {
            const auto pt = f[m].point(i, j, k);
            if (!in_band(pt[1], ns[m])) continue;
            if (!(std::abs(pt[0] - omega(params, {pt[1], pt[2]})) <= 4.0 * ls[m])) continue;
            f[m].at(i, j, k) = opts.amplitudes[m] * rng.uniform();
            ++count;
          }
        }
      }
      if (count == 0) {
        throw std::runtime_error("lw_ratio: empty admissible support for f" + std::to_string(m + 1) +
                                 "; the step along its modulation axis must be below 8 L" +
                                 std::to_string(m + 1) + " (steps_per_l > 1/8), have " +
                                 format_number(ls[m] / opts.steps_per_l));
      }
    }
    const double vol = f[0].cell_volume();
    const double integral = vol * vol * trilinear_integral(f[0], f[1], f[2]);
    const double comp = factor * f[0].l2_norm() * f[1].l2_norm() * f[2].l2_norm();
    const double ratio = integral / comp;
    if (ratio > best) {
      best = ratio;
      rec.measured = integral;
      rec.comparator = comp;
    }
  }
  rec.finish_ratio();
  return rec;
}

ExperimentRecord nonresonant_ratio(const DispersionParams& params, double n1, double n2,
                                   double l1, double l2, double l3, int trials,
                                   std::uint64_t seed, const TrilinearOptions& opts) {
  if (!is_dyadic(n1) || !is_dyadic(n2) || !(n1 <= n2 / 4.0)) {
    throw std::invalid_argument("nonresonant_ratio: need dyadic N1 <= N2 / 4");
  }
  check_modulation(l1, "nonresonant_ratio: L1");
  check_modulation(l2, "nonresonant_ratio: L2");
  check_modulation(l3, "nonresonant_ratio: L3");
  const double a = params.alpha();
  const double lmax = std::max({l1, l2, l3});
  if (!(lmax >= n1 * std::pow(n2, a))) {
    throw std::invalid_argument("nonresonant_ratio: need max L >= N1 N2^alpha");
  }
  if (trials < 1) throw std::invalid_argument("nonresonant_ratio: trials must be >= 1");
  if (!(opts.steps_per_l > 0.0)) {
    throw std::invalid_argument("nonresonant_ratio: steps_per_l must be positive");
  }

  ExperimentRecord rec;
  rec.probe = "nonresonant";
  rec.alpha = a;
  rec.set("N1", n1);
  rec.set("N2", n2);
  rec.set("L1", l1);
  rec.set("L2", l2);
  rec.set("L3", l3);
  rec.set("trials", trials);
  rec.set("seed", static_cast<double>(seed));
  rec.set("exponent_offset", opts.exponent_offset);
  const double factor = std::sqrt(l1 * l2 * l3) * std::pow(lmax, -0.25) *
                        std::pow(n2, -a / 2.0 + opts.exponent_offset) * std::pow(n1, 0.25);
  if (opts.amplitudes[0] == 0.0 || opts.amplitudes[1] == 0.0 || opts.amplitudes[2] == 0.0) {
    rec.flag = "degenerate";
    rec.comparator = 0.0;
    rec.finish_ratio();
    return rec;
  }

  // Frequency patches on one (xi, eta) lattice: P1 = [N1, 2N1] x [-H, H] around the ray
  // of p2 (8 x 128 nodes), P2 = [N2, N2 + 2N1] x 2H (16 x 128 nodes), f3 on P1 + P2.
  // There Omega^1 ~ N1 N2^alpha; H lets the eta part of Omega reach 8 L_max, and one eta
  // step moves it by at most L_max / 4.
  constexpr int m1x = 8, m2x = 16, my = 128;
  constexpr int m3x = m1x + m2x - 1, m3y = 2 * my - 1;
  const double dxi = n1 / m1x;
  const double half = std::sqrt(8.0 * lmax * n1);
  const double deta = 2.0 * half / my;
  const double hs1 = l1 / opts.steps_per_l, hs2 = l2 / opts.steps_per_l, hs3 = l3 / opts.steps_per_l;
  // sigma nodes (k + 1/2) hs, k in [-16, 16), for f1#, f2#; f3# is constant on
  // [k hs3, (k + 1) hs3).
  auto sigma_node = [](int k, double hs) { return (k - kNodes / 2 + 0.5) * hs; };
  auto shell = [](double s, double l) { return std::abs(s) >= l / 4.0 && std::abs(s) <= 4.0 * l; };

  Rng rng = Rng::stream(seed, stream_id(n2, n1) + 7);
  double best = -1.0;
  for (int trial = 0; trial < trials; ++trial) {
    // Galilean slope of the pair; the data values are the other random input.
    const double s2 = rng.uniform(-1.0, 1.0) * std::pow(n2, a / 2.0);
    const double xi1_0 = n1 + 0.5 * dxi;
    const double eta1_0 = s2 * 1.5 * n1 - half + 0.5 * deta;
    const double xi2_0 = n2 + 0.5 * dxi;
    const double eta2_0 = s2 * (n2 + n1) - half + 0.5 * deta;

    auto fill = [&](std::vector<double>& g, int nx, int ny, double hs, double l, double amp,
                    double xi_0, double n) {
      g.assign(static_cast<std::size_t>(nx) * ny * kNodes, 0.0);
      std::size_t count = 0;
      for (int i = 0; i < nx; ++i) {
        if (!in_band(xi_0 + i * dxi, n)) continue;
        for (int j = 0; j < ny; ++j) {
          for (int k = 0; k < kNodes; ++k) {
            if (!shell(sigma_node(k, hs), l)) continue;
            g[(static_cast<std::size_t>(i) * ny + j) * kNodes + k] = amp * rng.uniform();
            ++count;
          }
        }
      }
      return count;
    };
    std::vector<double> g1, g2, g3;
    const std::size_t counts[3] = {
        fill(g1, m1x, my, hs1, l1, opts.amplitudes[0], xi1_0, n1),
        fill(g2, m2x, my, hs2, l2, opts.amplitudes[1], xi2_0, n2),
        fill(g3, m3x, m3y, hs3, l3, opts.amplitudes[2], xi1_0 + xi2_0, n2)};
    const double steps[3] = {hs1, hs2, hs3};
    for (int m = 0; m < 3; ++m) {
      if (counts[m] == 0) {
        throw std::runtime_error("nonresonant_ratio: empty admissible support for f" +
                                 std::to_string(m + 1) +
                                 "; the modulation step must be below L/4 (steps_per_l > 4/15), have " +
                                 format_number(steps[m]));
      }
    }
    // Row sums of f1#, f2# over sigma, for pairs whose sigma1 + sigma2 - Omega stays in one bin.
    auto row_sums = [](const std::vector<double>& g) {
      std::vector<double> r(g.size() / kNodes, 0.0);
      for (std::size_t q = 0; q < r.size(); ++q) {
        for (int k = 0; k < kNodes; ++k) r[q] += g[q * kNodes + k];
      }
      return r;
    };
    const auto sum1 = row_sums(g1), sum2 = row_sums(g2);
    const bool equal_steps = hs1 == hs2;
    std::vector<double> prefix2(sum2.size() * (kNodes + 1), 0.0);
    for (std::size_t q = 0; q < sum2.size(); ++q) {
      for (int k = 0; k < kNodes; ++k) {
        prefix2[q * (kNodes + 1) + k + 1] = prefix2[q * (kNodes + 1) + k] + g2[q * kNodes + k];
      }
    }
    const double smin = sigma_node(0, hs1) + sigma_node(0, hs2);
    const double smax = sigma_node(kNodes - 1, hs1) + sigma_node(kNodes - 1, hs2);

    std::vector<double> om1(static_cast<std::size_t>(m1x) * m2x);
    for (int i1 = 0; i1 < m1x; ++i1) {
      for (int i2 = 0; i2 < m2x; ++i2) {
        om1[static_cast<std::size_t>(i1) * m2x + i2] =
            omega1_part(params, {{xi1_0 + i1 * dxi, 0.0}, {xi2_0 + i2 * dxi, 0.0}});
      }
    }

    double total = 0.0;
    for (int i1 = 0; i1 < m1x; ++i1) {
      for (int j1 = 0; j1 < my; ++j1) {
        const std::size_t q1 = static_cast<std::size_t>(i1) * my + j1;
        if (sum1[q1] == 0.0) continue;
        const double* r1 = &g1[q1 * kNodes];
        const double xi1 = xi1_0 + i1 * dxi, eta1 = eta1_0 + j1 * deta;
        for (int i2 = 0; i2 < m2x; ++i2) {
          const double xi2 = xi2_0 + i2 * dxi;
          const double o1 = om1[static_cast<std::size_t>(i1) * m2x + i2];
          const double den = xi1 * xi2 * (xi1 + xi2);
          for (int j2 = 0; j2 < my; ++j2) {
            const std::size_t q2 = static_cast<std::size_t>(i2) * my + j2;
            if (sum2[q2] == 0.0) continue;
            const double cross = eta1 * xi2 - (eta2_0 + j2 * deta) * xi1;
            const double om = o1 - cross * cross / den;
            const double* r3 =
                &g3[(static_cast<std::size_t>(i1 + i2) * m3y + (j1 + j2)) * kNodes];
            const double blo = std::floor((smin - om) / hs3) + kNodes / 2;
            const double bhi = std::floor((smax - om) / hs3) + kNodes / 2;
            if (bhi < 0.0 || blo >= kNodes) continue;
            if (blo == bhi) {
              total += sum1[q1] * sum2[q2] * r3[static_cast<int>(blo)];
              continue;
            }
            if (equal_steps) {
              // sigma1 + sigma2 = (k1 + k2 - kNodes + 1) hs: split k1 + k2 into bin ranges and
              // use prefix sums of f2# over k2.
              const double* pre = &prefix2[q2 * (kNodes + 1)];
              for (int bin = std::max(0, static_cast<int>(blo)); bin <= std::min<int>(kNodes - 1, static_cast<int>(bhi)); ++bin) {
                // k1 + k2 = m lands in `bin` for m in [mlo, mhi].
                const double edge = (bin - kNodes / 2) * hs3 + om;
                const int mlo = std::max(0, static_cast<int>(std::ceil(edge / hs1 + kNodes - 1.0)));
                const int mhi = std::min(2 * kNodes - 2, static_cast<int>(std::ceil((edge + hs3) / hs1 + kNodes - 1.0)) - 1);
                if (mlo > mhi || r3[bin] == 0.0) continue;
                double part = 0.0;
                for (int k1 = 0; k1 < kNodes; ++k1) {
                  if (r1[k1] == 0.0) continue;
                  const int lo2 = std::max(0, mlo - k1), hi2 = std::min(kNodes - 1, mhi - k1);
                  if (lo2 <= hi2) part += r1[k1] * (pre[hi2 + 1] - pre[lo2]);
                }
                total += part * r3[bin];
              }
              continue;
            }
            const double* r2 = &g2[q2 * kNodes];
            for (int k1 = 0; k1 < kNodes; ++k1) {
              if (r1[k1] == 0.0) continue;
              const double s1 = sigma_node(k1, hs1);
              double inner = 0.0;
              for (int k2 = 0; k2 < kNodes; ++k2) {
                if (r2[k2] == 0.0) continue;
                const double bin = std::floor((s1 + sigma_node(k2, hs2) - om) / hs3) + kNodes / 2;
                if (bin < 0.0 || bin >= kNodes) continue;
                inner += r2[k2] * r3[static_cast<int>(bin)];
              }
              total += r1[k1] * inner;
            }
          }
        }
      }
    }
    const double dp = dxi * deta;
    auto norm = [&](const std::vector<double>& g, double hs) {
      double s = 0.0;
      for (double v : g) s += v * v;
      return std::sqrt(hs * dp * s);
    };
    const double integral = total * hs1 * hs2 * dp * dp;
    const double comp = factor * norm(g1, hs1) * norm(g2, hs2) * norm(g3, hs3);
    const double ratio = integral / comp;
    if (ratio > best) {
      best = ratio;
      rec.measured = integral;
      rec.comparator = comp;
    }
  }
  rec.finish_ratio();
  return rec;
}

ProbeResult lw_sweep(const DispersionParams& params, double n2, double l, const ProbeSweep& sweep,
                     const TrilinearOptions& opts) {
  sweep.validate();
  auto one = [&](double n1) {
    return lw_ratio(params, n1, n2, l, l, l, sweep.trials_per_point, sweep.seed, opts);
  };
  return detail::run_sweep("lw", "N1", params.alpha(), sweep.dyadic_range, sweep.band_lo,
                           sweep.band_hi, opts.workers, one);
}

ProbeResult nonresonant_sweep(const DispersionParams& params, double n1, const ProbeSweep& sweep,
                              const TrilinearOptions& opts) {
  sweep.validate();
  const double a = params.alpha();
  auto one = [&](double n2) {
    const double l3 = std::exp2(std::ceil(std::log2((a + 1.0) * n1 * std::pow(n2, a))));
    return nonresonant_ratio(params, n1, n2, 1.0, 1.0, std::max(1.0, l3), sweep.trials_per_point,
                             sweep.seed, opts);
  };
  return detail::run_sweep("nonresonant", "N2", a, sweep.dyadic_range, sweep.band_lo,
                           sweep.band_hi, opts.workers, one);
}

}  // namespace fkpi
