#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fkpi/probes.hpp"
#include "fkpi/records.hpp"
#include "fkpi/symbols.hpp"

namespace fkpi {

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Nonnegative samples of a function on (tau, xi, eta) at the points
/// anchor + basis * k, lo <= k < lo + shape. Column c of `basis` is the c-th step vector,
/// so the lattice may be oblique; values are row-major over shape.
struct LatticeFunction {
  Mat3 basis{};
  std::array<double, 3> anchor{};
  std::array<int, 3> lo{};
  std::array<int, 3> shape{};
  std::vector<double> values;

  LatticeFunction() = default;
  LatticeFunction(const Mat3& basis, std::array<double, 3> anchor, std::array<int, 3> lo,
                  std::array<int, 3> shape);

  std::size_t size() const { return values.size(); }
  double& at(int i, int j, int k) { return values[offset(i, j, k)]; }
  double at(int i, int j, int k) const { return values[offset(i, j, k)]; }
  /// Point of local index (i, j, k), i.e. lattice index lo + (i, j, k).
  std::array<double, 3> point(int i, int j, int k) const;
  /// |det basis|, the volume per lattice point.
  double cell_volume() const;
  /// (cell_volume * sum v^2)^{1/2}.
  double l2_norm() const;
  double sum() const;

 private:
  std::size_t offset(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k;
  }
};

/// sum over lattice pairs f1(a) f2(b) f3(a + b), without volume factors, through an FFT
/// linear convolution of f1 and f2. The three functions must share a basis and f3's
/// anchor must differ from anchor1 + anchor2 by a lattice vector; otherwise
/// std::invalid_argument ("lattice mismatch"). Negative values are rejected too.
double trilinear_integral(const LatticeFunction& f1, const LatticeFunction& f2,
                          const LatticeFunction& f3);

/// The same sum by the direct O(M^2) double loop. Test oracle.
double trilinear_integral_direct(const LatticeFunction& f1, const LatticeFunction& f2,
                                 const LatticeFunction& f3);

/// Options shared by the trilinear probes.
struct TrilinearOptions {
  /// Added to the exponent of the sweep variable in the comparator (negative control).
  double exponent_offset = 0.0;
  /// Multipliers of the three data functions (homogeneity checks; 0 gives "degenerate").
  std::array<double, 3> amplitudes{1.0, 1.0, 1.0};
  /// Lattice steps per unit L along each modulation axis.
  double steps_per_l = 4.0;
  /// lw_ratio only: put p2 on the ray of p1 (eta1 xi2 = eta2 xi1), outside the hypothesis.
  bool collinear = false;
  unsigned workers = 0;
};

/// Trilinear integral against N1^{-3 alpha/4 + 1/2} N2^{-1/2} (L1 L2 L3)^{1/2} prod ||f_i||
/// for f1, f2, f3 supported in D~_{N1,<=L1}, D~_{N2,<=L2}, D~_{N1,<=L3} around a resonant
/// triple (Omega = 0 at the centres). The lattice is oblique: its axes are the three
/// linearised modulation coordinates tau - grad omega(p_i) . p, with L_i / steps_per_l steps,
/// 32 nodes per axis, and uniform [0, 1) data on the admissible points. Maximised over
/// `trials` random resonant centres. Throws std::invalid_argument unless N2 <= N1 and
/// max L_i <= N1^alpha N2 / 8, and std::runtime_error when a support is empty at the
/// chosen resolution.
ExperimentRecord lw_ratio(const DispersionParams& params, double n1, double n2, double l1,
                          double l2, double l3, int trials, std::uint64_t seed,
                          const TrilinearOptions& opts = {});

/// Non-resonant trilinear integral against
/// (L1 L2 L3)^{1/2} L_max^{-1/4} N2^{-alpha/2} N1^{1/4} prod ||f_i|| for N1 <= N2 / 4 and
/// max L_i >= N1 N2^alpha, f_i supported in the modulation shells D~_{N_i, L_i}.
/// Evaluated in modulation coordinates sigma = tau - omega(p), where the integral reads
/// sum f1#(s1, p1) f2#(s2, p2) f3#(s1 + s2 - Omega(p1, p2), p1 + p2); f3# is piecewise
/// constant in sigma. Exponent offset applies to N2.
ExperimentRecord nonresonant_ratio(const DispersionParams& params, double n1, double n2,
                                   double l1, double l2, double l3, int trials,
                                   std::uint64_t seed, const TrilinearOptions& opts = {});

/// lw_ratio over N1 in the sweep range with fixed N2 and L1 = L2 = L3 = l.
ProbeResult lw_sweep(const DispersionParams& params, double n2, double l, const ProbeSweep& sweep,
                     const TrilinearOptions& opts = {});

/// nonresonant_ratio over N2 in the sweep range with fixed N1, L1 = L2 = 1 and L3 the
/// smallest power of two >= (alpha + 1) N1 N2^alpha.
ProbeResult nonresonant_sweep(const DispersionParams& params, double n1, const ProbeSweep& sweep,
                              const TrilinearOptions& opts = {});

}  // namespace fkpi
