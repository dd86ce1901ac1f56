#pragma once

#include "fkpi/field.hpp"
#include "fkpi/symbols.hpp"
#include "fkpi/trajectory.hpp"

namespace fkpi {

/// Exponents (s1, s2) of the anisotropic scale.
struct AnisoIndex {
  double s1 = 0.0;
  double s2 = 0.0;
};

/// Exponent pair of an L^q_t L^r_{x,y} norm; infinity is allowed for either.
class MixedNormSpec {
 public:
  /// Requires q in (2, inf] and r in [2, inf].
  MixedNormSpec(double q, double r);
  double q() const { return q_; }
  double r() const { return r_; }
  /// 1/q + 1/r = 1/2.
  bool strichartz_admissible() const { return admissible_; }

 private:
  double q_;
  double r_;
  bool admissible_;
};

// All norms below use the physical normalization of the periodic box:
// ||u||_{L^2}^2 = integral over the box of |u|^2 = area * sum_k |c_k|^2.

/// Integral of u^2 by grid quadrature. Real-constrained fields only.
double mass(const SpectralField& u);
/// area * sum |c_k|^2 (Parseval side of the same quantity).
double mass_spectral(const SpectralField& u);

/// Quadratic part: integral of 1/2 |D_x^{alpha/2} u|^2 + 1/2 |d_x^{-1} d_y u|^2.
double quadratic_energy(const DispersionParams& params, const SpectralField& u);
/// Integral of u^3/6, computed as (1/6) <u, P(u^2)> with the dealiased square;
/// exact when u lies in the 2/3 ball.
double cubic_energy(const SpectralField& u);
/// quadratic_energy + cubic_energy. Real, zero-x-mean fields only.
double energy_alpha(const DispersionParams& params, const SpectralField& u);

/// Weighted L^2 norm with weight (1+xi^2)^{s1/2} (1+eta^2)^{s2/2}, or
/// |xi|^{s1} |eta|^{s2} when homogeneous. A homogeneous weight with a negative
/// exponent needs the matching zero plane to be empty (zero-x-mean for s1 < 0).
double sobolev_aniso(const SpectralField& u, AnisoIndex idx, bool homogeneous);
/// ||p u^||, p = 1 + |xi|^{alpha/2} + |eta|/|xi|. Requires zero-x-mean.
double energy_space_norm(const DispersionParams& params, const SpectralField& u);

/// (integral over the box of |u|^r)^{1/r} from the samples; r = inf gives max |u|.
double lebesgue_norm(const PhysicalField& p, double r);

/// Discrete L^q_t L^r_{x,y} norm: trapezoidal weights over equally spaced
/// snapshots, grid quadrature in space after zero-padding each snapshot by
/// `padding` (so |u|^r is integrated exactly for band-limited u when
/// padding >= r/2). q = inf takes the maximum over snapshots and accepts a
/// single snapshot; finite q needs at least two.
double spacetime_norm(const Trajectory& trajectory, const MixedNormSpec& spec, int padding = 1,
                      unsigned workers = 0);

}  // namespace fkpi
