#pragma once

#include <cstdint>
#include <vector>

#include "fkpi/field.hpp"
#include "fkpi/norms.hpp"
#include "fkpi/records.hpp"
#include "fkpi/symbols.hpp"

namespace fkpi {

/// Sweep description shared by the ratio probes.
struct ProbeSweep {
  double alpha = 3.0;
  std::vector<double> dyadic_range;
  int trials_per_point = 1;
  std::uint64_t seed = 0;
  /// Accepted interval for the log-log slope.
  double band_lo = -std::numeric_limits<double>::infinity();
  double band_hi = 0.1;
  void validate() const;
};

/// Envelope representation: the field's lattice frequency k stands for the physical
/// frequency carrier + k. |u| is unchanged, so L^p norms need only the envelope.
struct Carrier {
  double xi = 0.0;
  double eta = 0.0;
};

/// gamma = (1 - 2/r)(1/2 - alpha/4) of the linear Strichartz estimate.
double strichartz_gamma(const DispersionParams& params, const MixedNormSpec& spec);

/// ||D_x^{-gamma} U(t) u0||_{L^q([0,T]; L^r)} / ||u0||_{L^2} with `snapshots` equally
/// spaced times. Zero u0 gives a record flagged "degenerate".
ExperimentRecord linear_strichartz_ratio(const DispersionParams& params, const MixedNormSpec& spec,
                                         const SpectralField& u0, double T, int snapshots,
                                         Carrier carrier = {});

/// ||U(t) u0||_{L^4([0,1]; L^4)} / (K^{1/4} N^{1/8} ||u0||) for u0 supported in
/// N <= |xi| <= N + K. Throws std::invalid_argument on a support violation.
ExperimentRecord lowfreq_l4_ratio(const DispersionParams& params, double n, double k,
                                  const SpectralField& u0, int snapshots = 129,
                                  Carrier carrier = {});

/// Options common to the sweep drivers. exponent_offset is added to the comparator's
/// exponent of the sweep variable (the negative control uses -1/4).
struct SweepOptions {
  double exponent_offset = 0.0;
  unsigned workers = 0;
};

/// (q, r) sweep over dyadic N with anisotropically scaled packets at |xi| ~ N.
ProbeResult linear_strichartz_sweep(const DispersionParams& params, const MixedNormSpec& spec,
                                    const ProbeSweep& sweep, SweepOptions opts = {});

/// Low-frequency L^4 sweep with K = N over dyadic N < 1; the slope bound comes from the sweep.
ProbeResult lowfreq_sweep(const DispersionParams& params, const ProbeSweep& sweep,
                          SweepOptions opts = {});

/// ||P_{N1} U u0 P_{N2} U v0||_{L^2_{t,x,y}} / (||u0|| ||v0||) against
/// N2^{1/2} N1^{-alpha/4}, maximized over `trials` random resonant configurations.
ExperimentRecord bilinear_ratio(const DispersionParams& params, double n1, double n2, int trials,
                                std::uint64_t seed, double amplitude_u = 1.0,
                                double amplitude_v = 1.0, double exponent_offset = 0.0);

ProbeResult bilinear_sweep(const DispersionParams& params, double n2, const ProbeSweep& sweep,
                           SweepOptions opts = {});

/// Default zero-x-mean profile for the scaling fit: d_x of a unit Gaussian.
SpectralField scaling_profile();

/// Rescales `profile` by phi_lambda^(xi, eta) = lambda^{1 - alpha + (alpha+2)/2}
/// phi^(lambda xi, lambda^{(alpha+2)/2} eta), evaluating phi^ off the lattice by its
/// spectrally accurate trapezoid sum. Throws std::runtime_error when more than 1% of
/// the rescaled energy falls outside the grid.
SpectralField rescale_profile(const DispersionParams& params, const SpectralField& profile,
                              double lambda);

/// Fit of log ||phi_lambda||_{H-dot^{s1,s2}} against log lambda; pass when within
/// 0.02 of -3 alpha/4 + 1 - s1 - (alpha/2 + 1) s2.
ProbeResult scaling_exponent_fit(const DispersionParams& params, AnisoIndex idx,
                                 const std::vector<double>& lambdas,
                                 const SpectralField& profile = scaling_profile());

/// Growth of ||u_2(t)||_{H^{sbar}} over N_list (>= 5 dyadic points).
ProbeResult illposedness_growth_study(const DispersionParams& params, double theta,
                                      const std::vector<double>& n_list, AnisoIndex sbar,
                                      double t = 1.0, int quad_res = 12, unsigned workers = 0);

}  // namespace fkpi
