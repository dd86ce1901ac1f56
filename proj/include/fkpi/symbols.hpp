#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace fkpi {

/// Dispersion exponent alpha, validated to lie in [2, 4).
///
/// The closed endpoint 2 is admitted because the classical case is the
/// reference point of the ill-posedness sweep.
class DispersionParams {
 public:
  explicit DispersionParams(double alpha);
  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

struct FreqPoint {
  double xi;
  double eta;
};

struct FreqPair {
  FreqPoint p1;
  FreqPoint p2;
  FreqPoint sum() const { return {p1.xi + p2.xi, p1.eta + p2.eta}; }
};

/// Throw std::invalid_argument if xi == 0 (or any coordinate is not finite).
void validate(const FreqPoint& p);
/// Also rejects xi1 + xi2 == 0.
void validate(const FreqPair& q);

/// sign(x) |x|^(alpha + 1), i.e. |x|^alpha x.
double signed_power(double x, double alpha);

/// omega(xi, eta) = |xi|^alpha xi + eta^2/xi.
double omega(const DispersionParams& params, const FreqPoint& p);
/// (d/dxi, d/deta) omega = ((alpha+1)|xi|^alpha - eta^2/xi^2, 2 eta/xi).
std::array<double, 2> grad_omega(const DispersionParams& params, const FreqPoint& p);

/// Closed partial-fraction form Omega^1 - Omega^2.
double resonance_fraction(const DispersionParams& params, const FreqPair& q);
/// omega(p1 + p2) - omega(p1) - omega(p2), evaluated directly.
double resonance_difference(const DispersionParams& params, const FreqPair& q);
/// Largest of |omega(p1 + p2)|, |omega(p1)|, |omega(p2)|: the scale against which
/// the rounding error of resonance_difference is measured.
double resonance_term_scale(const DispersionParams& params, const FreqPair& q);
/// |xi1+xi2|^alpha (xi1+xi2) - |xi1|^alpha xi1 - |xi2|^alpha xi2.
double omega1_part(const DispersionParams& params, const FreqPair& q);
/// (eta1 xi2 - eta2 xi1)^2 / (xi1 xi2 (xi1 + xi2)).
double omega2_part(const DispersionParams& params, const FreqPair& q);

/// (1, -d_xi omega, -d_eta omega).
std::array<double, 3> surface_normal(const DispersionParams& params, const FreqPoint& p);
/// det[n(p1); n(p2); n(p1 + p2)] by cofactor expansion.
double normal_determinant_numeric(const DispersionParams& params, const FreqPair& q);
/// Closed form of the same determinant.
double normal_determinant_closed(const DispersionParams& params, const FreqPair& q);

// Scans -------------------------------------------------------------------------

struct ResonanceScanReport {
  double alpha = 0.0;
  double n = 0.0;
  double gamma = 0.0;
  /// -log_N(gamma) - (alpha - 1)/2, the theta implied by (N, gamma).
  double theta = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  /// Range of |Omega^1| / (N^alpha gamma).
  double omega1_ratio_min = 0.0;
  double omega1_ratio_max = 0.0;
  /// Range of |Omega| / (N^(alpha-1) gamma^2).
  double omega_ratio_min = 0.0;
  double omega_ratio_max = 0.0;
};

/// Uniform samples from the box pair D1 x D2 of the ill-posedness construction:
/// xi1 in [gamma/2, gamma], |eta1| <= sqrt(1+alpha) gamma^2,
/// xi2 in [N, N + gamma], eta2 in sqrt(1+alpha) N^((alpha+2)/2) + [0, gamma^2].
/// Throws for non-positive or non-finite inputs, gamma >= N, or boxes that are
/// degenerate in floating point.
ResonanceScanReport resonance_size_scan(const DispersionParams& params, double n, double gamma,
                                        std::size_t samples, std::uint64_t seed,
                                        unsigned workers = 0);

struct TransversalityReport {
  double alpha = 0.0;
  double n_max = 0.0;
  double n_min = 0.0;
  double threshold = 0.0;
  std::size_t requested = 0;
  std::size_t accepted = 0;
  std::size_t attempts = 0;
  std::uint64_t seed = 0;
  /// Range of |eta1 xi2 - eta2 xi1| / (N_max^(alpha/2+1) N_min).
  double cross_ratio_min = 0.0;
  double cross_ratio_max = 0.0;
  /// Range of |grad omega(p1) - grad omega(p2)| / N_max^(alpha/2).
  double gradient_ratio_min = 0.0;
  double gradient_ratio_max = 0.0;
};

/// Rejection sampling of the resonant set |Omega| <= threshold |Omega^1| with
/// N_max/2 < |xi1| <= N_max, N_min/2 < |xi2| <= N_min (random signs) and slopes
/// eta_i/xi_i uniform in [-S, S], S = 2 sqrt(alpha+1) N_max^(alpha/2).
/// Throws std::runtime_error when no sample is accepted within the attempt budget
/// (max_attempts_per_sample * samples).
TransversalityReport transversality_check(const DispersionParams& params, double n_max,
                                          double n_min, std::size_t samples, std::uint64_t seed,
                                          double threshold = 0.1,
                                          std::size_t max_attempts_per_sample = 1000,
                                          unsigned workers = 0);

}  // namespace fkpi
