#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

#include "fkpi/evolution.hpp"
#include "fkpi/norms.hpp"
#include "fkpi/symbols.hpp"

namespace fkpi {

/// gamma = N^{-(alpha-1)/2 - theta}.
double illposedness_gamma(const DispersionParams& params, double n, double theta);

/// The two boxes of the construction, each mirrored:
/// D1 = [gamma/2, gamma] x [-sqrt(1+alpha) gamma^2, sqrt(1+alpha) gamma^2],
/// D2 = [N, N+gamma] x sqrt(1+alpha) N^{(alpha+2)/2} + [0, gamma^2].
/// D2's eta edges are only descriptive at large N (its height drops below one ulp);
/// the quadratures below work in offsets.
std::array<FreqBoxSpec, 2> illposedness_boxes(const DispersionParams& params, double n,
                                               double gamma);

/// ||phi_1||, ||phi_2|| in H^{s1,s2}(R^2) (continuum Fourier side, no 2 pi factors) with
/// phi_1^ = gamma^{-3/2} 1_{D1}, phi_2^ = gamma^{-3/2} N^{-s1-(1+alpha/2)s2} 1_{D2},
/// by Gauss-Legendre quadrature of the weight over each box.
std::array<double, 2> box_data_norms(const DispersionParams& params, double n, double gamma,
                                     AnisoIndex sbar, int quad_res = 16);

/// (e^{-i t w} - 1)/w, with the series -i t (1 - i z/2 - z^2/6), z = t w, for |z| < 1e-4.
std::complex<double> duhamel_kernel(double w, double t);

/// Omega(xi1, eta1, xi - xi1, eta - eta1) in coordinates local to the boxes:
/// xi = N + x_out, eta = eta_c + e_out with eta_c = sqrt(1+alpha) N^{(alpha+2)/2}.
/// Avoids the cancellation of the direct formula at large N.
double local_resonance(double alpha, double n, double eta_c, double xi1, double eta1, double x_out,
                       double e_out);

/// Raised when doubling quad_res moves the norm by more than the tolerance.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ||u_2(t)||_{H^{sbar}} over the positive-frequency copy of the high x low
/// interaction, with c = 1, at a fixed number of Gauss nodes per panel.
double second_iterate_norm(const DispersionParams& params, double n, double gamma, AnisoIndex sbar,
                           double t, int quad_res, unsigned workers = 0);

struct SecondIterateResult {
  double norm = 0.0;
  /// Same quantity with 2 * quad_res nodes per panel.
  double norm_refined = 0.0;
  double relative_change = 0.0;
  int quad_res = 0;
};

/// second_iterate_norm at quad_res and 2 quad_res; throws QuadratureError when the
/// two differ by more than `tolerance` relative. quad_res must be >= 8.
SecondIterateResult second_iterate_boxdata(const DispersionParams& params, double n, double gamma,
                                           AnisoIndex sbar, double t, int quad_res,
                                           double tolerance = 0.01, unsigned workers = 0);

}  // namespace fkpi
