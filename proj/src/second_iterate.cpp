#include "fkpi/second_iterate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "fkpi/parallel.hpp"
#include "fkpi/quadrature.hpp"

namespace fkpi {

namespace {

double weight_sq(double xi, double eta, AnisoIndex s) {
  return std::pow(1.0 + xi * xi, s.s1) * std::pow(1.0 + eta * eta, s.s2);
}

void check_inputs(double n, double gamma) {
  if (!(n > 0.0) || !std::isfinite(n) || !(gamma > 0.0) || !(gamma < n)) {
    throw std::invalid_argument("second iterate: need 0 < gamma < N");
  }
}

double d2_eta_center(const DispersionParams& params, double n) {
  return std::sqrt(1.0 + params.alpha()) * std::pow(n, (params.alpha() + 2.0) / 2.0);
}

}  // namespace

double illposedness_gamma(const DispersionParams& params, double n, double theta) {
  return std::pow(n, -(params.alpha() - 1.0) / 2.0 - theta);
}

std::array<FreqBoxSpec, 2> illposedness_boxes(const DispersionParams& params, double n,
                                               double gamma) {
  check_inputs(n, gamma);
  const double root = std::sqrt(1.0 + params.alpha());
  const double eta_c = d2_eta_center(params, n);
  FreqBoxSpec d1{gamma / 2.0, gamma, -root * gamma * gamma, root * gamma * gamma, true};
  FreqBoxSpec d2{n, n + gamma, eta_c, eta_c + gamma * gamma, true};
  d1.validate();
  // d2 may collapse in eta once gamma^2 < ulp(eta_c); nothing downstream uses its edges.
  return {d1, d2};
}

std::array<double, 2> box_data_norms(const DispersionParams& params, double n, double gamma,
                                     AnisoIndex sbar, int quad_res) {
  const auto boxes = illposedness_boxes(params, n, gamma);
  const GaussRule base = gauss_legendre(quad_res);
  // Boxes are integrated in offsets from a corner: at large N the absolute eta of D2
  // is ~N^{(alpha+2)/2} and its width gamma^2 falls below one ulp.
  auto integral = [&](double x0, double width, double e0, double height) {
    const double xs[2] = {0.0, width};
    const double es[2] = {0.0, height};
    const GaussRule rx = composite_rule(base, xs);
    const GaussRule re = composite_rule(base, es);
    double s = 0.0;
    for (std::size_t i = 0; i < rx.nodes.size(); ++i) {
      for (std::size_t j = 0; j < re.nodes.size(); ++j) {
        s += rx.weights[i] * re.weights[j] * weight_sq(x0 + rx.nodes[i], e0 + re.nodes[j], sbar);
      }
    }
    // The mirror copy carries the same (even) weight.
    return 2.0 * s;
  };
  const FreqBoxSpec& d1 = boxes[0];
  const double eta_c = d2_eta_center(params, n);
  const double amp1 = std::pow(gamma, -1.5);
  const double amp2 =
      amp1 * std::pow(n, -sbar.s1 - (1.0 + params.alpha() / 2.0) * sbar.s2);
  return {amp1 * std::sqrt(integral(d1.xi_lo, d1.xi_hi - d1.xi_lo, d1.eta_lo, d1.eta_hi - d1.eta_lo)),
          amp2 * std::sqrt(integral(n, gamma, eta_c, gamma * gamma))};
}

std::complex<double> duhamel_kernel(double w, double t) {
  const double z = t * w;
  if (std::abs(z) < 1e-4) {
    return std::complex<double>(0.0, -t) * std::complex<double>(1.0 - z * z / 6.0, -z / 2.0);
  }
  return std::complex<double>(std::cos(z) - 1.0, -std::sin(z)) / w;
}

double local_resonance(double alpha, double n, double eta_c, double xi1, double eta1, double x_out,
                       double e_out) {
  const double xi2 = n + x_out - xi1;
  const double a1 = alpha + 1.0;
  // (xi1 + xi2)^{a+1} - xi2^{a+1} without cancellation (xi2 > 0, |xi1| < xi2).
  const double lead = std::pow(xi2, a1) * std::expm1(a1 * std::log1p(xi1 / xi2));
  const double omega1 = lead - signed_power(xi1, alpha);
  const double c = eta1 * xi2 - (eta_c + (e_out - eta1)) * xi1;
  const double d = xi1 * xi2 * (xi1 + xi2);
  return omega1 - c * c / d;
}

double second_iterate_norm(const DispersionParams& params, double n, double gamma, AnisoIndex sbar,
                           double t, int quad_res, unsigned workers) {
  check_inputs(n, gamma);
  if (quad_res < 1) throw std::invalid_argument("second iterate: quad_res must be positive");
  const double a = params.alpha();
  const double root = std::sqrt(1.0 + a);
  const double big_a = root * gamma * gamma;
  const double g2 = gamma * gamma;
  const double eta_c = root * std::pow(n, (a + 2.0) / 2.0);
  const double area1 = 2.0 * root * gamma * gamma * gamma;
  const double area2 = 2.0 * gamma * gamma * gamma;
  const double prefactor =
      1.0 / (std::sqrt(area1 * area2) * std::pow(n, sbar.s1 + (1.0 + a / 2.0) * sbar.s2));

  const GaussRule base = gauss_legendre(quad_res);
  // Output panels split where the inner integration limits have kinks.
  const double xb[7] = {-gamma, -gamma / 2.0, 0.0, gamma / 2.0, gamma, 1.5 * gamma, 2.0 * gamma};
  const double eb[4] = {-big_a, -big_a + g2, big_a, big_a + g2};
  const GaussRule out_x = composite_rule(base, xb);
  const GaussRule out_e = composite_rule(base, eb);
  const double pieces[2][2] = {{gamma / 2.0, gamma}, {-gamma, -gamma / 2.0}};

  std::vector<double> row(out_x.nodes.size(), 0.0);
  parallel_for(
      out_x.nodes.size(),
      [&](std::size_t ix) {
        const double xo = out_x.nodes[ix];
        double acc = 0.0;
        for (std::size_t ie = 0; ie < out_e.nodes.size(); ++ie) {
          const double eo = out_e.nodes[ie];
          std::complex<double> inner = 0.0;
          const double elo = std::max(-big_a, eo - g2);
          const double ehi = std::min(big_a, eo);
          if (!(ehi > elo)) continue;
          const double es[2] = {elo, ehi};
          const GaussRule r1e = composite_rule(base, es);
          for (const auto& piece : pieces) {
            const double xlo = std::max(piece[0], xo - gamma);
            const double xhi = std::min(piece[1], xo);
            if (!(xhi > xlo)) continue;
            const double xs[2] = {xlo, xhi};
            const GaussRule r1x = composite_rule(base, xs);
            for (std::size_t p = 0; p < r1x.nodes.size(); ++p) {
              for (std::size_t q = 0; q < r1e.nodes.size(); ++q) {
                const double w = local_resonance(a, n, eta_c, r1x.nodes[p], r1e.nodes[q], xo, eo);
                inner += r1x.weights[p] * r1e.weights[q] * duhamel_kernel(w, t);
              }
            }
          }
          const double xi = n + xo;
          const double amplitude = xi * prefactor * std::abs(inner);
          acc += out_e.weights[ie] * amplitude * amplitude * weight_sq(xi, eta_c + eo, sbar);
        }
        row[ix] = out_x.weights[ix] * acc;
      },
      workers);
  double total = 0.0;
  for (double r : row) total += r;
  return std::sqrt(total);
}

SecondIterateResult second_iterate_boxdata(const DispersionParams& params, double n, double gamma,
                                           AnisoIndex sbar, double t, int quad_res,
                                           double tolerance, unsigned workers) {
  if (quad_res < 8) throw std::invalid_argument("second_iterate_boxdata: quad_res must be >= 8");
  SecondIterateResult r;
  r.quad_res = quad_res;
  r.norm = second_iterate_norm(params, n, gamma, sbar, t, quad_res, workers);
  r.norm_refined = second_iterate_norm(params, n, gamma, sbar, t, 2 * quad_res, workers);
  const double scale = std::max(std::abs(r.norm), std::abs(r.norm_refined));
  r.relative_change = scale > 0.0 ? std::abs(r.norm - r.norm_refined) / scale : 0.0;
  if (r.relative_change > tolerance) {
    std::ostringstream msg;
    msg << "second_iterate_boxdata: quadrature not converged at N=" << n << " (quad_res "
        << quad_res << " -> " << 2 * quad_res << " changes the norm by " << r.relative_change << ")";
    throw QuadratureError(msg.str());
  }
  return r;
}

}  // namespace fkpi
