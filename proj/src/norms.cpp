#include "fkpi/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fkpi/parallel.hpp"

namespace fkpi {

namespace {

void require_real(const SpectralField& u, const char* op) {
  if (!u.is_real()) throw std::invalid_argument(std::string(op) + ": field must be real-constrained");
}

// |x|^s with 0^0 = 1; a zero base with a negative exponent yields infinity.
double abs_pow(double x, double s) {
  if (s == 0.0) return 1.0;
  const double a = std::abs(x);
  if (a == 0.0) return s > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::pow(a, s);
}

}  // namespace

MixedNormSpec::MixedNormSpec(double q, double r) : q_(q), r_(r) {
  if (!(q > 2.0) || std::isnan(q)) throw std::invalid_argument("MixedNormSpec: q must lie in (2, inf]");
  if (!(r >= 2.0) || std::isnan(r)) throw std::invalid_argument("MixedNormSpec: r must lie in [2, inf]");
  const double iq = std::isinf(q) ? 0.0 : 1.0 / q;
  const double ir = std::isinf(r) ? 0.0 : 1.0 / r;
  admissible_ = std::abs(iq + ir - 0.5) < 1e-12;
}

double mass(const SpectralField& u) {
  require_real(u, "mass");
  const PhysicalField p = to_physical(u);
  double s = 0.0;
  for (const Complex& v : p.samples) s += v.real() * v.real();
  return s * u.grid().cell_area();
}

double mass_spectral(const SpectralField& u) {
  double s = 0.0;
  for (const Complex& c : u.coeffs()) s += std::norm(c);
  return u.grid().area() * s;
}

double quadratic_energy(const DispersionParams& params, const SpectralField& u) {
  require_real(u, "quadratic_energy");
  u.require_zero_x_mean("quadratic_energy");
  const FrequencyGrid& g = u.grid();
  const double a = params.alpha();
  double s = 0.0;
  for (int i = 0; i < g.modes_x(); ++i) {
    const double xi = g.xi(i);
    if (xi == 0.0) continue;
    const double dx = std::pow(std::abs(xi), a);
    for (int j = 0; j < g.modes_y(); ++j) {
      const double ratio = g.eta(j) / xi;
      s += (dx + ratio * ratio) * std::norm(u.at(i, j));
    }
  }
  return 0.5 * g.area() * s;
}

double cubic_energy(const SpectralField& u) {
  require_real(u, "cubic_energy");
  const SpectralField sq = dealiased_product(u, u);
  const SpectralField ut = dealias_truncate(u);
  double s = 0.0;
  for (std::size_t k = 0; k < sq.coeffs().size(); ++k) {
    s += (std::conj(ut.coeffs()[k]) * sq.coeffs()[k]).real();
  }
  return u.grid().area() * s / 6.0;
}

double energy_alpha(const DispersionParams& params, const SpectralField& u) {
  return quadratic_energy(params, u) + cubic_energy(u);
}

double sobolev_aniso(const SpectralField& u, AnisoIndex idx, bool homogeneous) {
  const FrequencyGrid& g = u.grid();
  if (homogeneous && idx.s1 < 0.0) u.require_zero_x_mean("sobolev_aniso");
  double s = 0.0;
  for (int i = 0; i < g.modes_x(); ++i) {
    const double xi = g.xi(i);
    const double wx = homogeneous ? abs_pow(xi, idx.s1) : std::pow(1.0 + xi * xi, idx.s1 / 2.0);
    for (int j = 0; j < g.modes_y(); ++j) {
      const double c2 = std::norm(u.at(i, j));
      if (c2 == 0.0) continue;
      const double eta = g.eta(j);
      const double wy = homogeneous ? abs_pow(eta, idx.s2) : std::pow(1.0 + eta * eta, idx.s2 / 2.0);
      const double w = wx * wy;
      if (std::isinf(w)) {
        throw std::invalid_argument(
            "sobolev_aniso: homogeneous weight is singular on a populated mode (eta = 0 with s2 < 0)");
      }
      s += w * w * c2;
    }
  }
  return std::sqrt(g.area() * s);
}

double energy_space_norm(const DispersionParams& params, const SpectralField& u) {
  u.require_zero_x_mean("energy_space_norm");
  const FrequencyGrid& g = u.grid();
  const double half = params.alpha() / 2.0;
  double s = 0.0;
  for (int i = 0; i < g.modes_x(); ++i) {
    const double xi = g.xi(i);
    if (xi == 0.0) continue;
    for (int j = 0; j < g.modes_y(); ++j) {
      const double p = 1.0 + std::pow(std::abs(xi), half) + std::abs(g.eta(j)) / std::abs(xi);
      s += p * p * std::norm(u.at(i, j));
    }
  }
  return std::sqrt(g.area() * s);
}

double lebesgue_norm(const PhysicalField& p, double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("lebesgue_norm: r must be >= 1");
  if (std::isinf(r)) {
    double m = 0.0;
    for (const Complex& v : p.samples) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  if (r == 2.0) {
    for (const Complex& v : p.samples) s += std::norm(v);
  } else if (r == 4.0) {
    for (const Complex& v : p.samples) {
      const double n = std::norm(v);
      s += n * n;
    }
  } else {
    for (const Complex& v : p.samples) s += std::pow(std::abs(v), r);
  }
  return std::pow(s * p.grid.cell_area(), 1.0 / r);
}

double spacetime_norm(const Trajectory& trajectory, const MixedNormSpec& spec, int padding,
                      unsigned workers) {
  const bool q_inf = std::isinf(spec.q());
  if (trajectory.empty() || (!q_inf && trajectory.size() < 2)) {
    throw std::invalid_argument("spacetime_norm: need at least two snapshots (one when q = inf)");
  }
  if (trajectory.size() >= 2) {
    const double h = trajectory[1].t - trajectory[0].t;
    if (!(h > 0.0)) throw std::invalid_argument("spacetime_norm: snapshot times must increase");
    for (std::size_t k = 1; k < trajectory.size(); ++k) {
      const double hk = trajectory[k].t - trajectory[k - 1].t;
      if (std::abs(hk - h) > 1e-9 * std::max(std::abs(h), std::abs(trajectory[k].t))) {
        std::ostringstream msg;
        msg << "spacetime_norm: snapshots are not equally spaced (step " << k << ")";
        throw std::invalid_argument(msg.str());
      }
    }
  }
  std::vector<double> spatial(trajectory.size());
  parallel_for(
      trajectory.size(),
      [&](std::size_t k) {
        spatial[k] = lebesgue_norm(to_physical(zero_pad(trajectory[k].field, padding)), spec.r());
      },
      workers);
  if (q_inf) return *std::max_element(spatial.begin(), spatial.end());
  const double h = trajectory[1].t - trajectory[0].t;
  double s = 0.0;
  for (std::size_t k = 0; k < spatial.size(); ++k) {
    const double w = (k == 0 || k + 1 == spatial.size()) ? 0.5 * h : h;
    s += w * std::pow(spatial[k], spec.q());
  }
  return std::pow(s, 1.0 / spec.q());
}

}  // namespace fkpi
