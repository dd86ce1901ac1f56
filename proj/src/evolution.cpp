#include "fkpi/evolution.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "fkpi/fft.hpp"

namespace fkpi {

namespace {

// phi_0..phi_3 at z: phi_k(z) = sum_n z^n/(n+k)!. Taylor inside the unit disc,
// the recursion phi_{k+1} = (phi_k - 1/k!)/z outside it.
std::array<Complex, 4> phi_functions(Complex z) {
  std::array<Complex, 4> phi;
  if (std::abs(z) < 1.0) {
    for (int k = 0; k < 4; ++k) {
      Complex term = 1.0;
      for (int n = 1; n <= k; ++n) term /= static_cast<double>(n);
      Complex sum = term;
      for (int n = 1; n < 30; ++n) {
        term *= z / static_cast<double>(n + k);
        sum += term;
        if (std::abs(term) < 1e-18) break;
      }
      phi[k] = sum;
    }
    return phi;
  }
  phi[0] = std::exp(z);
  phi[1] = (phi[0] - 1.0) / z;
  phi[2] = (phi[1] - 1.0) / z;
  phi[3] = (phi[2] - 0.5) / z;
  return phi;
}

// omega on the lattice, zero on the xi = 0 plane (that plane is never populated).
std::vector<double> omega_table(const DispersionParams& params, const FrequencyGrid& g) {
  std::vector<double> w(g.size(), 0.0);
  for (int i = 0; i < g.modes_x(); ++i) {
    const double xi = g.xi(i);
    if (xi == 0.0) continue;
    for (int j = 0; j < g.modes_y(); ++j) w[g.index(i, j)] = omega(params, {xi, g.eta(j)});
  }
  return w;
}

void check_finite(const std::vector<Complex>& v, long index) {
  for (const Complex& c : v) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      std::ostringstream msg;
      msg << "evolution produced non-finite coefficients";
      if (index >= 0) msg << " at step " << index;
      throw EvolutionError(msg.str(), index);
    }
  }
}

// (1/2) d_x (u^2) on raw coefficient storage.
void half_dx_square(const FrequencyGrid& g, const std::vector<Complex>& v, bool real, bool dealias,
                    std::vector<Complex>& out) {
  out = v;
  if (dealias) {
    for (int i = 0; i < g.modes_x(); ++i) {
      for (int j = 0; j < g.modes_y(); ++j) {
        if (!g.in_dealias_ball(i, j)) out[g.index(i, j)] = Complex{};
      }
    }
  }
  fft::transform_2d(g.modes_x(), g.modes_y(), out, fft::Direction::backward);
  if (real) {
    for (Complex& s : out) s = Complex(s.real() * s.real(), 0.0);
  } else {
    for (Complex& s : out) s *= s;
  }
  fft::transform_2d(g.modes_x(), g.modes_y(), out, fft::Direction::forward);
  const double scale = 0.5 / static_cast<double>(g.size());
  for (int i = 0; i < g.modes_x(); ++i) {
    const Complex ixi(0.0, g.xi(i) * scale);
    for (int j = 0; j < g.modes_y(); ++j) {
      const std::size_t k = g.index(i, j);
      if (g.nyquist(i, j) || (dealias && !g.in_dealias_ball(i, j))) {
        out[k] = Complex{};
      } else {
        out[k] *= ixi;
      }
    }
  }
}

}  // namespace

void FreqBoxSpec::validate() const {
  if (!std::isfinite(xi_lo) || !std::isfinite(xi_hi) || !std::isfinite(eta_lo) ||
      !std::isfinite(eta_hi)) {
    throw std::invalid_argument("FreqBoxSpec: bounds must be finite");
  }
  if (!(xi_lo < xi_hi) || !(eta_lo < eta_hi)) {
    throw std::invalid_argument("FreqBoxSpec: ranges must be nonempty");
  }
  if (!(xi_lo > 0.0)) throw std::invalid_argument("FreqBoxSpec: xi range must exclude 0 (need 0 < a)");
}

double FreqBoxSpec::area() const {
  return (mirrored ? 2.0 : 1.0) * (xi_hi - xi_lo) * (eta_hi - eta_lo);
}

bool FreqBoxSpec::contains(double xi, double eta) const {
  auto in = [&](double x, double e) {
    return x >= xi_lo && x <= xi_hi && e >= eta_lo && e <= eta_hi;
  };
  return in(xi, eta) || (mirrored && in(-xi, -eta));
}

std::string to_string(Scheme s) { return s == Scheme::etdrk4 ? "etdrk4" : "strang"; }

Scheme parse_scheme(const std::string& name) {
  if (name == "etdrk4") return Scheme::etdrk4;
  if (name == "strang") return Scheme::strang;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected etdrk4 or strang)");
}

void EvolutionConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("evolution.dt must be positive");
  if (!(T >= 0.0) || !std::isfinite(T)) throw std::invalid_argument("evolution.T must be >= 0");
  if (T > 0.0 && dt > T) throw std::invalid_argument("evolution.dt must not exceed evolution.T");
  if (snapshot_stride < 1) throw std::invalid_argument("evolution.snapshot_stride must be >= 1");
}

SpectralField propagate_linear(const DispersionParams& params, const SpectralField& f, double t) {
  f.require_zero_x_mean("propagate_linear");
  if (t == 0.0) return f;
  return apply_multiplier(f, [&](double xi, double eta) {
    if (xi == 0.0) return Complex(1.0, 0.0);
    const double phase = t * omega(params, {xi, eta});
    return Complex(std::cos(phase), std::sin(phase));
  });
}

SpectralField nonlinearity(const SpectralField& u, bool dealias) {
  if (!u.is_real()) throw std::invalid_argument("nonlinearity: field must be real-constrained");
  std::vector<Complex> out;
  half_dx_square(u.grid(), std::vector<Complex>(u.coeffs().begin(), u.coeffs().end()), true, dealias,
                 out);
  return SpectralField(u.grid(), std::move(out), true);
}

Stepper::Stepper(const DispersionParams& params, const FrequencyGrid& grid, double dt, Scheme scheme,
                 bool dealias, bool nonlinear)
    : grid_(grid), dt_(dt), scheme_(scheme), dealias_(dealias), nonlinear_(nonlinear) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("Stepper: dt must be positive");
  const std::vector<double> w = omega_table(params, grid);
  const std::size_t n = grid.size();
  e_full_.resize(n);
  e_half_.resize(n);
  if (scheme == Scheme::etdrk4) {
    q_.resize(n);
    f1_.resize(n);
    f2_.resize(n);
    f3_.resize(n);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double phase = w[k] * dt;
    e_full_[k] = Complex(std::cos(phase), std::sin(phase));
    e_half_[k] = Complex(std::cos(phase / 2.0), std::sin(phase / 2.0));
    if (scheme != Scheme::etdrk4) continue;
    const Complex z(0.0, phase);
    const auto p = phi_functions(z);
    const auto ph = phi_functions(z / 2.0);
    q_[k] = 0.5 * dt * ph[1];
    f1_[k] = dt * (p[1] - 3.0 * p[2] + 4.0 * p[3]);
    f2_[k] = dt * (p[2] - 2.0 * p[3]);
    f3_[k] = dt * (-p[2] + 4.0 * p[3]);
  }
}

SpectralField Stepper::step(const SpectralField& u) const {
  if (!(u.grid() == grid_)) throw std::invalid_argument("Stepper::step: grid mismatch");
  const std::size_t n = grid_.size();
  const std::vector<Complex> v(u.coeffs().begin(), u.coeffs().end());
  std::vector<Complex> next(n);
  if (!nonlinear_) {
    for (std::size_t k = 0; k < n; ++k) next[k] = e_full_[k] * v[k];
  } else if (scheme_ == Scheme::etdrk4) {
    auto nl = [&](const std::vector<Complex>& x, std::vector<Complex>& out) {
      half_dx_square(grid_, x, u.is_real(), dealias_, out);
    };
    std::vector<Complex> nv, na, nb, nc, a(n), b(n), c(n);
    nl(v, nv);
    for (std::size_t k = 0; k < n; ++k) a[k] = e_half_[k] * v[k] + q_[k] * nv[k];
    nl(a, na);
    for (std::size_t k = 0; k < n; ++k) b[k] = e_half_[k] * v[k] + q_[k] * na[k];
    nl(b, nb);
    for (std::size_t k = 0; k < n; ++k) c[k] = e_half_[k] * a[k] + q_[k] * (2.0 * nb[k] - nv[k]);
    nl(c, nc);
    for (std::size_t k = 0; k < n; ++k) {
      next[k] = e_full_[k] * v[k] + f1_[k] * nv[k] + 2.0 * f2_[k] * (na[k] + nb[k]) + f3_[k] * nc[k];
    }
  } else {
    // Strang: half linear flow, midpoint RK2 for the nonlinear flow, half linear flow.
    std::vector<Complex> w(n), mid(n), nw, nm;
    for (std::size_t k = 0; k < n; ++k) w[k] = e_half_[k] * v[k];
    half_dx_square(grid_, w, u.is_real(), dealias_, nw);
    for (std::size_t k = 0; k < n; ++k) mid[k] = w[k] + 0.5 * dt_ * nw[k];
    half_dx_square(grid_, mid, u.is_real(), dealias_, nm);
    for (std::size_t k = 0; k < n; ++k) next[k] = e_half_[k] * (w[k] + dt_ * nm[k]);
  }
  check_finite(next, -1);
  return SpectralField(grid_, std::move(next), u.is_real());
}

SpectralField step(const DispersionParams& params, const SpectralField& u, double dt, Scheme scheme,
                   bool dealias, bool nonlinear) {
  return Stepper(params, u.grid(), dt, scheme, dealias, nonlinear).step(u);
}

long step_count(double T, double dt) {
  if (T == 0.0) return 0;
  const double ratio = T / dt;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * ratio && nearest >= 1.0) return static_cast<long>(nearest);
  return static_cast<long>(std::ceil(ratio));
}

Trajectory solve(const DispersionParams& params, const SpectralField& u0,
                 const EvolutionConfig& config) {
  config.validate();
  const long steps = step_count(config.T, config.dt);
  Trajectory out;
  out.push_back({0.0, u0});
  if (steps == 0) return out;
  const double h = config.T / static_cast<double>(steps);
  const Stepper stepper(params, u0.grid(), h, config.scheme, config.dealias, config.nonlinear);
  SpectralField u = u0;
  for (long s = 1; s <= steps; ++s) {
    try {
      u = stepper.step(u);
    } catch (const EvolutionError& e) {
      std::ostringstream msg;
      msg << "evolution produced non-finite coefficients at step " << s << " (t = " << s * h << ")";
      throw EvolutionError(msg.str(), s);
    }
    if (s % config.snapshot_stride == 0) out.push_back({static_cast<double>(s) * h, u});
  }
  return out;
}

std::vector<SpectralField> picard_sequence(const DispersionParams& params, const SpectralField& u0,
                                           int k, double T, double dt) {
  if (k < 0) throw std::invalid_argument("picard_iterate: k must be >= 0");
  if (!(dt > 0.0) || !(T >= 0.0)) throw std::invalid_argument("picard_iterate: need dt > 0, T >= 0");
  if (!u0.is_real()) throw std::invalid_argument("picard_iterate: data must be real-constrained");
  u0.require_zero_x_mean("picard_iterate");

  const FrequencyGrid& g = u0.grid();
  const long steps = step_count(T, dt);
  const double h = steps > 0 ? T / static_cast<double>(steps) : 0.0;
  const std::vector<double> w = omega_table(params, g);
  const std::size_t n = g.size();
  const std::vector<Complex> base(u0.coeffs().begin(), u0.coeffs().end());

  auto phase = [&](std::size_t k2, double t) {
    const double p = w[k2] * t;
    return Complex(std::cos(p), std::sin(p));
  };
  // Current iterate on the time grid.
  std::vector<std::vector<Complex>> iterate(steps + 1, std::vector<Complex>(n));
  for (long j = 0; j <= steps; ++j) {
    const double t = j * h;
    for (std::size_t q = 0; q < n; ++q) iterate[j][q] = phase(q, t) * base[q];
  }
  auto at_T = [&](const std::vector<Complex>& v) {
    SpectralField f(g, v, true);
    if (!f.all_finite()) throw EvolutionError("picard_iterate: non-finite iterate", -1);
    return f;
  };
  std::vector<SpectralField> out;
  out.push_back(at_T(iterate[steps]));

  std::vector<std::vector<Complex>> integrand(steps + 1, std::vector<Complex>(n));
  std::vector<Complex> nl;
  for (int level = 1; level <= k; ++level) {
    // Interaction picture: g(s) = U(-s) N(u(s)), so u(t) = U(t)(u0 + int_0^t g).
    for (long j = 0; j <= steps; ++j) {
      half_dx_square(g, iterate[j], true, true, nl);
      const double t = j * h;
      for (std::size_t q = 0; q < n; ++q) integrand[j][q] = std::conj(phase(q, t)) * nl[q];
    }
    std::vector<std::vector<Complex>> cumulative(steps + 1, std::vector<Complex>(n, Complex{}));
    for (long j = 1; j <= steps; ++j) {
      auto& cj = cumulative[j];
      if (j == 1) {
        if (steps == 1) {
          for (std::size_t q = 0; q < n; ++q) cj[q] = 0.5 * h * (integrand[0][q] + integrand[1][q]);
        } else {
          // Quadratic through the first three nodes, integrated over the first interval.
          for (std::size_t q = 0; q < n; ++q) {
            cj[q] = h / 12.0 * (5.0 * integrand[0][q] + 8.0 * integrand[1][q] - integrand[2][q]);
          }
        }
      } else if (j % 2 == 0) {
        for (std::size_t q = 0; q < n; ++q) {
          cj[q] = cumulative[j - 2][q] +
                  h / 3.0 * (integrand[j - 2][q] + 4.0 * integrand[j - 1][q] + integrand[j][q]);
        }
      } else {
        for (std::size_t q = 0; q < n; ++q) {
          cj[q] = cumulative[j - 3][q] + 3.0 * h / 8.0 *
                                             (integrand[j - 3][q] + 3.0 * integrand[j - 2][q] +
                                              3.0 * integrand[j - 1][q] + integrand[j][q]);
        }
      }
    }
    for (long j = 0; j <= steps; ++j) {
      const double t = j * h;
      for (std::size_t q = 0; q < n; ++q) iterate[j][q] = phase(q, t) * (base[q] + cumulative[j][q]);
    }
    out.push_back(at_T(iterate[steps]));
  }
  return out;
}

SpectralField picard_iterate(const DispersionParams& params, const SpectralField& u0, int k,
                             double T, double dt) {
  return picard_sequence(params, u0, k, T, dt).back();
}

void export_trajectory(const std::filesystem::path& directory, const DispersionParams& params,
                       const EvolutionConfig& config, const Trajectory& trajectory) {
  std::filesystem::create_directories(directory);
  nlohmann::ordered_json manifest;
  manifest["alpha"] = params.alpha();
  manifest["dt"] = config.dt;
  manifest["T"] = config.T;
  manifest["scheme"] = to_string(config.scheme);
  manifest["snapshots"] = nlohmann::ordered_json::array();
  manifest["files"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    std::ostringstream name;
    name << "snapshot_" << std::setw(5) << std::setfill('0') << k << ".fkpi";
    std::ofstream out(directory / name.str(), std::ios::binary);
    if (!out) throw std::runtime_error("export_trajectory: cannot write " + name.str());
    write_field(out, trajectory[k].field);
    manifest["snapshots"].push_back(trajectory[k].t);
    manifest["files"].push_back(name.str());
  }
  std::ofstream json(directory / "trajectory.json");
  json << manifest.dump(2) << "\n";
}

}  // namespace fkpi
