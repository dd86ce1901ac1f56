#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "fkpi/field.hpp"
#include "fkpi/symbols.hpp"
#include "fkpi/trajectory.hpp"

namespace fkpi {

/// Axis-aligned frequency box [xi_lo, xi_hi] x [eta_lo, eta_hi], optionally
/// united with its reflection through the origin.
struct FreqBoxSpec {
  double xi_lo = 0.0;
  double xi_hi = 0.0;
  double eta_lo = 0.0;
  double eta_hi = 0.0;
  bool mirrored = true;

  /// Throws unless both ranges are nonempty and finite and 0 < xi_lo.
  void validate() const;
  /// Lebesgue measure, counting the mirror copy.
  double area() const;
  bool contains(double xi, double eta) const;
};

enum class Scheme { etdrk4, strang };

std::string to_string(Scheme s);
/// "etdrk4" or "strang"; throws otherwise.
Scheme parse_scheme(const std::string& name);

struct EvolutionConfig {
  double dt = 1e-3;
  double T = 1.0;
  Scheme scheme = Scheme::etdrk4;
  bool dealias = true;
  int snapshot_stride = 1;
  /// false drops u d_x u and integrates the linear flow only.
  bool nonlinear = true;

  /// dt > 0, T >= 0, dt <= T unless T = 0, stride >= 1.
  void validate() const;
};

/// Raised when a step produces non-finite coefficients.
class EvolutionError : public std::runtime_error {
 public:
  EvolutionError(const std::string& what, long step_index)
      : std::runtime_error(what), step_index_(step_index) {}
  long step_index() const { return step_index_; }

 private:
  long step_index_;
};

/// Multiplier e^{i t omega(xi, eta)}. Requires zero-x-mean; the xi = 0 plane is left as is.
SpectralField propagate_linear(const DispersionParams& params, const SpectralField& f, double t);

/// u d_x u computed as (1/2) d_x(u^2); with `dealias` the square is formed with
/// 2/3 truncation before and after. Real-constrained input only.
SpectralField nonlinearity(const SpectralField& u, bool dealias = true);

/// One-step integrator with the linear symbol handled exactly; coefficients are
/// precomputed for a fixed grid and step size.
class Stepper {
 public:
  Stepper(const DispersionParams& params, const FrequencyGrid& grid, double dt, Scheme scheme,
          bool dealias = true, bool nonlinear = true);
  /// Advances by dt. Throws EvolutionError (step index -1) on non-finite output.
  SpectralField step(const SpectralField& u) const;
  double dt() const { return dt_; }

 private:
  FrequencyGrid grid_;
  double dt_;
  Scheme scheme_;
  bool dealias_;
  bool nonlinear_;
  std::vector<Complex> e_full_;
  std::vector<Complex> e_half_;
  std::vector<Complex> q_;
  std::vector<Complex> f1_;
  std::vector<Complex> f2_;
  std::vector<Complex> f3_;
};

SpectralField step(const DispersionParams& params, const SpectralField& u, double dt, Scheme scheme,
                   bool dealias = true, bool nonlinear = true);

/// Number of steps used for [0, T]: T/dt when that is an integer (to 1e-9), else ceil(T/dt).
long step_count(double T, double dt);

/// Integrates to config.T with round(T/dt) steps (dt shrinks slightly when T/dt is
/// not an integer). Snapshots at t = 0 and every snapshot_stride steps.
Trajectory solve(const DispersionParams& params, const SpectralField& u0,
                 const EvolutionConfig& config);

/// Iterates u^{(0)}(t) = U(t)u0, u^{(k+1)}(t) = U(t)u0 + int_0^t U(t-s) (u d_x u)(u^{(k)}(s)) ds
/// on the time grid of spacing ~dt and returns u^{(0)}(T), ..., u^{(k)}(T).
std::vector<SpectralField> picard_sequence(const DispersionParams& params, const SpectralField& u0,
                                           int k, double T, double dt);
/// Last element of picard_sequence.
SpectralField picard_iterate(const DispersionParams& params, const SpectralField& u0, int k,
                             double T, double dt);

/// Writes snapshot_NNNNN.fkpi files and trajectory.json
/// {alpha, dt, T, scheme, snapshots: [t...], files: [...]} into `directory`.
void export_trajectory(const std::filesystem::path& directory, const DispersionParams& params,
                       const EvolutionConfig& config, const Trajectory& trajectory);

}  // namespace fkpi
