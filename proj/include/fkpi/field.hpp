#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fkpi/grid.hpp"

namespace fkpi {

using Complex = std::complex<double>;

/// Samples on the physical grid: sample (a, b) sits at (a*Lx/Mx, b*Ly/My).
struct PhysicalField {
  FrequencyGrid grid;
  std::vector<Complex> samples;
  bool real = true;
};

/// Fourier-series coefficients c_k of a field on a periodic box:
/// u(x, y) = sum_k c_k exp(i(xi_k x + eta_k y)).
///
/// Nyquist modes are always zero. A real-constrained field satisfies
/// c(-k) = conj(c(k)) bit-for-bit; every constructor and operation restores this
/// by mirroring the canonical half of the lattice. The xi = 0 plane is allowed to
/// be populated (constants, y-only profiles); operations that need the zero-x-mean
/// invariant check it and throw.
class SpectralField {
 public:
  explicit SpectralField(FrequencyGrid grid, bool real = true);
  SpectralField(FrequencyGrid grid, std::vector<Complex> coeffs, bool real);

  /// Coefficients from a function of the wavenumber (xi, eta).
  static SpectralField from_function(const FrequencyGrid& grid, bool real,
                                     const std::function<Complex(double, double)>& fn);

  const FrequencyGrid& grid() const { return grid_; }
  bool is_real() const { return real_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  Complex at(int i, int j) const { return coeffs_[grid_.index(i, j)]; }

  /// max_j |c(0, j)|.
  double x_mean_magnitude() const;
  /// True when the xi = 0 plane is zero to `tol` relative to the largest coefficient.
  bool has_zero_x_mean(double tol = 1e-12) const;
  /// Throws std::invalid_argument naming `operation` when the xi = 0 plane is populated.
  void require_zero_x_mean(const char* operation, double tol = 1e-12) const;
  /// Exact check of c(-k) == conj(c(k)) and a real (0,0) coefficient.
  bool hermitian_exact() const;
  bool all_finite() const;

  /// sqrt(sum_k |c_k|^2); the physical L2 norm is sqrt(area) times this.
  double coeff_l2() const;
  double max_abs() const;

  /// Copy with the xi = 0 plane cleared.
  SpectralField without_x_mean() const;
  /// Copy flagged as complex (no Hermitian enforcement).
  SpectralField as_complex() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  /// Complex scaling; drops the real constraint unless s is real.
  SpectralField scaled(Complex s) const;

  /// Mutable access for kernels that restore invariants afterwards with `finalize()`.
  std::span<Complex> mutable_coeffs() { return coeffs_; }
  /// Re-zero Nyquist modes and, for real fields, mirror the canonical half.
  void finalize();

 private:
  void check_same_grid(const SpectralField& other, const char* op) const;

  FrequencyGrid grid_;
  std::vector<Complex> coeffs_;
  bool real_;
};

/// Relative max-norm distance max|a-b| / max(max|a|, max|b|, tiny).
double relative_difference(const SpectralField& a, const SpectralField& b);

// Transforms -------------------------------------------------------------

/// Inverse transform: samples of sum_k c_k e^{i(xi x + eta y)}.
PhysicalField to_physical(const SpectralField& f);
/// Forward transform c_k = (1/(Mx My)) sum_samples u e^{-i(xi x + eta y)}.
/// Throws std::invalid_argument if the sample count does not match the grid.
SpectralField to_spectral(const PhysicalField& p);
SpectralField to_spectral(const FrequencyGrid& grid, std::span<const Complex> samples, bool real);

// Multipliers ----------------------------------------------------------------

/// Pointwise multiplier m(xi, eta). For real fields m must satisfy m(-k) = conj(m(k));
/// only the canonical half is evaluated and the other half is mirrored.
SpectralField apply_multiplier(const SpectralField& f,
                               const std::function<Complex(double, double)>& m);

SpectralField x_derivative(const SpectralField& f);
SpectralField y_derivative(const SpectralField& f);
/// Multiplier 1/(i xi); requires zero x-mean, the xi = 0 plane stays zero.
SpectralField x_antiderivative(const SpectralField& f);
/// Multiplier |xi|^s. Negative s requires zero x-mean; s = 0 is the identity.
SpectralField fractional_x_derivative(const SpectralField& f, double s);

/// Dyadic frequency scale N = 2^j (j may be negative).
class DyadicBand {
 public:
  explicit DyadicBand(int exponent) : exponent_(exponent) {}
  /// Throws unless n is an exact positive power of two.
  static DyadicBand from_value(double n);
  /// The unique band with N/2 < |xi| <= N; xi must be nonzero.
  static DyadicBand containing(double xi);

  int exponent() const { return exponent_; }
  double value() const;
  /// Sharp projector support N/2 < |xi| <= N.
  bool in_projection(double xi) const;
  /// Wide localisation set N/8 <= |xi| <= 8N.
  bool in_wide_band(double xi) const;

  bool operator==(const DyadicBand&) const = default;

 private:
  int exponent_;
};

/// Sharp Littlewood-Paley piece 1{N/2 < |xi| <= N} f.
SpectralField project_dyadic(const SpectralField& f, DyadicBand band);
/// All bands that contain at least one nonzero lattice |xi| of the grid, ascending.
std::vector<DyadicBand> dyadic_family(const FrequencyGrid& grid);

/// Zero every mode outside the 2/3 ball.
SpectralField dealias_truncate(const SpectralField& f);
/// Pseudospectral product with 2/3 truncation before and after.
SpectralField dealiased_product(const SpectralField& f, const SpectralField& g);
/// Same box, `factor` times as many modes per direction, new modes zero.
SpectralField zero_pad(const SpectralField& f, int factor);

// Serialization --------------------------------------------------------------

/// "FKPI1", Lx, Ly (f64), Mx, My (u32), then row-major (re, im) f64 pairs; little-endian.
void write_field(std::ostream& out, const SpectralField& f);
SpectralField read_field(std::istream& in);
std::vector<std::uint8_t> serialize_field(const SpectralField& f);

}  // namespace fkpi
