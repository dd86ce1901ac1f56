#pragma once

#include <cstddef>
#include <numbers>

namespace fkpi {

/// Default box period in both directions: 2*pi*2^7, i.e. wavenumber spacing 2^-7.
inline constexpr double kDefaultBoxLength = 2.0 * std::numbers::pi * 128.0;

/// Periodic box [0, Lx) x [0, Ly) sampled on modes_x x modes_y points.
///
/// Coefficients are stored in FFT order: index i in [0, modes_x) carries the
/// signed wavenumber k = i for i < modes_x/2 and k = i - modes_x otherwise, so
/// xi_k = 2*pi*k/Lx. The single Nyquist index modes_x/2 (resp. modes_y/2) is
/// never populated by any field. Storage is row-major with x as the slow index.
class FrequencyGrid {
 public:
  FrequencyGrid(double length_x, double length_y, int modes_x, int modes_y);

  double length_x() const { return length_x_; }
  double length_y() const { return length_y_; }
  int modes_x() const { return modes_x_; }
  int modes_y() const { return modes_y_; }
  std::size_t size() const { return static_cast<std::size_t>(modes_x_) * modes_y_; }

  double dxi() const { return dxi_; }
  double deta() const { return deta_; }
  double area() const { return length_x_ * length_y_; }
  /// Physical quadrature weight dx*dy.
  double cell_area() const { return area() / static_cast<double>(size()); }

  int kx(int i) const { return i < modes_x_ / 2 ? i : i - modes_x_; }
  int ky(int j) const { return j < modes_y_ / 2 ? j : j - modes_y_; }
  double xi(int i) const { return kx(i) * dxi_; }
  double eta(int j) const { return ky(j) * deta_; }

  bool nyquist_x(int i) const { return i == modes_x_ / 2; }
  bool nyquist_y(int j) const { return j == modes_y_ / 2; }
  bool nyquist(int i, int j) const { return nyquist_x(i) || nyquist_y(j); }

  /// Index of -k for a non-Nyquist index.
  int mirror_x(int i) const { return i == 0 ? 0 : modes_x_ - i; }
  int mirror_y(int j) const { return j == 0 ? 0 : modes_y_ - j; }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * modes_y_ + static_cast<std::size_t>(j);
  }

  /// Largest |k| kept by the 2/3 rule: the biggest integer strictly below M/3.
  int dealias_kx() const { return (modes_x_ - 1) / 3; }
  int dealias_ky() const { return (modes_y_ - 1) / 3; }
  bool in_dealias_ball(int i, int j) const;

  bool operator==(const FrequencyGrid& other) const = default;

 private:
  double length_x_;
  double length_y_;
  int modes_x_;
  int modes_y_;
  double dxi_;
  double deta_;
};

/// Grid with the default 2*pi*2^7 box.
FrequencyGrid default_grid(int modes_x, int modes_y);

}  // namespace fkpi
