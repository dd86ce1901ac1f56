#include "fkpi/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fkpi/fft.hpp"

namespace fkpi {

namespace {

constexpr char kMagic[5] = {'F', 'K', 'P', 'I', '1'};

}  // namespace

SpectralField::SpectralField(FrequencyGrid grid, bool real)
    : grid_(grid), coeffs_(grid.size(), Complex{}), real_(real) {}

SpectralField::SpectralField(FrequencyGrid grid, std::vector<Complex> coeffs, bool real)
    : grid_(grid), coeffs_(std::move(coeffs)), real_(real) {
  if (coeffs_.size() != grid_.size()) {
    throw std::invalid_argument("SpectralField: coefficient count does not match grid");
  }
  if (real_) {
    // Project onto the Hermitian subspace before mirroring so no information is dropped.
    for (int i = 0; i < grid_.modes_x(); ++i) {
      for (int j = 0; j < grid_.modes_y(); ++j) {
        if (grid_.nyquist(i, j)) continue;
        const std::size_t a = grid_.index(i, j);
        const std::size_t b = grid_.index(grid_.mirror_x(i), grid_.mirror_y(j));
        if (a < b) {
          coeffs_[a] = 0.5 * (coeffs_[a] + std::conj(coeffs_[b]));
        }
      }
    }
  }
  finalize();
}

SpectralField SpectralField::from_function(const FrequencyGrid& grid, bool real,
                                           const std::function<Complex(double, double)>& fn) {
  SpectralField f(grid, real);
  for (int i = 0; i < grid.modes_x(); ++i) {
    for (int j = 0; j < grid.modes_y(); ++j) {
      if (grid.nyquist(i, j)) continue;
      const std::size_t a = grid.index(i, j);
      if (real && grid.index(grid.mirror_x(i), grid.mirror_y(j)) < a) continue;
      f.coeffs_[a] = fn(grid.xi(i), grid.eta(j));
    }
  }
  f.finalize();
  return f;
}

void SpectralField::finalize() {
  const int mx = grid_.modes_x();
  const int my = grid_.modes_y();
  for (int j = 0; j < my; ++j) coeffs_[grid_.index(mx / 2, j)] = Complex{};
  for (int i = 0; i < mx; ++i) coeffs_[grid_.index(i, my / 2)] = Complex{};
  if (!real_) return;
  for (int i = 0; i < mx; ++i) {
    if (grid_.nyquist_x(i)) continue;
    for (int j = 0; j < my; ++j) {
      if (grid_.nyquist_y(j)) continue;
      const std::size_t a = grid_.index(i, j);
      const std::size_t b = grid_.index(grid_.mirror_x(i), grid_.mirror_y(j));
      if (a < b) {
        coeffs_[b] = std::conj(coeffs_[a]);
      } else if (a == b) {
        coeffs_[a] = Complex(coeffs_[a].real(), 0.0);
      }
    }
  }
}

double SpectralField::x_mean_magnitude() const {
  double m = 0.0;
  for (int j = 0; j < grid_.modes_y(); ++j) m = std::max(m, std::abs(coeffs_[grid_.index(0, j)]));
  return m;
}

bool SpectralField::has_zero_x_mean(double tol) const {
  const double scale = max_abs();
  return x_mean_magnitude() <= tol * std::max(scale, std::numeric_limits<double>::min());
}

void SpectralField::require_zero_x_mean(const char* operation, double tol) const {
  if (!has_zero_x_mean(tol)) {
    std::ostringstream msg;
    msg << operation << ": field violates the zero-x-mean invariant (|c(0, .)| = "
        << x_mean_magnitude() << ")";
    throw std::invalid_argument(msg.str());
  }
}

bool SpectralField::hermitian_exact() const {
  for (int i = 0; i < grid_.modes_x(); ++i) {
    for (int j = 0; j < grid_.modes_y(); ++j) {
      if (grid_.nyquist(i, j)) {
        if (coeffs_[grid_.index(i, j)] != Complex{}) return false;
        continue;
      }
      const Complex a = coeffs_[grid_.index(i, j)];
      const Complex b = coeffs_[grid_.index(grid_.mirror_x(i), grid_.mirror_y(j))];
      if (a != std::conj(b)) return false;
    }
  }
  return true;
}

bool SpectralField::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

double SpectralField::coeff_l2() const {
  double s = 0.0;
  for (const Complex& c : coeffs_) s += std::norm(c);
  return std::sqrt(s);
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const Complex& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

SpectralField SpectralField::without_x_mean() const {
  SpectralField out = *this;
  for (int j = 0; j < grid_.modes_y(); ++j) out.coeffs_[grid_.index(0, j)] = Complex{};
  return out;
}

SpectralField SpectralField::as_complex() const {
  SpectralField out = *this;
  out.real_ = false;
  return out;
}

void SpectralField::check_same_grid(const SpectralField& other, const char* op) const {
  if (!(grid_ == other.grid_)) {
    throw std::invalid_argument(std::string(op) + ": fields live on different grids");
  }
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  check_same_grid(other, "SpectralField::operator+=");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  real_ = real_ && other.real_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  check_same_grid(other, "SpectralField::operator-=");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
  real_ = real_ && other.real_;
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (Complex& c : coeffs_) c *= s;
  return *this;
}

SpectralField SpectralField::scaled(Complex s) const {
  SpectralField out = *this;
  for (Complex& c : out.coeffs_) c *= s;
  if (s.imag() != 0.0) out.real_ = false;
  return out;
}

double relative_difference(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("relative_difference: grid mismatch");
  double diff = 0.0;
  for (std::size_t k = 0; k < a.coeffs().size(); ++k) {
    diff = std::max(diff, std::abs(a.coeffs()[k] - b.coeffs()[k]));
  }
  const double scale = std::max({a.max_abs(), b.max_abs(), std::numeric_limits<double>::min()});
  return diff / scale;
}

PhysicalField to_physical(const SpectralField& f) {
  PhysicalField p{f.grid(), std::vector<Complex>(f.coeffs().begin(), f.coeffs().end()), f.is_real()};
  fft::transform_2d(f.grid().modes_x(), f.grid().modes_y(), p.samples, fft::Direction::backward);
  if (p.real) {
    for (Complex& s : p.samples) s = Complex(s.real(), 0.0);
  }
  return p;
}

SpectralField to_spectral(const FrequencyGrid& grid, std::span<const Complex> samples, bool real) {
  if (samples.size() != grid.size()) {
    std::ostringstream msg;
    msg << "to_spectral: " << samples.size() << " samples for a " << grid.modes_x() << "x"
        << grid.modes_y() << " grid";
    throw std::invalid_argument(msg.str());
  }
  std::vector<Complex> c(samples.begin(), samples.end());
  if (real) {
    for (Complex& s : c) s = Complex(s.real(), 0.0);
  }
  fft::transform_2d(grid.modes_x(), grid.modes_y(), c, fft::Direction::forward);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (Complex& v : c) v *= scale;
  return SpectralField(grid, std::move(c), real);
}

SpectralField to_spectral(const PhysicalField& p) { return to_spectral(p.grid, p.samples, p.real); }

SpectralField apply_multiplier(const SpectralField& f,
                               const std::function<Complex(double, double)>& m) {
  const FrequencyGrid& g = f.grid();
  SpectralField out = f;
  auto c = out.mutable_coeffs();
  for (int i = 0; i < g.modes_x(); ++i) {
    if (g.nyquist_x(i)) continue;
    for (int j = 0; j < g.modes_y(); ++j) {
      if (g.nyquist_y(j)) continue;
      const std::size_t a = g.index(i, j);
      if (f.is_real() && g.index(g.mirror_x(i), g.mirror_y(j)) < a) continue;
      if (c[a] == Complex{}) continue;
      c[a] *= m(g.xi(i), g.eta(j));
    }
  }
  out.finalize();
  return out;
}

SpectralField x_derivative(const SpectralField& f) {
  return apply_multiplier(f, [](double xi, double) { return Complex(0.0, xi); });
}

SpectralField y_derivative(const SpectralField& f) {
  return apply_multiplier(f, [](double, double eta) { return Complex(0.0, eta); });
}

SpectralField x_antiderivative(const SpectralField& f) {
  f.require_zero_x_mean("x_antiderivative");
  SpectralField clean = f.without_x_mean();
  return apply_multiplier(clean, [](double xi, double) {
    return xi == 0.0 ? Complex{} : Complex(0.0, -1.0 / xi);
  });
}

SpectralField fractional_x_derivative(const SpectralField& f, double s) {
  if (s == 0.0) return f;
  if (s < 0.0) {
    f.require_zero_x_mean("fractional_x_derivative");
    SpectralField clean = f.without_x_mean();
    return apply_multiplier(clean, [s](double xi, double) {
      return xi == 0.0 ? Complex{} : Complex(std::pow(std::abs(xi), s), 0.0);
    });
  }
  return apply_multiplier(f, [s](double xi, double) {
    return Complex(std::pow(std::abs(xi), s), 0.0);
  });
}

DyadicBand DyadicBand::from_value(double n) {
  int e = 0;
  const double m = std::frexp(n, &e);
  if (!(n > 0.0) || m != 0.5) {
    throw std::invalid_argument("DyadicBand: N must be a positive power of two");
  }
  return DyadicBand(e - 1);
}

DyadicBand DyadicBand::containing(double xi) {
  if (xi == 0.0 || !std::isfinite(xi)) {
    throw std::invalid_argument("DyadicBand::containing: xi must be finite and nonzero");
  }
  int e = 0;
  const double m = std::frexp(std::abs(xi), &e);
  // |xi| = m 2^e with m in [1/2, 1): band 2^e unless |xi| is itself 2^(e-1).
  return DyadicBand(m == 0.5 ? e - 1 : e);
}

double DyadicBand::value() const { return std::ldexp(1.0, exponent_); }

bool DyadicBand::in_projection(double xi) const {
  return xi != 0.0 && std::isfinite(xi) && containing(xi).exponent_ == exponent_;
}

bool DyadicBand::in_wide_band(double xi) const {
  const double a = std::abs(xi);
  return a >= value() / 8.0 && a <= 8.0 * value();
}

SpectralField project_dyadic(const SpectralField& f, DyadicBand band) {
  return apply_multiplier(f, [band](double xi, double) {
    return band.in_projection(xi) ? Complex(1.0, 0.0) : Complex{};
  });
}

std::vector<DyadicBand> dyadic_family(const FrequencyGrid& grid) {
  std::vector<DyadicBand> bands;
  for (int i = 1; i < grid.modes_x() / 2; ++i) {
    DyadicBand b = DyadicBand::containing(grid.xi(i));
    if (bands.empty() || !(bands.back() == b)) bands.push_back(b);
  }
  return bands;
}

SpectralField dealias_truncate(const SpectralField& f) {
  const FrequencyGrid& g = f.grid();
  SpectralField out = f;
  auto c = out.mutable_coeffs();
  for (int i = 0; i < g.modes_x(); ++i) {
    for (int j = 0; j < g.modes_y(); ++j) {
      if (!g.in_dealias_ball(i, j)) c[g.index(i, j)] = Complex{};
    }
  }
  out.finalize();
  return out;
}

SpectralField dealiased_product(const SpectralField& f, const SpectralField& g) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("dealiased_product: grid mismatch");
  PhysicalField pf = to_physical(dealias_truncate(f));
  const PhysicalField pg = to_physical(dealias_truncate(g));
  for (std::size_t k = 0; k < pf.samples.size(); ++k) pf.samples[k] *= pg.samples[k];
  pf.real = f.is_real() && g.is_real();
  return dealias_truncate(to_spectral(pf));
}

SpectralField zero_pad(const SpectralField& f, int factor) {
  if (factor < 1) throw std::invalid_argument("zero_pad: factor must be >= 1");
  if (factor == 1) return f;
  const FrequencyGrid& g = f.grid();
  const FrequencyGrid big(g.length_x(), g.length_y(), factor * g.modes_x(), factor * g.modes_y());
  std::vector<Complex> c(big.size(), Complex{});
  for (int i = 0; i < g.modes_x(); ++i) {
    if (g.nyquist_x(i)) continue;
    const int bi = g.kx(i) >= 0 ? g.kx(i) : g.kx(i) + big.modes_x();
    for (int j = 0; j < g.modes_y(); ++j) {
      if (g.nyquist_y(j)) continue;
      const int bj = g.ky(j) >= 0 ? g.ky(j) : g.ky(j) + big.modes_y();
      c[big.index(bi, bj)] = f.at(i, j);
    }
  }
  return SpectralField(big, std::move(c), f.is_real());
}

// Serialization ----------------------------------------------------------------

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw std::runtime_error("read_field: truncated stream");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_field(std::ostream& out, const SpectralField& f) {
  out.write(kMagic, sizeof(kMagic));
  put_le<double>(out, f.grid().length_x());
  put_le<double>(out, f.grid().length_y());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid().modes_x()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid().modes_y()));
  for (const Complex& c : f.coeffs()) {
    put_le<double>(out, c.real());
    put_le<double>(out, c.imag());
  }
}

SpectralField read_field(std::istream& in) {
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("read_field: missing FKPI1 magic");
  }
  const double lx = get_le<double>(in);
  const double ly = get_le<double>(in);
  const auto mx = get_le<std::uint32_t>(in);
  const auto my = get_le<std::uint32_t>(in);
  FrequencyGrid grid(lx, ly, static_cast<int>(mx), static_cast<int>(my));
  std::vector<Complex> c(grid.size());
  for (Complex& v : c) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    v = Complex(re, im);
  }
  SpectralField probe(grid, c, false);
  const bool real = probe.hermitian_exact();
  return SpectralField(grid, std::move(c), real);
}

std::vector<std::uint8_t> serialize_field(const SpectralField& f) {
  std::ostringstream out(std::ios::binary);
  write_field(out, f);
  const std::string s = out.str();
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

}  // namespace fkpi
