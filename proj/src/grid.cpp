#include "fkpi/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace fkpi {

namespace {

void check_modes(int modes, const char* name) {
  if (modes < 8 || modes % 2 != 0) {
    throw std::invalid_argument(std::string("FrequencyGrid: ") + name +
                                " must be even and >= 8, got " + std::to_string(modes));
  }
}

void check_length(double length, const char* name) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument(std::string("FrequencyGrid: ") + name +
                                " must be a positive finite length");
  }
}

}  // namespace

FrequencyGrid::FrequencyGrid(double length_x, double length_y, int modes_x, int modes_y)
    : length_x_(length_x), length_y_(length_y), modes_x_(modes_x), modes_y_(modes_y) {
  check_length(length_x, "length_x");
  check_length(length_y, "length_y");
  check_modes(modes_x, "modes_x");
  check_modes(modes_y, "modes_y");
  dxi_ = 2.0 * std::numbers::pi / length_x_;
  deta_ = 2.0 * std::numbers::pi / length_y_;
}

bool FrequencyGrid::in_dealias_ball(int i, int j) const {
  return std::abs(kx(i)) <= dealias_kx() && std::abs(ky(j)) <= dealias_ky();
}

FrequencyGrid default_grid(int modes_x, int modes_y) {
  return FrequencyGrid(kDefaultBoxLength, kDefaultBoxLength, modes_x, modes_y);
}

}  // namespace fkpi
