#pragma once

#include <vector>

#include "fkpi/field.hpp"

namespace fkpi {

struct Snapshot {
  double t;
  SpectralField field;
};

using Trajectory = std::vector<Snapshot>;

}  // namespace fkpi
