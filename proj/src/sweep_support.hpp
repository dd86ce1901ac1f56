#pragma once

// Helpers shared by the probe translation units.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fkpi/parallel.hpp"
#include "fkpi/records.hpp"

namespace fkpi::detail {

inline bool is_dyadic(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) return false;
  int e = 0;
  return std::frexp(v, &e) == 0.5;
}

// Evaluates one record per sweep value, fits the slope over unflagged records and
// copies the verdict onto them.
inline ProbeResult run_sweep(const std::string& probe, const std::string& variable, double alpha,
                             const std::vector<double>& values, double lo, double hi,
                             unsigned workers, const std::function<ExperimentRecord(double)>& one) {
  ProbeResult res;
  res.records.resize(values.size());
  parallel_for(values.size(), [&](std::size_t k) { res.records[k] = one(values[k]); }, workers);
  res.report.probe = probe;
  res.report.variable = variable;
  res.report.alpha = alpha;
  res.report.lower = lo;
  res.report.upper = hi;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (res.records[k].flagged()) continue;
    res.report.x.push_back(values[k]);
    res.report.y.push_back(res.records[k].ratio);
  }
  fit_slope(res.report);
  apply_verdict(res);
  return res;
}

}  // namespace fkpi::detail
