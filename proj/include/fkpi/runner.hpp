#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "fkpi/evolution.hpp"
#include "fkpi/grid.hpp"

namespace fkpi {

enum class Command {
  simulate,
  conserve,
  strichartz,
  bilinear,
  trilinear,
  scaling,
  illposedness,
  resonance_scan,
  transversality
};

std::string to_string(Command c);
/// "simulate", ..., "resonance-scan", "transversality"; throws std::invalid_argument otherwise.
Command parse_command(const std::string& name);

struct GridSection {
  /// Box lengths in units of 2 pi.
  double periods_x = 16.0;
  double periods_y = 16.0;
  int modes_x = 128;
  int modes_y = 128;
  FrequencyGrid make() const;
};

struct DataSection {
  /// "gaussian_dx", "random" or "zero".
  std::string profile = "gaussian_dx";
  double sigma = 2.0;
  double l2_norm = 0.1;
};

struct ProbeSection {
  /// Empty: the command's default range.
  std::vector<double> dyadic_range;
  int trials_per_point = 2;
  /// NaN: the command's default bound.
  double band_hi = std::numeric_limits<double>::quiet_NaN();
  double exponent_offset = 0.0;
};

struct RunConfig {
  Command command = Command::simulate;
  double alpha = 3.0;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::filesystem::path output_dir = "fkpi-out";
  /// "csv" (records.csv) or "json" (records.jsonl).
  std::string format = "csv";
  GridSection grid;
  DataSection data;
  EvolutionConfig evolution;
  bool export_trajectory = false;
  double mass_tol = 1e-6;
  double energy_tol = 1e-4;
  ProbeSection probe;
  std::string strichartz_kind = "linear";
  double strichartz_q = 4.0;
  double strichartz_r = 4.0;
  double bilinear_n2 = 2.0;
  std::string trilinear_regime = "lw";
  double trilinear_n1 = 1.0;
  double trilinear_n2 = 2.0;
  double trilinear_l = 1.0;
  double trilinear_steps_per_l = 4.0;
  double scaling_s1 = 0.0;
  double scaling_s2 = 0.0;
  std::vector<double> scaling_lambdas;
  double ill_theta = 0.05;
  std::vector<double> ill_n_list;
  double ill_s1 = 0.0;
  double ill_s2 = 0.0;
  double ill_t = 1.0;
  int ill_quad_res = 12;
  std::vector<double> scan_n_list;
  double scan_theta = 0.05;
  int scan_samples = 10000;
  double scan_lower = 0.125;
  double scan_upper = 8.0;
  double trans_n_max = 64.0;
  std::vector<double> trans_n_min_list;
  int trans_samples = 1000;
  double trans_threshold = 0.1;
  double trans_lower = 0.0625;
  double trans_upper = 16.0;
  /// The fully resolved configuration (defaults and overrides applied), as JSON text.
  std::string resolved_json;
};

/// Parses a JSON configuration, applies "dotted.key=value" overrides (values are JSON
/// when they parse as JSON, strings otherwise), fills defaults and validates.
/// Throws std::invalid_argument naming the offending key path.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

/// Every configuration key with its default and a one-line description.
std::string config_reference();

/// Runs the configured command and writes manifest.json, records.csv or records.jsonl,
/// slopes.json (when there are fitted curves) and plotdata/*.dat into output_dir.
/// Returns 0 when every unflagged record passes, 2 when one fails, 1 on an execution
/// error (partial results are kept and a FAILED file holds the message).
int run(const RunConfig& config, std::ostream& log);

}  // namespace fkpi
