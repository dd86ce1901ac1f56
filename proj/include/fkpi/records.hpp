#pragma once

#include <filesystem>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace fkpi {

/// Shortest round-trip decimal form (std::to_chars); "inf", "-inf", "nan" for the rest.
std::string format_number(double v);

/// One probe measurement. `flag` is empty for ordinary records; "degenerate" or
/// "outside-hypothesis" records carry no verdict and are skipped by exit-code logic.
struct ExperimentRecord {
  std::string probe;
  double alpha = 0.0;
  std::vector<std::pair<std::string, std::string>> inputs;
  double measured = 0.0;
  double comparator = 0.0;
  double ratio = 0.0;
  bool pass = false;
  std::string flag;

  void set(const std::string& key, double value) { inputs.emplace_back(key, format_number(value)); }
  void set(const std::string& key, const std::string& value) { inputs.emplace_back(key, value); }
  /// Fills ratio = measured / comparator (NaN when the comparator vanishes).
  void finish_ratio();
  bool flagged() const { return !flag.empty(); }
};

/// Least-squares slope of log y against log x over a sweep, with its verdict.
struct SlopeReport {
  std::string probe;
  std::string variable;
  double alpha = 0.0;
  std::vector<double> x;
  std::vector<double> y;
  double slope = std::numeric_limits<double>::quiet_NaN();
  /// Target exponent for fits that have one; NaN for pure trend bounds.
  double expected = std::numeric_limits<double>::quiet_NaN();
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool pass = false;
  std::string note;
};

/// A sweep: its records and the slope verdict. Record pass flags equal the verdict.
struct ProbeResult {
  std::vector<ExperimentRecord> records;
  SlopeReport report;
};

/// Fits the slope of log(y) against log(x) and sets pass = slope in [lower, upper].
/// Fewer than `min_points` finite points give no verdict (pass = false, note set).
void fit_slope(SlopeReport& report, std::size_t min_points = 4);

/// Copies the report verdict onto every unflagged record.
void apply_verdict(ProbeResult& result);

/// CSV with header probe,alpha,params,measured,comparator,ratio,pass,flag;
/// params is "key=value;key=value".
void write_csv_header(std::ostream& out);
void write_csv(std::ostream& out, const ExperimentRecord& r);
void write_jsonl(std::ostream& out, const ExperimentRecord& r);
std::string to_json_text(const SlopeReport& r);

/// Two-column "x y" text for gnuplot.
void write_plotdata(const std::filesystem::path& file, const std::vector<double>& x,
                    const std::vector<double>& y);

}  // namespace fkpi
