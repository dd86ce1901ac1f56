#include "fkpi/records.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "fkpi/quadrature.hpp"

namespace fkpi {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void ExperimentRecord::finish_ratio() {
  ratio = comparator != 0.0 ? measured / comparator : std::numeric_limits<double>::quiet_NaN();
}

void fit_slope(SlopeReport& report, std::size_t min_points) {
  if (report.x.size() != report.y.size()) throw std::invalid_argument("fit_slope: x/y size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < report.x.size(); ++k) {
    if (report.x[k] > 0 && report.y[k] > 0 && std::isfinite(report.x[k]) && std::isfinite(report.y[k])) {
      lx.push_back(std::log(report.x[k]));
      ly.push_back(std::log(report.y[k]));
    }
  }
  if (lx.size() < min_points || lx.size() < 2) {
    report.slope = std::numeric_limits<double>::quiet_NaN();
    report.pass = false;
    report.note = "only " + std::to_string(lx.size()) + " usable sweep points, need " +
                  std::to_string(min_points) + " for a verdict";
    return;
  }
  report.slope = least_squares_slope(lx, ly);
  report.pass = report.slope >= report.lower && report.slope <= report.upper;
}

void apply_verdict(ProbeResult& result) {
  for (auto& r : result.records) r.pass = !r.flagged() && result.report.pass;
}

namespace {

// Keys and values are plain identifiers and numbers; quote defensively anyway.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::ordered_json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

void write_csv_header(std::ostream& out) {
  out << "probe,alpha,params,measured,comparator,ratio,pass,flag\n";
}

void write_csv(std::ostream& out, const ExperimentRecord& r) {
  std::string params;
  for (const auto& [k, v] : r.inputs) {
    if (!params.empty()) params += ';';
    params += k + "=" + v;
  }
  out << csv_field(r.probe) << ',' << format_number(r.alpha) << ',' << csv_field(params) << ','
      << format_number(r.measured) << ',' << format_number(r.comparator) << ','
      << format_number(r.ratio) << ',' << (r.pass ? "true" : "false") << ',' << csv_field(r.flag)
      << '\n';
}

void write_jsonl(std::ostream& out, const ExperimentRecord& r) {
  nlohmann::ordered_json j;
  j["probe"] = r.probe;
  j["alpha"] = number_json(r.alpha);
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = v;
  j["inputs"] = inputs;
  j["measured"] = number_json(r.measured);
  j["comparator"] = number_json(r.comparator);
  j["ratio"] = number_json(r.ratio);
  j["pass"] = r.pass;
  j["flag"] = r.flag;
  out << j.dump() << '\n';
}

std::string to_json_text(const SlopeReport& r) {
  nlohmann::ordered_json j;
  j["probe"] = r.probe;
  j["variable"] = r.variable;
  j["alpha"] = number_json(r.alpha);
  j["points"] = r.x.size();
  j["slope"] = number_json(r.slope);
  j["expected"] = number_json(r.expected);
  j["lower"] = number_json(r.lower);
  j["upper"] = number_json(r.upper);
  j["pass"] = r.pass;
  j["note"] = r.note;
  nlohmann::ordered_json xs = nlohmann::ordered_json::array(), ys = nlohmann::ordered_json::array();
  for (double v : r.x) xs.push_back(number_json(v));
  for (double v : r.y) ys.push_back(number_json(v));
  j["x"] = xs;
  j["y"] = ys;
  return j.dump(2);
}

void write_plotdata(const std::filesystem::path& file, const std::vector<double>& x,
                    const std::vector<double>& y) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("write_plotdata: cannot open " + file.string());
  for (std::size_t k = 0; k < x.size() && k < y.size(); ++k) {
    out << format_number(x[k]) << ' ' << format_number(y[k]) << '\n';
  }
}

}  // namespace fkpi
