#include "fkpi/runner.hpp"

#include <fftw3.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fkpi/field.hpp"
#include "fkpi/lattice.hpp"
#include "fkpi/norms.hpp"
#include "fkpi/probes.hpp"
#include "fkpi/random.hpp"
#include "fkpi/records.hpp"
#include "fkpi/symbols.hpp"

#ifndef FKPI_VERSION
#define FKPI_VERSION "0.0.0"
#endif

namespace fkpi {

using Json = nlohmann::ordered_json;

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<std::pair<Command, const char*>> kCommands{
    {Command::simulate, "simulate"},         {Command::conserve, "conserve"},
    {Command::strichartz, "strichartz"},     {Command::bilinear, "bilinear"},
    {Command::trilinear, "trilinear"},       {Command::scaling, "scaling"},
    {Command::illposedness, "illposedness"}, {Command::resonance_scan, "resonance-scan"},
    {Command::transversality, "transversality"}};

enum class Kind { number, integer, string, boolean, numbers, number_or_null, number_or_inf };

struct Key {
  const char* path;
  Json def;
  Kind kind;
  const char* doc;
};

Json dyadics(int lo, int hi) {
  Json a = Json::array();
  for (int e = lo; e <= hi; ++e) a.push_back(std::ldexp(1.0, e));
  return a;
}

// The whole configuration surface. Order here is the order of --help and of the
// resolved config echo.
const std::vector<Key>& keys() {
  static const std::vector<Key> k{
      {"command", nullptr, Kind::string,
       "simulate | conserve | strichartz | bilinear | trilinear | scaling | illposedness | "
       "resonance-scan | transversality (required; the CLI fills it)"},
      {"alpha", nullptr, Kind::number, "dispersion exponent, in [2, 4) (required)"},
      {"seed", 0, Kind::integer, "seed for data and probe sampling"},
      {"workers", 0, Kind::integer, "worker threads, 0 = logical cores"},
      {"output_dir", "fkpi-out", Kind::string, "artifact directory"},
      {"format", "csv", Kind::string, "records format: csv (records.csv) | json (records.jsonl)"},
      {"grid.periods_x", 16.0, Kind::number, "box length in x over 2 pi"},
      {"grid.periods_y", 16.0, Kind::number, "box length in y over 2 pi"},
      {"grid.modes_x", 128, Kind::integer, "grid points in x (even, >= 8)"},
      {"grid.modes_y", 128, Kind::integer, "grid points in y (even, >= 8)"},
      {"data.profile", "gaussian_dx", Kind::string,
       "initial data: gaussian_dx (d_x of a Gaussian) | random (seeded Gaussian-envelope noise) | zero"},
      {"data.sigma", 2.0, Kind::number, "Gaussian width"},
      {"data.l2_norm", 0.1, Kind::number, "L2 norm of the initial data"},
      {"evolution.dt", 1e-3, Kind::number, "time step"},
      {"evolution.T", 1.0, Kind::number, "final time"},
      {"evolution.scheme", "etdrk4", Kind::string, "etdrk4 | strang"},
      {"evolution.dealias", true, Kind::boolean, "2/3-rule dealiasing of u u_x"},
      {"evolution.snapshot_stride", 100, Kind::integer, "steps between snapshots"},
      {"evolution.nonlinear", true, Kind::boolean, "false integrates the linear flow only"},
      {"evolution.export", false, Kind::boolean, "simulate: write snapshots to output_dir/trajectory"},
      {"conserve.mass_tol", 1e-6, Kind::number, "bound on the relative mass drift"},
      {"conserve.energy_tol", 1e-4, Kind::number, "bound on the relative energy drift"},
      {"probe.dyadic_range", Json::array(), Kind::numbers,
       "sweep values; empty = command default (strichartz linear 1..8, lowfreq 1/64..1/8, "
       "bilinear 8..64, trilinear 8..64)"},
      {"probe.trials_per_point", 2, Kind::integer, "random configurations per sweep point"},
      {"probe.band_hi", nullptr, Kind::number_or_null,
       "upper slope bound; null = 0.1 for evolution-grid probes, 0.2 for lattice probes"},
      {"probe.exponent_offset", 0.0, Kind::number,
       "added to the comparator exponent of the sweep variable (-0.25 is the negative control)"},
      {"strichartz.kind", "linear", Kind::string, "linear | lowfreq"},
      {"strichartz.q", 4.0, Kind::number_or_inf, "time exponent (number or \"inf\")"},
      {"strichartz.r", 4.0, Kind::number_or_inf, "space exponent (number or \"inf\")"},
      {"bilinear.n2", 2.0, Kind::number, "fixed low frequency N2; N1 sweeps"},
      {"trilinear.regime", "lw", Kind::string,
       "lw (resonant, N1 sweeps) | nonresonant (N2 sweeps)"},
      {"trilinear.n1", 1.0, Kind::number, "nonresonant: fixed N1"},
      {"trilinear.n2", 2.0, Kind::number, "lw: fixed N2"},
      {"trilinear.l", 1.0, Kind::number, "lw: common modulation size L1 = L2 = L3"},
      {"trilinear.steps_per_l", 4.0, Kind::number, "lattice steps per unit modulation"},
      {"scaling.s1", 0.0, Kind::number, "x regularity of the homogeneous norm"},
      {"scaling.s2", 0.0, Kind::number, "y regularity of the homogeneous norm"},
      {"scaling.lambdas", Json::array({1.0, 1.25, 1.5, 2.0}), Kind::numbers, "scale factors"},
      {"illposedness.theta", 0.05, Kind::number, "gamma = N^{-(alpha-1)/2 - theta}"},
      {"illposedness.n_list", dyadics(8, 13), Kind::numbers, "dyadic N values (>= 5)"},
      {"illposedness.s1", 0.0, Kind::number, "x index of the growth norm"},
      {"illposedness.s2", 0.0, Kind::number, "y index of the growth norm"},
      {"illposedness.t", 1.0, Kind::number, "time of the second iterate"},
      {"illposedness.quad_res", 12, Kind::integer, "Gauss nodes per panel (>= 8; doubled for the check)"},
      {"resonance_scan.n_list", dyadics(4, 10), Kind::numbers, "dyadic N values"},
      {"resonance_scan.theta", 0.05, Kind::number, "gamma = N^{-(alpha-1)/2 - theta}"},
      {"resonance_scan.samples", 10000, Kind::integer, "samples per N"},
      {"resonance_scan.lower", 0.125, Kind::number, "lower bound for both ratio ranges"},
      {"resonance_scan.upper", 8.0, Kind::number, "upper bound for both ratio ranges"},
      {"transversality.n_max", 64.0, Kind::number, "dyadic N_max"},
      {"transversality.n_min_list", Json::array({4.0}), Kind::numbers, "dyadic N_min values"},
      {"transversality.samples", 1000, Kind::integer, "accepted resonant samples per N_min"},
      {"transversality.threshold", 0.1, Kind::number, "resonant set |Omega| <= c |Omega^1|"},
      {"transversality.lower", 0.0625, Kind::number, "lower bound for both ratio ranges"},
      {"transversality.upper", 16.0, Kind::number,
       "upper bound for the cross-product ratio (the gradient gap is a lower bound only)"},
  };
  return k;
}

const Key* find_key(const std::string& path) {
  for (const Key& k : keys()) {
    if (path == k.path) return &k;
  }
  return nullptr;
}

bool is_section(const std::string& path) {
  const std::string prefix = path + ".";
  for (const Key& k : keys()) {
    if (std::string(k.path).rfind(prefix, 0) == 0) return true;
  }
  return false;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config: " + path + ": " + what);
}

const char* type_name(Kind k) {
  switch (k) {
    case Kind::number: return "a number";
    case Kind::integer: return "an integer";
    case Kind::string: return "a string";
    case Kind::boolean: return "a boolean";
    case Kind::numbers: return "an array of numbers";
    case Kind::number_or_null: return "a number or null";
    case Kind::number_or_inf: return "a number or \"inf\"";
  }
  return "";
}

bool integral(const Json& v) {
  if (v.is_number_integer()) return true;
  return v.is_number_float() && std::isfinite(v.get<double>()) && std::floor(v.get<double>()) == v.get<double>();
}

bool type_ok(Kind k, const Json& v) {
  switch (k) {
    case Kind::number: return v.is_number();
    case Kind::integer: return v.is_number() && integral(v);
    case Kind::string: return v.is_string();
    case Kind::boolean: return v.is_boolean();
    case Kind::numbers:
      if (!v.is_array()) return false;
      for (const Json& e : v) {
        if (!e.is_number()) return false;
      }
      return true;
    case Kind::number_or_null: return v.is_number() || v.is_null();
    case Kind::number_or_inf: return v.is_number() || (v.is_string() && v.get<std::string>() == "inf");
  }
  return false;
}

Json defaults() {
  Json d = Json::object();
  for (const Key& k : keys()) {
    std::string p = k.path;
    const auto dot = p.find('.');
    if (dot == std::string::npos) {
      d[p] = k.def;
    } else {
      d[p.substr(0, dot)][p.substr(dot + 1)] = k.def;
    }
  }
  return d;
}

const Json& at_path(const Json& j, const std::string& path) {
  const auto dot = path.find('.');
  return dot == std::string::npos ? j.at(path) : j.at(path.substr(0, dot)).at(path.substr(dot + 1));
}

double num(const Json& j, const char* path) {
  const Json& v = at_path(j, path);
  if (v.is_string()) return std::numeric_limits<double>::infinity();  // "inf"
  return v.get<double>();
}

long long integer(const Json& j, const char* path) {
  return static_cast<long long>(at_path(j, path).get<double>());
}

std::vector<double> list(const Json& j, const char* path) {
  std::vector<double> out;
  for (const Json& e : at_path(j, path)) out.push_back(e.get<double>());
  return out;
}

bool dyadic(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) return false;
  int e = 0;
  return std::frexp(v, &e) == 0.5;
}

void require(bool ok, const char* path, const std::string& what) {
  if (!ok) fail(path, what);
}

void require_positive(double v, const char* path) { require(v > 0.0 && std::isfinite(v), path, "must be positive, got " + format_number(v)); }

void require_dyadic_list(const std::vector<double>& v, const char* path, std::size_t min_size) {
  require(v.size() >= min_size, path, "needs at least " + std::to_string(min_size) + " values");
  for (std::size_t k = 0; k < v.size(); ++k) {
    require(dyadic(v[k]), path, "entries must be powers of two, got " + format_number(v[k]));
    require(k == 0 || v[k] > v[k - 1], path, "entries must be strictly increasing");
  }
}

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("--set expects key=value, got '" + assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw std::invalid_argument("--set: malformed key '" + path + "'");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    Json& next = (*node)[part];
    if (next.is_null()) next = Json::object();
    if (!next.is_object()) fail(path.substr(0, dot), "expected an object");
    node = &next;
    start = dot + 1;
  }
}

}  // namespace

std::string to_string(Command c) {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "?";
}

Command parse_command(const std::string& name) {
  for (const auto& [cmd, n] : kCommands) {
    if (name == n) return cmd;
  }
  throw std::invalid_argument("unknown command '" + name + "'");
}

FrequencyGrid GridSection::make() const {
  return FrequencyGrid(2 * kPi * periods_x, 2 * kPi * periods_y, modes_x, modes_y);
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw std::invalid_argument("config: not a valid JSON document");
  if (!doc.is_object()) throw std::invalid_argument("config: the top level must be an object");
  for (const std::string& o : overrides) apply_override(doc, o);

  Json r = defaults();
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string path = it.key();
    if (is_section(path)) {
      if (!it.value().is_object()) fail(path, "expected an object");
      for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) {
        const std::string full = path + "." + jt.key();
        const Key* key = find_key(full);
        if (key == nullptr) fail(full, "unknown key '" + jt.key() + "'");
        if (!type_ok(key->kind, jt.value())) {
          fail(full, std::string("expected ") + type_name(key->kind) + ", got " + jt.value().dump());
        }
        r[path][jt.key()] = jt.value();
      }
      continue;
    }
    const Key* key = find_key(path);
    if (key == nullptr) fail(path, "unknown key '" + path + "'");
    if (!type_ok(key->kind, it.value())) {
      fail(path, std::string("expected ") + type_name(key->kind) + ", got " + it.value().dump());
    }
    r[path] = it.value();
  }
  if (r["command"].is_null()) fail("command", "missing (required)");
  if (r["alpha"].is_null()) fail("alpha", "missing (required)");

  RunConfig c;
  try {
    c.command = parse_command(r["command"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    fail("command", e.what());
  }
  c.alpha = num(r, "alpha");
  require(c.alpha >= 2.0 && c.alpha < 4.0, "alpha", "must lie in [2, 4), got " + format_number(c.alpha));
  require(integer(r, "seed") >= 0, "seed", "must be nonnegative");
  c.seed = static_cast<std::uint64_t>(at_path(r, "seed").get<double>());
  if (at_path(r, "seed").is_number_unsigned()) c.seed = at_path(r, "seed").get<std::uint64_t>();
  require(integer(r, "workers") >= 0, "workers", "must be nonnegative");
  c.workers = static_cast<unsigned>(integer(r, "workers"));
  c.output_dir = r["output_dir"].get<std::string>();
  require(!c.output_dir.empty(), "output_dir", "must not be empty");
  c.format = r["format"].get<std::string>();
  require(c.format == "csv" || c.format == "json", "format", "must be csv or json, got " + c.format);

  c.grid.periods_x = num(r, "grid.periods_x");
  c.grid.periods_y = num(r, "grid.periods_y");
  require_positive(c.grid.periods_x, "grid.periods_x");
  require_positive(c.grid.periods_y, "grid.periods_y");
  c.grid.modes_x = static_cast<int>(integer(r, "grid.modes_x"));
  c.grid.modes_y = static_cast<int>(integer(r, "grid.modes_y"));
  require(c.grid.modes_x >= 8 && c.grid.modes_x % 2 == 0, "grid.modes_x", "must be even and >= 8");
  require(c.grid.modes_y >= 8 && c.grid.modes_y % 2 == 0, "grid.modes_y", "must be even and >= 8");

  c.data.profile = at_path(r, "data.profile").get<std::string>();
  require(c.data.profile == "gaussian_dx" || c.data.profile == "random" || c.data.profile == "zero",
          "data.profile", "must be gaussian_dx, random or zero, got " + c.data.profile);
  c.data.sigma = num(r, "data.sigma");
  require_positive(c.data.sigma, "data.sigma");
  c.data.l2_norm = num(r, "data.l2_norm");
  require(c.data.l2_norm >= 0.0 && std::isfinite(c.data.l2_norm), "data.l2_norm", "must be >= 0");

  c.evolution.dt = num(r, "evolution.dt");
  c.evolution.T = num(r, "evolution.T");
  try {
    c.evolution.scheme = parse_scheme(at_path(r, "evolution.scheme").get<std::string>());
  } catch (const std::invalid_argument& e) {
    fail("evolution.scheme", e.what());
  }
  c.evolution.dealias = at_path(r, "evolution.dealias").get<bool>();
  c.evolution.snapshot_stride = static_cast<int>(integer(r, "evolution.snapshot_stride"));
  c.evolution.nonlinear = at_path(r, "evolution.nonlinear").get<bool>();
  try {
    c.evolution.validate();
  } catch (const std::invalid_argument& e) {
    fail("evolution", e.what());
  }
  c.export_trajectory = at_path(r, "evolution.export").get<bool>();
  c.mass_tol = num(r, "conserve.mass_tol");
  c.energy_tol = num(r, "conserve.energy_tol");
  require_positive(c.mass_tol, "conserve.mass_tol");
  require_positive(c.energy_tol, "conserve.energy_tol");

  c.probe.dyadic_range = list(r, "probe.dyadic_range");
  if (!c.probe.dyadic_range.empty()) require_dyadic_list(c.probe.dyadic_range, "probe.dyadic_range", 1);
  c.probe.trials_per_point = static_cast<int>(integer(r, "probe.trials_per_point"));
  require(c.probe.trials_per_point >= 1, "probe.trials_per_point", "must be >= 1");
  if (!at_path(r, "probe.band_hi").is_null()) c.probe.band_hi = num(r, "probe.band_hi");
  c.probe.exponent_offset = num(r, "probe.exponent_offset");

  c.strichartz_kind = at_path(r, "strichartz.kind").get<std::string>();
  require(c.strichartz_kind == "linear" || c.strichartz_kind == "lowfreq", "strichartz.kind",
          "must be linear or lowfreq, got " + c.strichartz_kind);
  c.strichartz_q = num(r, "strichartz.q");
  c.strichartz_r = num(r, "strichartz.r");
  c.bilinear_n2 = num(r, "bilinear.n2");
  require(dyadic(c.bilinear_n2), "bilinear.n2", "must be a power of two");
  c.trilinear_regime = at_path(r, "trilinear.regime").get<std::string>();
  require(c.trilinear_regime == "lw" || c.trilinear_regime == "nonresonant", "trilinear.regime",
          "must be lw or nonresonant, got " + c.trilinear_regime);
  c.trilinear_n1 = num(r, "trilinear.n1");
  c.trilinear_n2 = num(r, "trilinear.n2");
  c.trilinear_l = num(r, "trilinear.l");
  c.trilinear_steps_per_l = num(r, "trilinear.steps_per_l");
  require(dyadic(c.trilinear_n1), "trilinear.n1", "must be a power of two");
  require(dyadic(c.trilinear_n2), "trilinear.n2", "must be a power of two");
  require(dyadic(c.trilinear_l), "trilinear.l", "must be a power of two >= 1");
  require_positive(c.trilinear_steps_per_l, "trilinear.steps_per_l");

  c.scaling_s1 = num(r, "scaling.s1");
  c.scaling_s2 = num(r, "scaling.s2");
  c.scaling_lambdas = list(r, "scaling.lambdas");
  require(c.scaling_lambdas.size() >= 2, "scaling.lambdas", "needs at least 2 values");
  for (double l : c.scaling_lambdas) require_positive(l, "scaling.lambdas");

  c.ill_theta = num(r, "illposedness.theta");
  require_positive(c.ill_theta, "illposedness.theta");
  c.ill_n_list = list(r, "illposedness.n_list");
  require_dyadic_list(c.ill_n_list, "illposedness.n_list", 5);
  c.ill_s1 = num(r, "illposedness.s1");
  c.ill_s2 = num(r, "illposedness.s2");
  c.ill_t = num(r, "illposedness.t");
  require_positive(c.ill_t, "illposedness.t");
  c.ill_quad_res = static_cast<int>(integer(r, "illposedness.quad_res"));
  require(c.ill_quad_res >= 8, "illposedness.quad_res", "must be >= 8");

  c.scan_n_list = list(r, "resonance_scan.n_list");
  require_dyadic_list(c.scan_n_list, "resonance_scan.n_list", 1);
  c.scan_theta = num(r, "resonance_scan.theta");
  require_positive(c.scan_theta, "resonance_scan.theta");
  c.scan_samples = static_cast<int>(integer(r, "resonance_scan.samples"));
  require(c.scan_samples >= 1, "resonance_scan.samples", "must be >= 1");
  c.scan_lower = num(r, "resonance_scan.lower");
  c.scan_upper = num(r, "resonance_scan.upper");

  c.trans_n_max = num(r, "transversality.n_max");
  require(dyadic(c.trans_n_max), "transversality.n_max", "must be a power of two");
  c.trans_n_min_list = list(r, "transversality.n_min_list");
  require_dyadic_list(c.trans_n_min_list, "transversality.n_min_list", 1);
  c.trans_samples = static_cast<int>(integer(r, "transversality.samples"));
  require(c.trans_samples >= 1, "transversality.samples", "must be >= 1");
  c.trans_threshold = num(r, "transversality.threshold");
  require_positive(c.trans_threshold, "transversality.threshold");
  c.trans_lower = num(r, "transversality.lower");
  c.trans_upper = num(r, "transversality.upper");

  c.resolved_json = r.dump(2);
  return c;
}

std::string config_reference() {
  std::ostringstream out;
  std::size_t width = 0;
  for (const Key& k : keys()) width = std::max(width, std::string(k.path).size());
  for (const Key& k : keys()) {
    const std::string def = k.def.is_null() && (std::string(k.path) == "command" || std::string(k.path) == "alpha")
                                ? "(required)"
                                : k.def.dump();
    out << "  " << std::left << std::setw(static_cast<int>(width)) << k.path << "  " << def << "\n      "
        << k.doc << "\n";
  }
  return out.str();
}

namespace {

struct Curve {
  std::string name;
  std::vector<double> x, y;
};

struct Collector {
  std::vector<ExperimentRecord> records;
  std::vector<SlopeReport> reports;
  std::vector<Curve> curves;
};

SpectralField initial_data(const RunConfig& c, const FrequencyGrid& g) {
  if (c.data.profile == "zero" || c.data.l2_norm == 0.0) return SpectralField(g, true);
  const double s = c.data.sigma;
  SpectralField f(g, true);
  if (c.data.profile == "gaussian_dx") {
    f = SpectralField::from_function(g, true, [&](double xi, double eta) {
      return Complex(0.0, xi) * std::exp(-s * s * (xi * xi + eta * eta) / 4);
    });
  } else {
    Rng rng(c.seed);
    std::vector<Complex> coeffs(g.size());
    for (int i = 0; i < g.modes_x(); ++i) {
      for (int j = 0; j < g.modes_y(); ++j) {
        const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
        if (i == 0 || g.nyquist(i, j)) continue;
        const double xi = g.xi(i), eta = g.eta(j);
        coeffs[g.index(i, j)] = Complex(a, b) * std::exp(-s * s * (xi * xi + eta * eta) / 4);
      }
    }
    f = SpectralField(g, coeffs, true);
  }
  const double m = mass_spectral(f);
  if (!(m > 0.0)) throw std::runtime_error("initial data vanishes on this grid (sigma too large?)");
  f *= c.data.l2_norm / std::sqrt(m);
  return f;
}

double relative(double now, double start) {
  return start != 0.0 ? std::abs(now - start) / std::abs(start) : std::abs(now - start);
}

void run_simulate(const RunConfig& c, Collector& out, std::ostream& log) {
  const DispersionParams p(c.alpha);
  const SpectralField u0 = initial_data(c, c.grid.make());
  const Trajectory tr = solve(p, u0, c.evolution);
  if (c.export_trajectory) export_trajectory(c.output_dir / "trajectory", p, c.evolution, tr);
  const double m0 = mass(u0);
  Curve cm{"mass", {}, {}}, ce{"energy", {}, {}};
  for (const Snapshot& s : tr) {
    ExperimentRecord rec;
    rec.probe = "simulate";
    rec.alpha = c.alpha;
    rec.set("t", s.t);
    const double m = mass(s.field), e = energy_alpha(p, s.field);
    rec.set("energy", e);
    rec.set("max_abs", s.field.max_abs());
    rec.measured = m;
    rec.comparator = m0;
    rec.finish_ratio();
    rec.pass = std::isfinite(m) && std::isfinite(e);
    out.records.push_back(rec);
    cm.x.push_back(s.t);
    cm.y.push_back(m);
    ce.x.push_back(s.t);
    ce.y.push_back(e);
  }
  log << "simulate: " << tr.size() << " snapshots to t = " << format_number(tr.back().t) << "\n";
  out.curves.push_back(cm);
  out.curves.push_back(ce);
}

void run_conserve(const RunConfig& c, Collector& out, std::ostream& log) {
  const DispersionParams p(c.alpha);
  const SpectralField u0 = initial_data(c, c.grid.make());
  const Trajectory tr = solve(p, u0, c.evolution);
  const double m0 = mass(u0), e0 = energy_alpha(p, u0);
  Curve cm{"mass_drift", {}, {}}, ce{"energy_drift", {}, {}};
  double worst_m = 0.0, worst_e = 0.0;
  for (const Snapshot& s : tr) {
    const double dm = relative(mass(s.field), m0), de = relative(energy_alpha(p, s.field), e0);
    worst_m = std::max(worst_m, dm);
    worst_e = std::max(worst_e, de);
    cm.x.push_back(s.t);
    cm.y.push_back(dm);
    ce.x.push_back(s.t);
    ce.y.push_back(de);
  }
  auto emit = [&](const char* probe, double drift, double tol, double start) {
    ExperimentRecord rec;
    rec.probe = probe;
    rec.alpha = c.alpha;
    rec.set("T", c.evolution.T);
    rec.set("dt", c.evolution.dt);
    rec.set("modes_x", c.grid.modes_x);
    rec.set("modes_y", c.grid.modes_y);
    rec.set("initial", start);
    rec.measured = drift;
    rec.comparator = tol;
    rec.finish_ratio();
    rec.pass = drift <= tol;
    log << probe << ": max relative drift " << format_number(drift) << " (bound " << format_number(tol)
        << ")\n";
    out.records.push_back(rec);
  };
  emit("mass_drift", worst_m, c.mass_tol, m0);
  emit("energy_drift", worst_e, c.energy_tol, e0);
  out.curves.push_back(cm);
  out.curves.push_back(ce);
}

ProbeSweep make_sweep(const RunConfig& c, std::vector<double> range, double band) {
  ProbeSweep s;
  s.alpha = c.alpha;
  s.dyadic_range = c.probe.dyadic_range.empty() ? std::move(range) : c.probe.dyadic_range;
  s.trials_per_point = c.probe.trials_per_point;
  s.seed = c.seed;
  s.band_hi = std::isnan(c.probe.band_hi) ? band : c.probe.band_hi;
  return s;
}

void collect(ProbeResult r, Collector& out, std::ostream& log) {
  log << r.report.probe << ": slope " << format_number(r.report.slope) << " over " << r.report.x.size()
      << " points, bound [" << format_number(r.report.lower) << ", " << format_number(r.report.upper)
      << "] -> " << (r.report.pass ? "pass" : "FAIL");
  if (!r.report.note.empty()) log << " (" << r.report.note << ")";
  log << "\n";
  for (auto& rec : r.records) out.records.push_back(std::move(rec));
  Curve cv{r.report.probe, r.report.x, r.report.y};
  out.curves.push_back(cv);
  out.reports.push_back(std::move(r.report));
}

void run_strichartz(const RunConfig& c, Collector& out, std::ostream& log) {
  const DispersionParams p(c.alpha);
  const SweepOptions opts{c.probe.exponent_offset, c.workers};
  if (c.strichartz_kind == "linear") {
    const MixedNormSpec spec(c.strichartz_q, c.strichartz_r);
    collect(linear_strichartz_sweep(p, spec, make_sweep(c, {1, 2, 4, 8}, 0.1), opts), out, log);
  } else {
    collect(lowfreq_sweep(p, make_sweep(c, {1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8}, 0.1), opts), out, log);
  }
}

void run_bilinear(const RunConfig& c, Collector& out, std::ostream& log) {
  const DispersionParams p(c.alpha);
  const SweepOptions opts{c.probe.exponent_offset, c.workers};
  collect(bilinear_sweep(p, c.bilinear_n2, make_sweep(c, {8, 16, 32, 64}, 0.1), opts), out, log);
}

void run_trilinear(const RunConfig& c, Collector& out, std::ostream& log) {
  const DispersionParams p(c.alpha);
  TrilinearOptions opts;
  opts.exponent_offset = c.probe.exponent_offset;
  opts.steps_per_l = c.trilinear_steps_per_l;
  opts.workers = c.workers;
  const ProbeSweep sweep = make_sweep(c, {8, 16, 32, 64}, 0.2);
  if (c.trilinear_regime == "lw") {
    collect(lw_sweep(p, c.trilinear_n2, c.trilinear_l, sweep, opts), out, log);
  } else {
    collect(nonresonant_sweep(p, c.trilinear_n1, sweep, opts), out, log);
  }
}

void run_scaling(const RunConfig& c, Collector& out, std::ostream& log) {
  const DispersionParams p(c.alpha);
  collect(scaling_exponent_fit(p, {c.scaling_s1, c.scaling_s2}, c.scaling_lambdas), out, log);
}

void run_illposedness(const RunConfig& c, Collector& out, std::ostream& log) {
  const DispersionParams p(c.alpha);
  collect(illposedness_growth_study(p, c.ill_theta, c.ill_n_list, {c.ill_s1, c.ill_s2}, c.ill_t,
                                    c.ill_quad_res, c.workers),
          out, log);
}

// Range records: measured = largest ratio, comparator = the upper bound, and the pass
// flag asks for the whole range inside [lower, upper]. One-sided (upper = inf) records
// compare the smallest ratio with the lower bound instead.
ExperimentRecord range_record(const char* probe, double alpha, double lo, double hi, double lower,
                              double upper) {
  ExperimentRecord rec;
  rec.probe = probe;
  rec.alpha = alpha;
  rec.set("ratio_min", lo);
  rec.set("ratio_max", hi);
  rec.set("lower", lower);
  rec.set("upper", upper);
  rec.measured = std::isinf(upper) ? lo : hi;
  rec.comparator = std::isinf(upper) ? lower : upper;
  rec.finish_ratio();
  rec.pass = lo >= lower && hi <= upper;
  return rec;
}

void run_resonance_scan(const RunConfig& c, Collector& out, std::ostream& log) {
  const DispersionParams p(c.alpha);
  Curve c1lo{"omega1_ratio_min", {}, {}}, c1hi{"omega1_ratio_max", {}, {}};
  Curve c2lo{"omega_ratio_min", {}, {}}, c2hi{"omega_ratio_max", {}, {}};
  for (double n : c.scan_n_list) {
    const double gamma = std::pow(n, -(c.alpha - 1.0) / 2.0 - c.scan_theta);
    const ResonanceScanReport r =
        resonance_size_scan(p, n, gamma, static_cast<std::size_t>(c.scan_samples), c.seed, c.workers);
    for (int which = 0; which < 2; ++which) {
      const double lo = which == 0 ? r.omega1_ratio_min : r.omega_ratio_min;
      const double hi = which == 0 ? r.omega1_ratio_max : r.omega_ratio_max;
      ExperimentRecord rec = range_record(which == 0 ? "resonance_omega1" : "resonance_omega", c.alpha,
                                          lo, hi, c.scan_lower, c.scan_upper);
      rec.inputs.insert(rec.inputs.begin(), {{"N", format_number(n)},
                                             {"gamma", format_number(gamma)},
                                             {"theta", format_number(c.scan_theta)},
                                             {"samples", std::to_string(c.scan_samples)}});
      log << rec.probe << " N=" << format_number(n) << ": [" << format_number(lo) << ", "
          << format_number(hi) << "]\n";
      out.records.push_back(rec);
    }
    c1lo.x.push_back(n);
    c1lo.y.push_back(r.omega1_ratio_min);
    c1hi.x.push_back(n);
    c1hi.y.push_back(r.omega1_ratio_max);
    c2lo.x.push_back(n);
    c2lo.y.push_back(r.omega_ratio_min);
    c2hi.x.push_back(n);
    c2hi.y.push_back(r.omega_ratio_max);
  }
  for (Curve* cv : {&c1lo, &c1hi, &c2lo, &c2hi}) out.curves.push_back(*cv);
}

void run_transversality(const RunConfig& c, Collector& out, std::ostream& log) {
  const DispersionParams p(c.alpha);
  Curve cx{"cross_ratio_max", {}, {}}, cg{"gradient_ratio_min", {}, {}};
  for (double n_min : c.trans_n_min_list) {
    const TransversalityReport r =
        transversality_check(p, c.trans_n_max, n_min, static_cast<std::size_t>(c.trans_samples), c.seed,
                             c.trans_threshold, 1000, c.workers);
    for (int which = 0; which < 2; ++which) {
      const double lo = which == 0 ? r.cross_ratio_min : r.gradient_ratio_min;
      const double hi = which == 0 ? r.cross_ratio_max : r.gradient_ratio_max;
      ExperimentRecord rec = range_record(which == 0 ? "transversality_cross" : "transversality_gradient",
                                          c.alpha, lo, hi, c.trans_lower,
                                          which == 0 ? c.trans_upper : std::numeric_limits<double>::infinity());
      rec.inputs.insert(rec.inputs.begin(), {{"N_max", format_number(c.trans_n_max)},
                                             {"N_min", format_number(n_min)},
                                             {"threshold", format_number(c.trans_threshold)},
                                             {"accepted", std::to_string(r.accepted)},
                                             {"attempts", std::to_string(r.attempts)}});
      log << rec.probe << " N_min=" << format_number(n_min) << ": [" << format_number(lo) << ", "
          << format_number(hi) << "]\n";
      out.records.push_back(rec);
    }
    cx.x.push_back(n_min);
    cx.y.push_back(r.cross_ratio_max);
    cg.x.push_back(n_min);
    cg.y.push_back(r.gradient_ratio_min);
  }
  out.curves.push_back(cx);
  out.curves.push_back(cg);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_outputs(const RunConfig& c, const Collector& out, std::vector<std::string>& files) {
  namespace fs = std::filesystem;
  const std::string records = c.format == "csv" ? "records.csv" : "records.jsonl";
  {
    std::ofstream f(c.output_dir / records);
    if (!f) throw std::runtime_error("cannot write " + (c.output_dir / records).string());
    if (c.format == "csv") {
      write_csv_header(f);
      for (const auto& r : out.records) write_csv(f, r);
    } else {
      for (const auto& r : out.records) write_jsonl(f, r);
    }
  }
  files.push_back(records);
  if (!out.reports.empty()) {
    Json arr = Json::array();
    for (const auto& r : out.reports) arr.push_back(Json::parse(to_json_text(r)));
    std::ofstream f(c.output_dir / "slopes.json");
    f << arr.dump(2) << "\n";
    files.push_back("slopes.json");
  }
  if (!out.curves.empty()) {
    fs::create_directories(c.output_dir / "plotdata");
    for (const Curve& cv : out.curves) {
      write_plotdata(c.output_dir / "plotdata" / (cv.name + ".dat"), cv.x, cv.y);
      files.push_back("plotdata/" + cv.name + ".dat");
    }
  }
}

}  // namespace

int run(const RunConfig& c, std::ostream& log) {
  namespace fs = std::filesystem;
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(c.output_dir);
  fs::remove(c.output_dir / "FAILED");

  Collector out;
  std::string error;
  try {
    switch (c.command) {
      case Command::simulate: run_simulate(c, out, log); break;
      case Command::conserve: run_conserve(c, out, log); break;
      case Command::strichartz: run_strichartz(c, out, log); break;
      case Command::bilinear: run_bilinear(c, out, log); break;
      case Command::trilinear: run_trilinear(c, out, log); break;
      case Command::scaling: run_scaling(c, out, log); break;
      case Command::illposedness: run_illposedness(c, out, log); break;
      case Command::resonance_scan: run_resonance_scan(c, out, log); break;
      case Command::transversality: run_transversality(c, out, log); break;
    }
  } catch (const std::exception& e) {
    error = e.what();
  }

  std::vector<std::string> files;
  try {
    write_outputs(c, out, files);
  } catch (const std::exception& e) {
    if (error.empty()) error = e.what();
  }

  int code = 0;
  if (!error.empty()) {
    code = 1;
  } else {
    for (const auto& r : out.records) {
      if (!r.flagged() && !r.pass) code = 2;
    }
    for (const auto& r : out.reports) {
      if (!r.pass) code = 2;
    }
  }
  if (code == 1) {
    std::ofstream f(c.output_dir / "FAILED");
    f << error << "\n";
    log << "error: " << error << "\n";
  }

  Json manifest;
  manifest["tool"] = "fkpi-lab";
  manifest["version"] = FKPI_VERSION;
  manifest["fftw"] = std::string(fftw_version);
  manifest["compiler"] = __VERSION__;
  manifest["command"] = to_string(c.command);
  manifest["exit_code"] = code;
  manifest["records"] = out.records.size();
  manifest["outputs"] = files;
  manifest["config"] = Json::parse(c.resolved_json);
  // Everything that differs between identical reruns lives under this one key.
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest["run"] = {{"timestamp", utc_timestamp()}, {"wall_time_seconds", wall}};
  std::ofstream mf(c.output_dir / "manifest.json");
  mf << manifest.dump(2) << "\n";
  return code;
}

}  // namespace fkpi
