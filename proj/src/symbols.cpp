#include "fkpi/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fkpi/parallel.hpp"
#include "fkpi/random.hpp"

namespace fkpi {

namespace {

// Samples per deterministic RNG stream; fixes the stream layout independently of the worker count.
constexpr std::size_t kChunk = 4096;

}  // namespace

DispersionParams::DispersionParams(double alpha) : alpha_(alpha) {
  if (!(alpha >= 2.0 && alpha < 4.0)) {
    std::ostringstream msg;
    msg << "alpha must lie in [2, 4), got " << alpha;
    throw std::invalid_argument(msg.str());
  }
}

void validate(const FreqPoint& p) {
  if (!std::isfinite(p.xi) || !std::isfinite(p.eta)) {
    throw std::invalid_argument("FreqPoint: coordinates must be finite");
  }
  if (p.xi == 0.0) throw std::invalid_argument("FreqPoint: xi must be nonzero");
}

void validate(const FreqPair& q) {
  validate(q.p1);
  validate(q.p2);
  if (q.p1.xi + q.p2.xi == 0.0) throw std::invalid_argument("FreqPair: xi1 + xi2 must be nonzero");
}

double signed_power(double x, double alpha) {
  return std::copysign(std::pow(std::abs(x), alpha + 1.0), x);
}

double omega(const DispersionParams& params, const FreqPoint& p) {
  return signed_power(p.xi, params.alpha()) + p.eta * p.eta / p.xi;
}

std::array<double, 2> grad_omega(const DispersionParams& params, const FreqPoint& p) {
  const double a = params.alpha();
  const double s = p.eta / p.xi;
  return {(a + 1.0) * std::pow(std::abs(p.xi), a) - s * s, 2.0 * s};
}

double omega1_part(const DispersionParams& params, const FreqPair& q) {
  const double a = params.alpha();
  return signed_power(q.p1.xi + q.p2.xi, a) - signed_power(q.p1.xi, a) - signed_power(q.p2.xi, a);
}

double omega2_part(const DispersionParams&, const FreqPair& q) {
  const double c = q.p1.eta * q.p2.xi - q.p2.eta * q.p1.xi;
  return c * c / (q.p1.xi * q.p2.xi * (q.p1.xi + q.p2.xi));
}

double resonance_fraction(const DispersionParams& params, const FreqPair& q) {
  return omega1_part(params, q) - omega2_part(params, q);
}

double resonance_difference(const DispersionParams& params, const FreqPair& q) {
  return omega(params, q.sum()) - omega(params, q.p1) - omega(params, q.p2);
}

double resonance_term_scale(const DispersionParams& params, const FreqPair& q) {
  return std::max({std::abs(omega(params, q.sum())), std::abs(omega(params, q.p1)),
                   std::abs(omega(params, q.p2))});
}

std::array<double, 3> surface_normal(const DispersionParams& params, const FreqPoint& p) {
  const auto g = grad_omega(params, p);
  return {1.0, -g[0], -g[1]};
}

double normal_determinant_numeric(const DispersionParams& params, const FreqPair& q) {
  const auto a = surface_normal(params, q.p1);
  const auto b = surface_normal(params, q.p2);
  const auto c = surface_normal(params, q.sum());
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

double normal_determinant_closed(const DispersionParams& params, const FreqPair& q) {
  const double a = params.alpha();
  const double x1 = q.p1.xi;
  const double x2 = q.p2.xi;
  const double c = q.p1.eta * x2 - q.p2.eta * x1;
  const double d = x1 * x2 * (x1 + x2);
  const double bracket =
      (a + 1.0) * (signed_power(x1, a) + signed_power(x2, a) - signed_power(x1 + x2, a)) - c * c / d;
  return -2.0 * c / d * bracket;
}

// Scans -------------------------------------------------------------------------

ResonanceScanReport resonance_size_scan(const DispersionParams& params, double n, double gamma,
                                        std::size_t samples, std::uint64_t seed,
                                        unsigned workers) {
  if (!(n > 0.0) || !std::isfinite(n) || !(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("resonance_size_scan: N and gamma must be positive and finite");
  }
  if (!(gamma < n)) throw std::invalid_argument("resonance_size_scan: gamma must be below N");
  if (samples == 0) throw std::invalid_argument("resonance_size_scan: samples must be positive");

  const double a = params.alpha();
  const double root = std::sqrt(1.0 + a);
  const double eta1_half = root * gamma * gamma;
  const double eta2_lo = root * std::pow(n, (a + 2.0) / 2.0);
  const double eta2_hi = eta2_lo + gamma * gamma;
  if (!(gamma / 2.0 < gamma) || !(n < n + gamma) || !(eta1_half > 0.0) || !(eta2_lo < eta2_hi)) {
    throw std::invalid_argument("resonance_size_scan: box of zero width in floating point");
  }

  const double scale1 = std::pow(n, a) * gamma;
  const double scale2 = std::pow(n, a - 1.0) * gamma * gamma;
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  struct Range {
    double lo1, hi1, lo2, hi2;
  };
  std::vector<Range> partial(chunks);
  parallel_for(
      chunks,
      [&](std::size_t c) {
        Rng rng = Rng::stream(seed, c);
        Range r{std::numeric_limits<double>::infinity(), 0.0,
                std::numeric_limits<double>::infinity(), 0.0};
        const std::size_t end = std::min(samples, (c + 1) * kChunk);
        for (std::size_t s = c * kChunk; s < end; ++s) {
          FreqPair q;
          q.p1.xi = rng.uniform(gamma / 2.0, gamma);
          q.p1.eta = rng.uniform(-eta1_half, eta1_half);
          q.p2.xi = rng.uniform(n, n + gamma);
          q.p2.eta = rng.uniform(eta2_lo, eta2_hi);
          const double r1 = std::abs(omega1_part(params, q)) / scale1;
          const double r2 = std::abs(resonance_fraction(params, q)) / scale2;
          r.lo1 = std::min(r.lo1, r1);
          r.hi1 = std::max(r.hi1, r1);
          r.lo2 = std::min(r.lo2, r2);
          r.hi2 = std::max(r.hi2, r2);
        }
        partial[c] = r;
      },
      workers);

  ResonanceScanReport report;
  report.alpha = a;
  report.n = n;
  report.gamma = gamma;
  report.theta = -std::log(gamma) / std::log(n) - (a - 1.0) / 2.0;
  report.samples = samples;
  report.seed = seed;
  report.omega1_ratio_min = report.omega_ratio_min = std::numeric_limits<double>::infinity();
  for (const Range& r : partial) {
    report.omega1_ratio_min = std::min(report.omega1_ratio_min, r.lo1);
    report.omega1_ratio_max = std::max(report.omega1_ratio_max, r.hi1);
    report.omega_ratio_min = std::min(report.omega_ratio_min, r.lo2);
    report.omega_ratio_max = std::max(report.omega_ratio_max, r.hi2);
  }
  return report;
}

TransversalityReport transversality_check(const DispersionParams& params, double n_max,
                                          double n_min, std::size_t samples, std::uint64_t seed,
                                          double threshold, std::size_t max_attempts_per_sample,
                                          unsigned workers) {
  if (!(n_max > 0.0) || !(n_min > 0.0) || !std::isfinite(n_max) || !(n_min <= n_max)) {
    throw std::invalid_argument("transversality_check: need 0 < N_min <= N_max");
  }
  if (samples == 0) throw std::invalid_argument("transversality_check: samples must be positive");
  if (!(threshold >= 0.0)) throw std::invalid_argument("transversality_check: threshold must be >= 0");

  const double a = params.alpha();
  const double slope_max = 2.0 * std::sqrt(a + 1.0) * std::pow(n_max, a / 2.0);
  const double cross_scale = std::pow(n_max, a / 2.0 + 1.0) * n_min;
  const double grad_scale = std::pow(n_max, a / 2.0);
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;

  struct Partial {
    std::size_t accepted = 0;
    std::size_t attempts = 0;
    double lo1 = std::numeric_limits<double>::infinity(), hi1 = 0.0;
    double lo2 = std::numeric_limits<double>::infinity(), hi2 = 0.0;
  };
  std::vector<Partial> partial(chunks);
  parallel_for(
      chunks,
      [&](std::size_t c) {
        Rng rng = Rng::stream(seed, c);
        const std::size_t want = std::min(samples, (c + 1) * kChunk) - c * kChunk;
        const std::size_t chunk_budget = want * max_attempts_per_sample;
        Partial p;
        while (p.accepted < want && p.attempts < chunk_budget) {
          ++p.attempts;
          FreqPair q;
          q.p1.xi = rng.sign() * rng.uniform(n_max / 2.0, n_max);
          q.p2.xi = rng.sign() * rng.uniform(n_min / 2.0, n_min);
          // Guards the symbol singularity; also excludes xi1 + xi2 = 0 when N_max = N_min.
          if (std::abs(q.p1.xi) < 1e-8 || std::abs(q.p2.xi) < 1e-8 ||
              std::abs(q.p1.xi + q.p2.xi) < 1e-8) {
            continue;
          }
          q.p1.eta = q.p1.xi * rng.uniform(-slope_max, slope_max);
          q.p2.eta = q.p2.xi * rng.uniform(-slope_max, slope_max);
          const double om1 = omega1_part(params, q);
          if (!(std::abs(resonance_fraction(params, q)) <= threshold * std::abs(om1))) continue;
          ++p.accepted;
          const double r1 = std::abs(q.p1.eta * q.p2.xi - q.p2.eta * q.p1.xi) / cross_scale;
          const auto g1 = grad_omega(params, q.p1);
          const auto g2 = grad_omega(params, q.p2);
          const double r2 = std::hypot(g1[0] - g2[0], g1[1] - g2[1]) / grad_scale;
          p.lo1 = std::min(p.lo1, r1);
          p.hi1 = std::max(p.hi1, r1);
          p.lo2 = std::min(p.lo2, r2);
          p.hi2 = std::max(p.hi2, r2);
        }
        partial[c] = p;
      },
      workers);

  TransversalityReport report;
  report.alpha = a;
  report.n_max = n_max;
  report.n_min = n_min;
  report.threshold = threshold;
  report.requested = samples;
  report.seed = seed;
  report.cross_ratio_min = report.gradient_ratio_min = std::numeric_limits<double>::infinity();
  for (const Partial& p : partial) {
    report.accepted += p.accepted;
    report.attempts += p.attempts;
    report.cross_ratio_min = std::min(report.cross_ratio_min, p.lo1);
    report.cross_ratio_max = std::max(report.cross_ratio_max, p.hi1);
    report.gradient_ratio_min = std::min(report.gradient_ratio_min, p.lo2);
    report.gradient_ratio_max = std::max(report.gradient_ratio_max, p.hi2);
  }
  if (report.accepted == 0) {
    std::ostringstream msg;
    msg << "transversality_check: no resonant sample among " << report.attempts
        << " attempts (N_max=" << n_max << ", N_min=" << n_min << ", threshold=" << threshold
        << "); the configuration admits no resonant interactions at this resolution";
    throw std::runtime_error(msg.str());
  }
  return report;
}

}  // namespace fkpi
