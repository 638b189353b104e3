#include "leocov/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "leocov/errors.hpp"
#include "leocov/numerics.hpp"

namespace leocov {

namespace {

// exp(-pi lambda r^2) < kGwTail beyond the truncation radius.
constexpr double kGwTail = 1e-16;

constexpr std::size_t kMaxSeriesTerms = 100000;

double upper_gamma_at(std::size_t order, double x, std::vector<double>& scratch) {
  scratch.resize(order);
  regularized_gamma_q_ladder(x, order, scratch.data());
  return scratch.back();
}

numerics::QuadratureSpec squared_distance_spec(const ContactDistribution& dist,
                                               const AnalyticOptions& opts) {
  numerics::QuadratureSpec spec;
  spec.lower = dist.support_min() * dist.support_min();
  spec.upper = dist.support_max() * dist.support_max();
  for (double b : dist.breakpoints()) spec.breakpoints.push_back(b * b);
  spec.rel_tol = opts.quad_rel_tol;
  spec.abs_tol = opts.quad_abs_tol;
  return spec;
}

}  // namespace

void validate(const SystemConfig& cfg) {
  validate(cfg.constellation);
  validate(cfg.budget);
  validate(cfg.thresholds);
  validate(cfg.sr);
  if (!(cfg.gw_density > 0.0) || !std::isfinite(cfg.gw_density)) {
    throw InvalidParameter("gw_density must be > 0");
  }
}

double p_cov_gw_u(const SystemConfig& cfg, const AnalyticOptions& opts) {
  validate(cfg);
  const double lambda = cfg.gw_density;
  const double alpha = cfg.budget.alpha;
  const double k = cfg.thresholds.gamma_u * cfg.budget.sigma2_u / cfg.budget.rho_g;
  const double pi_lambda = std::numbers::pi * lambda;
  const double r_max = std::sqrt(-std::log(kGwTail) / pi_lambda);

  numerics::QuadratureSpec spec;
  spec.integrand = [&](double r) {
    return 2.0 * pi_lambda * r * std::exp(-k * std::pow(r, alpha) - pi_lambda * r * r);
  };
  spec.lower = 0.0;
  spec.upper = r_max;
  spec.rel_tol = opts.quad_rel_tol;
  spec.abs_tol = opts.quad_abs_tol;
  return std::clamp(numerics::integrate(spec).value, 0.0, 1.0);
}

double p_cov_s_gw_for_constant(double c, const ContactDistribution& dist,
                               const SRFadingParams& sr, const AnalyticOptions& opts,
                               SatelliteIntegration mode) {
  validate(sr);
  if (!(c >= 0.0)) throw InvalidParameter("link constant must be >= 0");
  const double mass = dist.visibility_mass();
  if (c == 0.0) return mass;
  if (std::isinf(c)) return 0.0;

  numerics::QuadratureSpec spec = squared_distance_spec(dist, opts);
  const double scale = c / (2.0 * sr.b0);

  if (mode == SatelliteIntegration::SeriesInIntegrand) {
    spec.integrand = [&](double y) {
      return sr_ccdf(c * y, sr, opts.series_tol) * dist.pdf_squared(y);
    };
    return std::clamp(numerics::integrate(spec).value, 0.0, mass);
  }

  // Term z integrates Q(z + 1, c y / (2 b0)) f_Y(y), at most the visibility
  // mass, so mass times the weight tail bounds the rest.
  const SRSeriesWeights weights(sr);
  // weight ratios stay >= 1 (no tail bound) until z passes (beta m - 1) / (1 - beta)
  const double onset = (weights.beta() * sr.m - 1.0) / (1.0 - weights.beta());
  if (onset >= static_cast<double>(kMaxSeriesTerms)) {
    throw NonConvergence("fading series cannot be bounded within " +
                             std::to_string(kMaxSeriesTerms) + " terms",
                         0.0, 0);
  }
  double weight = weights.first();
  std::vector<double> scratch;
  numerics::SeriesSpec series;
  series.tolerance = opts.series_tol;
  series.max_terms = kMaxSeriesTerms;
  series.next = [&](std::size_t z) {
    spec.integrand = [&, z](double y) {
      return upper_gamma_at(z + 1, scale * y, scratch) * dist.pdf_squared(y);
    };
    const double integral = numerics::integrate(spec).value;
    const double term = weight * integral;
    weight *= weights.ratio(z);
    const double rho = weights.ratio_bound(z + 1);
    const double tail = std::isinf(rho) ? rho : mass * weight / (1.0 - rho);
    return numerics::SeriesTerm{term, tail};
  };
  return std::clamp(numerics::sum_series(series).value, 0.0, mass);
}

double p_cov_s_gw(const SystemConfig& cfg, const AnalyticOptions& opts,
                  SatelliteIntegration mode) {
  validate(cfg);
  const ContactDistribution dist(cfg.constellation, cfg.variant);
  return p_cov_s_gw_for_constant(link_constant_c(cfg.budget, cfg.thresholds), dist, cfg.sr, opts,
                                 mode);
}

CoverageReport p_cov_end_to_end(const SystemConfig& cfg, const AnalyticOptions& opts) {
  CoverageReport report;
  report.method = Method::Analytic;
  report.p_s_gw = p_cov_s_gw(cfg, opts);
  report.p_gw_u = p_cov_gw_u(cfg, opts);
  report.p_end_to_end = report.p_s_gw * report.p_gw_u;
  return report;
}

double p_cov_abs(double distance, const LinkBudget& budget, const Thresholds& th) {
  if (!(distance >= 0.0)) throw InvalidParameter("base station distance must be >= 0");
  validate(budget);
  validate(th);
  return std::exp(-th.gamma_u * std::pow(distance, budget.alpha) * budget.sigma2_u / budget.rho_a);
}

double crossover_abs_distance_for(double p_end_to_end, const LinkBudget& budget,
                                  const Thresholds& th) {
  if (!(p_end_to_end <= 1.0)) throw InvalidParameter("coverage target must be in (0, 1]");
  if (!(p_end_to_end > 0.0)) throw NoCrossover("end-to-end coverage is 0; no crossover");
  if (p_end_to_end >= 1.0) return 0.0;
  auto gap = [&](double r) { return p_cov_abs(r, budget, th) - p_end_to_end; };
  double hi = 1.0;
  while (gap(hi) > 0.0) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NoCrossover("base station coverage never drops to the target");
  }
  return numerics::bisect(gap, 0.0, hi, 1e-10 * hi);
}

double crossover_abs_distance(const SystemConfig& cfg, const AnalyticOptions& opts) {
  const CoverageReport report = p_cov_end_to_end(cfg, opts);
  return crossover_abs_distance_for(report.p_end_to_end, cfg.budget, cfg.thresholds);
}

double crossover_gw_density(const SystemConfig& cfg, double abs_distance,
                            const AnalyticOptions& opts) {
  validate(cfg);
  const double target = p_cov_abs(abs_distance, cfg.budget, cfg.thresholds);
  if (!(target > 0.0)) return kGwDensityFloor;
  const double satellite = p_cov_s_gw(cfg, opts);
  if (!(satellite > target)) {
    throw NoCrossover("satellite link coverage does not exceed the base station coverage; "
                      "no gateway density suffices");
  }

  SystemConfig probe = cfg;
  auto reaches = [&](double log_density) {
    probe.gw_density = std::pow(10.0, log_density);
    return satellite * p_cov_gw_u(probe, opts) >= target;
  };

  double lo = std::log10(kGwDensityFloor);
  if (reaches(lo)) return kGwDensityFloor;
  double hi = lo;
  constexpr double kLogCeiling = 2.0;  // 100 gateways per m^2
  do {
    lo = hi;
    hi += 1.0;
    if (hi > kLogCeiling) throw NoCrossover("no gateway density up to 100 per m^2 reaches target");
  } while (!reaches(hi));

  // Keep hi feasible and lo infeasible; return the feasible end.
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (reaches(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return std::pow(10.0, hi);
}

}  // namespace leocov
