#pragma once

#include <optional>

#include "leocov/channel.hpp"
#include "leocov/geometry.hpp"

namespace leocov {

struct SystemConfig {
  ConstellationConfig constellation{kDefaultEarthRadius, {Shell{500e3, 50}}};
  LinkBudget budget;
  Thresholds thresholds;
  double gw_density = 1e-5;  // gateways per m^2
  SRFadingParams sr;
  DistributionVariant variant = DistributionVariant::CapArea;

  bool operator==(const SystemConfig&) const = default;
};

void validate(const SystemConfig& cfg);

/// Accuracy knobs for the analytic engine.
struct AnalyticOptions {
  double series_tol = 1e-10;
  double quad_rel_tol = 1e-8;
  double quad_abs_tol = 1e-13;
};

enum class Method { Analytic, MonteCarlo };

struct CoverageReport {
  double p_s_gw = 0.0;
  double p_gw_u = 0.0;
  double p_end_to_end = 0.0;
  std::optional<double> p_abs;
  Method method = Method::Analytic;
  /// 95% half-widths, Monte-Carlo reports only.
  std::optional<double> ci_s_gw;
  std::optional<double> ci_gw_u;
  std::optional<double> ci_end_to_end;
};

/// Gateway-to-user coverage under Rayleigh fading with the nearest gateway of
/// a planar PPP, integral of exp(-gamma_u r^alpha sigma_u^2 / rho_g) against
/// the nearest-neighbour density 2 pi lambda r exp(-pi lambda r^2). The range
/// is cut where exp(-pi lambda r^2) falls below 1e-16.
double p_cov_gw_u(const SystemConfig& cfg, const AnalyticOptions& opts = {});

/// How the satellite-to-gateway integral handles the fading series.
enum class SatelliteIntegration {
  /// Integrate every series term separately over y = D^2, then sum.
  TermByTerm,
  /// Integrate the full SR complementary CDF at each node.
  SeriesInIntegrand,
};

/// Satellite-to-gateway coverage, the integral of (1 - F_W(c y)) f_Y(y) over
/// y = D^2. Never exceeds the visibility mass.
double p_cov_s_gw(const SystemConfig& cfg, const AnalyticOptions& opts = {},
                  SatelliteIntegration mode = SatelliteIntegration::TermByTerm);

/// Same, with the link constant given directly (c = 0 is allowed).
double p_cov_s_gw_for_constant(double c, const ContactDistribution& dist,
                               const SRFadingParams& sr, const AnalyticOptions& opts = {},
                               SatelliteIntegration mode = SatelliteIntegration::TermByTerm);

/// Analytic report: both links and their product.
CoverageReport p_cov_end_to_end(const SystemConfig& cfg, const AnalyticOptions& opts = {});

/// Coverage from an anchored base station at distance R under Rayleigh fading.
double p_cov_abs(double distance, const LinkBudget& budget, const Thresholds& th);

/// Distance R* at which the base station coverage equals the end-to-end
/// satellite coverage; the satellite system is preferable beyond it.
/// Returns 0 when the end-to-end coverage is 1.
double crossover_abs_distance(const SystemConfig& cfg, const AnalyticOptions& opts = {});

/// R* for a given end-to-end coverage target in (0, 1].
double crossover_abs_distance_for(double p_end_to_end, const LinkBudget& budget,
                                  const Thresholds& th);

/// Smallest gateway density whose end-to-end coverage reaches the base
/// station coverage at distance abs_distance. Throws NoCrossover when even the
/// satellite link alone cannot beat the base station.
double crossover_gw_density(const SystemConfig& cfg, double abs_distance,
                            const AnalyticOptions& opts = {});

/// Lower end of the density search; returned when any density suffices.
inline constexpr double kGwDensityFloor = 1e-12;

}  // namespace leocov
