#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "leocov/coverage.hpp"

namespace leocov::mc {

/// Which satellite a gateway associates with.
///   NearestOverall  the nearest satellite of all shells; if it is below its
///                   horizon the trial is not covered.
///   NearestVisible  the nearest satellite among those above the horizon.
/// The two coincide for a single shell.
enum class Association { NearestOverall, NearestVisible };

/// How the nearest-gateway distance is drawn.
///   Direct  R = sqrt(-ln U / (pi lambda)), the planar PPP contact law.
///   Disc    realize the PPP in a disc so large that it is empty with
///           probability below 1e-12, then take the nearest point.
enum class GatewaySampling { Direct, Disc };

struct MCConfig {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  /// Trials per batch. Every batch owns its own random stream, derived from
  /// (seed, batch index), so results do not depend on the worker count.
  std::uint64_t batch = 10000;
  /// 0 means std::thread::hardware_concurrency().
  unsigned workers = 0;
  Association association = Association::NearestOverall;
  GatewaySampling gateway_sampling = GatewaySampling::Direct;

  bool operator==(const MCConfig&) const = default;
};

void validate(const MCConfig& mc);

struct MCEstimate {
  double mean = 0.0;
  /// 95% normal-approximation half-width.
  double ci_halfwidth = 0.0;
  std::uint64_t trials_used = 0;
  std::uint64_t seed = 0;

  bool operator==(const MCEstimate&) const = default;
};

/// Independent random stream number `stream` for a run seeded with `seed`
/// (splitmix64 mixing into a 64-bit Mersenne Twister).
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

/// Success counts per batch -> mean and half-width. The variance comes from
/// the spread of batch means when there are at least 10 batches; it is never
/// taken below the Agresti-Coull binomial variance, so a run with no
/// successes still reports a non-zero half-width.
MCEstimate summarize(std::span<const std::uint64_t> successes,
                     std::span<const std::uint64_t> sizes, std::uint64_t seed);

MCEstimate simulate_s_gw(const SystemConfig& cfg, const MCConfig& mc);
MCEstimate simulate_gw_u(const SystemConfig& cfg, const MCConfig& mc);
MCEstimate simulate_end_to_end(const SystemConfig& cfg, const MCConfig& mc);

/// Monte-Carlo counterpart of p_cov_end_to_end.
CoverageReport simulate_report(const SystemConfig& cfg, const MCConfig& mc);

/// One contact distance per trial: the nearest satellite above its horizon
/// over all shells, +inf when none is visible. Trial order is deterministic.
std::vector<double> sample_contact_distances(const ConstellationConfig& cfg, const MCConfig& mc);

struct EmpiricalPoint {
  double distance = 0.0;
  double cdf = 0.0;
  double ci_halfwidth = 0.0;
};

/// Empirical P(D < d) at each grid point (grid must be sorted).
std::vector<EmpiricalPoint> empirical_contact_cdf(const ConstellationConfig& cfg,
                                                  const MCConfig& mc, std::span<const double> grid);

/// sup_x |F_n(x) - F(x)| for a continuous F, over the jump points of the
/// empirical CDF. Infinite samples count toward n but never jump, which is
/// how a defective F is compared. Sorts `samples` in place.
double ks_distance(std::vector<double>& samples, const std::function<double(double)>& cdf);

}  // namespace leocov::mc
