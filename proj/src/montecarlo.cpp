#include "leocov/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "leocov/errors.hpp"

namespace leocov::mc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr double kZ95 = 1.959963984540054;

// Probability that the realized gateway disc holds no point at all.
constexpr double kDiscEmpty = 1e-12;

struct BatchPlan {
  std::vector<std::uint64_t> sizes;
};

BatchPlan plan_batches(const MCConfig& mc) {
  BatchPlan plan;
  std::uint64_t left = mc.trials;
  while (left > 0) {
    const std::uint64_t n = std::min(left, mc.batch);
    plan.sizes.push_back(n);
    left -= n;
  }
  return plan;
}

unsigned worker_count(const MCConfig& mc, std::size_t batches) {
  unsigned w = mc.workers != 0 ? mc.workers : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(w, batches));
}

// Runs body(batch_index, size, rng) for every batch across the workers and
// returns the per-batch results in batch order.
template <typename Result, typename Body>
std::vector<Result> run_batches(const MCConfig& mc, const BatchPlan& plan, Body body) {
  std::vector<Result> results(plan.sizes.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t b = next++; b < plan.sizes.size(); b = next++) {
      std::mt19937_64 rng = make_stream(mc.seed, b);
      results[b] = body(b, plan.sizes[b], rng);
    }
  };
  const unsigned workers = worker_count(mc, plan.sizes.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  return results;
}

// Nearest satellite of one trial. The gateway sits at the north pole of the
// Earth; by rotational symmetry only the polar cosine of each satellite
// matters, and for a uniform point on a sphere that cosine is uniform on [-1, 1].
class SatelliteTrial {
 public:
  SatelliteTrial(const ConstellationConfig& cfg, Association association)
      : re_(cfg.earth_radius), association_(association) {
    for (const Shell& s : cfg.shells) {
      const double r = re_ + s.altitude;
      shells_.push_back({r, re_ / r, s.count});
    }
  }

  /// Squared distance to the associated satellite, +inf when there is none
  /// above the horizon.
  double draw_squared_distance(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> cos_dist(-1.0, 1.0);
    double best = std::numeric_limits<double>::infinity();
    bool best_visible = false;
    for (const ShellData& s : shells_) {
      double top = -1.0;
      for (int k = 0; k < s.count; ++k) top = std::max(top, cos_dist(rng));
      const bool visible = top >= s.horizon_cos;
      if (association_ == Association::NearestVisible && !visible) continue;
      const double d2 = re_ * re_ + s.radius * s.radius - 2.0 * re_ * s.radius * top;
      if (d2 < best) {
        best = d2;
        best_visible = visible;
      }
    }
    return best_visible ? best : std::numeric_limits<double>::infinity();
  }

 private:
  struct ShellData {
    double radius;
    double horizon_cos;
    int count;
  };
  double re_;
  Association association_;
  std::vector<ShellData> shells_;
};

class GatewayTrial {
 public:
  GatewayTrial(const SystemConfig& cfg, GatewaySampling sampling)
      : pi_lambda_(std::numbers::pi * cfg.gw_density),
        alpha_(cfg.budget.alpha),
        k_(cfg.thresholds.gamma_u * cfg.budget.sigma2_u / cfg.budget.rho_g),
        sampling_(sampling) {
    disc_mean_ = -std::log(kDiscEmpty);
    disc_radius_ = std::sqrt(disc_mean_ / pi_lambda_);
  }

  bool covered(std::mt19937_64& rng) const {
    const double r = draw_distance(rng);
    std::exponential_distribution<double> fading(1.0);
    const double w = fading(rng);
    if (std::isinf(r)) return false;
    return w >= k_ * std::pow(r, alpha_);
  }

 private:
  double draw_distance(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (sampling_ == GatewaySampling::Direct) {
      double u = unit(rng);
      while (u <= 0.0) u = unit(rng);
      return std::sqrt(-std::log(u) / pi_lambda_);
    }
    std::poisson_distribution<long long> count(disc_mean_);
    const long long n = count(rng);
    if (n == 0) return std::numeric_limits<double>::infinity();
    double nearest = 1.0;
    for (long long i = 0; i < n; ++i) nearest = std::min(nearest, unit(rng));
    return disc_radius_ * std::sqrt(nearest);
  }

  double pi_lambda_;
  double alpha_;
  double k_;
  GatewaySampling sampling_;
  double disc_mean_;
  double disc_radius_;
};

template <typename Trial>
MCEstimate run_bernoulli(const MCConfig& mc, Trial trial) {
  validate(mc);
  const BatchPlan plan = plan_batches(mc);
  const auto successes = run_batches<std::uint64_t>(
      mc, plan, [&](std::size_t, std::uint64_t size, std::mt19937_64& rng) {
        std::uint64_t hits = 0;
        for (std::uint64_t t = 0; t < size; ++t) hits += trial(rng) ? 1 : 0;
        return hits;
      });
  return summarize(successes, plan.sizes, mc.seed);
}

}  // namespace

void validate(const MCConfig& mc) {
  if (mc.trials < 1) throw InvalidParameter("trials must be >= 1");
  if (mc.batch < 1) throw InvalidParameter("batch must be >= 1");
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

MCEstimate summarize(std::span<const std::uint64_t> successes,
                     std::span<const std::uint64_t> sizes, std::uint64_t seed) {
  if (successes.size() != sizes.size()) throw InvalidParameter("batch count mismatch");
  std::uint64_t k = 0;
  std::uint64_t n = 0;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    k += successes[b];
    n += sizes[b];
  }
  MCEstimate est;
  est.seed = seed;
  est.trials_used = n;
  if (n == 0) return est;
  const double nd = static_cast<double>(n);
  est.mean = static_cast<double>(k) / nd;

  const double adjusted = (static_cast<double>(k) + 2.0) / (nd + 4.0);
  double var = adjusted * (1.0 - adjusted) / (nd + 4.0);
  const std::size_t batches = sizes.size();
  if (batches >= 10) {
    double acc = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      const double nb = static_cast<double>(sizes[b]);
      const double dev = static_cast<double>(successes[b]) / nb - est.mean;
      acc += nb * nb * dev * dev;
    }
    const double bd = static_cast<double>(batches);
    var = std::max(var, acc / (nd * nd) * bd / (bd - 1.0));
  }
  est.ci_halfwidth = kZ95 * std::sqrt(var);
  return est;
}

MCEstimate simulate_s_gw(const SystemConfig& cfg, const MCConfig& mc) {
  validate(cfg);
  const double c = link_constant_c(cfg.budget, cfg.thresholds);
  const SatelliteTrial sat(cfg.constellation, mc.association);
  return run_bernoulli(mc, [&](std::mt19937_64& rng) {
    const double d2 = sat.draw_squared_distance(rng);
    const double w = sample_sr_power(cfg.sr, rng);
    return !std::isinf(d2) && w >= c * d2;
  });
}

MCEstimate simulate_gw_u(const SystemConfig& cfg, const MCConfig& mc) {
  validate(cfg);
  const GatewayTrial gw(cfg, mc.gateway_sampling);
  return run_bernoulli(mc, [&](std::mt19937_64& rng) { return gw.covered(rng); });
}

MCEstimate simulate_end_to_end(const SystemConfig& cfg, const MCConfig& mc) {
  validate(cfg);
  const double c = link_constant_c(cfg.budget, cfg.thresholds);
  const SatelliteTrial sat(cfg.constellation, mc.association);
  const GatewayTrial gw(cfg, mc.gateway_sampling);
  return run_bernoulli(mc, [&](std::mt19937_64& rng) {
    const double d2 = sat.draw_squared_distance(rng);
    const double w = sample_sr_power(cfg.sr, rng);
    const bool satellite_ok = !std::isinf(d2) && w >= c * d2;
    const bool user_ok = gw.covered(rng);
    return satellite_ok && user_ok;
  });
}

CoverageReport simulate_report(const SystemConfig& cfg, const MCConfig& mc) {
  const MCEstimate s = simulate_s_gw(cfg, mc);
  const MCEstimate u = simulate_gw_u(cfg, mc);
  const MCEstimate e = simulate_end_to_end(cfg, mc);
  CoverageReport report;
  report.method = Method::MonteCarlo;
  report.p_s_gw = s.mean;
  report.p_gw_u = u.mean;
  report.p_end_to_end = e.mean;
  report.ci_s_gw = s.ci_halfwidth;
  report.ci_gw_u = u.ci_halfwidth;
  report.ci_end_to_end = e.ci_halfwidth;
  return report;
}

std::vector<double> sample_contact_distances(const ConstellationConfig& cfg, const MCConfig& mc) {
  validate(cfg);
  validate(mc);
  const SatelliteTrial trial(cfg, Association::NearestVisible);
  const BatchPlan plan = plan_batches(mc);
  const auto batches = run_batches<std::vector<double>>(
      mc, plan, [&](std::size_t, std::uint64_t size, std::mt19937_64& rng) {
        std::vector<double> out(size);
        for (double& nearest : out) nearest = std::sqrt(trial.draw_squared_distance(rng));
        return out;
      });
  std::vector<double> all;
  all.reserve(mc.trials);
  for (const auto& b : batches) all.insert(all.end(), b.begin(), b.end());
  return all;
}

std::vector<EmpiricalPoint> empirical_contact_cdf(const ConstellationConfig& cfg,
                                                  const MCConfig& mc,
                                                  std::span<const double> grid) {
  if (!std::is_sorted(grid.begin(), grid.end())) throw InvalidParameter("grid must be sorted");
  std::vector<double> d = sample_contact_distances(cfg, mc);
  std::sort(d.begin(), d.end());
  const double n = static_cast<double>(d.size());
  std::vector<EmpiricalPoint> out;
  out.reserve(grid.size());
  for (double g : grid) {
    const auto below = std::lower_bound(d.begin(), d.end(), g) - d.begin();  // strictly < g
    const double p = static_cast<double>(below) / n;
    out.push_back({g, p, kZ95 * std::sqrt(p * (1.0 - p) / n)});
  }
  return out;
}

double ks_distance(std::vector<double>& samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InvalidParameter("ks_distance needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (std::isinf(samples[i])) {
      // Past the last finite jump the empirical CDF stays at i / n.
      worst = std::max(worst, std::fabs(cdf(std::numeric_limits<double>::max()) - i / n));
      break;
    }
    const double f = cdf(samples[i]);
    worst = std::max({worst, std::fabs(f - i / n), std::fabs((i + 1) / n - f)});
  }
  if (!std::isinf(samples.back())) {
    worst = std::max(worst, std::fabs(1.0 - cdf(std::numeric_limits<double>::max())));
  }
  return worst;
}

}  // namespace leocov::mc
