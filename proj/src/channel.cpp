#include "leocov/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "leocov/errors.hpp"
#include "leocov/numerics.hpp"

namespace leocov {

namespace {

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

constexpr std::size_t kSeriesMaxTerms = 100000;

}  // namespace

void validate(const SRFadingParams& p) {
  if (!positive_finite(p.omega)) throw InvalidParameter("SR omega must be > 0");
  if (!positive_finite(p.b0)) throw InvalidParameter("SR b0 must be > 0");
  if (!positive_finite(p.m)) throw InvalidParameter("SR m must be > 0");
}

void validate(const LinkBudget& lb) {
  if (!positive_finite(lb.carrier_freq)) throw InvalidParameter("carrier_freq must be > 0");
  if (!positive_finite(lb.rho_s)) throw InvalidParameter("rho_s must be > 0");
  if (!positive_finite(lb.rho_g)) throw InvalidParameter("rho_g must be > 0");
  if (!positive_finite(lb.rho_a)) throw InvalidParameter("rho_a must be > 0");
  if (!positive_finite(lb.sigma2_g)) throw InvalidParameter("sigma2_g must be > 0");
  if (!positive_finite(lb.sigma2_u)) throw InvalidParameter("sigma2_u must be > 0");
  if (!positive_finite(lb.gr2)) throw InvalidParameter("gr2 must be > 0");
  if (!positive_finite(lb.rain_s)) throw InvalidParameter("rain_s must be > 0");
  if (!positive_finite(lb.xi)) throw InvalidParameter("xi must be > 0");
  if (!positive_finite(lb.alpha)) throw InvalidParameter("alpha must be > 0");
}

void validate(const Thresholds& th) {
  if (!positive_finite(th.gamma_g)) throw InvalidParameter("gamma_g must be > 0");
  if (!positive_finite(th.gamma_u)) throw InvalidParameter("gamma_u must be > 0");
}

SRSeriesWeights::SRSeriesWeights(const SRFadingParams& p) : m_(p.m) {
  validate(p);
  beta_ = p.omega / (2.0 * p.b0 * p.m + p.omega);
  w0_ = std::exp(p.m * std::log1p(-beta_));
}

double SRSeriesWeights::ratio(std::size_t z) const {
  const double k = static_cast<double>(z);
  return beta_ * (m_ + k) / (k + 1.0);
}

// ratio(k) is monotone in k and tends to beta, so its supremum over k >= z is
// the larger of ratio(z) and beta.
double SRSeriesWeights::ratio_bound(std::size_t z) const {
  const double r = std::max(ratio(z), beta_);
  return r < 1.0 ? r : std::numeric_limits<double>::infinity();
}

void regularized_gamma_ladder(double x, std::size_t count, double* out) {
  if (count == 0) return;
  if (!(x > 0.0)) {
    std::fill(out, out + count, 0.0);
    return;
  }
  if (std::isinf(x)) {
    std::fill(out, out + count, 1.0);
    return;
  }
  const double log_x = std::log(x);
  double p = -std::expm1(-x);  // P(1, x)
  double log_term = -x;        // log of x^0 e^{-x} / 0!
  out[0] = p;
  for (std::size_t k = 1; k < count; ++k) {
    log_term += log_x - std::log(static_cast<double>(k));
    p -= std::exp(log_term);
    out[k] = std::clamp(p, 0.0, 1.0);
  }
}

void regularized_gamma_q_ladder(double x, std::size_t count, double* out) {
  if (count == 0) return;
  if (!(x > 0.0)) {
    std::fill(out, out + count, 1.0);
    return;
  }
  if (std::isinf(x)) {
    std::fill(out, out + count, 0.0);
    return;
  }
  const double log_x = std::log(x);
  double log_term = -x;
  double q = std::exp(log_term);  // Q(1, x)
  out[0] = q;
  for (std::size_t k = 1; k < count; ++k) {
    log_term += log_x - std::log(static_cast<double>(k));
    q += std::exp(log_term);
    out[k] = std::min(q, 1.0);
  }
}

double sr_cdf(double t, const SRFadingParams& p, double tol) {
  if (!(t >= 0.0)) throw InvalidParameter("sr_cdf argument must be >= 0");
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidParameter("sr_cdf tolerance must be in (0, 1)");
  const SRSeriesWeights weights(p);
  if (t == 0.0) return 0.0;
  const double x = t / (2.0 * p.b0);
  if (std::isinf(x)) return 1.0;

  const double log_x = std::log(x);
  double weight = weights.first();
  double gamma_p = -std::expm1(-x);  // P(z + 1, x)
  double log_poisson = -x;           // log(x^z e^{-x} / z!)

  numerics::SeriesSpec spec;
  spec.tolerance = tol;
  spec.max_terms = kSeriesMaxTerms;
  spec.next = [&](std::size_t z) {
    const double term = weight * gamma_p;
    // Advance to z + 1.
    weight *= weights.ratio(z);
    log_poisson += log_x - std::log(static_cast<double>(z + 1));
    gamma_p = std::max(0.0, gamma_p - std::exp(log_poisson));
    const double rho = weights.ratio_bound(z + 1);
    const double tail = std::isinf(rho) ? rho : gamma_p * weight / (1.0 - rho);
    return numerics::SeriesTerm{term, tail};
  };
  try {
    return std::clamp(numerics::sum_series(spec).value, 0.0, 1.0);
  } catch (const NonConvergence& e) {
    throw NonConvergence(std::string("sr_cdf: ") + e.what(), e.partial_sum(), e.terms());
  }
}

double sr_ccdf(double t, const SRFadingParams& p, double tol) {
  if (!(t >= 0.0)) throw InvalidParameter("sr_ccdf argument must be >= 0");
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidParameter("sr_ccdf tolerance must be in (0, 1)");
  const SRSeriesWeights weights(p);
  if (t == 0.0) return 1.0;
  const double x = t / (2.0 * p.b0);
  if (std::isinf(x)) return 0.0;

  const double log_x = std::log(x);
  double weight = weights.first();
  double log_poisson = -x;             // log(x^z e^{-x} / z!)
  double gamma_q = std::exp(-x);       // Q(z + 1, x)

  numerics::SeriesSpec spec;
  spec.tolerance = tol;
  spec.max_terms = kSeriesMaxTerms;
  spec.next = [&](std::size_t z) {
    const double term = weight * std::min(gamma_q, 1.0);
    weight *= weights.ratio(z);
    log_poisson += log_x - std::log(static_cast<double>(z + 1));
    gamma_q += std::exp(log_poisson);
    const double rho = weights.ratio_bound(z + 1);
    const double tail = std::isinf(rho) ? rho : weight / (1.0 - rho);
    return numerics::SeriesTerm{term, tail};
  };
  try {
    return std::clamp(numerics::sum_series(spec).value, 0.0, 1.0);
  } catch (const NonConvergence& e) {
    throw NonConvergence(std::string("sr_ccdf: ") + e.what(), e.partial_sum(), e.terms());
  }
}

double sample_sr_power(const SRFadingParams& p, std::mt19937_64& rng) {
  std::gamma_distribution<double> los_power(p.m, p.omega / p.m);
  std::normal_distribution<double> scatter(0.0, std::sqrt(p.b0));
  const double amplitude = std::sqrt(los_power(rng));
  const double re = amplitude + scatter(rng);
  const double im = scatter(rng);
  return re * re + im * im;
}

double link_constant_c(const LinkBudget& lb, const Thresholds& th) {
  validate(lb);
  validate(th);
  const double lambda = lb.wavelength();
  const double denom = lb.rho_s * lambda * lambda * lb.gr2 * lb.rain_s * lb.rain_s * lb.xi * lb.xi;
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    throw InvalidParameter("link constant denominator is zero or not finite");
  }
  return 16.0 * std::numbers::pi * std::numbers::pi * th.gamma_g * lb.sigma2_g / denom;
}

}  // namespace leocov
