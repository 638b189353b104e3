#include "leocov/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "leocov/errors.hpp"

namespace leocov {

namespace {

constexpr double kClampTol = 1e-12;

// arccos with the argument clamped onto [-1, 1] when it spills by at most
// kClampTol; anything further out means the geometry is inconsistent.
double clamped_acos(double u) {
  if (u > 1.0) {
    if (u > 1.0 + kClampTol) throw DomainError("arccos argument " + std::to_string(u) + " > 1");
    u = 1.0;
  } else if (u < -1.0) {
    if (u < -1.0 - kClampTol) throw DomainError("arccos argument " + std::to_string(u) + " < -1");
    u = -1.0;
  }
  return std::acos(u);
}

// Probability that a single satellite on the shell lies within distance d,
// for a <= d <= d_max.
double single_within(double d, double a, double re, double r, DistributionVariant variant) {
  const double q = (d * d - a * a) / (2.0 * re * r);
  if (variant == DistributionVariant::CapArea) return 0.5 * q;
  return clamped_acos(1.0 - q) / std::numbers::pi;
}

}  // namespace

void validate(const Shell& shell) {
  if (!(shell.altitude > 0.0) || !std::isfinite(shell.altitude)) {
    throw InvalidParameter("shell altitude must be > 0");
  }
  if (shell.count < 1) throw InvalidParameter("shell satellite count must be >= 1");
}

void validate(const ConstellationConfig& cfg) {
  if (!(cfg.earth_radius > 0.0) || !std::isfinite(cfg.earth_radius)) {
    throw InvalidParameter("earth radius must be > 0");
  }
  if (cfg.shells.empty()) throw InvalidParameter("constellation needs at least one shell");
  for (const Shell& s : cfg.shells) validate(s);
}

double horizon_distance(const Shell& shell, double earth_radius) {
  validate(shell);
  if (!(earth_radius > 0.0)) throw InvalidParameter("earth radius must be > 0");
  const double a = shell.altitude;
  return std::sqrt(2.0 * earth_radius * a + a * a);
}

double shell_invisible_probability(const Shell& shell, double earth_radius,
                                   DistributionVariant variant) {
  const double r = earth_radius + shell.altitude;
  const double visible = variant == DistributionVariant::CapArea
                             ? shell.altitude / (2.0 * r)
                             : clamped_acos(earth_radius / r) / std::numbers::pi;
  return std::pow(1.0 - visible, shell.count);
}

double shell_ccdf(double d, const Shell& shell, double earth_radius, DistributionVariant variant) {
  if (!(d >= 0.0)) throw InvalidParameter("distance must be >= 0");
  const double dmax = horizon_distance(shell, earth_radius);
  const double a = shell.altitude;
  if (d < a) return 1.0;
  if (d > dmax) return shell_invisible_probability(shell, earth_radius, variant);
  const double r = earth_radius + a;
  return std::pow(1.0 - single_within(d, a, earth_radius, r, variant), shell.count);
}

double shell_pdf(double d, const Shell& shell, double earth_radius, DistributionVariant variant) {
  if (!(d >= 0.0)) throw InvalidParameter("distance must be >= 0");
  const double dmax = horizon_distance(shell, earth_radius);
  const double a = shell.altitude;
  if (d <= a || d > dmax) return 0.0;
  const double re = earth_radius;
  const double r = re + a;
  const double n = shell.count;
  const double base = 1.0 - single_within(d, a, re, r, variant);
  const double survive = shell.count == 1 ? 1.0 : std::pow(base, n - 1.0);
  if (variant == DistributionVariant::CapArea) return n * survive * d / (2.0 * re * r);
  const double u = 1.0 - (d * d - a * a) / (2.0 * re * r);
  const double s = 1.0 - u * u;
  if (!(s > 0.0)) return 0.0;
  return d * n / (std::numbers::pi * re * r) * survive / std::sqrt(s);
}

ContactDistribution::ContactDistribution(const ConstellationConfig& cfg,
                                         DistributionVariant variant)
    : earth_radius_(cfg.earth_radius), variant_(variant), shells_(cfg.shells) {
  validate(cfg);
  std::sort(shells_.begin(), shells_.end(), [](const Shell& l, const Shell& r) {
    if (l.altitude != r.altitude) return l.altitude < r.altitude;
    return l.count < r.count;
  });
  double invisible = 1.0;
  support_min_ = shells_.front().altitude;
  for (const Shell& s : shells_) {
    invisible *= shell_invisible_probability(s, earth_radius_, variant_);
    const double dmax = horizon_distance(s, earth_radius_);
    support_max_ = std::max(support_max_, dmax);
    breakpoints_.push_back(s.altitude);
    breakpoints_.push_back(dmax);
  }
  visibility_mass_ = 1.0 - invisible;
  std::sort(breakpoints_.begin(), breakpoints_.end());
  breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
}

double ContactDistribution::ccdf(double d) const {
  double p = 1.0;
  for (const Shell& s : shells_) p *= shell_ccdf(d, s, earth_radius_, variant_);
  return p;
}

double ContactDistribution::cdf(double d) const { return 1.0 - ccdf(d); }

// sum_i f_i(d) prod_{j != i} Fbar_j(d): the product-sum form without dividing
// by a survival factor that may be zero.
double ContactDistribution::pdf(double d) const {
  if (!(d >= 0.0)) throw InvalidParameter("distance must be >= 0");
  if (d <= support_min_ || d > support_max_) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < shells_.size(); ++i) {
    const double fi = shell_pdf(d, shells_[i], earth_radius_, variant_);
    if (fi == 0.0) continue;
    double others = 1.0;
    for (std::size_t j = 0; j < shells_.size(); ++j) {
      if (j != i) others *= shell_ccdf(d, shells_[j], earth_radius_, variant_);
    }
    total += fi * others;
  }
  return total;
}

double ContactDistribution::pdf_squared(double y) const {
  if (!(y > 0.0)) return 0.0;
  const double d = std::sqrt(y);
  return pdf(d) / (2.0 * d);
}

double contact_cdf(double d, const ConstellationConfig& cfg, DistributionVariant variant) {
  return ContactDistribution(cfg, variant).cdf(d);
}

double contact_pdf(double d, const ConstellationConfig& cfg, DistributionVariant variant) {
  return ContactDistribution(cfg, variant).pdf(d);
}

// Direction of an isotropic Gaussian vector, scaled onto the shell.
Vec3 sample_satellite(const Shell& shell, double earth_radius, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double r = earth_radius + shell.altitude;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double norm = 0.0;
  while (!(norm > 1e-150)) {
    x = normal(rng);
    y = normal(rng);
    z = normal(rng);
    norm = std::sqrt(x * x + y * y + z * z);
  }
  const double k = r / norm;
  return {k * x, k * y, k * z};
}

double distance_from_reference(const Vec3& p, double earth_radius) {
  const double dz = p.z - earth_radius;
  return std::sqrt(p.x * p.x + p.y * p.y + dz * dz);
}

}  // namespace leocov
