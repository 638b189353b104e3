#pragma once

#include <random>
#include <span>
#include <vector>

namespace leocov {

/// Mean Earth radius [m].
inline constexpr double kDefaultEarthRadius = 6371.0e3;

/// One spherical shell of satellites: altitude above the surface [m] and the
/// number of satellites placed uniformly on it.
struct Shell {
  double altitude = 0.0;
  int count = 1;

  bool operator==(const Shell&) const = default;
};

struct ConstellationConfig {
  double earth_radius = kDefaultEarthRadius;
  std::vector<Shell> shells;

  bool operator==(const ConstellationConfig&) const = default;
};

/// How the probability that one satellite lies within distance d is computed.
///   ArcAngle  uses the polar angle fraction theta/pi.
///   CapArea   uses the spherical cap area fraction (1 - cos theta)/2, which is
///             exact for satellites placed uniformly on the shell.
enum class DistributionVariant { ArcAngle, CapArea };

void validate(const Shell& shell);
void validate(const ConstellationConfig& cfg);

/// Largest distance from a surface point to a satellite above its horizon.
double horizon_distance(const Shell& shell, double earth_radius);

/// P(D_i >= d) for the nearest visible satellite on one shell. Constant past
/// the horizon distance, where the remaining mass is "no satellite visible".
double shell_ccdf(double d, const Shell& shell, double earth_radius, DistributionVariant variant);

/// Density of D_i on (a_i, d_max]; zero elsewhere (left-continuous at both ends).
double shell_pdf(double d, const Shell& shell, double earth_radius, DistributionVariant variant);

/// P(D_i >= d) for d beyond the horizon.
double shell_invisible_probability(const Shell& shell, double earth_radius,
                                   DistributionVariant variant);

/// The distribution of the contact distance D (nearest visible satellite over
/// all shells). Defective: the CDF tends to the visibility mass, not to 1.
///
/// Shells are held sorted by (altitude, count) and every product or sum runs
/// in that order, so results do not depend on the order shells were given in.
class ContactDistribution {
 public:
  ContactDistribution(const ConstellationConfig& cfg, DistributionVariant variant);

  double cdf(double d) const;
  double ccdf(double d) const;
  double pdf(double d) const;

  /// Density of Y = D^2, f_D(sqrt(y)) / (2 sqrt(y)).
  double pdf_squared(double y) const;

  /// P(at least one satellite above the horizon) = 1 - prod_i P(D_i beyond horizon).
  double visibility_mass() const { return visibility_mass_; }

  double support_min() const { return support_min_; }
  double support_max() const { return support_max_; }

  /// Every a_i and d_max_i, sorted and deduplicated.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  double earth_radius() const { return earth_radius_; }
  DistributionVariant variant() const { return variant_; }
  std::span<const Shell> shells() const { return shells_; }

 private:
  double earth_radius_;
  DistributionVariant variant_;
  std::vector<Shell> shells_;
  double visibility_mass_ = 0.0;
  double support_min_ = 0.0;
  double support_max_ = 0.0;
  std::vector<double> breakpoints_;
};

double contact_cdf(double d, const ConstellationConfig& cfg, DistributionVariant variant);
double contact_pdf(double d, const ConstellationConfig& cfg, DistributionVariant variant);

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Uniform point on the sphere of radius earth_radius + altitude, drawn as a
/// normalized isotropic Gaussian vector.
Vec3 sample_satellite(const Shell& shell, double earth_radius, std::mt19937_64& rng);

/// Distance from the reference surface point (0, 0, earth_radius) to p.
double distance_from_reference(const Vec3& p, double earth_radius);

}  // namespace leocov
