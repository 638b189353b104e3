#pragma once

#include <cmath>
#include <cstddef>
#include <random>

namespace leocov {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Shadowed-Rician fading: Nakagami-m line-of-sight amplitude with mean power
/// omega plus complex Gaussian scatter of total power 2 b0.
struct SRFadingParams {
  double omega = 1.29;
  double b0 = 0.158;
  double m = 19.4;

  bool operator==(const SRFadingParams&) const = default;
};

/// Link budget in linear SI units. Powers in W, gains as power ratios except
/// rain_s and xi, which are amplitude factors squared inside the loss term.
/// The propagation phase has unit modulus and does not appear.
///
/// Defaults: 20 GHz carrier, 15 dBW for all three transmitters, 41.7 dBi
/// receive gain, -3.125 dB rain attenuation read as an amplitude ratio.
struct LinkBudget {
  double carrier_freq = 20e9;                      // Hz
  double rho_s = std::pow(10.0, 1.5);              // satellite transmit power
  double rho_g = std::pow(10.0, 1.5);              // gateway transmit power
  double rho_a = std::pow(10.0, 1.5);              // anchored base station transmit power
  double sigma2_g = 3.6e-12;                       // noise at the gateway
  double sigma2_u = 1e-8;                          // noise at the user
  double gr2 = std::pow(10.0, 4.17);               // gateway receive antenna gain G_R^2
  double rain_s = std::pow(10.0, -3.125 / 20.0);   // rain attenuation amplitude factor
  double xi = 1.0;
  double alpha = 3.0;                              // path-loss exponent of terrestrial links

  double wavelength() const { return kSpeedOfLight / carrier_freq; }

  bool operator==(const LinkBudget&) const = default;
};

struct Thresholds {
  double gamma_g = 1.0;
  double gamma_u = 1.0;

  bool operator==(const Thresholds&) const = default;
};

void validate(const SRFadingParams& p);
void validate(const LinkBudget& lb);
void validate(const Thresholds& th);

/// Series evaluation of the SR power CDF,
///   F(t) = sum_z w_z P(z + 1, t / (2 b0)),
/// where w_z = (1 - beta)^m (m)_z beta^z / z! with beta = omega / (2 b0 m + omega)
/// and P is the regularized lower incomplete gamma function. Terms are built by
/// recurrence; the tail after term Z is bounded by
///   P(Z + 2, x) w_{Z+1} / (1 - max(beta, beta (m + Z + 1) / (Z + 2))).
double sr_cdf(double t, const SRFadingParams& p, double tol = 1e-10);

/// 1 - F(t), summed directly as sum_z w_z Q(z + 1, x) so that tiny tail
/// probabilities keep their relative accuracy. Q <= 1, so the tail after term Z
/// is bounded by w_{Z+1} / (1 - rho).
double sr_ccdf(double t, const SRFadingParams& p, double tol = 1e-10);

/// Mixture weight w_z of the SR power series, for use by term-wise integrators.
class SRSeriesWeights {
 public:
  explicit SRSeriesWeights(const SRFadingParams& p);

  double beta() const { return beta_; }
  double first() const { return w0_; }

  /// w_{z+1} / w_z.
  double ratio(std::size_t z) const;

  /// Upper bound on sup_{k >= z} ratio(k), or +inf when it is not below 1.
  double ratio_bound(std::size_t z) const;

 private:
  double m_;
  double beta_;
  double w0_;
};

/// Regularized lower incomplete gamma P(k, x) for integer k >= 1, k = 1..count,
/// written to out[0..count). Uses the downward recurrence
///   P(k + 1, x) = P(k, x) - x^k e^{-x} / k!
/// with Poisson terms formed in log space so large x does not underflow e^{-x}.
void regularized_gamma_ladder(double x, std::size_t count, double* out);

/// Upper counterpart Q(k, x) = 1 - P(k, x), k = 1..count, as the partial sums
/// of the Poisson(x) pmf (all terms positive, no cancellation).
void regularized_gamma_q_ladder(double x, std::size_t count, double* out);

/// W_s^2 = |A + Z|^2 with A^2 ~ Gamma(m, omega / m) and Z circular Gaussian of
/// per-component variance b0.
double sample_sr_power(const SRFadingParams& p, std::mt19937_64& rng);

/// 16 pi^2 gamma_g sigma_g^2 / (rho_s lambda^2 G_R^2 s^2 xi^2) [1/m^2]. The
/// gateway-satellite link is covered iff W_s^2 / D^2 >= c.
double link_constant_c(const LinkBudget& lb, const Thresholds& th);

}  // namespace leocov
