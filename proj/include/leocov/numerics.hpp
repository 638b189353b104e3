#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace leocov::numerics {

/// One step of a series: the z-th term and an upper bound on the absolute sum
/// of every term after it. An infinite bound means "not certifiable yet".
struct SeriesTerm {
  double value = 0.0;
  double tail_bound = std::numeric_limits<double>::infinity();
};

/// The generator is called with z = 0, 1, 2, ... exactly once each and in
/// order, so it may carry recurrence state between calls.
struct SeriesSpec {
  std::function<SeriesTerm(std::size_t)> next;
  double tolerance = 1e-10;
  std::size_t max_terms = 10000;
};

struct SeriesResult {
  double value = 0.0;
  std::size_t terms = 0;
  double tail_bound = 0.0;
};

/// Sums terms in index order until the reported tail bound drops below the
/// tolerance. Throws NonConvergence if max_terms is reached first.
SeriesResult sum_series(const SeriesSpec& spec);

struct QuadratureSpec {
  std::function<double(double)> integrand;
  double lower = 0.0;
  /// May be +infinity; the last piece is then mapped onto [0, 1).
  double upper = 0.0;
  /// Interior points where the integrand is not smooth. Points outside
  /// (lower, upper) are ignored; the list must be sorted.
  std::vector<double> breakpoints;
  double abs_tol = 1e-13;
  double rel_tol = 1e-8;
  std::size_t max_intervals = 4000;
  /// Polynomial change of variables x = lo + w (3t^2 - 2t^3) on every finite
  /// piece. Removes integrable algebraic singularities at piece endpoints.
  bool endpoint_smoothing = true;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
};

/// Globally adaptive 15-point Gauss-Kronrod integration over the pieces of
/// the support. Throws QuadratureError (carrying the best estimate) when the
/// interval budget runs out before max(abs_tol, rel_tol |I|) is met.
QuadratureResult integrate(const QuadratureSpec& spec);

/// Root of a function with opposite signs at lo and hi, by bisection until
/// the bracket is narrower than x_tol (absolute). Throws InvalidParameter on
/// a bracket without a sign change.
double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol,
              std::size_t max_iter = 200);

}  // namespace leocov::numerics
