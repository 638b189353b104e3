#pragma once

#include <stdexcept>
#include <string>

namespace leocov {

/// Raised when a model parameter violates its documented domain.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent geometry, e.g. an arccos argument outside [-1, 1] after clamping.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A series could not certify its tail within the iteration cap.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double partial_sum, std::size_t terms)
      : std::runtime_error(what), partial_sum_(partial_sum), terms_(terms) {}

  double partial_sum() const { return partial_sum_; }
  std::size_t terms() const { return terms_; }

 private:
  double partial_sum_;
  std::size_t terms_;
};

/// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const { return estimate_; }
  double error_bound() const { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

/// A crossover target lies outside the range a solver can reach.
class NoCrossover : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by parse_config; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(key) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace leocov
