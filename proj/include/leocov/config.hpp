#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leocov/coverage.hpp"
#include "leocov/montecarlo.hpp"

namespace leocov {

enum class SweepVariable { Threshold, GwDensity, AbsDistance, Altitude, Count };

/// Grid values exactly as written in the config, plus their unit. The first
/// shell is the one an altitude or count sweep modifies.
struct Sweep {
  SweepVariable variable = SweepVariable::Threshold;
  std::vector<double> values;
  std::string unit;

  /// Value i converted to the model's linear SI unit.
  double si_value(std::size_t i) const;

  bool operator==(const Sweep&) const = default;
};

enum class Engines { Analytic, MonteCarlo, Both };

struct ExperimentSpec {
  SystemConfig system;
  double abs_distance = 2000.0;  // m; fixed base station distance for p_abs
  std::optional<Sweep> sweep;
  Engines engines = Engines::Analytic;
  mc::MCConfig mc;
  AnalyticOptions analytic;
  std::string output;

  bool operator==(const ExperimentSpec& o) const {
    return system == o.system && abs_distance == o.abs_distance && sweep == o.sweep &&
           engines == o.engines && mc == o.mc && analytic.series_tol == o.analytic.series_tol &&
           analytic.quad_rel_tol == o.analytic.quad_rel_tol &&
           analytic.quad_abs_tol == o.analytic.quad_abs_tol && output == o.output;
  }
};

/// Parses the key = value [unit] grammar documented in the README. Omitted
/// keys keep their defaults (the reference system parameters, one shell of
/// 50 satellites at 500 km). `overrides` are further "key = value" lines
/// applied after the document; an override replaces the document's value, and
/// the first `shell` override replaces every shell from the document.
/// Throws ConfigError naming the offending key.
ExperimentSpec parse_config(std::string_view text, const std::vector<std::string>& overrides = {});

/// Canonical document for spec in linear SI units. parse_config(format_config(s))
/// reproduces s exactly, apart from `output` and `workers`, which never affect
/// results and are left out.
std::string format_config(const ExperimentSpec& spec);

std::string_view to_string(SweepVariable v);
std::string_view to_string(Engines e);
std::string_view to_string(DistributionVariant v);
std::string_view to_string(mc::Association a);
std::string_view to_string(mc::GatewaySampling g);

/// Decibel helpers used at ingestion.
double db_to_linear(double db);
double dbw_to_watts(double dbw);

}  // namespace leocov
