#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "leocov/config.hpp"

namespace leocov {

/// One grid point. Quantities an engine did not compute are NaN.
struct ResultRow {
  double sweep_value = 0.0;  // in the grid's own unit
  double p_s_gw = 0.0;
  double p_gw_u = 0.0;
  double p_end_to_end = 0.0;
  double p_abs = 0.0;
  double mc_p_s_gw = 0.0;
  double mc_p_s_gw_ci = 0.0;
  double mc_p_gw_u = 0.0;
  double mc_p_gw_u_ci = 0.0;
  double mc_p_end_to_end = 0.0;
  double mc_p_end_to_end_ci = 0.0;
  /// "ok", or "error: <message>" when an engine failed at this point.
  std::string status = "ok";
};

struct ResultTable {
  ExperimentSpec spec;
  std::vector<ResultRow> rows;
};

/// Fixed CSV column order.
inline constexpr const char* kTableColumns =
    "sweep_value,p_s_gw,p_gw_u,p_end_to_end,p_abs,mc_p_s_gw,mc_p_s_gw_ci,mc_p_gw_u,"
    "mc_p_gw_u_ci,mc_p_end_to_end,mc_p_end_to_end_ci,status";

/// System configuration at grid point i of the spec's sweep.
SystemConfig config_at(const ExperimentSpec& spec, std::size_t i);

/// Base station distance at grid point i (differs from spec.abs_distance only
/// in an abs_distance sweep).
double abs_distance_at(const ExperimentSpec& spec, std::size_t i);

/// Evaluates the requested engines at every grid point. Points run
/// concurrently on `workers` threads (0 = hardware concurrency); rows come
/// back in grid order and each point's Monte-Carlo run uses spec.mc.seed, so
/// output does not depend on the worker count. Engine failures are recorded in
/// the row's status and do not stop the sweep.
ResultTable run_experiment(const ExperimentSpec& spec, unsigned workers = 0);

/// CSV with '#' metadata lines: tool version, seed, sweep description and the
/// canonical config, one "# cfg: " line per config line. LF line endings,
/// numbers printed with 17 significant digits.
void emit_table(const ResultTable& table, const std::filesystem::path& path);
std::string format_table(const ResultTable& table);

/// Reads a file written by emit_table; the spec is rebuilt from the "# cfg:"
/// header lines.
ResultTable read_table(const std::filesystem::path& path);
ResultTable parse_table(const std::string& text);

/// One point of the analytic-vs-simulation regression grid.
struct ValidationCase {
  double gamma_db = 0.0;
  double altitude = 0.0;
  int count = 0;
  CoverageReport analytic;
  CoverageReport simulated;

  /// |analytic - MC| < 3 half-widths for all three probabilities.
  bool passed() const;
};

struct ValidationGrid {
  std::vector<double> gamma_db{-10.0, 0.0, 10.0};
  std::vector<double> altitudes{500e3, 1000e3, 1500e3};
  std::vector<int> counts{10, 50, 200};
};

/// Runs the first shell of base.system over the grid with both engines.
std::vector<ValidationCase> run_validation(const ExperimentSpec& base, const ValidationGrid& grid,
                                           unsigned workers = 0);

/// Runs body(i) for i in [0, n) on up to `workers` threads (0 = hardware concurrency).
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace leocov
