// leocov: coverage analysis of gateway-relayed LEO satellite access.
//
//   leocov coverage [config]   single configuration -> coverage report
//   leocov sweep    <config>   parameter sweep -> CSV table
//   leocov validate [config]   analytic vs Monte-Carlo regression grid
//   leocov dist     [config]   contact distance CDF/PDF table
//
// Exit status: 0 on success, 1 on a configuration, usage or I/O error, 2 when
// `validate` finds a point where the engines disagree.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "leocov/errors.hpp"
#include "leocov/experiment.hpp"

namespace {

using namespace leocov;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ExperimentSpec load(const std::string& path, const std::vector<std::string>& overrides) {
  return parse_config(path.empty() ? std::string() : read_file(path), overrides);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

int run_coverage(const ExperimentSpec& spec, bool with_mc) {
  const SystemConfig& cfg = spec.system;
  const CoverageReport r = p_cov_end_to_end(cfg, spec.analytic);
  const ContactDistribution dist(cfg.constellation, cfg.variant);
  std::cout << "link_constant_c = " << num(link_constant_c(cfg.budget, cfg.thresholds))
            << " 1/m^2\n";
  std::cout << "visibility_mass = " << num(dist.visibility_mass()) << "\n";
  std::cout << "p_s_gw = " << num(r.p_s_gw) << "\n";
  std::cout << "p_gw_u = " << num(r.p_gw_u) << "\n";
  std::cout << "p_end_to_end = " << num(r.p_end_to_end) << "\n";
  std::cout << "p_abs = " << num(p_cov_abs(spec.abs_distance, cfg.budget, cfg.thresholds))
            << " (R = " << num(spec.abs_distance) << " m)\n";
  std::string line;
  try {
    line = num(crossover_abs_distance_for(r.p_end_to_end, cfg.budget, cfg.thresholds)) + " m";
  } catch (const NoCrossover& ex) {
    line = std::string("none (") + ex.what() + ")";
  }
  std::cout << "crossover_abs_distance = " << line << "\n";
  try {
    line = num(crossover_gw_density(cfg, spec.abs_distance, spec.analytic)) + " per_m2";
  } catch (const NoCrossover& ex) {
    line = std::string("none (") + ex.what() + ")";
  }
  std::cout << "crossover_gw_density = " << line << "\n";
  if (with_mc) {
    const CoverageReport m = mc::simulate_report(cfg, spec.mc);
    std::cout << "mc_p_s_gw = " << num(m.p_s_gw) << " +- " << num(*m.ci_s_gw) << "\n";
    std::cout << "mc_p_gw_u = " << num(m.p_gw_u) << " +- " << num(*m.ci_gw_u) << "\n";
    std::cout << "mc_p_end_to_end = " << num(m.p_end_to_end) << " +- " << num(*m.ci_end_to_end)
              << "\n";
    std::cout << "mc_trials = " << spec.mc.trials << "\nmc_seed = " << spec.mc.seed << "\n";
  }
  return 0;
}

int run_sweep(const ExperimentSpec& spec, const std::string& output, unsigned workers) {
  if (!spec.sweep) throw ConfigError("sweep", "sweep needs 'sweep' and 'grid' keys");
  const ResultTable table = run_experiment(spec, workers);
  const std::string path = !output.empty() ? output : spec.output;
  if (path.empty()) {
    std::cout << format_table(table);
  } else {
    emit_table(table, path);
  }
  std::size_t failed = 0;
  for (const ResultRow& r : table.rows) failed += r.status == "ok" ? 0 : 1;
  if (failed > 0) std::cerr << failed << " grid point(s) reported errors; see status column\n";
  return 0;
}

int run_validate(const ExperimentSpec& spec, unsigned workers) {
  const auto cases = run_validation(spec, ValidationGrid{}, workers);
  std::size_t passed = 0;
  for (const ValidationCase& c : cases) {
    std::cout << (c.passed() ? "PASS" : "FAIL") << " gamma=" << num(c.gamma_db)
              << "dB a=" << num(c.altitude / 1e3) << "km N=" << c.count
              << " s_gw " << num(c.analytic.p_s_gw) << " vs " << num(c.simulated.p_s_gw) << "+-"
              << num(*c.simulated.ci_s_gw) << " gw_u " << num(c.analytic.p_gw_u) << " vs "
              << num(c.simulated.p_gw_u) << "+-" << num(*c.simulated.ci_gw_u) << " e2e "
              << num(c.analytic.p_end_to_end) << " vs " << num(c.simulated.p_end_to_end) << "+-"
              << num(*c.simulated.ci_end_to_end) << "\n";
    passed += c.passed() ? 1 : 0;
  }
  std::cout << passed << "/" << cases.size() << " points agree within 3 half-widths\n";
  return passed == cases.size() ? 0 : 2;
}

int run_dist(const ExperimentSpec& spec, std::size_t points, const std::string& output) {
  const ContactDistribution dist(spec.system.constellation, spec.system.variant);
  const double top = 1.05 * dist.support_max();
  std::vector<double> grid;
  for (std::size_t i = 0; i < points; ++i) {
    grid.push_back(top * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  const bool simulate = spec.engines != Engines::Analytic;
  std::vector<mc::EmpiricalPoint> emp;
  if (simulate) emp = mc::empirical_contact_cdf(spec.system.constellation, spec.mc, grid);

  std::ostringstream out;
  out << "# leocov " << LEOCOV_VERSION << " contact distance distribution\n";
  out << "# variant: " << to_string(spec.system.variant) << "\n";
  out << "# visibility_mass: " << num(dist.visibility_mass()) << "\n";
  std::istringstream cfg(format_config(spec));
  for (std::string line; std::getline(cfg, line);) out << "# cfg: " << line << "\n";
  out << "distance_m,cdf,pdf_per_m,mc_cdf,mc_cdf_ci\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", grid[i], dist.cdf(grid[i]),
                  dist.pdf(grid[i]), simulate ? emp[i].cdf : std::nan(""),
                  simulate ? emp[i].ci_halfwidth : std::nan(""));
    out << buf;
  }
  if (output.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream f(output, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + output + "' for writing");
    f << out.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage analysis of gateway-relayed LEO satellite access"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string output;
  unsigned workers = 0;
  bool with_mc = false;
  std::uint64_t trials = 0;
  std::size_t points = 201;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("config", config_path, "Configuration file");
    if (config_required) opt->required();
    sub->add_option("--set", overrides, "Override a config entry, e.g. --set 'shell=1000 km x 50'");
    sub->add_option("--workers", workers, "Worker threads (0 = all cores)");
  };

  auto* coverage = app.add_subcommand("coverage", "Coverage report for one configuration");
  add_common(coverage, false);
  coverage->add_flag("--mc", with_mc, "Also run the Monte-Carlo engine");
  coverage->add_option("--trials", trials, "Monte-Carlo trials (overrides config)");

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep and write a CSV table");
  add_common(sweep, true);
  sweep->add_option("-o,--output", output, "Output CSV path (default: config 'output' or stdout)");

  auto* validate_cmd = app.add_subcommand("validate", "Analytic vs Monte-Carlo regression grid");
  add_common(validate_cmd, false);
  validate_cmd->add_option("--trials", trials, "Monte-Carlo trials per point");

  auto* dist = app.add_subcommand("dist", "Contact distance CDF/PDF table");
  add_common(dist, false);
  dist->add_option("--points", points, "Number of grid points")->check(CLI::Range(2, 1000000));
  dist->add_option("-o,--output", output, "Output CSV path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentSpec spec = load(config_path, overrides);
    if (trials > 0) spec.mc.trials = trials;
    spec.mc.workers = workers;
    if (*coverage) return run_coverage(spec, with_mc);
    if (*sweep) return run_sweep(spec, output, workers);
    if (*validate_cmd) return run_validate(spec, workers);
    if (*dist) return run_dist(spec, points, output);
  } catch (const ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}
