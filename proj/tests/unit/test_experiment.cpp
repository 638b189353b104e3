#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "leocov/errors.hpp"
#include "leocov/experiment.hpp"

using namespace leocov;

namespace {

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("leocov_test_" + name);
}

}  // namespace

TEST_CASE("threshold sweep: end-to-end coverage never rises with the threshold") {
  const ExperimentSpec spec = parse_config(
      "shell = 500 km x 50\nsweep = threshold\ngrid = linspace(-20, 20, 21) dB\n");
  const ResultTable t = run_experiment(spec, 2);
  REQUIRE(t.rows.size() == 21);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    CHECK(t.rows[i].status == "ok");
    CHECK(t.rows[i].p_end_to_end <= t.rows[i - 1].p_end_to_end + 1e-12);
    CHECK(std::isnan(t.rows[i].mc_p_s_gw));
  }
}

TEST_CASE("density sweep crosses the base station curve at the crossover density") {
  const ExperimentSpec spec = parse_config(
      "shell = 500 km x 50\ngamma_g = -10 dB\nabs_distance = 2 km\n"
      "sweep = gw_density\ngrid = logspace(-10, -4, 25) per_m2\n");
  const ResultTable t = run_experiment(spec, 2);
  std::size_t first = t.rows.size();
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i].p_end_to_end >= t.rows[i].p_abs) {
      first = i;
      break;
    }
  }
  REQUIRE(first > 0);
  REQUIRE(first < t.rows.size());
  const double lambda = crossover_gw_density(spec.system, spec.abs_distance, spec.analytic);
  CHECK(lambda > spec.sweep->si_value(first - 1));
  CHECK(lambda <= spec.sweep->si_value(first) * (1.0 + 1e-9));
}

TEST_CASE("base station coverage does not depend on the constellation") {
  const std::string doc = "sweep = abs_distance\ngrid = 0.5, 1, 2, 4 km\n";
  const ResultTable a = run_experiment(parse_config(doc, {"shell = 500 km x 10"}), 1);
  const ResultTable b = run_experiment(parse_config(doc, {"shell = 1400 km x 300"}), 1);
  const LinkBudget lb;
  const Thresholds th;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].p_abs == b.rows[i].p_abs);
    CHECK(a.rows[i].p_abs == p_cov_abs(a.rows[i].sweep_value * 1e3, lb, th));
    CHECK(a.rows[i].p_end_to_end == a.rows[0].p_end_to_end);
  }
}

TEST_CASE("sweeps over the first shell") {
  const ExperimentSpec alt = parse_config(
      "shell = 500 km x 50\nshell = 900 km x 5\nsweep = altitude\ngrid = 600, 700 km\n");
  CHECK(config_at(alt, 1).constellation.shells[0].altitude == 700e3);
  CHECK(config_at(alt, 1).constellation.shells[1].altitude == 900e3);
  const ExperimentSpec cnt = parse_config("sweep = count\ngrid = 10, 20\n");
  CHECK(config_at(cnt, 1).constellation.shells[0].count == 20);
  CHECK_THROWS_AS(run_experiment(parse_config("")), InvalidParameter);
}

TEST_CASE("tables round-trip through disk") {
  const ExperimentSpec spec = parse_config(
      "shell = 700 km x 40\ngamma_g = -10 dB\nengines = both\ntrials = 4000\nbatch = 1000\n"
      "seed = 31\nsweep = count\ngrid = 10, 40, 160\n");
  const ResultTable t = run_experiment(spec, 2);
  const auto path = temp_file("roundtrip.csv");
  emit_table(t, path);

  std::ifstream in(path, std::ios::binary);
  std::stringstream raw;
  raw << in.rdbuf();
  const std::string text = raw.str();
  CHECK(text.find("# seed: 31\n") != std::string::npos);
  CHECK(text.find("# cfg: ") != std::string::npos);
  CHECK(text.find(std::string(kTableColumns) + "\n") != std::string::npos);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text == format_table(t));

  const ResultTable back = read_table(path);
  CHECK(back.spec == t.spec);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const ResultRow& x = t.rows[i];
    const ResultRow& y = back.rows[i];
    CHECK(same(x.sweep_value, y.sweep_value));
    CHECK(same(x.p_s_gw, y.p_s_gw));
    CHECK(same(x.p_gw_u, y.p_gw_u));
    CHECK(same(x.p_end_to_end, y.p_end_to_end));
    CHECK(same(x.p_abs, y.p_abs));
    CHECK(same(x.mc_p_s_gw, y.mc_p_s_gw));
    CHECK(same(x.mc_p_s_gw_ci, y.mc_p_s_gw_ci));
    CHECK(same(x.mc_p_gw_u, y.mc_p_gw_u));
    CHECK(same(x.mc_p_gw_u_ci, y.mc_p_gw_u_ci));
    CHECK(same(x.mc_p_end_to_end, y.mc_p_end_to_end));
    CHECK(same(x.mc_p_end_to_end_ci, y.mc_p_end_to_end_ci));
    CHECK(x.status == y.status);
  }
  std::filesystem::remove(path);
}

TEST_CASE("output does not depend on the worker count") {
  const ExperimentSpec spec = parse_config(
      "engines = both\ntrials = 3000\nbatch = 500\nsweep = threshold\ngrid = -10, -5, 0 dB\n");
  CHECK(format_table(run_experiment(spec, 1)) == format_table(run_experiment(spec, 3)));
}

TEST_CASE("a table without rows is just its header") {
  ResultTable t;
  t.spec = parse_config("sweep = count\ngrid = 1, 2\n");
  const std::string text = format_table(t);
  std::istringstream lines(text);
  std::size_t data = 0;
  for (std::string line; std::getline(lines, line);) {
    if (line.empty() || line[0] == '#') continue;
    CHECK(line == kTableColumns);
    ++data;
  }
  CHECK(data == 1);
  CHECK(parse_table(text).rows.empty());
}

TEST_CASE("a failing engine is recorded per point") {
  // fading so strong the series cannot be certified within its term budget
  const ExperimentSpec spec = parse_config(
      "sr_omega = 1e9\nsr_b0 = 1\nsr_m = 1e6\nengines = both\ntrials = 2000\nbatch = 1000\n"
      "sweep = threshold\ngrid = 0, 10 dB\n");
  const ResultTable t = run_experiment(spec, 1);
  for (const ResultRow& r : t.rows) {
    CHECK(r.status.rfind("error: analytic:", 0) == 0);
    CHECK(r.status.find(',') == std::string::npos);
    CHECK(std::isnan(r.p_s_gw));
    CHECK(std::isfinite(r.mc_p_s_gw));
  }
  const ResultTable back = parse_table(format_table(t));
  CHECK(back.rows[0].status == t.rows[0].status);
}

TEST_CASE("malformed tables are rejected") {
  CHECK_THROWS(parse_table("sweep_value,p_s_gw\n1,2\n"));
  CHECK_THROWS(read_table(temp_file("does_not_exist.csv")));
}

TEST_CASE("shipped presets parse") {
  const char* dir = std::getenv("LEOCOV_PRESETS");
  REQUIRE(dir != nullptr);
  std::size_t found = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".cfg") continue;
    CAPTURE(entry.path().string());
    std::ifstream in(entry.path());
    std::stringstream buf;
    buf << in.rdbuf();
    const ExperimentSpec spec = parse_config(buf.str());
    CHECK(spec.sweep.has_value());
    ++found;
  }
  CHECK(found >= 7);
}
