#include <cmath>
#include <string>

#include "doctest.h"
#include "leocov/config.hpp"
#include "leocov/errors.hpp"

using namespace leocov;

namespace {

std::string error_key(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("empty document gives the reference system") {
  const ExperimentSpec s = parse_config("");
  CHECK(s == ExperimentSpec{});
  const SystemConfig& c = s.system;
  CHECK(c.budget.carrier_freq == 20e9);
  CHECK(c.budget.alpha == 3.0);
  CHECK(c.budget.rho_s == doctest::Approx(31.6227766016838).epsilon(1e-14));
  CHECK(c.budget.sigma2_g == 3.6e-12);
  CHECK(c.budget.sigma2_u == 1e-8);
  CHECK(c.sr.omega == 1.29);
  CHECK(c.sr.b0 == 0.158);
  CHECK(c.sr.m == 19.4);
  CHECK(c.gw_density == 1e-5);
  CHECK(c.thresholds.gamma_g == 1.0);
  CHECK(c.thresholds.gamma_u == 1.0);
  REQUIRE(c.constellation.shells.size() == 1);
  CHECK(c.constellation.shells[0].altitude == 500e3);
  CHECK(c.constellation.shells[0].count == 50);
  CHECK(!s.sweep.has_value());
}

TEST_CASE("units are converted at ingestion") {
  const ExperimentSpec s = parse_config(R"(
# comment line
rho_s = 15 dBW
rho_g = 30 dBm        # 0 dBW
sigma2_u = 0.001 mW
gr2 = 20 dB
gw_density = 2 per_km2
earth_radius = 6400 km
shell = 550 km x 20
shell = 1200000 m x 7
gamma_g = 3 dB
gamma_u = 0.5 linear
abs_distance = 1.5 km
carrier_freq = 12 GHz
)");
  const SystemConfig& c = s.system;
  CHECK(c.budget.rho_s == doctest::Approx(31.6227766016838).epsilon(1e-14));
  CHECK(c.budget.rho_g == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.budget.sigma2_u == doctest::Approx(1e-6).epsilon(1e-14));
  CHECK(c.budget.gr2 == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(c.gw_density == doctest::Approx(2e-6).epsilon(1e-14));
  CHECK(c.constellation.earth_radius == 6400e3);
  REQUIRE(c.constellation.shells.size() == 2);
  CHECK(c.constellation.shells[0].altitude == 550e3);
  CHECK(c.constellation.shells[1].count == 7);
  CHECK(c.thresholds.gamma_g == doctest::Approx(1.99526231496888).epsilon(1e-13));
  CHECK(c.thresholds.gamma_u == 0.5);
  CHECK(s.abs_distance == 1500.0);
  CHECK(c.budget.carrier_freq == 12e9);
}

TEST_CASE("rain attenuation conventions") {
  const double amp = parse_config("rain_s = -3.125 dB").system.budget.rain_s;
  CHECK(amp == doctest::Approx(std::pow(10.0, -3.125 / 20.0)).epsilon(1e-14));
  const double pow_ =
      parse_config("rain_s = -3.125 dB\nrain_convention = power").system.budget.rain_s;
  CHECK(pow_ == doctest::Approx(std::pow(10.0, -3.125 / 10.0)).epsilon(1e-14));
}

TEST_CASE("a common threshold sets both links") {
  const ExperimentSpec s = parse_config("gamma_th = -10 dB");
  CHECK(s.system.thresholds.gamma_g == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(s.system.thresholds.gamma_u == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("errors name the offending key") {
  CHECK(error_key("shell = -500 km x 5") == "shell");
  CHECK(error_key("shell = 500 x 5") == "shell");
  CHECK(error_key("shell = 500 km x 0") == "shell");
  CHECK(error_key("rho_s = 15") == "rho_s");
  CHECK(error_key("rho_s = 15 furlongs") == "rho_s");
  CHECK(error_key("gw_density = 1e-5") == "gw_density");
  CHECK(error_key("rho_s = abc dBW") == "rho_s");
  CHECK(error_key("teleport = 1") == "teleport");
  CHECK(error_key("alpha = 3\nalpha = 4") == "alpha");
  CHECK(error_key("variant = round") == "variant");
  CHECK(error_key("trials = 0") == "trials");
  CHECK(error_key("sweep = altitude\ngrid = 500, 400 km") == "grid");
  CHECK(error_key("sweep = altitude\ngrid = 500, 600") == "grid");
  CHECK(error_key("sweep = count\ngrid = 10, 20 km") == "grid");
  CHECK(error_key("sweep = threshold") == "sweep");
  CHECK(error_key("grid = 1, 2 dB") == "grid");
  CHECK(error_key("", {"alpha 3"}) != "<no error>");

  try {
    parse_config("rho_s = 15");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).rfind("rho_s: ", 0) == 0);
  }
}

TEST_CASE("overrides replace document values") {
  const std::string doc = "shell = 500 km x 50\nshell = 1000 km x 5\nalpha = 3\n";
  const ExperimentSpec s = parse_config(doc, {"alpha = 4", "shell = 700 km x 9", "seed = 12"});
  CHECK(s.system.budget.alpha == 4.0);
  REQUIRE(s.system.constellation.shells.size() == 1);
  CHECK(s.system.constellation.shells[0].altitude == 700e3);
  CHECK(s.mc.seed == 12);
  CHECK(parse_config(doc).system.constellation.shells.size() == 2);
}

TEST_CASE("grid forms") {
  const auto list = parse_config("sweep = threshold\ngrid = -10, 0, 10 dB").sweep;
  REQUIRE(list.has_value());
  CHECK(list->variable == SweepVariable::Threshold);
  CHECK(list->values == std::vector<double>{-10.0, 0.0, 10.0});
  CHECK(list->unit == "dB");
  CHECK(list->si_value(0) == doctest::Approx(0.1).epsilon(1e-14));

  const auto lin = parse_config("sweep = altitude\ngrid = linspace(500, 1500, 11) km").sweep;
  REQUIRE(lin->values.size() == 11);
  CHECK(lin->values[1] == doctest::Approx(600.0));
  CHECK(lin->si_value(10) == 1500e3);

  const auto lg = parse_config("sweep = gw_density\ngrid = logspace(-8, -4, 5) per_m2").sweep;
  REQUIRE(lg->values.size() == 5);
  CHECK(lg->values[0] == doctest::Approx(1e-8).epsilon(1e-14));
  CHECK(lg->si_value(4) == doctest::Approx(1e-4).epsilon(1e-14));

  const auto cnt = parse_config("sweep = count\ngrid = 10, 50, 200").sweep;
  CHECK(cnt->si_value(2) == 200.0);
}

TEST_CASE("format and parse round-trip exactly") {
  ExperimentSpec s = parse_config(R"(
shell = 550 km x 20
shell = 1200 km x 7
variant = arc_angle
rho_s = 17.3 dBW
sigma2_g = 1.234567890123e-12 W
gw_density = 3.3 per_km2
gamma_g = -7.5 dB
gamma_u = 2.5 dB
sr_omega = 0.835
sr_b0 = 0.126
sr_m = 10.1
abs_distance = 2.7 km
sweep = gw_density
grid = logspace(-9, -3, 7) per_m2
engines = both
association = nearest_visible
gateway_sampling = disc
trials = 123456
batch = 777
seed = 99
series_tol = 1e-11
quad_rel_tol = 1e-9
rain_s = -2.1 dB
rain_convention = power
)");
  const std::string text = format_config(s);
  const ExperimentSpec back = parse_config(text);
  CHECK(back == s);
  CHECK(format_config(back) == text);

  ExperimentSpec d;
  CHECK(parse_config(format_config(d)) == d);
}

TEST_CASE("decibel helpers") {
  CHECK(db_to_linear(0.0) == 1.0);
  CHECK(db_to_linear(-10.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(dbw_to_watts(15.0) == doctest::Approx(31.6227766016838).epsilon(1e-14));
}
