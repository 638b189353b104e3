#include "leocov/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "leocov/errors.hpp"

namespace leocov {

namespace {

struct Entry {
  std::string key;
  std::string value;
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

Entry split_entry(std::string_view line, std::size_t line_no) {
  const auto eq = line.find('=');
  const std::string where = line_no == 0 ? "" : " (line " + std::to_string(line_no) + ")";
  if (eq == std::string_view::npos) {
    throw ConfigError("", "expected 'key = value'" + where + ": " + std::string(line));
  }
  Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
  if (e.key.empty()) throw ConfigError("", "missing key" + where);
  if (e.value.empty()) throw ConfigError(e.key, "missing value" + where);
  return e;
}

double parse_number(const std::string& key, std::string_view tok) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ConfigError(key, "not a finite number: '" + std::string(tok) + "'");
  }
  return v;
}

long long parse_integer(const std::string& key, std::string_view tok) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ConfigError(key, "not an integer: '" + std::string(tok) + "'");
  }
  return v;
}

// A number followed by exactly one unit token.
std::pair<double, std::string> number_with_unit(const Entry& e) {
  const auto toks = split_ws(e.value);
  if (toks.size() == 1) throw ConfigError(e.key, "unit missing in '" + e.value + "'");
  if (toks.size() != 2) throw ConfigError(e.key, "expected '<number> <unit>', got '" + e.value + "'");
  return {parse_number(e.key, toks[0]), toks[1]};
}

double bare_number(const Entry& e) {
  const auto toks = split_ws(e.value);
  if (toks.size() != 1) throw ConfigError(e.key, "expected a bare number, got '" + e.value + "'");
  return parse_number(e.key, toks[0]);
}

long long bare_integer(const Entry& e) {
  const auto toks = split_ws(e.value);
  if (toks.size() != 1) throw ConfigError(e.key, "expected an integer, got '" + e.value + "'");
  return parse_integer(e.key, toks[0]);
}

[[noreturn]] void bad_unit(const std::string& key, const std::string& unit,
                           std::string_view accepted) {
  throw ConfigError(key, "unknown unit '" + unit + "' (accepted: " + std::string(accepted) + ")");
}

double length_in_m(const std::string& key, double v, const std::string& unit) {
  if (unit == "m") return v;
  if (unit == "km") return v * 1e3;
  bad_unit(key, unit, "m, km");
}

double frequency_in_hz(const std::string& key, double v, const std::string& unit) {
  if (unit == "Hz") return v;
  if (unit == "kHz") return v * 1e3;
  if (unit == "MHz") return v * 1e6;
  if (unit == "GHz") return v * 1e9;
  bad_unit(key, unit, "Hz, kHz, MHz, GHz");
}

double power_in_w(const std::string& key, double v, const std::string& unit) {
  if (unit == "W") return v;
  if (unit == "mW") return v * 1e-3;
  if (unit == "dBW") return dbw_to_watts(v);
  if (unit == "dBm") return dbw_to_watts(v - 30.0);
  bad_unit(key, unit, "W, mW, dBW, dBm");
}

double gain_linear(const std::string& key, double v, const std::string& unit) {
  if (unit == "linear") return v;
  if (unit == "dB" || unit == "dBi") return db_to_linear(v);
  bad_unit(key, unit, "linear, dB, dBi");
}

double ratio_linear(const std::string& key, double v, const std::string& unit) {
  if (unit == "linear") return v;
  if (unit == "dB") return db_to_linear(v);
  bad_unit(key, unit, "linear, dB");
}

double density_per_m2(const std::string& key, double v, const std::string& unit) {
  if (unit == "per_m2") return v;
  if (unit == "per_km2") return v * 1e-6;
  bad_unit(key, unit, "per_m2, per_km2");
}

template <typename E>
E parse_enum(const Entry& e, const std::vector<std::pair<std::string_view, E>>& table) {
  const auto toks = split_ws(e.value);
  if (toks.size() == 1) {
    for (const auto& [name, value] : table) {
      if (toks[0] == name) return value;
    }
  }
  std::string names;
  for (const auto& [name, value] : table) names += (names.empty() ? "" : ", ") + std::string(name);
  throw ConfigError(e.key, "expected one of " + names + ", got '" + e.value + "'");
}

const std::vector<std::pair<std::string_view, SweepVariable>> kSweeps = {
    {"threshold", SweepVariable::Threshold},     {"gw_density", SweepVariable::GwDensity},
    {"abs_distance", SweepVariable::AbsDistance}, {"altitude", SweepVariable::Altitude},
    {"count", SweepVariable::Count}};
const std::vector<std::pair<std::string_view, Engines>> kEngines = {
    {"analytic", Engines::Analytic}, {"mc", Engines::MonteCarlo}, {"both", Engines::Both}};
const std::vector<std::pair<std::string_view, DistributionVariant>> kVariants = {
    {"cap_area", DistributionVariant::CapArea}, {"arc_angle", DistributionVariant::ArcAngle}};
const std::vector<std::pair<std::string_view, mc::Association>> kAssociations = {
    {"nearest_overall", mc::Association::NearestOverall},
    {"nearest_visible", mc::Association::NearestVisible}};
const std::vector<std::pair<std::string_view, mc::GatewaySampling>> kSamplings = {
    {"direct", mc::GatewaySampling::Direct}, {"disc", mc::GatewaySampling::Disc}};

template <typename E>
std::string_view name_of(E v, const std::vector<std::pair<std::string_view, E>>& table) {
  for (const auto& [name, value] : table) {
    if (value == v) return name;
  }
  return "?";
}

Shell parse_shell(const Entry& e) {
  // "<altitude> <unit> x <count>"
  const auto toks = split_ws(e.value);
  if (toks.size() != 4 || toks[2] != "x") {
    throw ConfigError(e.key, "expected '<altitude> <m|km> x <count>', got '" + e.value + "'");
  }
  Shell s;
  s.altitude = length_in_m(e.key, parse_number(e.key, toks[0]), toks[1]);
  const long long n = parse_integer(e.key, toks[3]);
  if (n < 1 || n > 1000000) throw ConfigError(e.key, "satellite count must be in [1, 1e6]");
  s.count = static_cast<int>(n);
  if (!(s.altitude > 0.0)) throw ConfigError(e.key, "altitude must be > 0");
  return s;
}

std::vector<double> expand_range(const std::string& key, std::string_view fn, std::string_view args,
                                 bool logarithmic) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : args) {
    if (ch == ',') {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(trim(cur));
  if (parts.size() != 3) throw ConfigError(key, std::string(fn) + " takes (start, stop, count)");
  const double a = parse_number(key, parts[0]);
  const double b = parse_number(key, parts[1]);
  const long long n = parse_integer(key, parts[2]);
  if (n < 1 || n > 100000) throw ConfigError(key, "point count must be in [1, 100000]");
  std::vector<double> out;
  for (long long i = 0; i < n; ++i) {
    const double v = n == 1 ? a
                            : (a * static_cast<double>(n - 1 - i) + b * static_cast<double>(i)) /
                                  static_cast<double>(n - 1);
    out.push_back(logarithmic ? std::pow(10.0, v) : v);
  }
  return out;
}

// "v1, v2, ... unit" or "linspace(a, b, n) unit" or "logspace(a, b, n) unit".
std::pair<std::vector<double>, std::string> parse_grid(const Entry& e, bool needs_unit) {
  std::string body = e.value;
  std::string unit;
  std::vector<double> values;
  for (std::string_view fn : {"linspace", "logspace"}) {
    if (body.rfind(fn, 0) == 0) {
      const auto open = body.find('(');
      const auto close = body.find(')');
      if (open == std::string::npos || close == std::string::npos || close < open) {
        throw ConfigError(e.key, "malformed " + std::string(fn) + "(...)");
      }
      values = expand_range(e.key, fn, std::string_view(body).substr(open + 1, close - open - 1),
                            fn == "logspace");
      unit = trim(std::string_view(body).substr(close + 1));
      if (split_ws(unit).size() > 1) throw ConfigError(e.key, "trailing tokens after unit");
      body.clear();
      break;
    }
  }
  if (!body.empty()) {
    std::string cleaned = body;
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    auto toks = split_ws(cleaned);
    if (toks.empty()) throw ConfigError(e.key, "grid is empty");
    double probe = 0.0;
    const auto& last = toks.back();
    const bool last_is_number =
        std::from_chars(last.data() + (last[0] == '+' ? 1 : 0), last.data() + last.size(), probe)
            .ptr == last.data() + last.size();
    if (!last_is_number) {
      unit = last;
      toks.pop_back();
    }
    for (const auto& t : toks) values.push_back(parse_number(e.key, t));
  }
  if (values.empty()) throw ConfigError(e.key, "grid is empty");
  if (needs_unit && unit.empty()) throw ConfigError(e.key, "unit missing after grid values");
  if (!needs_unit && !unit.empty()) throw ConfigError(e.key, "count grid takes no unit");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) throw ConfigError(e.key, "grid must be strictly increasing");
  }
  return {values, unit};
}

double sweep_to_si(SweepVariable v, const std::string& unit, double x) {
  const std::string key = "grid";
  switch (v) {
    case SweepVariable::Threshold:
      return ratio_linear(key, x, unit);
    case SweepVariable::GwDensity:
      return density_per_m2(key, x, unit);
    case SweepVariable::AbsDistance:
    case SweepVariable::Altitude:
      return length_in_m(key, x, unit);
    case SweepVariable::Count:
      return x;
  }
  return x;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbw_to_watts(double dbw) { return std::pow(10.0, dbw / 10.0); }

std::string_view to_string(SweepVariable v) { return name_of(v, kSweeps); }
std::string_view to_string(Engines e) { return name_of(e, kEngines); }
std::string_view to_string(DistributionVariant v) { return name_of(v, kVariants); }
std::string_view to_string(mc::Association a) { return name_of(a, kAssociations); }
std::string_view to_string(mc::GatewaySampling g) { return name_of(g, kSamplings); }

double Sweep::si_value(std::size_t i) const { return sweep_to_si(variable, unit, values.at(i)); }

ExperimentSpec parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  std::vector<Entry> shells;
  std::map<std::string, Entry> entries;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                          : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    if (trim(line).empty()) continue;
    Entry e = split_entry(line, line_no);
    if (e.key == "shell") {
      shells.push_back(e);
    } else if (!entries.emplace(e.key, e).second) {
      throw ConfigError(e.key, "duplicate key (line " + std::to_string(line_no) + ")");
    }
  }

  bool shells_overridden = false;
  for (const std::string& o : overrides) {
    Entry e = split_entry(o, 0);
    if (e.key == "shell") {
      if (!shells_overridden) shells.clear();
      shells_overridden = true;
      shells.push_back(e);
    } else {
      entries[e.key] = e;
    }
  }

  ExperimentSpec spec;
  SystemConfig& sys = spec.system;
  if (!shells.empty()) {
    sys.constellation.shells.clear();
    for (const Entry& e : shells) sys.constellation.shells.push_back(parse_shell(e));
  }

  bool rain_as_power = false;
  if (auto it = entries.find("rain_convention"); it != entries.end()) {
    rain_as_power = parse_enum<bool>(it->second, {{"amplitude", false}, {"power", true}});
    entries.erase(it);
  }

  using Handler = std::function<void(const Entry&)>;
  auto positive = [](const Entry& e, double v) {
    if (!(v > 0.0)) throw ConfigError(e.key, "must be > 0");
    return v;
  };
  const std::map<std::string, Handler> handlers = {
      {"earth_radius",
       [&](const Entry& e) {
         auto [v, u] = number_with_unit(e);
         sys.constellation.earth_radius = positive(e, length_in_m(e.key, v, u));
       }},
      {"variant", [&](const Entry& e) { sys.variant = parse_enum(e, kVariants); }},
      {"carrier_freq",
       [&](const Entry& e) {
         auto [v, u] = number_with_unit(e);
         sys.budget.carrier_freq = positive(e, frequency_in_hz(e.key, v, u));
       }},
      {"rho_s",
       [&](const Entry& e) {
         auto [v, u] = number_with_unit(e);
         sys.budget.rho_s = positive(e, power_in_w(e.key, v, u));
       }},
      {"rho_g",
       [&](const Entry& e) {
         auto [v, u] = number_with_unit(e);
         sys.budget.rho_g = positive(e, power_in_w(e.key, v, u));
       }},
      {"rho_a",
       [&](const Entry& e) {
         auto [v, u] = number_with_unit(e);
         sys.budget.rho_a = positive(e, power_in_w(e.key, v, u));
       }},
      {"sigma2_g",
       [&](const Entry& e) {
         auto [v, u] = number_with_unit(e);
         sys.budget.sigma2_g = positive(e, power_in_w(e.key, v, u));
       }},
      {"sigma2_u",
       [&](const Entry& e) {
         auto [v, u] = number_with_unit(e);
         sys.budget.sigma2_u = positive(e, power_in_w(e.key, v, u));
       }},
      {"gr2",
       [&](const Entry& e) {
         auto [v, u] = number_with_unit(e);
         sys.budget.gr2 = positive(e, gain_linear(e.key, v, u));
       }},
      {"rain_s",
       [&](const Entry& e) {
         auto [v, u] = number_with_unit(e);
         if (u == "dB") {
           sys.budget.rain_s = std::pow(10.0, v / (rain_as_power ? 10.0 : 20.0));
         } else if (u == "linear") {
           sys.budget.rain_s = positive(e, v);
         } else {
           bad_unit(e.key, u, "dB, linear");
         }
       }},
      {"xi", [&](const Entry& e) { sys.budget.xi = positive(e, bare_number(e)); }},
      {"alpha", [&](const Entry& e) { sys.budget.alpha = positive(e, bare_number(e)); }},
      {"gw_density",
       [&](const Entry& e) {
         auto [v, u] = number_with_unit(e);
         sys.gw_density = positive(e, density_per_m2(e.key, v, u));
       }},
      {"sr_omega", [&](const Entry& e) { sys.sr.omega = positive(e, bare_number(e)); }},
      {"sr_b0", [&](const Entry& e) { sys.sr.b0 = positive(e, bare_number(e)); }},
      {"sr_m", [&](const Entry& e) { sys.sr.m = positive(e, bare_number(e)); }},
      {"gamma_g",
       [&](const Entry& e) {
         auto [v, u] = number_with_unit(e);
         sys.thresholds.gamma_g = positive(e, ratio_linear(e.key, v, u));
       }},
      {"gamma_u",
       [&](const Entry& e) {
         auto [v, u] = number_with_unit(e);
         sys.thresholds.gamma_u = positive(e, ratio_linear(e.key, v, u));
       }},
      {"gamma_th",
       [&](const Entry& e) {
         auto [v, u] = number_with_unit(e);
         const double g = positive(e, ratio_linear(e.key, v, u));
         sys.thresholds.gamma_g = g;
         sys.thresholds.gamma_u = g;
       }},
      {"abs_distance",
       [&](const Entry& e) {
         auto [v, u] = number_with_unit(e);
         spec.abs_distance = positive(e, length_in_m(e.key, v, u));
       }},
      {"sweep", [&](const Entry& e) {
         if (!spec.sweep) spec.sweep.emplace();
         spec.sweep->variable = parse_enum(e, kSweeps);
       }},
      {"grid", [](const Entry&) {}},  // needs the sweep variable; handled below
      {"engines", [&](const Entry& e) { spec.engines = parse_enum(e, kEngines); }},
      {"association", [&](const Entry& e) { spec.mc.association = parse_enum(e, kAssociations); }},
      {"gateway_sampling",
       [&](const Entry& e) { spec.mc.gateway_sampling = parse_enum(e, kSamplings); }},
      {"trials",
       [&](const Entry& e) {
         const long long n = bare_integer(e);
         if (n < 1) throw ConfigError(e.key, "must be >= 1");
         spec.mc.trials = static_cast<std::uint64_t>(n);
       }},
      {"batch",
       [&](const Entry& e) {
         const long long n = bare_integer(e);
         if (n < 1) throw ConfigError(e.key, "must be >= 1");
         spec.mc.batch = static_cast<std::uint64_t>(n);
       }},
      {"seed",
       [&](const Entry& e) {
         const auto toks = split_ws(e.value);
         std::uint64_t v = 0;
         if (toks.size() != 1 ||
             std::from_chars(toks[0].data(), toks[0].data() + toks[0].size(), v).ptr !=
                 toks[0].data() + toks[0].size()) {
           throw ConfigError(e.key, "expected an unsigned 64-bit integer");
         }
         spec.mc.seed = v;
       }},
      {"workers",
       [&](const Entry& e) {
         const long long n = bare_integer(e);
         if (n < 0 || n > 4096) throw ConfigError(e.key, "must be in [0, 4096]");
         spec.mc.workers = static_cast<unsigned>(n);
       }},
      {"series_tol", [&](const Entry& e) { spec.analytic.series_tol = positive(e, bare_number(e)); }},
      {"quad_rel_tol",
       [&](const Entry& e) { spec.analytic.quad_rel_tol = positive(e, bare_number(e)); }},
      {"quad_abs_tol",
       [&](const Entry& e) { spec.analytic.quad_abs_tol = positive(e, bare_number(e)); }},
      {"output", [&](const Entry& e) { spec.output = e.value; }},
  };

  for (const auto& [key, e] : entries) {
    const auto h = handlers.find(key);
    if (h == handlers.end()) throw ConfigError(key, "unknown key");
    h->second(e);
  }

  if (auto it = entries.find("grid"); it != entries.end()) {
    if (!spec.sweep) throw ConfigError("grid", "grid given without a sweep variable");
    auto [values, unit] = parse_grid(it->second, spec.sweep->variable != SweepVariable::Count);
    spec.sweep->values = std::move(values);
    spec.sweep->unit = std::move(unit);
    for (std::size_t i = 0; i < spec.sweep->values.size(); ++i) {
      const double si = spec.sweep->si_value(i);
      if (spec.sweep->variable == SweepVariable::Count) {
        if (si < 1.0 || si != std::floor(si)) {
          throw ConfigError("grid", "count grid needs integers >= 1");
        }
      } else if (spec.sweep->variable != SweepVariable::Threshold && !(si > 0.0)) {
        throw ConfigError("grid", "grid values must be > 0");
      }
    }
  } else if (spec.sweep) {
    throw ConfigError("sweep", "sweep variable given without a grid");
  }

  try {
    validate(sys);
    mc::validate(spec.mc);
  } catch (const InvalidParameter& ex) {
    throw ConfigError("", ex.what());
  }
  return spec;
}

std::string format_config(const ExperimentSpec& spec) {
  const SystemConfig& s = spec.system;
  std::ostringstream out;
  out << "earth_radius = " << fmt(s.constellation.earth_radius) << " m\n";
  for (const Shell& sh : s.constellation.shells) {
    out << "shell = " << fmt(sh.altitude) << " m x " << sh.count << "\n";
  }
  out << "variant = " << to_string(s.variant) << "\n";
  out << "carrier_freq = " << fmt(s.budget.carrier_freq) << " Hz\n";
  out << "rho_s = " << fmt(s.budget.rho_s) << " W\n";
  out << "rho_g = " << fmt(s.budget.rho_g) << " W\n";
  out << "rho_a = " << fmt(s.budget.rho_a) << " W\n";
  out << "sigma2_g = " << fmt(s.budget.sigma2_g) << " W\n";
  out << "sigma2_u = " << fmt(s.budget.sigma2_u) << " W\n";
  out << "gr2 = " << fmt(s.budget.gr2) << " linear\n";
  out << "rain_s = " << fmt(s.budget.rain_s) << " linear\n";
  out << "xi = " << fmt(s.budget.xi) << "\n";
  out << "alpha = " << fmt(s.budget.alpha) << "\n";
  out << "gw_density = " << fmt(s.gw_density) << " per_m2\n";
  out << "sr_omega = " << fmt(s.sr.omega) << "\n";
  out << "sr_b0 = " << fmt(s.sr.b0) << "\n";
  out << "sr_m = " << fmt(s.sr.m) << "\n";
  out << "gamma_g = " << fmt(s.thresholds.gamma_g) << " linear\n";
  out << "gamma_u = " << fmt(s.thresholds.gamma_u) << " linear\n";
  out << "abs_distance = " << fmt(spec.abs_distance) << " m\n";
  if (spec.sweep) {
    out << "sweep = " << to_string(spec.sweep->variable) << "\n";
    out << "grid = ";
    for (std::size_t i = 0; i < spec.sweep->values.size(); ++i) {
      out << (i ? ", " : "") << fmt(spec.sweep->values[i]);
    }
    if (!spec.sweep->unit.empty()) out << " " << spec.sweep->unit;
    out << "\n";
  }
  out << "engines = " << to_string(spec.engines) << "\n";
  out << "trials = " << spec.mc.trials << "\n";
  out << "seed = " << spec.mc.seed << "\n";
  out << "batch = " << spec.mc.batch << "\n";
  out << "association = " << to_string(spec.mc.association) << "\n";
  out << "gateway_sampling = " << to_string(spec.mc.gateway_sampling) << "\n";
  out << "series_tol = " << fmt(spec.analytic.series_tol) << "\n";
  out << "quad_rel_tol = " << fmt(spec.analytic.quad_rel_tol) << "\n";
  out << "quad_abs_tol = " << fmt(spec.analytic.quad_abs_tol) << "\n";
  return out.str();
}

}  // namespace leocov
