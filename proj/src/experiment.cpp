#include "leocov/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>
#include <thread>

#include "leocov/errors.hpp"

namespace leocov {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::string_view kCfgPrefix = "# cfg: ";

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return s;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_cell(const std::string& s) {
  if (s == "nan") return kNaN;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::runtime_error("bad numeric cell '" + s + "'");
  return v;
}

}  // namespace

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
  unsigned w = workers != 0 ? workers : std::max(1u, std::thread::hardware_concurrency());
  w = static_cast<unsigned>(std::min<std::size_t>(w, n));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) body(i);
  };
  if (w <= 1) {
    work();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned i = 0; i < w; ++i) pool.emplace_back(work);
}

SystemConfig config_at(const ExperimentSpec& spec, std::size_t i) {
  SystemConfig cfg = spec.system;
  if (!spec.sweep) return cfg;
  const double v = spec.sweep->si_value(i);
  switch (spec.sweep->variable) {
    case SweepVariable::Threshold:
      cfg.thresholds.gamma_g = v;
      cfg.thresholds.gamma_u = v;
      break;
    case SweepVariable::GwDensity:
      cfg.gw_density = v;
      break;
    case SweepVariable::AbsDistance:
      break;
    case SweepVariable::Altitude:
      cfg.constellation.shells.at(0).altitude = v;
      break;
    case SweepVariable::Count:
      cfg.constellation.shells.at(0).count = static_cast<int>(v);
      break;
  }
  return cfg;
}

double abs_distance_at(const ExperimentSpec& spec, std::size_t i) {
  if (spec.sweep && spec.sweep->variable == SweepVariable::AbsDistance) {
    return spec.sweep->si_value(i);
  }
  return spec.abs_distance;
}

ResultTable run_experiment(const ExperimentSpec& spec, unsigned workers) {
  if (!spec.sweep || spec.sweep->values.empty()) {
    throw InvalidParameter("run_experiment needs a sweep with a non-empty grid");
  }
  ResultTable table;
  table.spec = spec;
  table.rows.resize(spec.sweep->values.size());
  const bool analytic = spec.engines != Engines::MonteCarlo;
  const bool simulate = spec.engines != Engines::Analytic;
  mc::MCConfig mc = spec.mc;
  mc.workers = 1;

  parallel_for(table.rows.size(), workers, [&](std::size_t i) {
    ResultRow& row = table.rows[i];
    row.sweep_value = spec.sweep->values[i];
    row.p_s_gw = row.p_gw_u = row.p_end_to_end = row.p_abs = kNaN;
    row.mc_p_s_gw = row.mc_p_s_gw_ci = kNaN;
    row.mc_p_gw_u = row.mc_p_gw_u_ci = kNaN;
    row.mc_p_end_to_end = row.mc_p_end_to_end_ci = kNaN;
    std::string errors;
    try {
      const SystemConfig cfg = config_at(spec, i);
      row.p_abs = p_cov_abs(abs_distance_at(spec, i), cfg.budget, cfg.thresholds);
      if (analytic) {
        const CoverageReport r = p_cov_end_to_end(cfg, spec.analytic);
        row.p_s_gw = r.p_s_gw;
        row.p_gw_u = r.p_gw_u;
        row.p_end_to_end = r.p_end_to_end;
      }
    } catch (const std::exception& ex) {
      errors += std::string("analytic: ") + ex.what();
    }
    if (simulate) {
      try {
        const SystemConfig cfg = config_at(spec, i);
        const CoverageReport r = mc::simulate_report(cfg, mc);
        row.mc_p_s_gw = r.p_s_gw;
        row.mc_p_s_gw_ci = *r.ci_s_gw;
        row.mc_p_gw_u = r.p_gw_u;
        row.mc_p_gw_u_ci = *r.ci_gw_u;
        row.mc_p_end_to_end = r.p_end_to_end;
        row.mc_p_end_to_end_ci = *r.ci_end_to_end;
      } catch (const std::exception& ex) {
        errors += std::string(errors.empty() ? "" : "; ") + "mc: " + ex.what();
      }
    }
    row.status = errors.empty() ? "ok" : "error: " + sanitize(errors);
  });
  return table;
}

std::string format_table(const ResultTable& table) {
  std::ostringstream out;
  out << "# leocov " << LEOCOV_VERSION << " coverage sweep\n";
  out << "# seed: " << table.spec.mc.seed << "\n";
  if (table.spec.sweep) {
    out << "# sweep: " << to_string(table.spec.sweep->variable);
    if (!table.spec.sweep->unit.empty()) out << " [" << table.spec.sweep->unit << "]";
    out << "\n";
  }
  std::istringstream cfg(format_config(table.spec));
  for (std::string line; std::getline(cfg, line);) out << kCfgPrefix << line << "\n";
  out << kTableColumns << "\n";
  for (const ResultRow& r : table.rows) {
    out << fmt(r.sweep_value) << ',' << fmt(r.p_s_gw) << ',' << fmt(r.p_gw_u) << ','
        << fmt(r.p_end_to_end) << ',' << fmt(r.p_abs) << ',' << fmt(r.mc_p_s_gw) << ','
        << fmt(r.mc_p_s_gw_ci) << ',' << fmt(r.mc_p_gw_u) << ',' << fmt(r.mc_p_gw_u_ci) << ','
        << fmt(r.mc_p_end_to_end) << ',' << fmt(r.mc_p_end_to_end_ci) << ',' << sanitize(r.status)
        << "\n";
  }
  return out.str();
}

void emit_table(const ResultTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::system_error(errno, std::generic_category(),
                            "cannot open '" + path.string() + "' for writing");
  }
  out << format_table(table);
  out.flush();
  if (!out) {
    throw std::system_error(errno, std::generic_category(),
                            "write to '" + path.string() + "' failed");
  }
}

ResultTable parse_table(const std::string& text) {
  std::istringstream in(text);
  std::string cfg_text;
  ResultTable table;
  bool seen_columns = false;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind(kCfgPrefix, 0) == 0) {
      cfg_text += line.substr(kCfgPrefix.size()) + "\n";
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    if (!seen_columns) {
      if (line != kTableColumns) throw std::runtime_error("unexpected column header: " + line);
      seen_columns = true;
      continue;
    }
    const auto cells = split_commas(line);
    if (cells.size() != 12) throw std::runtime_error("row has wrong cell count: " + line);
    ResultRow r;
    double* fields[] = {&r.sweep_value,     &r.p_s_gw,       &r.p_gw_u,         &r.p_end_to_end,
                        &r.p_abs,           &r.mc_p_s_gw,    &r.mc_p_s_gw_ci,   &r.mc_p_gw_u,
                        &r.mc_p_gw_u_ci,    &r.mc_p_end_to_end, &r.mc_p_end_to_end_ci};
    for (std::size_t c = 0; c < 11; ++c) *fields[c] = parse_cell(cells[c]);
    r.status = cells[11];
    table.rows.push_back(std::move(r));
  }
  if (!seen_columns) throw std::runtime_error("no column header found");
  table.spec = parse_config(cfg_text);
  return table;
}

ResultTable read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::system_error(errno, std::generic_category(),
                            "cannot open '" + path.string() + "' for reading");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_table(buf.str());
}

bool ValidationCase::passed() const {
  auto within = [](double a, double m, std::optional<double> hw) {
    return std::fabs(a - m) < 3.0 * hw.value_or(0.0);
  };
  return within(analytic.p_s_gw, simulated.p_s_gw, simulated.ci_s_gw) &&
         within(analytic.p_gw_u, simulated.p_gw_u, simulated.ci_gw_u) &&
         within(analytic.p_end_to_end, simulated.p_end_to_end, simulated.ci_end_to_end);
}

std::vector<ValidationCase> run_validation(const ExperimentSpec& base, const ValidationGrid& grid,
                                           unsigned workers) {
  std::vector<ValidationCase> cases;
  for (double g : grid.gamma_db) {
    for (double a : grid.altitudes) {
      for (int n : grid.counts) cases.push_back({g, a, n, {}, {}});
    }
  }
  mc::MCConfig mc = base.mc;
  mc.workers = 1;
  parallel_for(cases.size(), workers, [&](std::size_t i) {
    ValidationCase& c = cases[i];
    SystemConfig cfg = base.system;
    cfg.thresholds.gamma_g = cfg.thresholds.gamma_u = db_to_linear(c.gamma_db);
    cfg.constellation.shells.at(0) = Shell{c.altitude, c.count};
    c.analytic = p_cov_end_to_end(cfg, base.analytic);
    c.simulated = mc::simulate_report(cfg, mc);
  });
  return cases;
}

}  // namespace leocov
