#pragma once

// Executes a parsed scenario and writes series / snapshot / report files.

#include "qlab/config.hpp"
#include "qlab/dispersion.hpp"
#include "qlab/qcurve.hpp"
#include "qlab/transitions.hpp"
#include "qlab/twoparticle.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace qlab {

// A rectangular numeric table with named columns.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// 17 significant digits, '.' decimal separator.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Shortest decimal form that reads back to the same double.
inline std::string format_shortest(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_param(const ParamValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_shortest(*d);
  if (const auto* i = std::get_if<long long>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

/// Config echo lines (`# key = value`) in documented parameter order.
inline std::vector<std::string> config_echo(const ScenarioConfig& cfg) {
  std::vector<std::string> out{"scenario = " + std::string(to_string(cfg.scenario))};
  for (const auto& spec : scenario_params(cfg.scenario)) {
    const std::string key(spec.key);
    out.push_back(key + " = " + format_param(cfg.values.at(key)));
  }
  for (const auto& n : cfg.notes) out.push_back("note: " + n);
  return out;
}

inline std::string to_csv(const Table& t, const std::vector<std::string>& echo) {
  std::string s;
  for (const auto& e : echo) s += "# " + e + "\n";
  for (std::size_t c = 0; c < t.columns.size(); ++c) s += (c ? "," : "") + t.columns[c];
  s += "\n";
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) s += ",";
      s += format_number(r[c]);
    }
    s += "\n";
  }
  return s;
}

inline nlohmann::ordered_json config_json(const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["scenario"] = std::string(to_string(cfg.scenario));
  for (const auto& spec : scenario_params(cfg.scenario)) {
    const std::string key(spec.key);
    std::visit([&](const auto& v) { j[key] = v; }, cfg.values.at(key));
  }
  return j;
}

inline std::string to_json(const Table& t, const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["metadata"] = {{"config", config_json(cfg)}, {"notes", cfg.notes}};
  j["columns"] = t.columns;
  j["rows"] = t.rows;
  return j.dump(1) + "\n";
}

struct RunOutcome {
  std::vector<std::filesystem::path> files;
  nlohmann::ordered_json report;
};

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << body;
}

inline Table series_table(const EntropySeries& s) {
  Table t{{"t", "s_r", "s_k", "s_total"}, {}};
  for (std::size_t j = 0; j < s.size(); ++j) t.rows.push_back({s.times[j], s.s_r[j], s.s_k[j], s.values[j]});
  return t;
}

inline nlohmann::ordered_json label_json(const BlockLabel& b, double eps) {
  return {{"block", to_string(b.kind)},
          {"eps", eps},
          {"evidence", {{"max_rise", b.max_rise}, {"max_fall", b.max_fall}, {"range", b.range}}}};
}

inline DispersionModel model_of(const ScenarioConfig& cfg) { return {cfg.real("c"), cfg.real("hbar_over_m")}; }

// Uniform in [0, 1) from the top 53 bits; portable across standard libraries.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

class Writer {
 public:
  Writer(const ScenarioConfig& cfg, RunOutcome& out) : cfg_(cfg), out_(out) {
    std::filesystem::create_directories(cfg.output);
  }

  void table(const std::string& stem, const Table& t) {
    const bool csv = cfg_.format == OutputFormat::csv;
    const auto path = std::filesystem::path(cfg_.output) / (stem + (csv ? ".csv" : ".json"));
    write_file(path, csv ? to_csv(t, config_echo(cfg_)) : to_json(t, cfg_));
    out_.files.push_back(path);
  }

 private:
  const ScenarioConfig& cfg_;
  RunOutcome& out_;
};

inline void run_free(const ScenarioConfig& cfg, Writer& w, nlohmann::ordered_json& rep) {
  const auto model = model_of(cfg);
  const auto grid = make_grid_ptr(cfg.count("n"), cfg.real("length"));
  const CoherentStateParams params{cfg.real("r0"), cfg.real("k0"), cfg.real("sigma2")};
  const double t_max = cfg.real("t_max");
  const auto n_steps = cfg.count("n_steps");
  const double eps = cfg.real("eps");
  const auto prop = cfg.text("propagator") == "taylor" ? Propagator::taylor : Propagator::exact;

  const auto start = coherent_state(params, grid);
  QCurve q = [&] {
    if (cfg.scenario == Scenario::coherent) {
      for (double t : sample_times(0.0, t_max, n_steps)) check_in_domain(propagate(start, t, model, prop), t);
      return QCurve{FreeEvolution{start, model, prop}, 0.0, t_max, n_steps};
    }
    auto d = make_decreasing_from_coherent(params, model, t_max, grid, n_steps);
    std::get<FreeEvolution>(d.evolution).propagator = prop;
    return d;
  }();
  const auto series = sample_entropy_series(q);
  w.table("series", series_table(series));

  const double h = hessian(params.k0, model);
  double dev = 0.0;
  double sk_lo = series.s_k.front(), sk_hi = series.s_k.front();
  for (std::size_t j = 0; j < series.size(); ++j) {
    const double tt = cfg.scenario == Scenario::coherent ? series.times[j] : t_max - series.times[j];
    dev = std::max(dev, std::abs(series.values[j] - gaussian_entropy_closed_form(params.sigma2, h, tt)));
    sk_lo = std::min(sk_lo, series.s_k[j]);
    sk_hi = std::max(sk_hi, series.s_k[j]);
  }
  rep["classification"] = label_json(classify(series, eps), eps);
  rep["closed_form"] = {{"hessian_at_k0", h},
                        {"initial", gaussian_entropy_closed_form(params.sigma2, h, 0.0)},
                        {"max_abs_deviation", dev}};
  rep["s_k_variation"] = sk_hi - sk_lo;
}

inline void run_dispersion_table(const ScenarioConfig& cfg, Writer& w, nlohmann::ordered_json& rep) {
  const auto model = model_of(cfg);
  const auto n_k = cfg.count("n_k");
  Table t{{"k", "omega", "group_velocity", "hessian", "lambda1", "lambda23"}, {}};
  const double k0 = cfg.real("k_min");
  const double k1 = cfg.real("k_max");
  for (std::size_t j = 0; j < n_k; ++j) {
    const double k = j + 1 == n_k ? k1 : k0 + (k1 - k0) * static_cast<double>(j) / static_cast<double>(n_k - 1);
    const auto ev = hessian_eigenvalues_3d(std::abs(k), model);
    t.rows.push_back({k, omega(k, model), group_velocity(k, model), hessian(k, model), ev.lambda1, ev.lambda23});
  }
  w.table("series", t);
  rep["rows"] = n_k;
}

inline void run_two_state(const ScenarioConfig& cfg, Writer& w, nlohmann::ordered_json& rep) {
  const TwoLevelSystem sys{cfg.real("omega1"), cfg.real("omega2"), cfg.real("w11"), cfg.real("w12"),
                           cfg.real("w22")};
  const auto spec = two_level_spectrum(sys);
  double t_max = cfg.real("t_max");
  if (t_max == 0.0) {
    if (spec.eta == 0.0) throw std::invalid_argument("t_max: required when the system is degenerate (eta = 0)");
    t_max = 2.0 * oscillation_period(sys);
  }
  const auto n_steps = cfg.count("n_steps");
  const double eps = cfg.real("eps");
  const bool resonant = sys.omega1 == sys.omega2;

  Table prob{{"t", "p1", "p2", "p2_fermi"}, {}};
  const auto grid = make_grid_ptr(cfg.count("n"), cfg.real("length"));
  const auto basis = oscillator_basis(grid, 2, cfg.real("basis_sigma2"));
  EntropySeries series;
  double fermi_dev = 0.0;
  for (double t : sample_times(0.0, t_max, n_steps)) {
    const auto [a1, a2] = transition_coefficients(sys, t);
    const double p2 = transition_probability(sys, t);
    const double pf = resonant ? std::nan("") : fermi_approximation(sys, t);
    if (!resonant) fermi_dev = std::max(fermi_dev, std::abs(pf - p2));
    prob.rows.push_back({t, std::norm(a1), p2, pf});
    const auto e = transition_entropy(sys, basis[0], basis[1], t);
    series.push(t, e.s_r, e.s_k);
  }
  w.table("series", series_table(series));
  w.table("probability", prob);

  rep["spectrum"] = {{"eta", spec.eta},
                     {"lambda_plus", spec.lambda_plus},
                     {"lambda_minus", spec.lambda_minus},
                     {"theta", spec.theta}};
  if (spec.eta > 0.0) {
    const double T = oscillation_period(sys);
    const double s0 = transition_entropy(sys, basis[0], basis[1], 0.0).total;
    rep["period_T"] = T;
    rep["entropy_recurrence"] = {
        {"abs_diff_at_T", std::abs(transition_entropy(sys, basis[0], basis[1], T).total - s0)},
        {"abs_diff_at_2T", std::abs(transition_entropy(sys, basis[0], basis[1], 2.0 * T).total - s0)}};
    rep["peak_probability"] = 4.0 * sys.w12 * sys.w12 / (spec.eta * spec.eta);
  }
  if (!resonant) rep["fermi_max_abs_deviation"] = fermi_dev;
  rep["t_max"] = t_max;
  rep["classification"] = label_json(classify(series, eps), eps);
}

inline void run_multi_state(const ScenarioConfig& cfg, Writer& w, nlohmann::ordered_json& rep, std::uint64_t seed) {
  const auto n = cfg.count("levels");
  std::mt19937_64 rng(seed);
  Matrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    h(i, i) = static_cast<double>(i + 1) * cfg.real("spacing");
    for (std::size_t j = i + 1; j < n; ++j) h(i, j) = h(j, i) = cfg.real("coupling") * (2.0 * unit_uniform(rng) - 1.0);
  }
  const MultiLevelSystem sys(h);
  const auto grid = make_grid_ptr(cfg.count("n"), cfg.real("length"));
  const auto basis = oscillator_basis(grid, n, cfg.real("basis_sigma2"));
  std::vector<cplx> c0(n);
  c0[0] = 1.0;

  Table prob{{"t"}, {}};
  for (std::size_t j = 0; j < n; ++j) prob.columns.push_back("p" + std::to_string(j + 1));
  const QCurve q{FiniteLevelEvolution{c0, sys, basis}, 0.0, cfg.real("t_max"), cfg.count("n_steps")};
  const auto series = sample_entropy_series(q);
  for (double t : series.times) {
    std::vector<double> row{t};
    for (std::size_t j = 0; j < n; ++j) row.push_back(multistate_probability(sys, j, t));
    prob.rows.push_back(std::move(row));
  }
  w.table("series", series_table(series));
  w.table("probability", prob);
  rep["eigenvalues"] = sys.eigenvalues();
  rep["classification"] = label_json(classify(series, cfg.real("eps")), cfg.real("eps"));
}

inline void run_collide(const ScenarioConfig& cfg, Writer& w, nlohmann::ordered_json& rep) {
  CollisionParams p;
  p.k1 = cfg.real("k1");
  p.c1 = cfg.real("c1");
  p.c2 = cfg.real("c2");
  p.sigma2 = cfg.real("sigma2");
  p.model = model_of(cfg);
  p.t_max = cfg.real("t_max");
  p.n_steps = cfg.count("n_steps");
  p.stats = cfg.text("statistics") == "boson" ? Statistics::boson : Statistics::fermion;
  p.grid_n = cfg.count("n");
  p.length = cfg.real("length");
  p.snapshot_stride = cfg.real("snapshot_stride");
  p.snapshot_decimation = cfg.count("snapshot_decimation");

  const auto res = collision_scenario(p);
  w.table("series", series_table(res.series));
  for (const auto& snap : res.snapshots) {
    Table t{{"x1", "x2", "rho"}, {}};
    const std::size_t m = snap.x.size();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) t.rows.push_back({snap.x[i], snap.x[j], snap.rho[i * m + j]});
    char name[64];
    std::snprintf(name, sizeof name, "snapshots_%g", snap.t);
    w.table(name, t);
  }
  const double eps = cfg.real("eps");
  rep["classification"] = label_json(classify(res.series, eps), eps);
  if (const auto onset = decrease_onset(res.series, eps)) rep["decrease_onset"] = *onset;
  rep["max_drop_below_running_max"] = max_drop_below_running_max(res.series);
  rep["max_diagonal_density"] = res.max_diagonal;
  rep["group_velocity"] = group_velocity(p.k1, p.model);
  rep["hessian"] = hessian(p.k1, p.model);
}

// Reads one named column from a CSV written by this tool (or any CSV with a header).
inline std::vector<double> read_csv_column(const std::filesystem::path& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("series: cannot open " + path.string());
  std::string line;
  int col = -1;
  std::vector<double> out;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(trim(cell));
    if (col < 0) {
      for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i] == column) col = static_cast<int>(i);
      if (col < 0) throw std::invalid_argument("column: `" + column + "` not found in " + path.string());
      continue;
    }
    double v = 0.0;
    if (static_cast<std::size_t>(col) >= cells.size() || !parse_real(cells[col], v))
      throw std::invalid_argument("series: malformed row `" + line + "`");
    out.push_back(v);
  }
  return out;
}

inline void run_classify(const ScenarioConfig& cfg, nlohmann::ordered_json& rep) {
  const auto values = read_csv_column(cfg.text("series"), cfg.text("column"));
  const double eps = cfg.real("eps");
  rep["samples"] = values.size();
  rep["classification"] = label_json(classify(values, eps), eps);
}

}  // namespace detail

/// Runs the scenario into cfg.output. Throws config_error-free exceptions on
/// runtime failure (guard_error for in-domain / aliasing violations).
inline RunOutcome run(const ScenarioConfig& cfg, std::uint64_t seed) {
  const auto started = std::chrono::steady_clock::now();
  RunOutcome out;
  detail::Writer w(cfg, out);
  nlohmann::ordered_json rep;
  rep["scenario"] = std::string(to_string(cfg.scenario));
  rep["config"] = config_json(cfg);
  rep["seed"] = seed;
  rep["notes"] = cfg.notes;
  if (cfg.values.contains("n")) rep["grid"] = {{"n", cfg.count("n")}, {"length", cfg.real("length")}};
  if (cfg.values.contains("propagator")) rep["propagator"] = cfg.text("propagator");
  if (cfg.scenario == Scenario::collide) rep["propagator"] = "exact";

  switch (cfg.scenario) {
    case Scenario::coherent:
    case Scenario::decreasing: detail::run_free(cfg, w, rep); break;
    case Scenario::dispersion_table: detail::run_dispersion_table(cfg, w, rep); break;
    case Scenario::two_state: detail::run_two_state(cfg, w, rep); break;
    case Scenario::multi_state: detail::run_multi_state(cfg, w, rep, seed); break;
    case Scenario::collide: detail::run_collide(cfg, w, rep); break;
    case Scenario::classify: detail::run_classify(cfg, rep); break;
  }

  rep["runtime_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  const auto report_path = std::filesystem::path(cfg.output) / "report.json";
  detail::write_file(report_path, rep.dump(2) + "\n");
  out.files.push_back(report_path);
  out.report = std::move(rep);
  return out;
}

}  // namespace qlab
