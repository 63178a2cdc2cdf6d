#pragma once

// Command-line front end. run_cli() is the whole program; tools/csdyn.cpp
// only forwards argv. Exit codes: 0 success, 2 usage, 3 numerical.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csdyn/adjudication.hpp"
#include "csdyn/error.hpp"
#include "csdyn/generator.hpp"
#include "csdyn/io.hpp"
#include "csdyn/nonmarkov.hpp"
#include "csdyn/parallel.hpp"
#include "csdyn/qmap.hpp"
#include "csdyn/spectrum.hpp"

namespace csdyn::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_numerical = 3;

// Usage-level problems detected after parsing (bad values, bad combinations).
struct UsageError : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

enum class Format { csv, svg, both };

struct RunConfig {
  ModelParams params;
  double t_max = 400.0;
  std::size_t steps = 4000;
  double tau = default_tau;
  std::string state = "excited";
  std::string axis;
  std::vector<double> values;
  std::string out;
  Format format = Format::csv;
  int jobs = 0;

  void validate() const {
    params.validate();
    if (!(t_max > 0.0)) throw UsageError("t-max must be > 0");
    if (steps < 2) throw UsageError("steps must be >= 2");
    if (!(tau > 0.0)) throw UsageError("tau must be > 0");
    if (jobs < 0) throw UsageError("jobs must be >= 0");
  }

  std::vector<double> grid() const { return uniform_grid(t_max, steps); }
};

// Config keys, in --show-config order. Flags use the same names with "--".
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{"omega0", "omega", "delta", "n",     "temp",   "t-max", "steps",
                                             "tau",    "state", "axis",  "values", "out",   "format", "jobs"};
  return keys;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw UsageError(key + ": not a number: '" + v + "'");
  }
}

inline long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw UsageError(key + ": not an integer: '" + v + "'");
  }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

inline std::string join_values(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + io::format_double(v[i]);
  return s;
}

} // namespace detail

inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string v = detail::trim(raw);
  if (key == "omega0") cfg.params.omega0 = detail::parse_double(key, v);
  else if (key == "omega") cfg.params.omega = detail::parse_double(key, v);
  else if (key == "delta") cfg.params.delta = detail::parse_double(key, v);
  else if (key == "temp") cfg.params.temperature = detail::parse_double(key, v);
  else if (key == "t-max") cfg.t_max = detail::parse_double(key, v);
  else if (key == "tau") cfg.tau = detail::parse_double(key, v);
  else if (key == "n") {
    const long n = detail::parse_int(key, v);
    if (n < 1 || n > 1000000) throw UsageError("n must be a positive integer");
    cfg.params.n_spins = static_cast<int>(n);
  } else if (key == "steps") {
    const long s = detail::parse_int(key, v);
    if (s < 2) throw UsageError("steps must be >= 2");
    cfg.steps = static_cast<std::size_t>(s);
  } else if (key == "jobs") {
    cfg.jobs = static_cast<int>(detail::parse_int(key, v));
  } else if (key == "state") {
    cfg.state = v;
  } else if (key == "axis") {
    cfg.axis = v;
  } else if (key == "values") {
    cfg.values.clear();
    for (const auto& item : detail::split(v, ',')) cfg.values.push_back(detail::parse_double(key, item));
  } else if (key == "out") {
    cfg.out = v;
  } else if (key == "format") {
    if (v == "csv") cfg.format = Format::csv;
    else if (v == "svg") cfg.format = Format::svg;
    else if (v == "both") cfg.format = Format::both;
    else throw UsageError("format must be csv, svg or both");
  } else {
    throw UsageError("unknown config key '" + key + "'");
  }
}

// key=value lines; '#' starts a comment.
inline void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    apply_setting(cfg, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

inline std::string show_config(const RunConfig& cfg) {
  std::ostringstream os;
  const char* fmt = cfg.format == Format::csv ? "csv" : cfg.format == Format::svg ? "svg" : "both";
  os << "omega0=" << io::format_double(cfg.params.omega0) << "\n"
     << "omega=" << io::format_double(cfg.params.omega) << "\n"
     << "delta=" << io::format_double(cfg.params.delta) << "\n"
     << "n=" << cfg.params.n_spins << "\n"
     << "temp=" << io::format_double(cfg.params.temperature) << "\n"
     << "t-max=" << io::format_double(cfg.t_max) << "\n"
     << "steps=" << cfg.steps << "\n"
     << "tau=" << io::format_double(cfg.tau) << "\n"
     << "state=" << cfg.state << "\n"
     << "axis=" << cfg.axis << "\n"
     << "values=" << detail::join_values(cfg.values) << "\n"
     << "out=" << cfg.out << "\n"
     << "format=" << fmt << "\n"
     << "jobs=" << cfg.jobs << " (resolved " << resolve_jobs(cfg.jobs) << ")\n";
  return os.str();
}

// excited | ground | plusx | plusy | mixed | custom:rho11,re_rho12,im_rho12
inline DensityMatrix parse_state(const std::string& spec) {
  if (spec == "excited") return DensityMatrix::excited();
  if (spec == "ground") return DensityMatrix::ground();
  if (spec == "plusx") return DensityMatrix::plus_x();
  if (spec == "plusy") return DensityMatrix::plus_y();
  if (spec == "mixed") return DensityMatrix::mixed();
  if (spec.rfind("custom:", 0) == 0) {
    const auto parts = detail::split(spec.substr(7), ',');
    if (parts.size() != 3) throw UsageError("custom state needs rho11,re_rho12,im_rho12");
    const double r11 = detail::parse_double("state", parts[0]);
    const cplx r12{detail::parse_double("state", parts[1]), detail::parse_double("state", parts[2])};
    try {
      return DensityMatrix::from_matrix(DensityMatrix(r11, r12).matrix());
    } catch (const InvalidArgument& e) {
      throw UsageError(std::string("custom state: ") + e.what());
    }
  }
  throw UsageError("unknown state '" + spec + "'");
}

inline SweepAxis parse_axis(const std::string& a) {
  if (a.find(',') != std::string::npos) throw UsageError("sweep takes exactly one axis");
  if (a == "delta") return SweepAxis::delta;
  if (a == "temp") return SweepAxis::temperature;
  if (a == "n") return SweepAxis::n_spins;
  if (a.empty()) throw UsageError("sweep needs --axis (delta, temp or n)");
  throw UsageError("unknown sweep axis '" + a + "'");
}

// Result of a command before it is written out.
struct Product {
  std::string csv;
  std::optional<io::Plot> plot;
  std::string text;  // plain-text products (oracle-check)
};

namespace detail {

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open output file " + path);
  f << content;
  if (!f) throw NumericalError("write failed: " + path);
}

inline std::string fmt_opt(const std::optional<double>& v) { return v ? io::format_double(*v) : std::string{}; }

} // namespace detail

inline void emit(const RunConfig& cfg, const Product& p, std::ostream& out) {
  if (!p.text.empty()) {
    if (cfg.format != Format::csv) throw UsageError("this command writes a text report only");
    if (cfg.out.empty()) out << p.text;
    else detail::write_file(cfg.out, p.text);
    return;
  }
  if (cfg.format != Format::csv && !p.plot) throw UsageError("this command has no SVG output");
  switch (cfg.format) {
    case Format::csv:
      if (cfg.out.empty()) out << p.csv;
      else detail::write_file(cfg.out, p.csv);
      break;
    case Format::svg:
      if (cfg.out.empty()) out << io::render_svg(*p.plot);
      else detail::write_file(cfg.out, io::render_svg(*p.plot));
      break;
    case Format::both: {
      if (cfg.out.empty()) throw UsageError("--format both needs --out");
      std::filesystem::path csv_path(cfg.out), svg_path(cfg.out);
      if (csv_path.extension() == ".svg") csv_path.replace_extension(".csv");
      svg_path.replace_extension(".svg");
      detail::write_file(csv_path.string(), p.csv);
      detail::write_file(svg_path.string(), io::render_svg(*p.plot));
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

inline Product cmd_evolve(const RunConfig& cfg) {
  const DensityMatrix rho0 = parse_state(cfg.state);
  const SpectralModel model(cfg.params);
  std::ostringstream os;
  io::CsvWriter csv(os, {"t", "rho11", "re_rho12", "im_rho12", "alpha1", "alpha2", "re_zeta", "im_zeta"});
  io::Plot plot{"Reduced state (" + cfg.state + ")", "t", "", {{"rho11", {}, {}}, {"|rho12|", {}, {}}}};
  for (double t : cfg.grid()) {
    const MapCoefficients c = model.coefficients(t);
    const DensityMatrix r = apply_map(c, rho0);
    csv.row({t, r.rho11(), r.rho12().real(), r.rho12().imag(), c.alpha1, c.alpha2, c.zeta.real(), c.zeta.imag()});
    plot.series[0].x.push_back(t);
    plot.series[0].y.push_back(r.rho11());
    plot.series[1].x.push_back(t);
    plot.series[1].y.push_back(std::abs(r.rho12()));
  }
  return {os.str(), plot, {}};
}

inline Product cmd_rates(const RunConfig& cfg) {
  const SpectralModel model(cfg.params);
  std::ostringstream os;
  io::CsvWriter csv(os, {"t", "omega", "gamma_minus", "gamma_plus", "gamma_d", "singular"});
  io::Plot plot{"Canonical rates", "t", "rate",
                {{"Omega", {}, {}}, {"gamma_-", {}, {}}, {"gamma_+", {}, {}}, {"gamma_d", {}, {}}}};
  for (double t : cfg.grid()) {
    std::optional<CanonicalRates> r;
    try {
      r = canonical_rates(l_matrix(model, t));
    } catch (const SingularMapError&) {
    }
    if (r) {
      csv.row({io::format_double(t), io::format_double(r->omega), io::format_double(r->gamma_minus),
               io::format_double(r->gamma_plus), io::format_double(r->gamma_d), "0"});
    } else {
      csv.row({io::format_double(t), "", "", "", "", "1"});
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double vals[4] = {r ? r->omega : nan, r ? r->gamma_minus : nan, r ? r->gamma_plus : nan,
                            r ? r->gamma_d : nan};
    for (std::size_t k = 0; k < 4; ++k) {
      plot.series[k].x.push_back(t);
      plot.series[k].y.push_back(vals[k]);
    }
  }
  return {os.str(), plot, {}};
}

inline Product cmd_kraus(const RunConfig& cfg) {
  const SpectralModel model(cfg.params);
  std::ostringstream os;
  io::CsvWriter csv(os, {"t", "operator", "weight", "re_k11", "im_k11", "re_k12", "im_k12", "re_k21", "im_k21",
                         "re_k22", "im_k22", "completeness_residual"});
  for (double t : cfg.grid()) {
    const KrausSet ks = kraus_from_choi(choi(model.coefficients(t)));
    const double resid = ks.completeness_residual();
    for (std::size_t k = 0; k < ks.operators.size(); ++k) {
      const ComplexMatrix& m = ks.operators[k];
      csv.row({io::format_double(t), std::to_string(k), io::format_double(ks.weights[k]),
               io::format_double(m(0, 0).real()), io::format_double(m(0, 0).imag()),
               io::format_double(m(0, 1).real()), io::format_double(m(0, 1).imag()),
               io::format_double(m(1, 0).real()), io::format_double(m(1, 0).imag()),
               io::format_double(m(1, 1).real()), io::format_double(m(1, 1).imag()), io::format_double(resid)});
    }
  }
  return {os.str(), std::nullopt, {}};
}

inline Product cmd_choi(const RunConfig& cfg) {
  const SpectralModel model(cfg.params);
  std::ostringstream os;
  io::CsvWriter csv(os, {"t", "lambda1", "lambda2", "lambda3", "lambda4", "trace"});
  for (double t : cfg.grid()) {
    const ChoiMatrix ch = choi(model.coefficients(t));
    const EigenSystem es = hermitian_eig(ch.c);
    csv.row({t, es.values[3], es.values[2], es.values[1], es.values[0], ch.c.trace().real()});
  }
  return {os.str(), std::nullopt, {}};
}

inline Product cmd_rhp(const RunConfig& cfg) {
  const SpectralModel model(cfg.params);
  std::ostringstream os;
  io::CsvWriter csv(os, {"t", "n", "min_eig", "singular"});
  io::Plot plot{"RHP indicator (tau = " + io::format_double(cfg.tau) + ")", "t", "N(t)", {{"N", {}, {}}}};
  for (double t : cfg.grid()) {
    std::optional<RhpSample> s;
    try {
      s = rhp_indicator(model, t, cfg.tau);
    } catch (const SingularMapError&) {
    }
    if (s) csv.row({io::format_double(t), io::format_double(s->n_value), io::format_double(s->min_choi_eig), "0"});
    else csv.row({io::format_double(t), "", "", "1"});
    plot.series[0].x.push_back(t);
    plot.series[0].y.push_back(s ? s->n_value : std::numeric_limits<double>::quiet_NaN());
  }
  return {os.str(), plot, {}};
}

inline Product cmd_sweep(const RunConfig& cfg) {
  const SweepAxis axis = parse_axis(cfg.axis);
  if (cfg.values.empty()) throw UsageError("sweep needs --values");
  const auto grid = cfg.grid();
  const auto runs = run_sweep(cfg.params, axis, cfg.values, grid, cfg.tau, resolve_jobs(cfg.jobs));
  std::ostringstream os;
  io::CsvWriter csv(os, {"axis", "value", "neg_gamma_minus", "neg_gamma_plus", "neg_gamma_d", "first_neg_gamma_minus",
                         "first_neg_gamma_plus", "first_neg_gamma_d", "integral_n", "singular_points"});
  io::Plot plot{"gamma_-(t), sweep over " + cfg.axis, "t", "gamma_-", {}};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const NonMarkovSummary& s = runs[i];
    csv.row({cfg.axis, io::format_double(cfg.values[i]), io::format_double(s.negativity(Rate::minus)),
             io::format_double(s.negativity(Rate::plus)), io::format_double(s.negativity(Rate::dephasing)),
             detail::fmt_opt(s.first_negative(Rate::minus)), detail::fmt_opt(s.first_negative(Rate::plus)),
             detail::fmt_opt(s.first_negative(Rate::dephasing)), io::format_double(s.integral_n),
             std::to_string(s.singular_points)});
    io::Series series{cfg.axis + " = " + io::format_double(cfg.values[i]), s.grid, {}};
    for (const auto& r : s.rates)
      series.y.push_back(r ? r->gamma_minus : std::numeric_limits<double>::quiet_NaN());
    plot.series.push_back(std::move(series));
  }
  return {os.str(), plot, {}};
}

inline Product cmd_oracle_check(const RunConfig& cfg, bool& passed) {
  const auto report = oracle::adjudicate_transcriptions(cfg.params, resolve_jobs(cfg.jobs));
  passed = report.pass();
  return {{}, std::nullopt, report.text()};
}

// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Reduced dynamics of a central spin coupled to a spin bath", "csdyn"};
  std::string command, config_path;
  bool show = false;
  std::map<std::string, std::string> raw;
  app.add_option("command", command, "evolve | rates | kraus | choi | rhp | sweep | oracle-check")
      ->check(CLI::IsMember({"evolve", "rates", "kraus", "choi", "rhp", "sweep", "oracle-check"}));
  app.add_option("--config", config_path, "key=value file; flags override it");
  app.add_flag("--show-config", show, "print the resolved configuration and exit");
  const std::map<std::string, std::string> help{
      {"omega0", "system splitting"},
      {"omega", "bath splitting"},
      {"delta", "system-bath coupling"},
      {"n", "number of bath spins"},
      {"temp", "bath temperature"},
      {"t-max", "end of the time grid"},
      {"steps", "grid intervals"},
      {"tau", "RHP increment"},
      {"state", "excited|ground|plusx|plusy|mixed|custom:r11,re12,im12"},
      {"axis", "sweep axis: delta|temp|n"},
      {"values", "comma-separated sweep values"},
      {"out", "output path (default stdout)"},
      {"format", "csv|svg|both"},
      {"jobs", "worker threads (default CSDYN_JOBS, then hardware)"},
  };
  for (const auto& key : config_keys()) app.add_option("--" + key, raw[key], help.at(key));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "csdyn: " << e.what() << "\n";
    return exit_usage;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) load_config_file(cfg, config_path);
    for (const auto& key : config_keys())
      if (app.count("--" + key) > 0) apply_setting(cfg, key, raw[key]);
    cfg.validate();
    if (show) {
      out << show_config(cfg);
      return exit_ok;
    }
    if (command.empty()) throw UsageError("missing command");

    bool passed = true;
    Product p;
    if (command == "evolve") p = cmd_evolve(cfg);
    else if (command == "rates") p = cmd_rates(cfg);
    else if (command == "kraus") p = cmd_kraus(cfg);
    else if (command == "choi") p = cmd_choi(cfg);
    else if (command == "rhp") p = cmd_rhp(cfg);
    else if (command == "sweep") p = cmd_sweep(cfg);
    else p = cmd_oracle_check(cfg, passed);
    emit(cfg, p, out);
    if (!passed) {
      err << "csdyn: oracle-check FAILED\n";
      return exit_numerical;
    }
    return exit_ok;
  } catch (const UsageError& e) {
    err << "csdyn: " << e.what() << "\n";
    return exit_usage;
  } catch (const NumericalError& e) {
    err << "csdyn: numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const InvalidArgument& e) {
    err << "csdyn: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "csdyn: " << e.what() << "\n";
    return exit_numerical;
  }
}

} // namespace csdyn::cli
