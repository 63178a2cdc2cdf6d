// Acceptance runner: one PASS/FAIL line per criterion. Tolerances are pinned
// here and must not be loosened to make a criterion pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csdyn/adjudication.hpp"
#include "csdyn/generator.hpp"
#include "csdyn/nonmarkov.hpp"
#include "csdyn/oracle.hpp"
#include "csdyn/qmap.hpp"
#include "csdyn/spectrum.hpp"

using namespace csdyn;

namespace {

namespace tol {
constexpr double concordance = 1e-8;
constexpr double concordance_seconds = 30.0;
constexpr double choi_min_eig = -1e-10;
constexpr double trace_dev = 1e-10;
constexpr double kraus_residual = 1e-10;
constexpr double kraus_agreement = 1e-10;
constexpr double zeta_floor = 1e-14;
constexpr double round_trip = 1e-6;
constexpr double round_trip_dt = 1e-3;
constexpr double round_trip_t_max = 100.0;
constexpr double singular_fraction = 1e-3;
constexpr double gamma_d_identity = 1e-7;
constexpr double unitary_rates = 1e-9;
constexpr double unitary_rhp = 1e-6;
constexpr double unitary_coeffs = 1e-12;
constexpr double sweep_seconds = 60.0;
constexpr double positive_rate = 1e-9;
constexpr double divisible_rhp = 1e-6;
constexpr double rhp_relative = 0.10;
} // namespace tol

// Default figure grid.
constexpr double grid_t_max = 400.0;
constexpr std::size_t grid_steps = 4000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

ModelParams fig1(double delta = 0.01) {
  ModelParams p;
  p.delta = delta;
  return p;
}

// 1. analytic map vs both oracles on the panel
Outcome concordance_panel(unsigned jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto panel = oracle::evaluate_panel(ModelParams{}, oracle::PanelSpec{}, jobs);
  double a = 0.0, boson = 0.0, collective = 0.0;
  for (const auto& c : panel) {
    const auto k = oracle::concordance(c);
    a = std::max(a, k.vs_mode_ode);
    boson = std::max(boson, k.vs_boson);
    collective = std::max(collective, k.vs_collective);
  }
  const double secs = seconds_since(t0);
  const bool ok = a <= tol::concordance && boson <= tol::concordance && collective <= tol::concordance &&
                  secs < tol::concordance_seconds;
  return {ok, "oracle A " + sci(a) + ", oracle B boson " + sci(boson) + ", oracle B symmetric-sector " +
                  sci(collective) + " (tol " + sci(tol::concordance) + "), " + sci(secs) + " s"};
}

// 2. CPTP suite on the default grid
Outcome cptp_suite() {
  const ModelParams p = fig1();
  const SpectralModel model(p);
  double min_eig = INFINITY, tr = 0.0, kr = 0.0, agree = 0.0;
  std::size_t failures = 0;
  for (double t : uniform_grid(grid_t_max, grid_steps)) {
    const MapCoefficients c = model.coefficients(t);
    const CptpReport r = validate_cptp(c);
    min_eig = std::min(min_eig, r.min_choi_eig);
    tr = std::max(tr, r.trace_dev);
    if (!r.is_cp || std::isnan(r.kraus_residual)) {
      ++failures;
      continue;
    }
    kr = std::max(kr, r.kraus_residual);
    if (std::abs(c.zeta) <= tol::zeta_floor) continue;
    const KrausSet closed = kraus_closed_form(c);
    kr = std::max(kr, closed.completeness_residual());
    const KrausSet eig = kraus_from_choi(choi(c));
    for (const auto& b : pauli_basis()) agree = std::max(agree, max_abs_diff(closed.apply(b), eig.apply(b)));
  }
  const bool ok = failures == 0 && min_eig >= tol::choi_min_eig && tr <= tol::trace_dev &&
                  kr <= tol::kraus_residual && agree <= tol::kraus_agreement;
  return {ok, "min Choi eig " + sci(min_eig) + ", trace dev " + sci(tr) + ", Kraus residual " + sci(kr) +
                  ", Kraus constructions differ by " + sci(agree) + ", non-CP points " + std::to_string(failures)};
}

// 3. master-equation round trip
Outcome round_trip() {
  const ModelParams p = fig1();
  const auto states = tomographic_states();
  const auto traj = integrate_master(p, states, tol::round_trip_t_max, tol::round_trip_dt);
  const SpectralModel model(p);
  const MapCoefficients end = model.coefficients(tol::round_trip_t_max);
  double err = 0.0;
  std::size_t singular = 0, steps = 0;
  for (std::size_t s = 0; s < states.size(); ++s) {
    err = std::max(err, traj[s].states.back().distance(apply_map(end, states[s])));
    singular = std::max(singular, traj[s].singular_steps.size());
    steps = traj[s].times.size() - 1;
  }
  const double frac = steps ? static_cast<double>(singular) / static_cast<double>(steps) : 1.0;
  const bool ok = err <= tol::round_trip && frac < tol::singular_fraction;
  return {ok, "endpoint error " + sci(err) + " (tol " + sci(tol::round_trip) + "), singular steps " +
                  std::to_string(singular) + "/" + std::to_string(steps)};
}

// 4. gamma_d against the coefficient identity
Outcome gamma_d_identity() {
  const ModelParams p = fig1();
  const SpectralModel model(p);
  double worst = 0.0;
  std::size_t used = 0, singular = 0;
  for (double t : uniform_grid(grid_t_max, grid_steps)) {
    if (t == 0.0) continue;  // L(0) is the t -> 0+ limit of a 0/0 form
    try {
      const CanonicalRates r = canonical_rates(l_matrix(model, t));
      const auto [c, d] = model.evaluate(t);
      const double pop = 1.0 - c.alpha1 - c.alpha2;
      const double z2 = std::norm(c.zeta);
      const double dlog = -(d.alpha1 + d.alpha2) / pop - 2.0 * std::real(d.zeta * std::conj(c.zeta)) / z2;
      worst = std::max(worst, std::abs(r.gamma_d - 0.25 * dlog));
      ++used;
    } catch (const SingularMapError&) {
      ++singular;
    }
  }
  return {worst <= tol::gamma_d_identity, "max |gamma_d - identity| " + sci(worst) + " over " + std::to_string(used) +
                                              " points (" + std::to_string(singular) + " singular skipped)"};
}

// 5. unitary limit
Outcome unitary_limit() {
  const ModelParams p = fig1(0.0);
  const SpectralModel model(p);
  double coeff = 0.0, rates = 0.0, rhp = 0.0;
  for (double t : uniform_grid(grid_t_max, grid_steps)) {
    const MapCoefficients c = model.coefficients(t);
    coeff = std::max({coeff, std::abs(c.alpha1), std::abs(c.alpha2), std::abs(std::abs(c.zeta) - 1.0)});
    const CanonicalRates r = canonical_rates(l_matrix(model, t));
    rates = std::max({rates, std::abs(r.gamma_minus), std::abs(r.gamma_plus), std::abs(r.gamma_d)});
    rhp = std::max(rhp, rhp_indicator(model, t).n_value);
  }
  const bool ok = coeff <= tol::unitary_coeffs && rates <= tol::unitary_rates && rhp <= tol::unitary_rhp;
  return {ok, "max coefficient deviation " + sci(coeff) + ", max |rate| " + sci(rates) + ", max N " + sci(rhp)};
}

// 6. figure trends
Outcome figure_trends(unsigned jobs) {
  const auto grid = uniform_grid(grid_t_max, grid_steps);
  struct Sweep {
    const char* name;
    SweepAxis axis;
    std::vector<double> values;
  };
  const std::vector<Sweep> sweeps{{"delta", SweepAxis::delta, {0.003, 0.005, 0.01}},
                                  {"temp", SweepAxis::temperature, {0.1, 1.0, 10.0}},
                                  {"n", SweepAxis::n_spins, {100.0, 200.0, 500.0}}};
  bool ok = true;
  std::ostringstream os;
  for (const auto& s : sweeps) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = run_sweep(fig1(), s.axis, s.values, grid, default_tau, jobs);
    const double secs = seconds_since(t0);
    bool ordered = true, negative = true;
    os << s.name << " [";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double neg = rows[i].negativity(Rate::minus);
      os << (i ? ", " : "") << sci(neg);
      if (i > 0 && !(neg > rows[i - 1].negativity(Rate::minus))) ordered = false;
      if (s.axis == SweepAxis::delta && !rows[i].first_negative(Rate::minus)) negative = false;
    }
    os << "] " << (ordered ? "increasing" : "NOT increasing");
    if (s.axis == SweepAxis::delta) os << (negative ? ", gamma_- < 0 at every delta" : ", gamma_- never negative somewhere");
    os << ", " << sci(secs) << " s; ";
    ok = ok && ordered && negative && secs < tol::sweep_seconds;
  }
  return {ok, os.str()};
}

// 7. RHP vs rates
Outcome rhp_consistency() {
  const ModelParams p = fig1(0.01);
  const SpectralModel model(p);
  const auto grid = uniform_grid(grid_t_max, grid_steps);
  const auto scan = rate_negativity_scan(p, model.weights(), grid);
  auto all_positive = [](const std::optional<CanonicalRates>& r) {
    return r && std::min({r->gamma_minus, r->gamma_plus, r->gamma_d}) >= tol::positive_rate;
  };
  double worst = 0.0;
  std::size_t intervals = 0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!all_positive(scan.rates[i]) || !all_positive(scan.rates[i + 1]) || !scan.rhp[i]) continue;
    ++intervals;
    worst = std::max(worst, scan.rhp[i]->n_value);
  }
  const auto first = scan.first_negative(Rate::minus);
  if (!first) return {false, "gamma_- never negative on the grid"};
  const CanonicalRates r = canonical_rates(l_matrix(model, *first));
  auto neg = [](double g) { return g < 0.0 ? -g : 0.0; };
  const double estimate = neg(r.gamma_minus) + neg(r.gamma_plus) + 2.0 * neg(r.gamma_d);
  const RhpExtrapolation ex = rhp_extrapolated(model, *first);
  const double rel = estimate > 0.0 ? std::abs(ex.n_limit - estimate) / estimate : INFINITY;
  const bool ok = worst <= tol::divisible_rhp && ex.n_tau > 0.0 && rel <= tol::rhp_relative;
  return {ok, "max N on " + std::to_string(intervals) + " all-positive intervals " + sci(worst) + "; at t=" +
                  sci(*first) + " N(tau)=" + sci(ex.n_tau) + ", Richardson " + sci(ex.n_limit) + " vs rate estimate " +
                  sci(estimate) + " (rel " + sci(rel) + ")"};
}

// 8. adjudication report
Outcome adjudication(unsigned jobs) {
  const auto rep = oracle::adjudicate_transcriptions(ModelParams{}, jobs);
  auto has = [&](const std::string& prefix) {
    return std::any_of(rep.ledger.begin(), rep.ledger.end(), [&](const oracle::LedgerEntry& e) {
      return e.topic.rfind(prefix, 0) == 0 && std::isfinite(e.residual) && std::isfinite(e.alternative);
    });
  };
  const bool zeta = has("zeta mode factor"), alpha = has("alpha thermal weights"), rates = has("canonical rates");
  const bool ok = rep.pass() && rep.survivors() == 1 && zeta && alpha && rates;
  std::string d = std::to_string(rep.survivors()) + " surviving candidate(s)";
  if (const auto* w = rep.winner()) d += " (" + w->candidate.name() + ")";
  d += std::string(", ledger: zeta ") + (zeta ? "yes" : "MISSING") + ", alpha weights " + (alpha ? "yes" : "MISSING") +
       ", canonical rates " + (rates ? "yes" : "MISSING");
  return {ok, d};
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"csdyn acceptance criteria", "csdyn_acceptance"};
  int only = 0;
  int jobs = 0;
  app.add_option("--criterion", only, "run a single criterion (1-8); default all")->check(CLI::Range(0, 8));
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::NonNegativeNumber);
  CLI11_PARSE(app, argc, argv);
  const unsigned nj = resolve_jobs(jobs);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"oracle concordance", [&] { return concordance_panel(nj); }},
      {"CPTP suite", cptp_suite},
      {"master-equation round trip", round_trip},
      {"gamma_d identity", gamma_d_identity},
      {"unitary limit", unitary_limit},
      {"figure trends", [&] { return figure_trends(nj); }},
      {"RHP-rate consistency", rhp_consistency},
      {"adjudication report", [&] { return adjudication(nj); }},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && static_cast<std::size_t>(only) != k + 1) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << k + 1 << " [" << criteria[k].first << "]: " << (o.pass ? "PASS" : "FAIL") << " - "
              << o.detail << std::endl;
    if (!o.pass) ++failed;
  }
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
