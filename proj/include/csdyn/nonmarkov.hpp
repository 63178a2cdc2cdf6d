#pragma once

// Non-Markovianity diagnostics: the divisibility (RHP) indicator computed
// from the Choi matrix of the intermediate map Phi(t + tau, t), and
// negativity scans of the canonical rates.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csdyn/error.hpp"
#include "csdyn/generator.hpp"
#include "csdyn/linalg.hpp"
#include "csdyn/parallel.hpp"
#include "csdyn/qmap.hpp"
#include "csdyn/spectrum.hpp"

namespace csdyn {

inline constexpr double default_tau = 1e-3;
// Rates above -negativity_tol count as non-negative.
inline constexpr double negativity_tol = 1e-12;

inline TransferMatrix intermediate_map(const SpectralModel& model, double t, double tau) {
  if (tau < 0.0) throw InvalidArgument("intermediate_map: tau must be >= 0");
  const Mat4 f_t = transfer_matrix(model.coefficients(t)).f;
  const double det = determinant(f_t);
  if (std::abs(det) <= singular_det_threshold) throw SingularMapError(t, det);
  if (tau == 0.0) return {t, Mat4::identity()};
  const Mat4 f_next = transfer_matrix(model.coefficients(t + tau)).f;
  return {t + tau, f_next * inverse(f_t)};
}

inline TransferMatrix intermediate_map(const ModelParams& p, const ThermalWeights& w, double t, double tau) {
  return intermediate_map(SpectralModel(p, w), t, tau);
}

struct RhpSample {
  double t = 0.0;
  double tau = 0.0;
  double n_value = 0.0;
  double min_choi_eig = 0.0;
};

inline RhpSample rhp_indicator(const SpectralModel& model, double t, double tau = default_tau) {
  if (!(tau > 0.0)) throw InvalidArgument("rhp_indicator: tau must be > 0");
  const ChoiMatrix ch = choi_from_transfer(intermediate_map(model, t, tau));
  const EigenSystem es = hermitian_eig(ch.c);
  double norm1 = 0.0;
  for (double l : es.values) norm1 += std::abs(l);
  return {t, tau, std::max(0.0, (norm1 - 1.0) / tau), es.values.front()};
}

inline RhpSample rhp_indicator(const ModelParams& p, const ThermalWeights& w, double t, double tau = default_tau) {
  return rhp_indicator(SpectralModel(p, w), t, tau);
}

// N at tau and tau/2 with the first-order Richardson estimate of the
// tau -> 0 limit. richardson_c = |N_tau - N_tau/2| / tau.
struct RhpExtrapolation {
  double t = 0.0;
  double n_tau = 0.0;
  double n_half = 0.0;
  double n_limit = 0.0;
  double richardson_c = 0.0;
};

inline RhpExtrapolation rhp_extrapolated(const SpectralModel& model, double t, double tau = default_tau) {
  RhpExtrapolation r;
  r.t = t;
  r.n_tau = rhp_indicator(model, t, tau).n_value;
  r.n_half = rhp_indicator(model, t, 0.5 * tau).n_value;
  r.n_limit = std::max(0.0, 2.0 * r.n_half - r.n_tau);
  r.richardson_c = std::abs(r.n_tau - r.n_half) / tau;
  return r;
}

enum class Rate : std::size_t { minus = 0, plus = 1, dephasing = 2 };

inline double rate_value(const CanonicalRates& r, Rate k) {
  switch (k) {
    case Rate::minus: return r.gamma_minus;
    case Rate::plus: return r.gamma_plus;
    case Rate::dephasing: return r.gamma_d;
  }
  return 0.0;
}

struct NonMarkovSummary {
  ModelParams params;
  std::vector<double> grid;
  double integral_n = 0.0;
  std::array<double, 3> neg_gamma_integrals{};  // indexed by Rate
  std::array<std::optional<double>, 3> first_negative_time{};
  std::size_t singular_points = 0;

  // Per-point series; entries at singular points are absent (nullopt).
  std::vector<std::optional<CanonicalRates>> rates;
  std::vector<std::optional<RhpSample>> rhp;

  double negativity(Rate k) const { return neg_gamma_integrals[static_cast<std::size_t>(k)]; }
  std::optional<double> first_negative(Rate k) const { return first_negative_time[static_cast<std::size_t>(k)]; }
};

inline std::vector<double> uniform_grid(double t_max, std::size_t steps) {
  if (steps < 1 || !(t_max > 0.0)) throw InvalidArgument("grid needs t_max > 0 and steps >= 1");
  std::vector<double> g(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) g[i] = t_max * static_cast<double>(i) / static_cast<double>(steps);
  return g;
}

// Canonical rates and N(t) on the grid; trapezoidal integrals of the
// negative parts and of N. Intervals touching a singular point are dropped.
inline NonMarkovSummary rate_negativity_scan(const ModelParams& p, const ThermalWeights& w,
                                             std::span<const double> grid, double tau = default_tau) {
  if (grid.size() < 2) throw InvalidArgument("rate_negativity_scan: grid needs at least two points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw InvalidArgument("rate_negativity_scan: grid not strictly increasing");
  if (grid.front() < 0.0) throw InvalidArgument("rate_negativity_scan: grid starts before t = 0");

  const SpectralModel model(p, w);
  NonMarkovSummary s;
  s.params = p;
  s.grid.assign(grid.begin(), grid.end());
  s.rates.resize(grid.size());
  s.rhp.resize(grid.size());

  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      s.rates[i] = canonical_rates(l_matrix(model, grid[i]));
      s.rhp[i] = rhp_indicator(model, grid[i], tau);
    } catch (const SingularMapError&) {
      s.rates[i].reset();
      s.rhp[i].reset();
      ++s.singular_points;
    }
  }
  if (static_cast<double>(s.singular_points) > 0.01 * static_cast<double>(grid.size()))
    throw NumericalError("rate_negativity_scan: " + std::to_string(s.singular_points) + " singular grid points");

  auto neg_part = [](double g) { return g < -negativity_tol ? -g : 0.0; };
  for (std::size_t k = 0; k < 3; ++k) {
    const auto rate = static_cast<Rate>(k);
    KahanSum<double> acc;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!s.rates[i]) continue;
      const double g = rate_value(*s.rates[i], rate);
      if (!s.first_negative_time[k] && g < -negativity_tol) s.first_negative_time[k] = grid[i];
      if (i + 1 < grid.size() && s.rates[i + 1])
        acc += 0.5 * (grid[i + 1] - grid[i]) * (neg_part(g) + neg_part(rate_value(*s.rates[i + 1], rate)));
    }
    s.neg_gamma_integrals[k] = acc.value();
  }
  KahanSum<double> n_acc;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (s.rhp[i] && s.rhp[i + 1]) n_acc += 0.5 * (grid[i + 1] - grid[i]) * (s.rhp[i]->n_value + s.rhp[i + 1]->n_value);
  s.integral_n = n_acc.value();
  return s;
}

enum class SweepAxis { delta, temperature, n_spins };

inline ModelParams with_axis_value(ModelParams p, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::delta: p.delta = value; break;
    case SweepAxis::temperature: p.temperature = value; break;
    case SweepAxis::n_spins:
      if (value < 1.0 || value != std::floor(value)) throw InvalidArgument("n sweep values must be positive integers");
      p.n_spins = static_cast<int>(value);
      break;
  }
  p.validate();
  return p;
}

// One scan per axis value, run on a bounded pool, returned in input order.
inline std::vector<NonMarkovSummary> run_sweep(const ModelParams& base, SweepAxis axis, std::span<const double> values,
                                               std::span<const double> grid, double tau, unsigned jobs) {
  if (values.empty()) throw InvalidArgument("sweep values must be non-empty");
  return parallel_map(values.size(), jobs, [&](std::size_t i) {
    const ModelParams p = with_axis_value(base, axis, values[i]);
    return rate_negativity_scan(p, thermal_weights(p), grid, tau);
  });
}

} // namespace csdyn
