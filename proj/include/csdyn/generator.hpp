#pragma once

// Time-local generator L(t) = dF/dt F^{-1} of the exact map, its canonical
// Lindblad decomposition
//
//   drho/dt = i Omega [rho, sigma_z] + g_d (sigma_z rho sigma_z - rho)
//           + g_- (sigma_- rho sigma_+ - {sigma_+ sigma_-, rho}/2)
//           + g_+ (sigma_+ rho sigma_- - {sigma_- sigma_+, rho}/2)
//
// and an RK4 integrator of that master equation.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csdyn/error.hpp"
#include "csdyn/linalg.hpp"
#include "csdyn/mat4.hpp"
#include "csdyn/qmap.hpp"
#include "csdyn/spectrum.hpp"

namespace csdyn {

struct GeneratorMatrix {
  double t = 0.0;
  Mat4 l;
};

struct CanonicalRates {
  double t = 0.0;
  double omega = 0.0;
  double gamma_minus = 0.0;
  double gamma_plus = 0.0;
  double gamma_d = 0.0;
};

inline Mat4 transfer_rate_matrix(const MapCoefficientRates& r) {
  Mat4 f;
  f(1, 1) = r.zeta.real();
  f(1, 2) = r.zeta.imag();
  f(2, 1) = -r.zeta.imag();
  f(2, 2) = r.zeta.real();
  f(3, 0) = r.alpha2 - r.alpha1;
  f(3, 3) = -r.alpha1 - r.alpha2;
  return f;
}

// dF/dt from termwise differentiation of the mode sums.
inline Mat4 f_dot(const SpectralModel& model, double t) {
  return transfer_rate_matrix(model.rates(t));
}

inline Mat4 f_dot(const ModelParams& p, const ThermalWeights& w, double t) {
  return transfer_rate_matrix(map_coefficient_rates(p, w, t));
}

struct FiniteDifference {
  Mat4 f_dot;
  bool one_sided = false;
};

// Default step: 1e-5 of the system period 2 pi / omega0.
inline double default_fd_step(const ModelParams& p) {
  return 1e-5 * 2.0 * pi / std::max(std::abs(p.omega0), 1e-12);
}

// Five-point finite-difference dF/dt; falls back to a forward stencil when
// t - 2h < 0.
inline FiniteDifference f_dot_finite_difference(const ModelParams& p, const ThermalWeights& w, double t,
                                                double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be > 0");
  auto F = [&](double s) { return transfer_matrix(map_coefficients(p, w, s)).f; };
  FiniteDifference out;
  if (t - 2.0 * h >= 0.0) {
    const Mat4 m2 = F(t - 2.0 * h), m1 = F(t - h), p1 = F(t + h), p2 = F(t + 2.0 * h);
    for (std::size_t i = 0; i < 16; ++i)
      out.f_dot.a[i] = (-p2.a[i] + 8.0 * p1.a[i] - 8.0 * m1.a[i] + m2.a[i]) / (12.0 * h);
  } else {
    out.one_sided = true;
    const Mat4 f0 = F(t), f1 = F(t + h), f2 = F(t + 2.0 * h), f3 = F(t + 3.0 * h), f4 = F(t + 4.0 * h);
    for (std::size_t i = 0; i < 16; ++i)
      out.f_dot.a[i] =
          (-25.0 * f0.a[i] + 48.0 * f1.a[i] - 36.0 * f2.a[i] + 16.0 * f3.a[i] - 3.0 * f4.a[i]) / (12.0 * h);
  }
  return out;
}

inline constexpr double singular_det_threshold = 1e-12;

inline GeneratorMatrix l_matrix(const SpectralModel& model, double t) {
  const auto [coeffs, rates] = model.evaluate(t);
  const Mat4 f = transfer_matrix(coeffs).f;
  const double det = determinant(f);
  if (std::abs(det) <= singular_det_threshold) throw SingularMapError(t, det);
  return {t, transfer_rate_matrix(rates) * inverse(f)};
}

inline GeneratorMatrix l_matrix(const ModelParams& p, const ThermalWeights& w, double t) {
  const Mat4 f = transfer_matrix(map_coefficients(p, w, t)).f;
  const double det = determinant(f);
  if (std::abs(det) <= singular_det_threshold) throw SingularMapError(t, det);
  return {t, f_dot(p, w, t) * inverse(f)};
}

// Pauli-basis generator of the canonical Lindblad form with the given rates.
inline Mat4 generator_from_rates(const CanonicalRates& r) {
  Mat4 l;
  const double decay = -(r.gamma_minus + r.gamma_plus) / 2.0 - 2.0 * r.gamma_d;
  l(1, 1) = decay;
  l(2, 2) = decay;
  l(1, 2) = -2.0 * r.omega;
  l(2, 1) = 2.0 * r.omega;
  l(3, 0) = r.gamma_plus - r.gamma_minus;
  l(3, 3) = -(r.gamma_minus + r.gamma_plus);
  return l;
}

inline CanonicalRates canonical_rates(const GeneratorMatrix& g) {
  const Mat4& l = g.l;
  CanonicalRates r;
  r.t = g.t;
  const double lxx = 0.5 * (l(1, 1) + l(2, 2));
  const double lxy = 0.5 * (l(1, 2) - l(2, 1));
  r.gamma_minus = 0.5 * (-l(3, 3) - l(3, 0));
  r.gamma_plus = 0.5 * (-l(3, 3) + l(3, 0));
  r.gamma_d = l(3, 3) / 4.0 - lxx / 2.0;
  r.omega = -lxy / 2.0;
  const double mismatch = (generator_from_rates(r) - l).max_abs();
  if (mismatch > 1e-8 * std::max(1.0, l.max_abs()))
    throw NumericalError("canonical_rates: generator not of canonical form (residual " +
                         std::to_string(mismatch) + " at t=" + std::to_string(g.t) + ")");
  return r;
}

// Right-hand side of the canonical master equation, term by term.
inline ComplexMatrix lindblad_rhs(const CanonicalRates& r, const ComplexMatrix& rho) {
  static const ComplexMatrix sz{{1.0, 0.0}, {0.0, -1.0}};
  static const ComplexMatrix sp{{0.0, 1.0}, {0.0, 0.0}};
  static const ComplexMatrix sm{{0.0, 0.0}, {1.0, 0.0}};
  static const ComplexMatrix pm = sp * sm;  // |1><1|
  static const ComplexMatrix mp = sm * sp;  // |0><0|
  const cplx i{0.0, 1.0};

  ComplexMatrix out = (rho * sz - sz * rho) * (i * r.omega);
  out += (sz * rho * sz - rho) * cplx{r.gamma_d};
  out += (sm * rho * sp - (pm * rho + rho * pm) * cplx{0.5}) * cplx{r.gamma_minus};
  out += (sp * rho * sm - (mp * rho + rho * mp) * cplx{0.5}) * cplx{r.gamma_plus};
  return out;
}

inline ComplexMatrix lindblad_rhs(const CanonicalRates& r, const DensityMatrix& rho) {
  return lindblad_rhs(r, rho.matrix());
}

struct MasterTrajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<double> singular_steps;  // start times of steps re-anchored to the exact map
  double max_trace_dev = 0.0;
};

// RK4 on the canonical master equation with rates refreshed at every stage.
// All initial states share the rate evaluations. A step touching a time
// where F is singular is replaced by the exact map and recorded.
inline std::vector<MasterTrajectory> integrate_master(const ModelParams& p, std::span<const DensityMatrix> rho0,
                                                      double t_max, double dt) {
  if (!(t_max > 0.0) || !(dt > 0.0)) throw InvalidArgument("integrate_master: t_max and dt must be > 0");
  const SpectralModel model(p);
  const auto steps = static_cast<std::size_t>(std::llround(std::ceil(t_max / dt - 1e-9)));
  const double h = t_max / static_cast<double>(steps);

  std::vector<MasterTrajectory> out(rho0.size());
  std::vector<ComplexMatrix> state(rho0.size());
  for (std::size_t s = 0; s < rho0.size(); ++s) {
    state[s] = rho0[s].matrix();
    out[s].times.reserve(steps + 1);
    out[s].states.reserve(steps + 1);
    out[s].times.push_back(0.0);
    out[s].states.push_back(rho0[s]);
  }

  auto rates_at = [&](double t) { return canonical_rates(l_matrix(model, t)); };
  auto hermitize = [](ComplexMatrix m) {
    const cplx off = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
    m(0, 1) = off;
    m(1, 0) = std::conj(off);
    m(0, 0) = m(0, 0).real();
    m(1, 1) = m(1, 1).real();
    return m;
  };

  std::size_t singular = 0;
  std::optional<CanonicalRates> r_start;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = h * static_cast<double>(k);
    const double t_next = h * static_cast<double>(k + 1);
    std::optional<CanonicalRates> r_mid, r_end;
    try {
      if (!r_start) r_start = rates_at(t);
      r_mid = rates_at(t + 0.5 * h);
      r_end = rates_at(t_next);
    } catch (const SingularMapError&) {
      r_start.reset();
    }

    if (!r_start || !r_mid || !r_end) {
      ++singular;
      const MapCoefficients c = model.coefficients(t_next);
      for (std::size_t s = 0; s < rho0.size(); ++s) {
        out[s].singular_steps.push_back(t);
        state[s] = apply_map(c, rho0[s]).matrix();
      }
    } else {
      for (auto& m : state) {
        const ComplexMatrix k1 = lindblad_rhs(*r_start, m);
        const ComplexMatrix k2 = lindblad_rhs(*r_mid, m + k1 * cplx{0.5 * h});
        const ComplexMatrix k3 = lindblad_rhs(*r_mid, m + k2 * cplx{0.5 * h});
        const ComplexMatrix k4 = lindblad_rhs(*r_end, m + k3 * cplx{h});
        m = hermitize(m + (k1 + k2 * cplx{2.0} + k3 * cplx{2.0} + k4) * cplx{h / 6.0});
      }
      r_start = r_end;
    }

    for (std::size_t s = 0; s < rho0.size(); ++s) {
      const double dev = std::abs(state[s].trace() - 1.0);
      out[s].max_trace_dev = std::max(out[s].max_trace_dev, dev);
      out[s].times.push_back(t_next);
      out[s].states.emplace_back(state[s](0, 0).real(), state[s](0, 1));
    }
  }

  if (static_cast<double>(singular) > 0.01 * static_cast<double>(steps))
    throw NumericalError("integrate_master: singular transfer matrix on " + std::to_string(singular) + " of " +
                         std::to_string(steps) + " steps");
  return out;
}

inline MasterTrajectory integrate_master(const ModelParams& p, const DensityMatrix& rho0, double t_max, double dt) {
  return integrate_master(p, std::span<const DensityMatrix>(&rho0, 1), t_max, dt).front();
}

} // namespace csdyn
