#pragma once

// Per-mode spectral data of the central spin model and the thermally
// averaged coefficients (alpha1, alpha2, zeta) of the reduced qubit map
//
//   rho11(t) = (1 - alpha1) rho11(0) + alpha2 rho22(0)
//   rho12(t) = zeta rho12(0)
//
// Units: hbar = k_B = 1. Mode n is the boson number of the
// Holstein-Primakoff bath mode, n = 0..N.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "csdyn/error.hpp"
#include "csdyn/numeric.hpp"

namespace csdyn {

struct ModelParams {
  double omega0 = 1.0;       // system frequency
  double omega = 1.0;        // bath frequency
  double delta = 0.01;       // system-bath coupling
  int n_spins = 100;         // bath size N
  double temperature = 1.0;  // T

  void validate() const {
    if (n_spins < 1) throw InvalidArgument("n_spins must be >= 1");
    if (!(temperature > 0.0)) throw InvalidArgument("temperature must be > 0");
    if (!(delta >= 0.0)) throw InvalidArgument("delta must be >= 0");
    if (!std::isfinite(omega0) || !std::isfinite(omega) || !std::isfinite(delta) ||
        !std::isfinite(temperature))
      throw InvalidArgument("model parameters must be finite");
  }

  double n() const noexcept { return static_cast<double>(n_spins); }
};

// Boltzmann weights of the bath modes, stored relative to the largest one.
// The absolute weight of mode n is exp(log_offset) * weights[n].
struct ThermalWeights {
  std::vector<double> weights;
  double partition = 0.0;  // sum of weights (relative scale)
  double log_offset = 0.0;

  double probability(std::size_t n) const { return weights[n] / partition; }
  double absolute(std::size_t n) const { return std::exp(log_offset) * weights[n]; }
  double absolute_partition() const { return std::exp(log_offset) * partition; }
  std::size_t size() const noexcept { return weights.size(); }

  // Weights restricted to one mode; used to check mode-sum linearity.
  static ThermalWeights single_mode(std::size_t count, std::size_t n) {
    ThermalWeights w;
    w.weights.assign(count, 0.0);
    w.weights.at(n) = 1.0;
    w.partition = 1.0;
    return w;
  }
};

// w_n = exp(-(omega / 2T)(n/N - 1)), n = 0..N.
inline ThermalWeights thermal_weights(const ModelParams& p) {
  p.validate();
  const std::size_t count = static_cast<std::size_t>(p.n_spins) + 1;
  std::vector<double> expo(count);
  double emax = -INFINITY;
  for (std::size_t n = 0; n < count; ++n) {
    expo[n] = -(p.omega / (2.0 * p.temperature)) * (static_cast<double>(n) / p.n() - 1.0);
    emax = std::max(emax, expo[n]);
  }
  ThermalWeights w;
  w.weights.resize(count);
  w.log_offset = emax;
  KahanSum<double> z;
  for (std::size_t n = 0; n < count; ++n) {
    w.weights[n] = std::exp(expo[n] - emax);
    z += w.weights[n];
  }
  w.partition = z.value();
  return w;
}

struct ModeTerm {
  int n = 0;
  double beta = 0.0;        // excited-branch Rabi frequency, |1,n> <-> |0,n+1>
  double beta_prime = 0.0;  // ground-branch Rabi frequency, |0,n> <-> |1,n-1>
  double eps = 0.0;         // excited-branch detuning
  double eps_prime = 0.0;   // ground-branch detuning
  double coupling = 0.0;        // 4 Delta^2 (n+1)(1 - n/2N)
  double coupling_prime = 0.0;  // 4 Delta^2 n (1 - (n-1)/2N)
};

inline ModeTerm mode_term(const ModelParams& p, int n) {
  if (n < 0 || n > p.n_spins) throw InvalidArgument("mode index out of range: " + std::to_string(n));
  const double N = p.n();
  const double nd = static_cast<double>(n);
  ModeTerm m;
  m.n = n;
  m.eps = p.omega0 - p.omega / (2.0 * N) + p.delta * (1.0 - (2.0 * nd + 1.0) / (2.0 * N));
  // Detuning of |1,n-1> against |0,n> under the boson Hamiltonian.
  m.eps_prime = p.omega0 - p.omega / (2.0 * N) + p.delta * (1.0 - (2.0 * nd - 1.0) / (2.0 * N));
  m.coupling = 4.0 * p.delta * p.delta * (nd + 1.0) * (1.0 - nd / (2.0 * N));
  m.coupling_prime = 4.0 * p.delta * p.delta * nd * (1.0 - (nd - 1.0) / (2.0 * N));
  m.beta = std::sqrt(m.eps * m.eps + m.coupling);
  m.beta_prime = std::sqrt(m.eps_prime * m.eps_prime + m.coupling_prime);
  return m;
}

// sin^2(x t / 2) / x^2, finite at x = 0.
inline double sinc2_half(double x, double t) {
  const double u = x * t;
  if (std::abs(u) < 1e-6) return 0.25 * t * t * (1.0 - u * u / 12.0);
  const double s = std::sin(0.5 * u);
  return s * s / (x * x);
}

// sin(x t / 2) / x, finite at x = 0.
inline double sin_half_over(double x, double t) {
  const double u = x * t;
  if (std::abs(u) < 1e-6) return 0.5 * t * (1.0 - u * u / 24.0);
  return std::sin(0.5 * u) / x;
}

// d/dt sinc2_half(x, t) = sin(x t) / (2x).
inline double sinc2_half_rate(double x, double t) {
  const double u = x * t;
  if (std::abs(u) < 1e-6) return 0.5 * t * (1.0 - u * u / 6.0);
  return std::sin(u) / (2.0 * x);
}

struct MapCoefficients {
  double t = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  cplx zeta{1.0, 0.0};
};

// Time derivatives of the map coefficients.
struct MapCoefficientRates {
  double t = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  cplx zeta{0.0, 0.0};
};

inline std::pair<double, double> alphas(const ModelParams& p, const ThermalWeights& w, double t) {
  if (t < 0.0) throw InvalidArgument("alphas: t must be >= 0");
  KahanSum<double> a1, a2;
  for (int n = 0; n <= p.n_spins; ++n) {
    const double prob = w.probability(static_cast<std::size_t>(n));
    if (prob == 0.0) continue;
    const ModeTerm m = mode_term(p, n);
    a1 += prob * m.coupling * sinc2_half(m.beta, t);
    a2 += prob * m.coupling_prime * sinc2_half(m.beta_prime, t);
  }
  const double v1 = a1.value(), v2 = a2.value();
  if (v1 < -1e-12 || v1 > 1.0 + 1e-9 || v2 < -1e-12 || v2 > 1.0 + 1e-9)
    throw NumericalError("alphas out of [0,1]: alpha1=" + std::to_string(v1) + " alpha2=" + std::to_string(v2));
  return {v1, v2};
}

namespace detail {

// Mode factor of zeta: phase * (cos(bt/2) - i e sin(bt/2)/b) * (cos(b't/2) - i e' sin(b't/2)/b').
inline cplx zeta_mode(const ModelParams& p, const ModeTerm& m, double t) {
  const cplx phase = std::polar(1.0, -p.omega * t / (2.0 * p.n()));
  const cplx f1{std::cos(0.5 * m.beta * t), -m.eps * sin_half_over(m.beta, t)};
  const cplx f2{std::cos(0.5 * m.beta_prime * t), -m.eps_prime * sin_half_over(m.beta_prime, t)};
  return phase * f1 * f2;
}

inline cplx zeta_mode_rate(const ModelParams& p, const ModeTerm& m, double t) {
  const double nu = p.omega / (2.0 * p.n());
  const cplx phase = std::polar(1.0, -nu * t);
  const double h = 0.5 * m.beta * t, hp = 0.5 * m.beta_prime * t;
  const cplx f1{std::cos(h), -m.eps * sin_half_over(m.beta, t)};
  const cplx f2{std::cos(hp), -m.eps_prime * sin_half_over(m.beta_prime, t)};
  const cplx df1{-0.5 * m.beta * std::sin(h), -0.5 * m.eps * std::cos(h)};
  const cplx df2{-0.5 * m.beta_prime * std::sin(hp), -0.5 * m.eps_prime * std::cos(hp)};
  return phase * (df1 * f2 + f1 * df2 + cplx{0.0, -nu} * f1 * f2);
}

} // namespace detail

inline cplx zeta(const ModelParams& p, const ThermalWeights& w, double t) {
  if (t < 0.0) throw InvalidArgument("zeta: t must be >= 0");
  KahanSum<cplx> z;
  for (int n = 0; n <= p.n_spins; ++n) {
    const double prob = w.probability(static_cast<std::size_t>(n));
    if (prob == 0.0) continue;
    z += prob * detail::zeta_mode(p, mode_term(p, n), t);
  }
  if (std::abs(z.value()) > 1.0 + 1e-9) throw NumericalError("|zeta| > 1 at t=" + std::to_string(t));
  return z.value();
}

inline MapCoefficients map_coefficients(const ModelParams& p, const ThermalWeights& w, double t) {
  const auto [a1, a2] = alphas(p, w, t);
  return {t, a1, a2, zeta(p, w, t)};
}

// Termwise analytic derivatives of the mode sums.
inline MapCoefficientRates map_coefficient_rates(const ModelParams& p, const ThermalWeights& w, double t) {
  if (t < 0.0) throw InvalidArgument("map_coefficient_rates: t must be >= 0");
  KahanSum<double> d1, d2;
  KahanSum<cplx> dz;
  for (int n = 0; n <= p.n_spins; ++n) {
    const double prob = w.probability(static_cast<std::size_t>(n));
    if (prob == 0.0) continue;
    const ModeTerm m = mode_term(p, n);
    d1 += prob * m.coupling * sinc2_half_rate(m.beta, t);
    d2 += prob * m.coupling_prime * sinc2_half_rate(m.beta_prime, t);
    dz += prob * detail::zeta_mode_rate(p, m, t);
  }
  return {t, d1.value(), d2.value(), dz.value()};
}

// Mode data precomputed for one (params, weights) pair; evaluates the map
// coefficients and their time derivatives in a single pass over the modes.
class SpectralModel {
public:
  SpectralModel(const ModelParams& p, ThermalWeights w) : p_(p), w_(std::move(w)) {
    p_.validate();
    if (w_.size() != static_cast<std::size_t>(p_.n_spins) + 1)
      throw InvalidArgument("thermal weights size must be N + 1");
    for (int n = 0; n <= p_.n_spins; ++n) {
      const double prob = w_.probability(static_cast<std::size_t>(n));
      if (prob == 0.0) continue;
      modes_.push_back(mode_term(p_, n));
      probs_.push_back(prob);
    }
  }
  explicit SpectralModel(const ModelParams& p) : SpectralModel(p, thermal_weights(p)) {}

  const ModelParams& params() const noexcept { return p_; }
  const ThermalWeights& weights() const noexcept { return w_; }

  MapCoefficients coefficients(double t) const { return evaluate(t).first; }
  MapCoefficientRates rates(double t) const { return evaluate(t).second; }

  std::pair<MapCoefficients, MapCoefficientRates> evaluate(double t) const {
    if (t < 0.0) throw InvalidArgument("SpectralModel: t must be >= 0");
    const double nu = p_.omega / (2.0 * p_.n());
    const cplx phase = std::polar(1.0, -nu * t);
    KahanSum<double> a1, a2, d1, d2;
    KahanSum<cplx> z, dz;
    for (std::size_t k = 0; k < modes_.size(); ++k) {
      const ModeTerm& m = modes_[k];
      const double prob = probs_[k];
      const double h = 0.5 * m.beta * t, hp = 0.5 * m.beta_prime * t;
      const double ch = std::cos(h), sh = std::sin(h), chp = std::cos(hp), shp = std::sin(hp);
      a1 += prob * m.coupling * sinc2_half(m.beta, t);
      a2 += prob * m.coupling_prime * sinc2_half(m.beta_prime, t);
      d1 += prob * m.coupling * sinc2_half_rate(m.beta, t);
      d2 += prob * m.coupling_prime * sinc2_half_rate(m.beta_prime, t);
      const cplx f1{ch, -m.eps * sin_half_over(m.beta, t)};
      const cplx f2{chp, -m.eps_prime * sin_half_over(m.beta_prime, t)};
      const cplx df1{-0.5 * m.beta * sh, -0.5 * m.eps * ch};
      const cplx df2{-0.5 * m.beta_prime * shp, -0.5 * m.eps_prime * chp};
      z += prob * f1 * f2;
      dz += prob * (df1 * f2 + f1 * df2 + cplx{0.0, -nu} * f1 * f2);
    }
    MapCoefficients c{t, a1.value(), a2.value(), phase * z.value()};
    MapCoefficientRates r{t, d1.value(), d2.value(), phase * dz.value()};
    if (c.alpha1 > 1.0 + 1e-9 || c.alpha2 > 1.0 + 1e-9 || std::abs(c.zeta) > 1.0 + 1e-9)
      throw NumericalError("map coefficients out of range at t=" + std::to_string(t));
    return {c, r};
  }

private:
  ModelParams p_;
  ThermalWeights w_;
  std::vector<ModeTerm> modes_;
  std::vector<double> probs_;
};

} // namespace csdyn
