#pragma once

// Brute-force reference engines for the reduced dynamics.
//
// Oracle A integrates the per-mode amplitude equations with RK4, with the
// boson number n as a scalar parameter, and averages over thermal modes.
//
// Oracle B evolves system (x) bath exactly from one eigendecomposition of a
// joint Hamiltonian and traces out the bath. Two joint Hamiltonians are
// provided:
//   * build_joint_hamiltonian: the collective-spin Hamiltonian on the
//     j = N/2 multiplet, with J_l = sum_i sigma_li;
//   * build_boson_joint_hamiltonian: the Holstein-Primakoff boson form on
//     Fock states n = 0..N+1 (excitation number is conserved, so a thermal
//     state supported on n <= N never leaves this space).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "csdyn/error.hpp"
#include "csdyn/linalg.hpp"
#include "csdyn/parallel.hpp"
#include "csdyn/qmap.hpp"
#include "csdyn/spectrum.hpp"

namespace csdyn::oracle {

// ---------------------------------------------------------------------------
// Oracle A
// ---------------------------------------------------------------------------

struct ModeAmplitudes {
  int n = 0;
  double t = 0.0;
  cplx m1{1.0, 0.0};  // amplitude on |1,n>   starting from |1,n>
  cplx m2{};          // M2' of the excited branch, |0,n+1> amplitude / sqrt(n+1)
  cplx m3{1.0, 0.0};  // amplitude on |0,n>   starting from |0,n>
  cplx m4{};          // amplitude on |1,n-1> starting from |0,n>

  // (n+1)|M2'|^2: population moved |1> -> |0>.
  double excited_transfer() const { return (n + 1.0) * std::norm(m2); }
  double ground_transfer() const { return std::norm(m4); }
  double excited_norm() const { return std::norm(m1) + excited_transfer(); }
  double ground_norm() const { return std::norm(m3) + ground_transfer(); }
};

// Diagonal energy of |s, n> under the boson Hamiltonian
//   H = (w0/2) sz - (w/2)(1 - n/N) + (Delta/2) sz (1 - n/N) + flip-flop terms,
// with s = +1 for the excited system state and -1 for the ground state.
inline double boson_energy(const ModelParams& p, int s, double n) {
  const double occ = 1.0 - n / p.n();
  return s * p.omega0 / 2.0 - p.omega / 2.0 * occ + s * p.delta / 2.0 * occ;
}

namespace detail {

// y' = -i A y for a 2x2 complex A.
struct Linear2 {
  std::array<cplx, 4> a;

  std::array<cplx, 2> rhs(const std::array<cplx, 2>& y) const {
    const cplx mi{0.0, -1.0};
    return {mi * (a[0] * y[0] + a[1] * y[1]), mi * (a[2] * y[0] + a[3] * y[1])};
  }

  void rk4(std::array<cplx, 2>& y, double h) const {
    auto axpy = [](const std::array<cplx, 2>& x, const std::array<cplx, 2>& k, double s) {
      return std::array<cplx, 2>{x[0] + s * k[0], x[1] + s * k[1]};
    };
    const auto k1 = rhs(y);
    const auto k2 = rhs(axpy(y, k1, 0.5 * h));
    const auto k3 = rhs(axpy(y, k2, 0.5 * h));
    const auto k4 = rhs(axpy(y, k3, h));
    for (std::size_t i = 0; i < 2; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }

  double max_coefficient() const {
    double m = 0.0;
    for (const auto& z : a) m = std::max(m, std::abs(z));
    return m;
  }
};

// Excited branch as printed for M1', M2' = b^dagger M2:
//   dM1'/dt = -i(w0/2 - (w - D)/2 (1 - n/N)) M1' - i D (1 - n/2N)^{1/2} (n+1) M2'
//   dM2'/dt =  i(w0/2 + (w + D)/2 (1 - (n+1)/N)) M2' - i D (1 - n/2N)^{1/2} M1'
inline Linear2 excited_system(const ModelParams& p, int n) {
  const double N = p.n(), nd = n;
  const double root = std::sqrt(1.0 - nd / (2.0 * N));
  Linear2 s;
  s.a[0] = p.omega0 / 2.0 - (p.omega - p.delta) / 2.0 * (1.0 - nd / N);
  s.a[1] = p.delta * root * (nd + 1.0);
  s.a[2] = p.delta * root;
  s.a[3] = -(p.omega0 / 2.0 + (p.omega + p.delta) / 2.0 * (1.0 - (nd + 1.0) / N));
  return s;
}

// Ground branch, |0,n> <-> |1,n-1>, from the boson Hamiltonian.
inline Linear2 ground_system(const ModelParams& p, int n) {
  const double N = p.n(), nd = n;
  const double g = p.delta * std::sqrt(nd * (1.0 - (nd - 1.0) / (2.0 * N)));
  Linear2 s;
  s.a[0] = boson_energy(p, -1, nd);
  s.a[1] = g;
  s.a[2] = g;
  s.a[3] = boson_energy(p, +1, nd - 1.0);
  return s;
}

} // namespace detail

inline double default_mode_dt(const ModelParams& p) {
  double beta_max = 0.0;
  for (int n = 0; n <= p.n_spins; ++n) {
    const ModeTerm m = mode_term(p, n);
    beta_max = std::max({beta_max, m.beta, m.beta_prime});
  }
  return beta_max > 0.0 ? std::min(1e-3, 0.02 / beta_max) : 1e-3;
}

// RK4 trajectories of both branches of mode n, reported at sample_times
// (non-decreasing, >= 0). Each inter-sample segment is split into equal
// steps no longer than dt.
inline std::vector<ModeAmplitudes> integrate_mode_odes(const ModelParams& p, int n,
                                                       std::span<const double> sample_times, double dt) {
  p.validate();
  if (n < 0 || n > p.n_spins) throw InvalidArgument("mode index out of range");
  const auto exc = detail::excited_system(p, n);
  const auto gnd = detail::ground_system(p, n);
  if (!(dt > 0.0) || dt * std::max(exc.max_coefficient(), gnd.max_coefficient()) >= 0.05)
    throw InvalidArgument("integrate_mode_odes: step too large for the mode coefficients");

  std::array<cplx, 2> ye{cplx{1.0}, cplx{}};
  std::array<cplx, 2> yg{cplx{1.0}, cplx{}};
  double t = 0.0;
  std::vector<ModeAmplitudes> out;
  out.reserve(sample_times.size());
  for (double target : sample_times) {
    if (target < t) throw InvalidArgument("integrate_mode_odes: sample times must be non-decreasing and >= 0");
    const double span = target - t;
    if (span > 0.0) {
      const auto steps = static_cast<long>(std::ceil(span / dt - 1e-12));
      const double h = span / static_cast<double>(steps);
      for (long k = 0; k < steps; ++k) {
        exc.rk4(ye, h);
        gnd.rk4(yg, h);
      }
      t = target;
    }
    out.push_back({n, target, ye[0], ye[1], yg[0], yg[1]});
  }
  return out;
}

// Thermal average of the mode amplitudes:
//   alpha1 = sum p_n (n+1)|M2'|^2, alpha2 = sum p_n |M4|^2, zeta = sum p_n M1 conj(M3).
inline std::vector<MapCoefficients> mode_ode_coefficients(const ModelParams& p, std::span<const double> sample_times,
                                                          double dt = 0.0, unsigned jobs = 1) {
  const ThermalWeights w = thermal_weights(p);
  const double step = dt > 0.0 ? dt : default_mode_dt(p);
  const auto per_mode = parallel_map(static_cast<std::size_t>(p.n_spins) + 1, jobs, [&](std::size_t n) {
    return integrate_mode_odes(p, static_cast<int>(n), sample_times, step);
  });
  std::vector<MapCoefficients> out(sample_times.size());
  for (std::size_t k = 0; k < sample_times.size(); ++k) {
    KahanSum<double> a1, a2;
    KahanSum<cplx> z;
    for (std::size_t n = 0; n < per_mode.size(); ++n) {
      const double prob = w.probability(n);
      const ModeAmplitudes& m = per_mode[n][k];
      a1 += prob * m.excited_transfer();
      a2 += prob * m.ground_transfer();
      z += prob * m.m1 * std::conj(m.m3);
    }
    out[k] = {sample_times[k], a1.value(), a2.value(), z.value()};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Oracle B
// ---------------------------------------------------------------------------

// Collective operators of N spins on the j = N/2 multiplet, basis index k
// = number of up spins (J_z eigenvalue 2k - N). jp = J_x + i J_y, which is
// twice the standard spin raising operator.
struct SymmetricSector {
  int n_spins = 0;
  std::size_t dim = 0;
  ComplexMatrix jz, jp, jm;

  explicit SymmetricSector(int n) : n_spins(n), dim(static_cast<std::size_t>(n) + 1) {
    if (n < 1) throw InvalidArgument("SymmetricSector: N must be >= 1");
    const double j = n / 2.0;
    jz = ComplexMatrix(dim, dim);
    jp = ComplexMatrix(dim, dim);
    for (std::size_t k = 0; k < dim; ++k) {
      const double m = static_cast<double>(k) - j;
      jz(k, k) = 2.0 * m;
      if (k + 1 < dim) jp(k + 1, k) = 2.0 * std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    }
    jm = jp.adjoint();
  }

  ComplexMatrix jx() const { return (jp + jm) * cplx{0.5}; }
  ComplexMatrix jy() const { return (jp - jm) * cplx{0.0, -0.5}; }
};

inline const ComplexMatrix& sigma(char which) {
  static const ComplexMatrix x{{0.0, 1.0}, {1.0, 0.0}};
  static const ComplexMatrix y{{0.0, cplx{0.0, -1.0}}, {cplx{0.0, 1.0}, 0.0}};
  static const ComplexMatrix z{{1.0, 0.0}, {0.0, -1.0}};
  static const ComplexMatrix plus{{0.0, 1.0}, {0.0, 0.0}};
  static const ComplexMatrix minus{{0.0, 0.0}, {1.0, 0.0}};
  switch (which) {
    case 'x': return x;
    case 'y': return y;
    case 'z': return z;
    case '+': return plus;
    case '-': return minus;
  }
  throw InvalidArgument("unknown Pauli label");
}

inline constexpr int max_dense_spins = 4000;

// H = (w0/2) sz (x) I + (w/2N) I (x) J_z + (D / 2 sqrt N)(sx Jx + sy Jy + sz Jz).
inline ComplexMatrix build_joint_hamiltonian(const ModelParams& p) {
  p.validate();
  if (p.n_spins > max_dense_spins) throw InvalidArgument("build_joint_hamiltonian: N beyond dense budget");
  const SymmetricSector s(p.n_spins);
  const ComplexMatrix ib = ComplexMatrix::identity(s.dim);
  const double g = p.delta / (2.0 * std::sqrt(p.n()));
  ComplexMatrix h = kron(sigma('z'), ib) * cplx{p.omega0 / 2.0};
  h += kron(ComplexMatrix::identity(2), s.jz) * cplx{p.omega / (2.0 * p.n())};
  h += (kron(sigma('x'), s.jx()) + kron(sigma('y'), s.jy()) + kron(sigma('z'), s.jz)) * cplx{g};
  return h;
}

// Thermal populations exp(-H_B/T) of the collective basis states.
inline std::vector<double> collective_thermal_probabilities(const ModelParams& p) {
  const std::size_t dim = static_cast<std::size_t>(p.n_spins) + 1;
  std::vector<double> e(dim);
  double emax = -INFINITY;
  for (std::size_t k = 0; k < dim; ++k) {
    const double jz = 2.0 * static_cast<double>(k) - p.n();
    e[k] = -(p.omega / (2.0 * p.n())) * jz / p.temperature;
    emax = std::max(emax, e[k]);
  }
  KahanSum<double> z;
  for (auto& v : e) {
    v = std::exp(v - emax);
    z += v;
  }
  for (auto& v : e) v /= z.value();
  return e;
}

// Boson form on Fock states 0..N+1:
//   H = (w0/2) sz - (w/2)(1 - n/N) + D [s+ (1 - n/2N)^{1/2} b + s- b^dag (1 - n/2N)^{1/2}]
//       + (D/2) sz (1 - n/N).
inline ComplexMatrix build_boson_joint_hamiltonian(const ModelParams& p) {
  p.validate();
  if (p.n_spins > max_dense_spins) throw InvalidArgument("build_boson_joint_hamiltonian: N beyond dense budget");
  const std::size_t dim = static_cast<std::size_t>(p.n_spins) + 2;
  const double N = p.n();
  ComplexMatrix occ(dim, dim), lower(dim, dim);
  for (std::size_t n = 0; n < dim; ++n) {
    const double nd = static_cast<double>(n);
    occ(n, n) = 1.0 - nd / N;
    // (1 - n/2N)^{1/2} b |n> = sqrt(n) (1 - (n-1)/2N)^{1/2} |n-1>
    if (n > 0) lower(n - 1, n) = std::sqrt(nd * std::max(0.0, 1.0 - (nd - 1.0) / (2.0 * N)));
  }
  ComplexMatrix h = kron(sigma('z'), ComplexMatrix::identity(dim)) * cplx{p.omega0 / 2.0};
  h -= kron(ComplexMatrix::identity(2), occ) * cplx{p.omega / 2.0};
  h += (kron(sigma('+'), lower) + kron(sigma('-'), lower.adjoint())) * cplx{p.delta};
  h += kron(sigma('z'), occ) * cplx{p.delta / 2.0};
  return h;
}

inline std::vector<double> boson_thermal_probabilities(const ModelParams& p) {
  const ThermalWeights w = thermal_weights(p);
  std::vector<double> out(static_cast<std::size_t>(p.n_spins) + 2, 0.0);
  for (std::size_t n = 0; n < w.size(); ++n) out[n] = w.probability(n);
  return out;
}

// Exact reduced dynamics for a joint Hamiltonian (system first, 2 x bath)
// and a bath state diagonal in the bath basis.
class JointEvolver {
public:
  JointEvolver(const ComplexMatrix& h, std::vector<double> bath_probabilities)
      : prop_(h), probs_(std::move(bath_probabilities)) {
    if (h.rows() != 2 * probs_.size()) throw InvalidArgument("JointEvolver: bath probability size mismatch");
  }

  std::size_t bath_dim() const noexcept { return probs_.size(); }

  // Images Phi(E_ab) of the four matrix units, indexed [2a + b].
  std::array<ComplexMatrix, 4> map_images(double t) const {
    const std::size_t db = bath_dim();
    std::array<ComplexMatrix, 4> img;
    std::array<KahanSum<cplx>, 16> acc;  // [ab][ij]
    for (std::size_t n = 0; n < db; ++n) {
      const double prob = probs_[n];
      if (prob == 0.0) continue;
      std::array<CVector, 2> psi;
      for (std::size_t a = 0; a < 2; ++a) {
        CVector e(2 * db);
        e[a * db + n] = 1.0;
        psi[a] = prop_.evolve(t, e);
      }
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
          for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
              cplx s = 0.0;
              for (std::size_t k = 0; k < db; ++k) s += psi[a][i * db + k] * std::conj(psi[b][j * db + k]);
              acc[(2 * a + b) * 4 + 2 * i + j] += prob * s;
            }
    }
    for (std::size_t ab = 0; ab < 4; ++ab) {
      img[ab] = ComplexMatrix(2, 2);
      for (std::size_t ij = 0; ij < 4; ++ij) img[ab](ij / 2, ij % 2) = acc[ab * 4 + ij].value();
    }
    return img;
  }

  DensityMatrix reduced_state(const DensityMatrix& rho0, double t) const {
    return reduce(map_images(t), rho0);
  }

  // Full joint density matrix sum_n p_n U (rho0 (x) |n><n|) U^dagger.
  ComplexMatrix joint_state(const DensityMatrix& rho0, double t) const {
    const std::size_t db = bath_dim();
    const ComplexMatrix r0 = rho0.matrix();
    ComplexMatrix joint(2 * db, 2 * db);
    for (std::size_t n = 0; n < db; ++n) {
      if (probs_[n] == 0.0) continue;
      std::array<CVector, 2> psi;
      for (std::size_t a = 0; a < 2; ++a) {
        CVector e(2 * db);
        e[a * db + n] = 1.0;
        psi[a] = prop_.evolve(t, e);
      }
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
          const cplx c = probs_[n] * r0(a, b);
          if (c == cplx{}) continue;
          for (std::size_t r = 0; r < 2 * db; ++r)
            for (std::size_t s = 0; s < 2 * db; ++s) joint(r, s) += c * psi[a][r] * std::conj(psi[b][s]);
        }
    }
    return joint;
  }

  static DensityMatrix reduce(const std::array<ComplexMatrix, 4>& img, const DensityMatrix& rho0) {
    const ComplexMatrix r0 = rho0.matrix();
    ComplexMatrix out(2, 2);
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b) out += img[2 * a + b] * r0(a, b);
    return {out(0, 0).real(), 0.5 * (out(0, 1) + std::conj(out(1, 0)))};
  }

  // (alpha1, alpha2, zeta) read off the images.
  static MapCoefficients coefficients(const std::array<ComplexMatrix, 4>& img, double t) {
    return {t, 1.0 - img[0](0, 0).real(), img[3](0, 0).real(), img[1](0, 1)};
  }

private:
  SpectralPropagator prop_;
  std::vector<double> probs_;
};

enum class JointModel { collective_spin, boson };

inline JointEvolver make_joint_evolver(const ModelParams& p, JointModel model) {
  if (model == JointModel::collective_spin)
    return JointEvolver(build_joint_hamiltonian(p), collective_thermal_probabilities(p));
  return JointEvolver(build_boson_joint_hamiltonian(p), boson_thermal_probabilities(p));
}

inline DensityMatrix exact_reduced_state(const ModelParams& p, const DensityMatrix& rho0, double t,
                                         JointModel model = JointModel::collective_spin) {
  return make_joint_evolver(p, model).reduced_state(rho0, t);
}

} // namespace csdyn::oracle
