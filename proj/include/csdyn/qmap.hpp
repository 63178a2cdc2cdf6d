#pragma once

// The qubit dynamical map: state update, Pauli transfer matrix, Choi matrix,
// Kraus decompositions and a CPTP report.
//
// Conventions (fixed throughout the library):
//  * matrix index 0 is the excited state |1>, index 1 the ground state |0>,
//    so sigma_z = diag(1, -1) and sigma_+ = |1><0| = [[0,1],[0,0]];
//  * Pauli basis G = (I, X, Y, Z) / sqrt(2), Tr[G_k G_l] = delta_kl;
//  * Choi matrix C = sum_ij E_ij (x) Phi(E_ij) / 2, i.e. (id (x) Phi) applied
//    to (|00> + |11>)/sqrt(2).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "csdyn/error.hpp"
#include "csdyn/linalg.hpp"
#include "csdyn/mat4.hpp"
#include "csdyn/spectrum.hpp"

namespace csdyn {

// 2x2 Hermitian state with rho22 = 1 - rho11.
class DensityMatrix {
public:
  DensityMatrix() = default;
  DensityMatrix(double rho11, cplx rho12) : rho11_(rho11), rho12_(rho12) {}

  static DensityMatrix excited() { return {1.0, 0.0}; }
  static DensityMatrix ground() { return {0.0, 0.0}; }
  static DensityMatrix plus_x() { return {0.5, 0.5}; }
  static DensityMatrix minus_x() { return {0.5, -0.5}; }
  // |+y> = (|1> + i|0>)/sqrt(2) in the (|1>, |0>) ordering.
  static DensityMatrix plus_y() { return {0.5, cplx{0.0, -0.5}}; }
  static DensityMatrix minus_y() { return {0.5, cplx{0.0, 0.5}}; }
  static DensityMatrix mixed() { return {0.5, 0.0}; }

  // Validates trace and Hermiticity; rejects states with eigenvalue < -tol.
  static DensityMatrix from_matrix(const ComplexMatrix& m, double eig_tol = 1e-10) {
    if (m.rows() != 2 || m.cols() != 2) throw InvalidArgument("density matrix must be 2x2");
    if (std::abs(m.trace() - 1.0) > 1e-12)
      throw InvalidArgument("density matrix trace deviates from 1");
    if (m.hermiticity_residual() > 1e-12) throw InvalidArgument("density matrix not Hermitian");
    DensityMatrix d(m(0, 0).real(), 0.5 * (m(0, 1) + std::conj(m(1, 0))));
    if (d.min_eigenvalue() < -eig_tol) throw InvalidArgument("density matrix not positive");
    return d;
  }

  double rho11() const noexcept { return rho11_; }
  double rho22() const noexcept { return 1.0 - rho11_; }
  cplx rho12() const noexcept { return rho12_; }

  ComplexMatrix matrix() const {
    return ComplexMatrix{{rho11_, rho12_}, {std::conj(rho12_), 1.0 - rho11_}};
  }

  double min_eigenvalue() const {
    const double d = rho11_ - 0.5;
    return 0.5 - std::sqrt(d * d + std::norm(rho12_));
  }

  double distance(const DensityMatrix& o) const {
    return std::max(std::abs(rho11_ - o.rho11_), std::abs(rho12_ - o.rho12_));
  }

private:
  double rho11_ = 1.0;
  cplx rho12_{};
};

// The six Pauli eigenstates used for tomography.
inline std::array<DensityMatrix, 6> tomographic_states() {
  return {DensityMatrix::excited(), DensityMatrix::ground(), DensityMatrix::plus_x(),
          DensityMatrix::minus_x(), DensityMatrix::plus_y(), DensityMatrix::minus_y()};
}

// Coordinates Tr[G_k rho], k = I, X, Y, Z.
using PauliVector = std::array<double, 4>;

inline const std::array<ComplexMatrix, 4>& pauli_basis() {
  static const std::array<ComplexMatrix, 4> basis = [] {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx i{0.0, 1.0};
    return std::array<ComplexMatrix, 4>{
        ComplexMatrix{{s, 0.0}, {0.0, s}}, ComplexMatrix{{0.0, s}, {s, 0.0}},
        ComplexMatrix{{0.0, -i * s}, {i * s, 0.0}}, ComplexMatrix{{s, 0.0}, {0.0, -s}}};
  }();
  return basis;
}

inline PauliVector pauli_vector(const DensityMatrix& rho) {
  const double s = std::sqrt(2.0);
  return {1.0 / s, s * rho.rho12().real(), -s * rho.rho12().imag(), (2.0 * rho.rho11() - 1.0) / s};
}

// Inverse of pauli_vector for unit-trace coordinates (r0 is not used).
inline DensityMatrix density_from_pauli(const PauliVector& r) {
  const double s = std::sqrt(2.0);
  return {0.5 + r[3] / s, cplx{r[1], -r[2]} / s};
}

struct TransferMatrix {
  double t = 0.0;
  Mat4 f = Mat4::identity();
};

struct ChoiMatrix {
  double t = 0.0;
  ComplexMatrix c;
};

struct KrausSet {
  std::vector<ComplexMatrix> operators;
  std::vector<double> weights;  // Choi eigenvalue (or Gamma/2) per operator

  ComplexMatrix apply(const ComplexMatrix& rho) const {
    ComplexMatrix out(2, 2);
    for (const auto& k : operators) out += k * rho * k.adjoint();
    return out;
  }

  DensityMatrix apply(const DensityMatrix& rho) const {
    const ComplexMatrix m = apply(rho.matrix());
    return {m(0, 0).real(), 0.5 * (m(0, 1) + std::conj(m(1, 0)))};
  }

  // max |sum K^dagger K - I|
  double completeness_residual() const {
    ComplexMatrix s(2, 2);
    for (const auto& k : operators) s += k.adjoint() * k;
    return (s - ComplexMatrix::identity(2)).max_abs();
  }
};

inline DensityMatrix apply_map(const MapCoefficients& c, const DensityMatrix& rho0) {
  const DensityMatrix out((1.0 - c.alpha1) * rho0.rho11() + c.alpha2 * rho0.rho22(), c.zeta * rho0.rho12());
  if (out.min_eigenvalue() < -1e-8)
    throw NumericalError("apply_map produced a non-positive state at t=" + std::to_string(c.t));
  return out;
}

inline TransferMatrix transfer_matrix(const MapCoefficients& c) {
  TransferMatrix tm;
  tm.t = c.t;
  Mat4& f = tm.f;
  f = Mat4{};
  f(0, 0) = 1.0;
  f(1, 1) = c.zeta.real();
  f(1, 2) = c.zeta.imag();
  f(2, 1) = -c.zeta.imag();
  f(2, 2) = c.zeta.real();
  f(3, 0) = c.alpha2 - c.alpha1;
  f(3, 3) = 1.0 - c.alpha1 - c.alpha2;
  return tm;
}

inline DensityMatrix apply_transfer(const TransferMatrix& tm, const DensityMatrix& rho) {
  return density_from_pauli(tm.f * pauli_vector(rho));
}

// Channel action of a transfer matrix on an arbitrary (not necessarily
// Hermitian) 2x2 operator, by linear extension.
inline ComplexMatrix apply_transfer(const Mat4& f, const ComplexMatrix& x) {
  const auto& g = pauli_basis();
  std::array<cplx, 4> r{};
  for (std::size_t l = 0; l < 4; ++l) r[l] = (g[l] * x).trace();
  ComplexMatrix out(2, 2);
  for (std::size_t k = 0; k < 4; ++k) {
    cplx coeff = 0.0;
    for (std::size_t l = 0; l < 4; ++l) coeff += f(k, l) * r[l];
    out += g[k] * coeff;
  }
  return out;
}

inline ChoiMatrix choi(const MapCoefficients& c) {
  ChoiMatrix ch{c.t, ComplexMatrix(4, 4)};
  ch.c(0, 0) = (1.0 - c.alpha1) / 2.0;
  ch.c(1, 1) = c.alpha1 / 2.0;
  ch.c(2, 2) = c.alpha2 / 2.0;
  ch.c(3, 3) = (1.0 - c.alpha2) / 2.0;
  ch.c(0, 3) = c.zeta / 2.0;
  ch.c(3, 0) = std::conj(c.zeta) / 2.0;
  return ch;
}

// Choi matrix of an arbitrary Pauli transfer matrix (column reshuffle).
inline ChoiMatrix choi_from_transfer(const TransferMatrix& tm) {
  ChoiMatrix ch{tm.t, ComplexMatrix(4, 4)};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      ComplexMatrix e(2, 2);
      e(i, j) = 1.0;
      const ComplexMatrix img = apply_transfer(tm.f, e);
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) ch.c(2 * i + a, 2 * j + b) = 0.5 * img(a, b);
    }
  return ch;
}

inline constexpr double kraus_rank_threshold = 1e-12;

// K = sqrt(2 lambda) unvec(v), with block i of v holding column i of K.
inline KrausSet kraus_from_choi(const ChoiMatrix& ch) {
  const EigenSystem es = hermitian_eig(ch.c);
  if (es.values.front() < -1e-10)
    throw NumericalError("map not CP at this time (min Choi eigenvalue " + std::to_string(es.values.front()) + ")");
  KrausSet ks;
  for (std::size_t k = es.values.size(); k-- > 0;) {
    const double lambda = es.values[k];
    if (lambda <= kraus_rank_threshold) continue;
    const double scale = std::sqrt(2.0 * lambda);
    ComplexMatrix op(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) op(j, i) = scale * es.vectors(2 * i + j, k);
    ks.operators.push_back(std::move(op));
    ks.weights.push_back(lambda);
  }
  return ks;
}

// Four-operator closed form: two jump operators and two diagonal ones built
// from the {|11>, |00>} block of the Choi matrix.
inline KrausSet kraus_closed_form(const MapCoefficients& c) {
  const double mag = std::abs(c.zeta);
  if (mag < 1e-14) throw NumericalError("closed form singular, use kraus_from_choi");
  const double d = c.alpha1 - c.alpha2;
  const double root = std::sqrt(d * d + 4.0 * mag * mag);
  const double mean = 1.0 - (c.alpha1 + c.alpha2) / 2.0;
  const double gamma1 = mean + root / 2.0;
  double gamma2 = mean - root / 2.0;
  if (gamma2 < -1e-10 || c.alpha1 < -1e-10 || c.alpha2 < -1e-10)
    throw NumericalError("map not CP at this time (closed-form Kraus weights negative)");
  gamma2 = std::max(gamma2, 0.0);
  const double lambda1 = (root - d) / (2.0 * mag);
  const double lambda2 = (root + d) / (2.0 * mag);
  const cplx phase = c.zeta / mag;  // e^{i theta}, quadrant-correct

  KrausSet ks;
  const double a1 = std::sqrt(std::max(c.alpha1, 0.0));
  const double a2 = std::sqrt(std::max(c.alpha2, 0.0));
  ks.operators.push_back(ComplexMatrix{{0.0, a2}, {0.0, 0.0}});
  ks.weights.push_back(c.alpha2 / 2.0);
  ks.operators.push_back(ComplexMatrix{{0.0, 0.0}, {a1, 0.0}});
  ks.weights.push_back(c.alpha1 / 2.0);
  const double n3 = std::sqrt(gamma1 / (1.0 + lambda1 * lambda1));
  ks.operators.push_back(ComplexMatrix{{n3 * lambda1 * phase, 0.0}, {0.0, n3}});
  ks.weights.push_back(gamma1 / 2.0);
  // Second eigenvector of the block carries the opposite relative sign.
  const double n4 = std::sqrt(gamma2 / (1.0 + lambda2 * lambda2));
  ks.operators.push_back(ComplexMatrix{{-n4 * lambda2 * phase, 0.0}, {0.0, n4}});
  ks.weights.push_back(gamma2 / 2.0);
  return ks;
}

struct CptpReport {
  bool is_cp = false;
  double min_choi_eig = 0.0;
  double trace_dev = 0.0;
  double kraus_residual = std::numeric_limits<double>::quiet_NaN();  // NaN when not CP
};

inline CptpReport validate_cptp(const MapCoefficients& c) {
  CptpReport r;
  const ChoiMatrix ch = choi(c);
  r.trace_dev = std::abs(ch.c.trace() - 1.0);
  try {
    const EigenSystem es = hermitian_eig(ch.c);
    r.min_choi_eig = es.values.front();
    r.is_cp = r.min_choi_eig >= -1e-10;
    if (r.is_cp) r.kraus_residual = kraus_from_choi(ch).completeness_residual();
  } catch (const std::exception&) {
    r.is_cp = false;
  }
  return r;
}

} // namespace csdyn
