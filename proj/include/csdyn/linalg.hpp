#pragma once

// Small dense complex linear algebra: value-type matrices, a cyclic Jacobi
// Hermitian eigensolver, trace norm, spectral propagation and the bath
// partial trace.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "csdyn/error.hpp"
#include "csdyn/numeric.hpp"

namespace csdyn {

using CVector = std::vector<cplx>;

// Dense row-major complex matrix. Dimensions are fixed at construction.
class ComplexMatrix {
public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> init)
      : rows_(init.size()), cols_(init.size() ? init.begin()->size() : 0) {
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw InvalidArgument("ragged matrix initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const double> d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const cplx> data() const noexcept { return data_; }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
  }

  double frobenius() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
  }

  // max |A - A^dagger|; only meaningful for square matrices.
  double hermiticity_residual() const {
    double m = 0.0;
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = r; c < cols_; ++c)
        m = std::max(m, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
    return m;
  }

  bool is_hermitian(double rel_tol = 1e-12) const {
    return square() && hermiticity_residual() <= rel_tol * std::max(1.0, max_abs());
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  ComplexMatrix& operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) throw InvalidArgument("matrix product: inner dimension mismatch");
    ComplexMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  friend CVector operator*(const ComplexMatrix& a, std::span<const cplx> v) {
    if (a.cols_ != v.size()) throw InvalidArgument("matrix-vector product: dimension mismatch");
    CVector out(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      cplx s = 0.0;
      for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * v[j];
      out[i] = s;
    }
    return out;
  }

private:
  void check_same_shape(const ComplexMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidArgument("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

// Kronecker product a (x) b.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).max_abs();
}

inline double vector_norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

struct EigenSystem {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // columns, orthonormal
};

namespace detail {

inline double offdiag_frobenius(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (r != c) s += std::norm(a(r, c));
  return std::sqrt(s);
}

// Rotate columns/rows p,q of a (and columns of v) so that a(p,q) vanishes.
inline void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const std::size_t n = a.rows();
  const cplx apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const cplx phase = apq / mag;  // e^{i phi}
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();

  const double theta = (aqq - app) / (2.0 * mag);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const cplx em = std::conj(phase);  // e^{-i phi}

  // A <- A U with U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q).
  for (std::size_t k = 0; k < n; ++k) {
    const cplx akp = a(k, p);
    const cplx akq = a(k, q);
    a(k, p) = c * akp - s * em * akq;
    a(k, q) = s * akp + c * em * akq;
  }
  // A <- U^dagger A.
  for (std::size_t k = 0; k < n; ++k) {
    const cplx apk = a(p, k);
    const cplx aqk = a(q, k);
    a(p, k) = c * apk - s * phase * aqk;
    a(q, k) = s * apk + c * phase * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (std::size_t k = 0; k < n; ++k) {
    const cplx vkp = v(k, p);
    const cplx vkq = v(k, q);
    v(k, p) = c * vkp - s * em * vkq;
    v(k, q) = s * vkp + c * em * vkq;
  }
}

} // namespace detail

// Hermitian eigendecomposition by cyclic Jacobi sweeps. Eigenvalues are
// returned ascending; each eigenvector is normalised so that its
// largest-magnitude component is real and positive.
inline EigenSystem hermitian_eig(const ComplexMatrix& input, int max_sweeps = 100) {
  if (!input.square()) throw InvalidArgument("hermitian_eig: matrix not square");
  const double herm = input.hermiticity_residual();
  if (herm > 1e-12 * std::max(1.0, input.max_abs()))
    throw InvalidArgument("hermitian_eig: input not Hermitian, max|A - A^H| = " + std::to_string(herm));

  const std::size_t n = input.rows();
  // Symmetrise so the rotations act on an exactly Hermitian matrix.
  ComplexMatrix a(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) a(r, c) = 0.5 * (input(r, c) + std::conj(input(c, r)));
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double scale = a.frobenius();
  const double target = 1e-13 * scale;
  int sweep = 0;
  while (scale > 0.0 && detail::offdiag_frobenius(a) >= target) {
    if (++sweep > max_sweeps)
      throw NumericalError("hermitian_eig: no convergence after " + std::to_string(max_sweeps) + " sweeps");
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) detail::jacobi_rotate(a, v, p, q);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenSystem es{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    es.values[k] = a(src, src).real();
    std::size_t big = 0;
    for (std::size_t r = 1; r < n; ++r)
      if (std::abs(v(r, src)) > std::abs(v(big, src)) + 1e-14) big = r;
    const cplx fix = std::abs(v(big, src)) > 0.0 ? std::conj(v(big, src)) / std::abs(v(big, src)) : cplx{1.0};
    for (std::size_t r = 0; r < n; ++r) es.vectors(r, k) = v(r, src) * fix;
  }
  return es;
}

// Sum of singular values. Hermitian input uses sum |lambda|.
inline double trace_norm(const ComplexMatrix& a) {
  if (!a.square()) throw InvalidArgument("trace_norm: matrix not square");
  if (a.is_hermitian()) {
    const auto es = hermitian_eig(a);
    double s = 0.0;
    for (double l : es.values) s += std::abs(l);
    return s;
  }
  const auto es = hermitian_eig(a.adjoint() * a);
  double s = 0.0;
  for (double l : es.values) s += std::sqrt(std::max(0.0, l));
  return s;
}

// exp(-i H t) via a stored eigendecomposition of H. Build once, evolve many.
class SpectralPropagator {
public:
  explicit SpectralPropagator(const ComplexMatrix& h) : es_(hermitian_eig(h)) {}

  std::size_t dim() const noexcept { return es_.values.size(); }
  const EigenSystem& spectrum() const noexcept { return es_; }

  CVector evolve(double t, std::span<const cplx> v) const {
    const std::size_t n = dim();
    if (v.size() != n) throw InvalidArgument("evolve: dimension mismatch");
    const auto& V = es_.vectors;
    CVector coeff(n);
    for (std::size_t k = 0; k < n; ++k) {
      cplx s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += std::conj(V(r, k)) * v[r];
      coeff[k] = s * std::polar(1.0, -es_.values[k] * t);
    }
    CVector out(n);
    for (std::size_t r = 0; r < n; ++r) {
      cplx s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += V(r, k) * coeff[k];
      out[r] = s;
    }
    return out;
  }

private:
  EigenSystem es_;
};

inline CVector evolve_unitary(const ComplexMatrix& h, double t, std::span<const cplx> v) {
  if (!h.square() || h.rows() != v.size()) throw InvalidArgument("evolve_unitary: dimension mismatch");
  return SpectralPropagator(h).evolve(t, v);
}

// Tr_B over a system (x) bath ordered joint density matrix with a 2-level system.
inline ComplexMatrix partial_trace_bath(const ComplexMatrix& rho_joint, std::size_t bath_dim) {
  constexpr std::size_t sys = 2;
  if (bath_dim == 0 || rho_joint.rows() != sys * bath_dim || !rho_joint.square())
    throw InvalidArgument("partial_trace_bath: joint dimension is not 2 * bath_dim");
  const double tr_dev = std::abs(rho_joint.trace() - 1.0);
  if (tr_dev > 1e-8)
    throw NumericalError("partial_trace_bath: joint trace deviates from 1 by " + std::to_string(tr_dev));
  ComplexMatrix out(sys, sys);
  for (std::size_t i = 0; i < sys; ++i)
    for (std::size_t j = 0; j < sys; ++j) {
      KahanSum<cplx> s;
      for (std::size_t k = 0; k < bath_dim; ++k) s += rho_joint(i * bath_dim + k, j * bath_dim + k);
      out(i, j) = s.value();
    }
  return out;
}

} // namespace csdyn
