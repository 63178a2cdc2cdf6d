#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "csdyn/error.hpp"

namespace csdyn {

// 4x4 real matrix for Pauli-basis superoperators (transfer matrices and
// generators). Indices run over (I, X, Y, Z).
struct Mat4 {
  std::array<double, 16> a{};

  double& operator()(std::size_t r, std::size_t c) { return a[r * 4 + c]; }
  double operator()(std::size_t r, std::size_t c) const { return a[r * 4 + c]; }

  static Mat4 identity() {
    Mat4 m;
    for (std::size_t i = 0; i < 4; ++i) m(i, i) = 1.0;
    return m;
  }

  friend Mat4 operator*(const Mat4& x, const Mat4& y) {
    Mat4 out;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t j = 0; j < 4; ++j) out(i, j) += x(i, k) * y(k, j);
    return out;
  }

  friend std::array<double, 4> operator*(const Mat4& m, const std::array<double, 4>& v) {
    std::array<double, 4> out{};
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) out[i] += m(i, j) * v[j];
    return out;
  }

  friend Mat4 operator-(Mat4 x, const Mat4& y) {
    for (std::size_t i = 0; i < 16; ++i) x.a[i] -= y.a[i];
    return x;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
  }
};

inline double determinant(const Mat4& m) {
  Mat4 w = m;
  double det = 1.0;
  for (std::size_t col = 0; col < 4; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < 4; ++r)
      if (std::abs(w(r, col)) > std::abs(w(piv, col))) piv = r;
    if (w(piv, col) == 0.0) return 0.0;
    if (piv != col) {
      for (std::size_t c = 0; c < 4; ++c) std::swap(w(piv, c), w(col, c));
      det = -det;
    }
    det *= w(col, col);
    for (std::size_t r = col + 1; r < 4; ++r) {
      const double f = w(r, col) / w(col, col);
      for (std::size_t c = col; c < 4; ++c) w(r, c) -= f * w(col, c);
    }
  }
  return det;
}

// Gauss-Jordan with partial pivoting. Throws on an exactly singular pivot;
// callers test conditioning through determinant() first.
inline Mat4 inverse(const Mat4& m) {
  Mat4 w = m;
  Mat4 inv = Mat4::identity();
  for (std::size_t col = 0; col < 4; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < 4; ++r)
      if (std::abs(w(r, col)) > std::abs(w(piv, col))) piv = r;
    if (w(piv, col) == 0.0) throw NumericalError("Mat4 inverse: singular matrix");
    if (piv != col)
      for (std::size_t c = 0; c < 4; ++c) {
        std::swap(w(piv, c), w(col, c));
        std::swap(inv(piv, c), inv(col, c));
      }
    const double d = w(col, col);
    for (std::size_t c = 0; c < 4; ++c) {
      w(col, c) /= d;
      inv(col, c) /= d;
    }
    for (std::size_t r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = w(r, col);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < 4; ++c) {
        w(r, c) -= f * w(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

} // namespace csdyn
