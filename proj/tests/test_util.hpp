#pragma once

#include <complex>
#include <random>

#include "csdyn/linalg.hpp"
#include "csdyn/qmap.hpp"

namespace testutil {

using csdyn::ComplexMatrix;
using csdyn::cplx;

inline ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix a(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    a(r, r) = g(rng);
    for (std::size_t c = r + 1; c < n; ++c) {
      a(r, c) = cplx{g(rng), g(rng)};
      a(c, r) = std::conj(a(r, c));
    }
  }
  return a;
}

// exp(-i H) for a random Hermitian H.
inline ComplexMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
  const ComplexMatrix h = random_hermitian(n, rng);
  ComplexMatrix u(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    csdyn::CVector e(n);
    e[c] = 1.0;
    const auto col = csdyn::evolve_unitary(h, 1.0, e);
    for (std::size_t r = 0; r < n; ++r) u(r, c) = col[r];
  }
  return u;
}

inline csdyn::DensityMatrix random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const double x = u(rng), y = u(rng), z = u(rng);
    if (x * x + y * y + z * z > 1.0) continue;
    return {0.5 * (1.0 + z), cplx{0.5 * x, -0.5 * y}};
  }
}

} // namespace testutil
