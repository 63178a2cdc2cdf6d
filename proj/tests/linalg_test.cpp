#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "csdyn/linalg.hpp"
#include "csdyn/mat4.hpp"
#include "test_util.hpp"

using namespace csdyn;

namespace {

double reconstruction_error(const ComplexMatrix& a, const EigenSystem& es) {
  const std::size_t n = a.rows();
  ComplexMatrix lam(n, n);
  for (std::size_t k = 0; k < n; ++k) lam(k, k) = es.values[k];
  return max_abs_diff(es.vectors * lam * es.vectors.adjoint(), a);
}

} // namespace

TEST(ComplexMatrix, ShapeChecks) {
  ComplexMatrix a(2, 3), b(3, 2);
  EXPECT_THROW(a + b, InvalidArgument);
  EXPECT_THROW(a * a, InvalidArgument);
  EXPECT_EQ((a * b).rows(), 2u);
  EXPECT_EQ((a * b).cols(), 2u);
}

TEST(ComplexMatrix, HermitianFlagUsesRelativeTolerance) {
  ComplexMatrix a{{1.0, cplx{0.0, 1.0}}, {cplx{0.0, -1.0}, 2.0}};
  EXPECT_TRUE(a.is_hermitian());
  a(0, 1) += 1e-9;
  EXPECT_FALSE(a.is_hermitian());
}

TEST(ComplexMatrix, KronOfPaulis) {
  const ComplexMatrix x{{0.0, 1.0}, {1.0, 0.0}};
  const ComplexMatrix z{{1.0, 0.0}, {0.0, -1.0}};
  const ComplexMatrix k = kron(z, x);
  EXPECT_EQ(k(0, 1), cplx(1.0));
  EXPECT_EQ(k(2, 3), cplx(-1.0));
  EXPECT_EQ(k(0, 2), cplx(0.0));
}

TEST(HermitianEig, DiagonalInputIsSortedAscending) {
  const ComplexMatrix a{{3.0, 0.0}, {0.0, 1.0}};
  const auto es = hermitian_eig(a);
  EXPECT_DOUBLE_EQ(es.values[0], 1.0);
  EXPECT_DOUBLE_EQ(es.values[1], 3.0);
  EXPECT_NEAR(std::abs(es.vectors(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(es.vectors(0, 1)), 1.0, 1e-15);
}

TEST(HermitianEig, PauliX) {
  const ComplexMatrix x{{0.0, 1.0}, {1.0, 0.0}};
  const auto es = hermitian_eig(x);
  EXPECT_NEAR(es.values[0], -1.0, 1e-14);
  EXPECT_NEAR(es.values[1], 1.0, 1e-14);
  const double s = 1.0 / std::sqrt(2.0);
  // phase convention: largest component real positive (first on ties)
  EXPECT_NEAR(std::abs(es.vectors(0, 0) - s), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(es.vectors(1, 0) + s), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(es.vectors(0, 1) - s), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(es.vectors(1, 1) - s), 0.0, 1e-14);
}

TEST(HermitianEig, RandomReconstructionAndOrthonormality) {
  std::mt19937_64 rng(7);
  for (std::size_t n : {1u, 2u, 3u, 8u, 17u, 64u}) {
    const ComplexMatrix a = testutil::random_hermitian(n, rng);
    const auto es = hermitian_eig(a);
    EXPECT_LE(reconstruction_error(a, es), 1e-10 * a.max_abs()) << "n=" << n;
    const ComplexMatrix gram = es.vectors.adjoint() * es.vectors;
    EXPECT_LE(max_abs_diff(gram, ComplexMatrix::identity(n)), 1e-10);
    for (std::size_t k = 1; k < n; ++k) EXPECT_LE(es.values[k - 1], es.values[k]);
  }
}

TEST(HermitianEig, LargerDimensionReconstruction) {
  std::mt19937_64 rng(11);
  const ComplexMatrix a = testutil::random_hermitian(256, rng);
  const auto es = hermitian_eig(a);
  EXPECT_LE(reconstruction_error(a, es), 1e-10 * a.max_abs());
}

TEST(HermitianEig, RejectsNonHermitian) {
  const ComplexMatrix a{{1.0, 2.0}, {0.0, 1.0}};
  try {
    hermitian_eig(a);
    FAIL() << "expected rejection";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("max|A - A^H|"), std::string::npos);
  }
}

TEST(HermitianEig, NonConvergenceIsReported) {
  std::mt19937_64 rng(3);
  const ComplexMatrix a = testutil::random_hermitian(12, rng);
  EXPECT_THROW(hermitian_eig(a, 1), NumericalError);
}

TEST(HermitianEig, Deterministic) {
  std::mt19937_64 rng(5);
  const ComplexMatrix a = testutil::random_hermitian(20, rng);
  const auto e1 = hermitian_eig(a), e2 = hermitian_eig(a);
  EXPECT_EQ(e1.values, e2.values);
  EXPECT_EQ(max_abs_diff(e1.vectors, e2.vectors), 0.0);
}

TEST(TraceNorm, Examples) {
  EXPECT_NEAR(trace_norm(ComplexMatrix::identity(4)), 4.0, 1e-14);
  const ComplexMatrix d{{1.0, 0.0}, {0.0, -2.0}};
  EXPECT_NEAR(trace_norm(d), 3.0, 1e-14);
  EXPECT_THROW(trace_norm(ComplexMatrix(2, 3)), InvalidArgument);
}

TEST(TraceNorm, NonHermitianUsesSingularValues) {
  const ComplexMatrix a{{0.0, 2.0}, {0.0, 0.0}};
  EXPECT_NEAR(trace_norm(a), 2.0, 1e-12);
}

TEST(TraceNorm, UnitaryInvariance) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    ComplexMatrix a(4, 4);
    std::normal_distribution<double> g;
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c) a(r, c) = cplx{g(rng), g(rng)};
    const ComplexMatrix u = testutil::random_unitary(4, rng), v = testutil::random_unitary(4, rng);
    EXPECT_NEAR(trace_norm(u * a * v), trace_norm(a), 1e-9);
  }
}

TEST(EvolveUnitary, ZeroHamiltonianIsIdentity) {
  const CVector v{cplx{0.6}, cplx{0.0, 0.8}};
  const auto out = evolve_unitary(ComplexMatrix(2, 2), 3.7, v);
  EXPECT_NEAR(std::abs(out[0] - v[0]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out[1] - v[1]), 0.0, 1e-15);
}

TEST(EvolveUnitary, SigmaZPhase) {
  const ComplexMatrix z{{1.0, 0.0}, {0.0, -1.0}};
  const CVector v{cplx{1.0}, cplx{0.0}};
  const auto out = evolve_unitary(z, pi, v);
  EXPECT_NEAR(std::abs(out[0] - cplx{-1.0}), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(out[1]), 0.0, 1e-14);
}

TEST(EvolveUnitary, SigmaXAgainstRk4) {
  const ComplexMatrix x{{0.0, 1.0}, {1.0, 0.0}};
  const CVector v{cplx{1.0}, cplx{0.0}};
  const auto out = evolve_unitary(x, pi / 2.0, v);
  EXPECT_NEAR(std::abs(out[0]), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(out[1] - cplx{0.0, -1.0}), 0.0, 1e-14);

  // i dy/dt = H y by RK4
  CVector y = v;
  const int steps = 2000;
  const double h = (pi / 2.0) / steps;
  auto f = [&](const CVector& s) {
    CVector d = x * s;
    for (auto& z : d) z *= cplx{0.0, -1.0};
    return d;
  };
  for (int k = 0; k < steps; ++k) {
    const CVector k1 = f(y);
    CVector t1 = y, t2 = y, t3 = y;
    for (int i = 0; i < 2; ++i) t1[i] += 0.5 * h * k1[i];
    const CVector k2 = f(t1);
    for (int i = 0; i < 2; ++i) t2[i] += 0.5 * h * k2[i];
    const CVector k3 = f(t2);
    for (int i = 0; i < 2; ++i) t3[i] += h * k3[i];
    const CVector k4 = f(t3);
    for (int i = 0; i < 2; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  EXPECT_NEAR(std::abs(y[0] - out[0]), 0.0, 1e-8);
  EXPECT_NEAR(std::abs(y[1] - out[1]), 0.0, 1e-8);
}

TEST(EvolveUnitary, NormPreservationAndComposition) {
  std::mt19937_64 rng(17);
  const ComplexMatrix h = testutil::random_hermitian(10, rng);
  CVector v(10);
  std::normal_distribution<double> g;
  for (auto& z : v) z = cplx{g(rng), g(rng)};
  const double nrm = vector_norm(v);
  for (auto& z : v) z /= nrm;
  const SpectralPropagator prop(h);
  const auto a = prop.evolve(1.3 + 2.1, v);
  const auto b = prop.evolve(2.1, prop.evolve(1.3, v));
  EXPECT_NEAR(vector_norm(a), 1.0, 1e-10);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(std::abs(a[i] - b[i]), 0.0, 1e-9);
}

TEST(EvolveUnitary, DimensionMismatch) {
  EXPECT_THROW(evolve_unitary(ComplexMatrix::identity(3), 1.0, CVector(2)), InvalidArgument);
}

TEST(PartialTrace, ProductState) {
  const ComplexMatrix rs{{0.7, cplx{0.1, -0.2}}, {cplx{0.1, 0.2}, 0.3}};
  const ComplexMatrix rb{{0.5, 0.1, 0.0}, {0.1, 0.25, 0.0}, {0.0, 0.0, 0.25}};
  EXPECT_LE(max_abs_diff(partial_trace_bath(kron(rs, rb), 3), rs), 1e-15);
}

TEST(PartialTrace, MaximallyEntangled) {
  ComplexMatrix bell(4, 4);
  for (std::size_t i : {0u, 3u})
    for (std::size_t j : {0u, 3u}) bell(i, j) = 0.5;
  const ComplexMatrix half{{0.5, 0.0}, {0.0, 0.5}};
  EXPECT_LE(max_abs_diff(partial_trace_bath(bell, 2), half), 1e-15);
}

TEST(PartialTrace, RejectsBadTraceAndShape) {
  EXPECT_THROW(partial_trace_bath(ComplexMatrix::identity(4), 2), NumericalError);
  EXPECT_THROW(partial_trace_bath(ComplexMatrix::identity(5), 2), InvalidArgument);
}

TEST(PartialTrace, PreservesTraceAndPositivity) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    ComplexMatrix g(6, 6);
    std::normal_distribution<double> n;
    for (std::size_t r = 0; r < 6; ++r)
      for (std::size_t c = 0; c < 6; ++c) g(r, c) = cplx{n(rng), n(rng)};
    ComplexMatrix rho = g * g.adjoint();
    rho *= cplx{1.0 / rho.trace().real()};
    const ComplexMatrix red = partial_trace_bath(rho, 3);
    EXPECT_NEAR(red.trace().real(), 1.0, 1e-12);
    EXPECT_GE(hermitian_eig(red).values[0], -1e-12);
  }
}

TEST(Mat4, InverseAndDeterminant) {
  Mat4 m;
  const double vals[16] = {2, 1, 0, 0, 0, 3, 1, 0, 0, 0, 4, 1, 1, 0, 0, 5};
  for (int i = 0; i < 16; ++i) m.a[i] = vals[i];
  EXPECT_LE((m * inverse(m) - Mat4::identity()).max_abs(), 1e-14);
  EXPECT_NEAR(determinant(m), 2 * 3 * 4 * 5 - 1, 1e-12);
}
