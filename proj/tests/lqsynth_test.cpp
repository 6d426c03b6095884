#include "sdstab/lqsynth.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sdstab/example_systems.hpp"

namespace sdstab {
namespace {

constexpr double kGolden = 1.618033988749895;

SampledSystem scalar_pair(double phi, double d) {
  return {Matrix::Constant(1, 1, Scalar(phi)), Matrix::Constant(1, 1, Scalar(d)), 1.0};
}

TEST(RiccatiSolve, NilpotentTransition) {
  const auto sol = riccati_solve(scalar_pair(0.0, 0.0));
  EXPECT_TRUE(sol.converged);
  EXPECT_NEAR(sol.K(0, 0).real(), 1.0, 1e-15);
  EXPECT_LE(sol.iterations, 2);
}

TEST(RiccatiSolve, ScalarGoldenRatio) {
  const auto sol = riccati_solve(scalar_pair(1.0, 1.0));
  ASSERT_TRUE(sol.converged);
  EXPECT_NEAR(sol.K(0, 0).real(), kGolden, 1e-10);
  EXPECT_LT(sol.residual, 1e-11);
}

TEST(RiccatiSolve, UncontrolledNeutralModeDiverges) {
  RiccatiOptions opts;
  opts.max_iter = 5000;
  const auto sol = riccati_solve(scalar_pair(1.0, 0.0), opts);
  EXPECT_FALSE(sol.converged);
  EXPECT_NEAR(sol.K(0, 0).real(), 5000.0, 1e-9);  // K_j = j
}

TEST(RiccatiSolve, UnstableUncontrolledModeStopsEarly) {
  const auto sol = riccati_solve(scalar_pair(2.0, 0.0));
  EXPECT_FALSE(sol.converged);
  EXPECT_LT(sol.iterations, 100);
}

TEST(RiccatiSolve, RejectsBadOptions) {
  RiccatiOptions opts;
  opts.tol = 0.0;
  EXPECT_THROW(riccati_solve(scalar_pair(1.0, 1.0), opts), Error);
}

TEST(FeedbackGain, ScalarGoldenGain) {
  const auto sys = scalar_pair(1.0, 1.0);
  const auto gain = feedback_gain(riccati_solve(sys), sys);
  EXPECT_NEAR(gain.F(0, 0).real(), -kGolden / (1 + kGolden), 1e-10);
  EXPECT_NEAR(gain.spectral_radius, 1 / (1 + kGolden), 1e-10);
  EXPECT_NEAR(gain.closed_loop(0, 0).real(), 0.3819660112501051, 1e-10);
}

TEST(FeedbackGain, NilpotentTransitionNeedsNoFeedback) {
  SampledSystem sys{Matrix::Zero(2, 2), Matrix::Constant(2, 1, Scalar(0.7)), 1.0};
  RiccatiSolution sol{Matrix::Identity(2, 2), 0.0, 1, true};
  const auto gain = feedback_gain(sol, sys);
  EXPECT_LT(gain.F.cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(gain.spectral_radius, 0.0);
}

TEST(FeedbackGain, OscillatorAtRegularPeriod) {
  const auto sys = sample(harmonic_oscillator(), 1.0);
  const auto gain = feedback_gain(riccati_solve(sys), sys);
  EXPECT_LT(gain.spectral_radius, 1.0);
  // Eigenvalue oracle: the characteristic polynomial of the 2×2 closed loop.
  const Matrix& M = gain.closed_loop;
  const Scalar tr = M.trace(), det = M.determinant();
  const Scalar disc = std::sqrt(tr * tr - 4.0 * det);
  const double r = std::max(std::abs((tr + disc) / 2.0), std::abs((tr - disc) / 2.0));
  EXPECT_NEAR(gain.spectral_radius, r, 1e-10);
}

TEST(FeedbackGain, RefusesUnconvergedSolutions) {
  const auto sys = scalar_pair(1.0, 0.0);
  RiccatiOptions opts;
  opts.max_iter = 10;
  try {
    feedback_gain(riccati_solve(sys, opts), sys);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotConverged);
  }
}

TEST(FeedbackGain, FlagsNonContractingClosedLoop) {
  // A "converged" kernel that is not the stabilizing one.
  const auto sys = scalar_pair(2.0, 0.0);
  RiccatiSolution bogus{Matrix::Identity(1, 1), 0.0, 1, true};
  try {
    feedback_gain(bogus, sys);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSpectralRadiusViolation);
  }
}

TEST(DpValueIterate, OneStepIsIdentity) {
  const auto sys = sample(harmonic_oscillator(), 0.4);
  EXPECT_LT(oracle::max_abs(dp_value_iterate(sys, 1) - Matrix::Identity(2, 2)), 1e-15);
}

TEST(DpValueIterate, ScalarTwoSteps) {
  EXPECT_NEAR(dp_value_iterate(scalar_pair(1.0, 1.0), 2)(0, 0).real(), 1.5, 1e-15);
}

TEST(DpValueIterate, ScalarIncreasesToGoldenRatio) {
  const auto sys = scalar_pair(1.0, 1.0);
  double prev = 0.0;
  for (int n = 1; n <= 40; ++n) {
    const double p = dp_value_iterate(sys, n)(0, 0).real();
    EXPECT_GE(p, prev);
    EXPECT_LE(p, kGolden + 1e-15);
    prev = p;
  }
  EXPECT_NEAR(prev, kGolden, 1e-12);
}

TEST(LqOptimalCost, QuadraticForm) {
  const auto sol = riccati_solve(scalar_pair(1.0, 1.0));
  EXPECT_EQ(lq_optimal_cost(sol, Vector::Zero(1)), 0.0);
  EXPECT_NEAR(lq_optimal_cost(sol, Vector::Ones(1)), kGolden, 1e-10);
  EXPECT_NEAR(lq_optimal_cost(sol, Vector::Constant(1, Scalar(2.0))), 6.47213595499958,
              1e-9);
}

class LqProperties : public ::testing::Test {
 protected:
  std::mt19937_64 rng{99};

  // Stabilizable by construction: two inputs, random dynamics.
  SampledSystem random_pair() {
    return {oracle::random_complex(rng, 4, 4, 0.6), oracle::random_complex(rng, 4, 2), 1.0};
  }
};

TEST_F(LqProperties, ValueIterationIsMonotoneAndConverges) {
  for (int trial = 0; trial < 10; ++trial) {
    const auto sys = random_pair();
    const auto sol = riccati_solve(sys);
    ASSERT_TRUE(sol.converged);
    Matrix prev = Matrix::Zero(4, 4);
    for (int n = 1; n <= 30; ++n) {
      const Matrix P = dp_value_iterate(sys, n);
      EXPECT_GE(-max_hermitian_eigenvalue(prev - P), -1e-9);
      EXPECT_GE(-max_hermitian_eigenvalue(P - sol.K), -1e-9);
      prev = P;
    }
    EXPECT_LT(operator_norm(dp_value_iterate(sys, 200) - sol.K), 1e-6);
  }
}

TEST_F(LqProperties, KernelInvariants) {
  for (int trial = 0; trial < 10; ++trial) {
    const auto sys = random_pair();
    const auto sol = riccati_solve(sys);
    ASSERT_TRUE(sol.converged);
    EXPECT_LT(oracle::max_abs(sol.K - sol.K.adjoint()), 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(sol.K - Matrix::Identity(4, 4));
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8);
    EXPECT_LT(sol.residual, 10 * 1e-12 * std::max(1.0, operator_norm(sol.K)));
  }
}

TEST_F(LqProperties, GainSatisfiesNormalEquation) {
  for (int trial = 0; trial < 10; ++trial) {
    const auto sys = random_pair();
    const auto sol = riccati_solve(sys);
    const auto gain = feedback_gain(sol, sys);
    const Matrix lhs = (Matrix::Identity(2, 2) + sys.D.adjoint() * sol.K * sys.D) * gain.F;
    EXPECT_LT(oracle::max_abs(lhs + sys.D.adjoint() * sol.K * sys.Phi), 1e-10);
    EXPECT_LT(gain.spectral_radius, 1.0);
  }
}

TEST_F(LqProperties, ClosedLoopDecaysGeometrically) {
  for (int trial = 0; trial < 10; ++trial) {
    const auto sys = random_pair();
    const auto gain = feedback_gain(riccati_solve(sys), sys);
    const double r0 = 0.5 * (1 + gain.spectral_radius);
    // Beyond a transient, ‖(Φ + D F)^i y₀‖ ≤ c r₀^i ‖y₀‖.
    Vector y = oracle::random_unit(rng, 4);
    double worst_ratio = 0.0;
    for (int i = 1; i <= 200; ++i) {
      y = gain.closed_loop * y;
      worst_ratio = std::max(worst_ratio, y.norm() / std::pow(r0, i));
    }
    EXPECT_LT(worst_ratio, 1e6);
    EXPECT_LT(y.norm(), std::pow(r0, 150));
  }
}

TEST_F(LqProperties, FeedbackAttainsTheKernelCost) {
  // ⟨K y₀, y₀⟩ counts ‖y₀‖² on top of Σ_{i≥1} ‖y_i‖² + ‖u_i‖².
  for (int trial = 0; trial < 10; ++trial) {
    const auto sys = random_pair();
    const auto sol = riccati_solve(sys);
    const auto gain = feedback_gain(sol, sys);
    const Vector y0 = oracle::random_unit(rng, 4);
    const double simulated = closed_loop_cost(sys, gain.F, y0, 2000);
    EXPECT_NEAR(lq_optimal_cost(sol, y0), 1.0 + simulated, 1e-8);
  }
}

}  // namespace
}  // namespace sdstab
