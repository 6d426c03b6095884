#pragma once

#include "sdstab/linsys.hpp"

namespace sdstab {

/// Stabilizing kernel of K = Φ* K (I + D D* K)⁻¹ Φ + I.
struct RiccatiSolution {
  Matrix K;
  double residual = 0.0;  // operator norm of the fixed-point defect
  int iterations = 0;
  bool converged = false;
};

/// u_i = F y_{i−1} with closed loop Φ + D F.
struct FeedbackGain {
  Matrix F;
  Matrix closed_loop;
  double spectral_radius = 0.0;
};

struct RiccatiOptions {
  double tol = 1e-12;
  int max_iter = 100000;
  /// trace(K_j) beyond this is treated as structural divergence.
  double divergence_trace = 1e12;
};

/// One step K ↦ Φ* K (I + D D* K)⁻¹ Φ + I, symmetrized.
Matrix riccati_step(const SampledSystem& sys, const Matrix& K);

/// ‖K − Φ* K (I + D D* K)⁻¹ Φ − I‖.
double riccati_residual(const SampledSystem& sys, const Matrix& K);

/// Value iteration from K₀ = 0. Convergence when the operator-norm step falls
/// below tol · max(1, ‖K‖). A non-converged result is returned, not thrown.
RiccatiSolution riccati_solve(const SampledSystem& sys,
                              const RiccatiOptions& opts = {});

/// F_K = −(I + D* K D)⁻¹ D* K Φ. Throws kNotConverged for an unconverged
/// solution and kSpectralRadiusViolation when r(Φ + D F_K) ≥ 1.
FeedbackGain feedback_gain(const RiccatiSolution& sol, const SampledSystem& sys);

/// Gain bundle for an arbitrary F (no stability assertion).
FeedbackGain make_gain(const SampledSystem& sys, Matrix F);

/// P_n from the backward recursion P₀ = 0, P_{j+1} = riccati_step(P_j).
Matrix dp_value_iterate(const SampledSystem& sys, int n);

/// ⟨K y₀, y₀⟩.
double lq_optimal_cost(const RiccatiSolution& sol, const Vector& y0);

/// Σ_{i=1}^{steps} (‖y_i‖² + ‖u_i‖²) along y_i = Φ y_{i−1} + D u_i,
/// u_i = F y_{i−1}.
double closed_loop_cost(const SampledSystem& sys, const Matrix& F,
                        const Vector& y0, int steps);

}  // namespace sdstab
