#include "sdstab/lqsynth.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace sdstab {

namespace {

void check_dims(const SampledSystem& sys) {
  require(sys.Phi.rows() == sys.Phi.cols(), "Phi must be square");
  require(sys.D.rows() == sys.Phi.rows(), "D must have as many rows as Phi");
}

// Operator norm of a Hermitian matrix.
double hermitian_norm(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

Matrix riccati_step(const SampledSystem& sys, const Matrix& K) {
  const Eigen::Index n = sys.Phi.rows();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix lhs = I + sys.D * sys.D.adjoint() * K;
  const Matrix X = lhs.partialPivLu().solve(sys.Phi);
  return hermitian_part(sys.Phi.adjoint() * K * X + I);
}

double riccati_residual(const SampledSystem& sys, const Matrix& K) {
  return operator_norm(K - riccati_step(sys, K));
}

RiccatiSolution riccati_solve(const SampledSystem& sys,
                              const RiccatiOptions& opts) {
  check_dims(sys);
  require(opts.tol > 0.0, "tolerance must be positive");
  require(opts.max_iter >= 1, "max_iter must be at least 1");
  const Eigen::Index n = sys.Phi.rows();
  RiccatiSolution sol;
  sol.K = Matrix::Zero(n, n);
  for (int j = 1; j <= opts.max_iter; ++j) {
    Matrix next = riccati_step(sys, sol.K);
    if (!next.allFinite())
      throw Error(ErrorKind::kNumericOverflow, "Riccati iterate overflowed");
    const double step = hermitian_norm(next - sol.K);
    sol.K = std::move(next);
    sol.iterations = j;
    if (step < opts.tol * std::max(1.0, hermitian_norm(sol.K))) {
      sol.converged = true;
      break;
    }
    if (sol.K.trace().real() > opts.divergence_trace) break;
  }
  sol.residual = riccati_residual(sys, sol.K);
  return sol;
}

FeedbackGain make_gain(const SampledSystem& sys, Matrix F) {
  require(F.rows() == sys.D.cols() && F.cols() == sys.Phi.rows(),
          "gain must be m x n");
  FeedbackGain gain;
  gain.closed_loop = sys.Phi + sys.D * F;
  gain.spectral_radius = spectral_radius(gain.closed_loop);
  gain.F = std::move(F);
  return gain;
}

FeedbackGain feedback_gain(const RiccatiSolution& sol,
                           const SampledSystem& sys) {
  check_dims(sys);
  if (!sol.converged)
    throw Error(ErrorKind::kNotConverged,
                "Riccati iteration did not converge after " +
                    std::to_string(sol.iterations) + " steps");
  const Eigen::Index m = sys.D.cols();
  const Matrix DK = sys.D.adjoint() * sol.K;
  const Matrix lhs = Matrix::Identity(m, m) + DK * sys.D;
  Matrix F = -lhs.partialPivLu().solve(DK * sys.Phi);
  FeedbackGain gain = make_gain(sys, std::move(F));
  if (!(gain.spectral_radius < 1.0))
    throw Error(ErrorKind::kSpectralRadiusViolation,
                "closed-loop spectral radius " +
                    std::to_string(gain.spectral_radius) +
                    " >= 1 (Riccati residual " + std::to_string(sol.residual) +
                    ")");
  return gain;
}

Matrix dp_value_iterate(const SampledSystem& sys, int n) {
  check_dims(sys);
  require(n >= 1, "horizon must be at least 1");
  Matrix P = Matrix::Zero(sys.Phi.rows(), sys.Phi.cols());
  for (int j = 0; j < n; ++j) P = riccati_step(sys, P);
  return P;
}

double lq_optimal_cost(const RiccatiSolution& sol, const Vector& y0) {
  require(sol.converged, "cost needs a converged Riccati solution");
  require(y0.size() == sol.K.rows(), "state dimension mismatch");
  return y0.dot(sol.K * y0).real();
}

double closed_loop_cost(const SampledSystem& sys, const Matrix& F,
                        const Vector& y0, int steps) {
  require(steps >= 1, "need at least one step");
  double cost = 0.0;
  Vector y = y0;
  for (int i = 1; i <= steps; ++i) {
    const Vector u = F * y;
    y = sys.Phi * y + sys.D * u;
    cost += y.squaredNorm() + u.squaredNorm();
  }
  return cost;
}

}  // namespace sdstab
