#include "sdstab/obscheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

namespace sdstab {

const char* to_string(ObservationMode mode) {
  return mode == ObservationMode::kDiscrete ? "discrete" : "continuous";
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kFeasible:
      return "feasible";
    case Verdict::kInfeasible:
      return "infeasible";
    case Verdict::kSearchExhausted:
      return "search-exhausted";
  }
  return "unknown";
}

namespace {

Matrix kernel_of(const Matrix& G) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(G));
  const RealVector& ev = es.eigenvalues();
  const double sigma_max = ev.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> cols;
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (ev(k) <= kKernelRankTol * sigma_max) cols.push_back(k);
  Matrix basis(G.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    basis.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(cols[j]);
  return basis;
}

// ∫₀^τ e^{As} Q e^{A*s} ds by Van Loan, valid for small ‖A‖τ.
Matrix van_loan_gramian(const Matrix& A, const Matrix& Q, double tau) {
  const Eigen::Index n = A.rows();
  Matrix M = Matrix::Zero(2 * n, 2 * n);
  M.topLeftCorner(n, n) = -A;
  M.topRightCorner(n, n) = Q;
  M.bottomRightCorner(n, n) = A.adjoint();
  const Matrix E = expm(M, tau);
  return E.bottomRightCorner(n, n).adjoint() * E.topRightCorner(n, n);
}

ObservabilityCertificate with_kernel_norm(ObservabilityCertificate cert,
                                          const GramianBundle& g) {
  cert.kernel_dim = g.kernel_dim();
  cert.kernel_norm = min_delta_on_kernel(g);
  return cert;
}

}  // namespace

GramianBundle discrete_gramian(const ContinuousSystem& sys, double T, int N) {
  require(T > 0.0, "sampling period must be positive");
  require(N >= 1, "horizon must contain at least one period");
  const Eigen::Index n = sys.state_dim();
  Matrix G = Matrix::Zero(n, n);
  for (const Matrix& W : observation_blocks(sys, T, N)) G += W.adjoint() * W;
  G = hermitian_part(G);
  GramianBundle g;
  g.mode = ObservationMode::kDiscrete;
  g.T = T;
  g.N = N;
  g.R = semigroup(sys, N * T);
  g.kernel_basis = kernel_of(G);
  g.G = std::move(G);
  return g;
}

GramianBundle continuous_gramian(const ContinuousSystem& sys, double T_h) {
  require(T_h > 0.0, "Gramian horizon must be positive");
  const Matrix& A = sys.A();
  const Matrix Q = sys.B() * sys.B().adjoint();
  // Van Loan on a short interval, then G(2τ) = G(τ) + S(τ) G(τ) S(τ)*;
  // avoids the e^{−A T_h} block blowing up for strongly damped modes.
  const double a_norm = A.cwiseAbs().colwise().sum().maxCoeff();
  int doublings = 0;
  double tau = T_h;
  while (a_norm * tau > 1.0 && doublings < 60) {
    tau *= 0.5;
    ++doublings;
  }
  Matrix G = van_loan_gramian(A, Q, tau);
  Matrix S = expm(A, tau);
  for (int k = 0; k < doublings; ++k) {
    G = G + S * G * S.adjoint();
    S = S * S;
  }
  G = hermitian_part(G);
  GramianBundle g;
  g.mode = ObservationMode::kContinuous;
  g.T = T_h;
  g.N = 0;
  g.R = semigroup(sys, T_h);
  g.kernel_basis = kernel_of(G);
  g.G = std::move(G);
  return g;
}

ObservabilityCertificate check_inequality(const GramianBundle& g, double C,
                                          double delta) {
  require(C >= 0.0, "C must be non-negative");
  require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
  const Eigen::Index n = g.R.rows();
  const Matrix slack = g.R * g.R.adjoint() - Scalar(C) * g.G -
                       Scalar(delta) * Matrix::Identity(n, n);
  ObservabilityCertificate cert;
  cert.mode = g.mode;
  cert.T = g.T;
  cert.N = g.N;
  cert.horizon = g.mode == ObservationMode::kDiscrete ? g.N * g.T : g.T;
  cert.C = C;
  cert.delta = delta;
  cert.margin = max_hermitian_eigenvalue(slack);
  cert.verdict = cert.margin <= kMarginTol ? Verdict::kFeasible
                                           : Verdict::kSearchExhausted;
  cert.kernel_dim = g.kernel_dim();
  return cert;
}

double min_delta_on_kernel(const GramianBundle& g) {
  if (g.kernel_dim() == 0) return 0.0;
  const Matrix& P = g.kernel_basis;
  const Matrix Rp = g.R.adjoint() * P;
  return std::max(0.0, max_hermitian_eigenvalue(Rp.adjoint() * Rp));
}

std::optional<ObservabilityCertificate> minimal_C(const GramianBundle& g,
                                                  double delta,
                                                  const DecideOptions& opts) {
  auto zero = check_inequality(g, 0.0, delta);
  if (zero.feasible()) return zero;
  if (min_delta_on_kernel(g) >= delta) return std::nullopt;

  double hi = opts.C_start;
  int doublings = 0;
  while (!check_inequality(g, hi, delta).feasible()) {
    if (++doublings > opts.max_doublings) return std::nullopt;
    hi *= 2.0;
  }
  double lo = doublings == 0 ? 0.0 : hi / 2.0;
  for (int k = 0; k < opts.bisection_steps; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (check_inequality(g, mid, delta).feasible())
      hi = mid;
    else
      lo = mid;
  }
  return check_inequality(g, hi, delta);
}

namespace {

ObservabilityCertificate decide(const std::vector<GramianBundle>& bundles,
                                double delta_target,
                                const DecideOptions& opts) {
  std::optional<ObservabilityCertificate> best;
  bool structural = true;
  double min_kernel_norm = 1.0;
  for (const GramianBundle& g : bundles) {
    const double kn = min_delta_on_kernel(g);
    min_kernel_norm = std::min(min_kernel_norm, kn);
    if (kn < 1.0 - kStructuralTol) structural = false;
    if (auto cert = minimal_C(g, delta_target, opts))
      return with_kernel_norm(*cert, g);
    // Record the margin reached at the largest C the search would try.
    const double C_probe =
        kn >= delta_target ? opts.C_start
                           : std::ldexp(opts.C_start, opts.max_doublings);
    auto probe = with_kernel_norm(check_inequality(g, C_probe, delta_target), g);
    if (!best || probe.margin < best->margin) best = probe;
  }
  best->verdict = structural ? Verdict::kInfeasible : Verdict::kSearchExhausted;
  best->kernel_norm = min_kernel_norm;
  return *best;
}

}  // namespace

ObservabilityCertificate decide_dc(const ContinuousSystem& sys, double T,
                                   int N_max, double delta_target,
                                   const DecideOptions& opts) {
  require(N_max >= 1, "N_max must be at least 1");
  require(delta_target > 0.0 && delta_target < 1.0,
          "delta must lie in (0,1)");
  std::optional<ObservabilityCertificate> best;
  bool structural = true;
  double min_kernel_norm = 1.0;
  for (int N = 1; N <= N_max; ++N) {
    auto cert = decide({discrete_gramian(sys, T, N)}, delta_target, opts);
    if (cert.feasible()) return cert;
    min_kernel_norm = std::min(min_kernel_norm, cert.kernel_norm);
    if (cert.verdict != Verdict::kInfeasible) structural = false;
    if (!best || cert.margin < best->margin) best = cert;
  }
  best->verdict = structural ? Verdict::kInfeasible : Verdict::kSearchExhausted;
  best->kernel_norm = min_kernel_norm;
  return *best;
}

ObservabilityCertificate decide_cc(const ContinuousSystem& sys, double T_h,
                                   double delta_target,
                                   const DecideOptions& opts) {
  require(delta_target > 0.0 && delta_target < 1.0,
          "delta must lie in (0,1)");
  return decide({continuous_gramian(sys, T_h)}, delta_target, opts);
}

double sampled_violation(const GramianBundle& g, double C, double delta,
                         int samples, std::uint64_t seed) {
  require(samples >= 1, "need at least one sample");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Eigen::Index n = g.R.rows();
  double worst = -std::numeric_limits<double>::infinity();
  Vector phi(n);
  for (int k = 0; k < samples; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) phi(i) = {normal(rng), normal(rng)};
    phi.normalize();
    const double lhs = (g.R.adjoint() * phi).squaredNorm();
    const double obs = phi.dot(g.G * phi).real();
    worst = std::max(worst, lhs - C * obs - delta);
  }
  return worst;
}

std::vector<double> pathological_periods(const Matrix& A, double T_max) {
  require(T_max > 0.0, "T_max must be positive");
  require(A.rows() == A.cols(), "A must be square");
  Eigen::ComplexEigenSolver<Matrix> es(A, false);
  const Vector& ev = es.eigenvalues();
  std::vector<double> periods;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    for (Eigen::Index j = i + 1; j < ev.size(); ++j) {
      const double scale = 1.0 + std::max(std::abs(ev(i)), std::abs(ev(j)));
      const double re_tol = 1e-9 * scale;
      if (std::abs(ev(i).real() - ev(j).real()) > re_tol) continue;
      if (std::min(ev(i).real(), ev(j).real()) < -re_tol) continue;
      const double gap = std::abs(ev(i).imag() - ev(j).imag());
      if (gap <= re_tol) continue;
      const double base = 2.0 * std::numbers::pi / gap;
      for (int k = 1; k * base <= T_max * (1.0 + 1e-12); ++k)
        periods.push_back(k * base);
    }
  }
  std::sort(periods.begin(), periods.end());
  auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max(a, b);
  };
  periods.erase(std::unique(periods.begin(), periods.end(), close),
                periods.end());
  return periods;
}

}  // namespace sdstab
