#include "sdstab/linsys.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <unsupported/Eigen/MatrixFunctions>

namespace sdstab {

ContinuousSystem::ContinuousSystem(Matrix A, Matrix B)
    : A_(std::move(A)), B_(std::move(B)) {
  require(A_.rows() >= 1 && A_.rows() == A_.cols(), "A must be square, n >= 1");
  require(B_.rows() == A_.rows(), "B must have as many rows as A");
  require(B_.cols() >= 1, "B must have at least one column");
  require(A_.allFinite() && B_.allFinite(), "system matrices must be finite");
}

Scalar Symbol::operator()(double xi) const {
  switch (kind) {
    case Kind::kFractionalHeat:
      return {c - std::pow(std::abs(xi), s), 0.0};
    case Kind::kSchrodinger:
      return {0.0, xi * xi};
  }
  return {};
}

SpectralSystem::SpectralSystem(std::vector<double> modes, Symbol symbol,
                               std::vector<double> mask)
    : modes_(std::move(modes)), symbol_(symbol), mask_(std::move(mask)) {
  require(!modes_.empty(), "spectral system needs at least one mode");
  require(mask_.size() == modes_.size(), "mask needs one entry per mode");
  for (double w : mask_) require(w >= 0.0 && w <= 1.0, "mask entries in [0,1]");
  std::set<double> distinct(modes_.begin(), modes_.end());
  require(distinct.size() == modes_.size(), "modes must be pairwise distinct");
}

Vector SpectralSystem::eigenvalues() const {
  Vector ev(static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t k = 0; k < modes_.size(); ++k)
    ev(static_cast<Eigen::Index>(k)) = symbol_(modes_[k]);
  return ev;
}

Matrix expm(const Matrix& M, double t) {
  Matrix E = (M * Scalar(t)).exp();
  if (!E.allFinite())
    throw Error(ErrorKind::kNumericOverflow,
                "matrix exponential overflowed at t = " + std::to_string(t));
  return E;
}

Matrix semigroup(const ContinuousSystem& sys, double t) {
  require(t >= 0.0, "semigroup time must be non-negative");
  return expm(sys.A(), t);
}

Vector semigroup(const SpectralSystem& sys, double t) {
  require(t >= 0.0 || sys.symbol().unitary(),
          "negative time needs a unitary symbol");
  Vector d = (sys.eigenvalues() * Scalar(t)).array().exp();
  if (!d.allFinite())
    throw Error(ErrorKind::kNumericOverflow, "spectral semigroup overflowed");
  return d;
}

Matrix integrated_semigroup(const Matrix& A, double t) {
  const Eigen::Index n = A.rows();
  Matrix aug = Matrix::Zero(2 * n, 2 * n);
  aug.topLeftCorner(n, n) = A;
  aug.topRightCorner(n, n) = Matrix::Identity(n, n);
  return expm(aug, t).topRightCorner(n, n);
}

SampledSystem sample(const ContinuousSystem& sys, double T) {
  require(T > 0.0, "sampling period must be positive");
  const Eigen::Index n = sys.state_dim();
  const Eigen::Index m = sys.input_dim();
  Matrix aug = Matrix::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = sys.A();
  aug.topRightCorner(n, m) = sys.B();
  return {semigroup(sys, T), expm(aug, T).topRightCorner(n, m), T};
}

Matrix observation_block(const ContinuousSystem& sys, double T, int i) {
  require(i >= 1, "observation block index starts at 1");
  require(T > 0.0, "sampling period must be positive");
  Matrix W = sys.B().adjoint() * integrated_semigroup(sys.A(), T).adjoint();
  if (i == 1) return W;
  const Matrix step = semigroup(sys, T).adjoint();
  for (int k = 1; k < i; ++k) W = W * step;
  return W;
}

std::vector<Matrix> observation_blocks(const ContinuousSystem& sys, double T,
                                       int N) {
  require(N >= 1, "need at least one observation block");
  require(T > 0.0, "sampling period must be positive");
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(N));
  blocks.push_back(observation_block(sys, T, 1));
  const Matrix step = semigroup(sys, T).adjoint();
  for (int i = 1; i < N; ++i) blocks.push_back(blocks.back() * step);
  return blocks;
}

ContinuousSystem to_dense(const SpectralSystem& sys) {
  const auto n = static_cast<Eigen::Index>(sys.size());
  Matrix A = sys.eigenvalues().asDiagonal();
  RealVector mask = Eigen::Map<const RealVector>(sys.mask().data(), n);
  Matrix B = mask.cast<Scalar>().asDiagonal();
  return {std::move(A), std::move(B)};
}

}  // namespace sdstab
