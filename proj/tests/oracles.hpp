#pragma once

// Test-only reference computations. Nothing here calls into the library's
// exponential, Gramian or Riccati code.

#include <array>
#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "sdstab/common.hpp"

namespace sdstab::oracle {

/// exp(M t) by scaling, a 40-term Taylor series, and squaring.
inline Matrix taylor_expm(const Matrix& M, double t) {
  Matrix X = M * Scalar(t);
  const double norm = X.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::ldexp(1.0, squarings) > 0.25) ++squarings;
  X /= Scalar(std::ldexp(1.0, squarings));
  const Eigen::Index n = M.rows();
  Matrix sum = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = term * X / Scalar(static_cast<double>(k));
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// Composite 8-point Gauss–Legendre of a matrix-valued integrand on [a, b].
inline Matrix gauss_integral(const std::function<Matrix(double)>& f, double a,
                             double b, int panels) {
  static constexpr std::array<double, 8> x = {
      -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
      -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
      0.7966664774136267,  0.9602898564975363};
  static constexpr std::array<double, 8> w = {
      0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
      0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
      0.2223810344533745, 0.1012285362903763};
  const double h = (b - a) / panels;
  Matrix acc;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t q = 0; q < x.size(); ++q) {
      Matrix v = f(mid + 0.5 * h * x[q]) * Scalar(0.5 * h * w[q]);
      if (acc.size() == 0)
        acc = v;
      else
        acc += v;
    }
  }
  return acc;
}

/// W_i from the defining integral ∫_{(i−1)T}^{iT} B* S(t)* dt.
inline Matrix observation_block(const Matrix& A, const Matrix& B, double T,
                                int i, int panels = 32) {
  return gauss_integral(
      [&](double t) -> Matrix {
        return B.adjoint() * taylor_expm(A, t).adjoint();
      },
      (i - 1) * T, i * T, panels);
}

/// ∫₀^{T_h} S(t) B B* S(t)* dt by quadrature.
inline Matrix continuous_gramian(const Matrix& A, const Matrix& B, double T_h,
                                 int panels = 64) {
  return gauss_integral(
      [&](double t) -> Matrix {
        const Matrix S = taylor_expm(A, t);
        return S * B * B.adjoint() * S.adjoint();
      },
      0.0, T_h, panels);
}

inline Matrix random_complex(std::mt19937_64& rng, Eigen::Index rows,
                             Eigen::Index cols, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = {normal(rng), normal(rng)};
  return m;
}

inline Vector random_unit(std::mt19937_64& rng, Eigen::Index n) {
  Vector v = random_complex(rng, n, 1);
  return v / v.norm();
}

/// Random generator shifted so that max Re λ equals `top`.
inline Matrix random_generator(std::mt19937_64& rng, Eigen::Index n,
                               double top, double scale = 0.5) {
  Matrix A = random_complex(rng, n, n, scale);
  Eigen::ComplexEigenSolver<Matrix> es(A, false);
  const double shift = es.eigenvalues().real().maxCoeff() - top;
  return A - Scalar(shift) * Matrix::Identity(n, n);
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline double rel_err(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / std::max(1e-300, want.norm());
}

}  // namespace sdstab::oracle
