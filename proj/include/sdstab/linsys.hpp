#pragma once

#include <vector>

#include "sdstab/common.hpp"

namespace sdstab {

/// y' = A y + B u with A n×n and B n×m.
class ContinuousSystem {
 public:
  ContinuousSystem(Matrix A, Matrix B);

  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }
  Eigen::Index state_dim() const { return A_.rows(); }
  Eigen::Index input_dim() const { return B_.cols(); }

 private:
  Matrix A_;
  Matrix B_;
};

/// Diagonal generator entry λ(ξ) of a Fourier-multiplier system.
struct Symbol {
  enum class Kind { kFractionalHeat, kSchrodinger };

  Kind kind = Kind::kFractionalHeat;
  double s = 2.0;  // fractional order (heat only)
  double c = 0.0;  // shift (heat only)

  static Symbol fractional_heat(double s, double c) {
    return {Kind::kFractionalHeat, s, c};
  }
  static Symbol schrodinger() { return {Kind::kSchrodinger, 0.0, 0.0}; }

  Scalar operator()(double xi) const;
  /// Purely imaginary symbol, i.e. a unitary group.
  bool unitary() const { return kind == Kind::kSchrodinger; }
};

/// Spectral truncation: one diagonal entry per mode, control acting through a
/// diagonal mask with weights in [0, 1].
class SpectralSystem {
 public:
  SpectralSystem(std::vector<double> modes, Symbol symbol,
                 std::vector<double> mask);

  const std::vector<double>& modes() const { return modes_; }
  const Symbol& symbol() const { return symbol_; }
  const std::vector<double>& mask() const { return mask_; }
  std::size_t size() const { return modes_.size(); }

  /// λ(ξ_k) for every mode.
  Vector eigenvalues() const;

 private:
  std::vector<double> modes_;
  Symbol symbol_;
  std::vector<double> mask_;
};

/// One-period transition Phi = S(T) and input map D = ∫₀ᵀ S(T−t) dt B.
struct SampledSystem {
  Matrix Phi;
  Matrix D;
  double T = 0.0;
};

/// exp(A t); t ≥ 0. Throws kNumericOverflow on non-finite results.
Matrix semigroup(const ContinuousSystem& sys, double t);

/// Diagonal of exp(A t) for a spectral system. Negative t is accepted only for
/// unitary symbols.
Vector semigroup(const SpectralSystem& sys, double t);

/// exp(M t) for an arbitrary square generator, with the overflow check.
Matrix expm(const Matrix& M, double t);

/// ∫₀ᵗ exp(A s) ds via the augmented exponential exp([[A, I], [0, 0]] t).
Matrix integrated_semigroup(const Matrix& A, double t);

SampledSystem sample(const ContinuousSystem& sys, double T);

/// W_i with W_i φ = ∫_{(i−1)T}^{iT} B* S(t)* φ dt, i ≥ 1.
Matrix observation_block(const ContinuousSystem& sys, double T, int i);

/// W_1, ..., W_N, built by the shift W_{i+1} = W_i S(T)*.
std::vector<Matrix> observation_blocks(const ContinuousSystem& sys, double T,
                                       int N);

ContinuousSystem to_dense(const SpectralSystem& sys);

}  // namespace sdstab
