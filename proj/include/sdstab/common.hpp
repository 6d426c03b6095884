#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sdstab {

// Every system is handled over the complex field; real data is embedded with
// zero imaginary parts.
using Scalar = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

enum class ErrorKind {
  kInvalidArgument,
  kNumericOverflow,
  kNotConverged,
  kSpectralRadiusViolation,
  kStepSizeRejected,
  kGridTooCoarse,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw Error(ErrorKind::kInvalidArgument, what);
}

/// Largest singular value.
double operator_norm(const Matrix& m);

/// Largest eigenvalue of the Hermitian part of `m`.
double max_hermitian_eigenvalue(const Matrix& m);

/// Max modulus over the eigenvalues of a square matrix.
double spectral_radius(const Matrix& m);

Matrix hermitian_part(const Matrix& m);

/// Library version and numeric backend, reported in CLI output.
const char* library_version();
const char* numeric_backend();

}  // namespace sdstab
