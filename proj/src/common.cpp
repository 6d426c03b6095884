#include "sdstab/common.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace sdstab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return "invalid-argument";
    case ErrorKind::kNumericOverflow:
      return "numeric-overflow";
    case ErrorKind::kNotConverged:
      return "not-converged";
    case ErrorKind::kSpectralRadiusViolation:
      return "spectral-radius-violation";
    case ErrorKind::kStepSizeRejected:
      return "step-size-rejected";
    case ErrorKind::kGridTooCoarse:
      return "grid-too-coarse";
  }
  return "unknown";
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double max_hermitian_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double spectral_radius(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::ComplexEigenSolver<Matrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

const char* library_version() { return SDSTAB_VERSION; }

#define SDSTAB_STR2(x) #x
#define SDSTAB_STR(x) SDSTAB_STR2(x)

const char* numeric_backend() {
  return "eigen-" SDSTAB_STR(EIGEN_WORLD_VERSION) "." SDSTAB_STR(
      EIGEN_MAJOR_VERSION) "." SDSTAB_STR(EIGEN_MINOR_VERSION) " expm=pade-scaling-squaring";
}

}  // namespace sdstab
