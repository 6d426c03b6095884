#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sdstab/linsys.hpp"

namespace sdstab {

enum class ObservationMode { kDiscrete, kContinuous };

enum class Verdict {
  kFeasible,
  /// Every horizon searched carries a kernel direction the flow does not
  /// contract: no C makes the inequality hold there.
  kInfeasible,
  /// The search gave up without a structural obstruction.
  kSearchExhausted,
};

const char* to_string(ObservationMode mode);
const char* to_string(Verdict verdict);

/// Transition R and Gramian G of one weak observability inequality
///   ‖R* φ‖² ≤ C φ* G φ + δ ‖φ‖².
struct GramianBundle {
  ObservationMode mode = ObservationMode::kDiscrete;
  double T = 0.0;   // sampling period (discrete) or horizon (continuous)
  int N = 0;        // periods in the horizon; 0 in continuous mode
  Matrix R;         // S(NT) or S(T_h)
  Matrix G;         // Hermitian PSD
  Matrix kernel_basis;  // orthonormal columns spanning ker G

  Eigen::Index kernel_dim() const { return kernel_basis.cols(); }
};

struct ObservabilityCertificate {
  ObservationMode mode = ObservationMode::kDiscrete;
  double T = 0.0;
  int N = 0;
  double horizon = 0.0;  // N T in discrete mode, T_h in continuous mode
  double C = 0.0;
  double delta = 0.0;
  double margin = 0.0;   // λ_max(R R* − C G − δ I)
  Verdict verdict = Verdict::kSearchExhausted;
  Eigen::Index kernel_dim = 0;
  double kernel_norm = 0.0;  // min_delta_on_kernel at the reported horizon

  bool feasible() const { return verdict == Verdict::kFeasible; }
};

/// Relative singular-value cutoff for ker G.
inline constexpr double kKernelRankTol = 1e-10;
/// Slack allowed on the eigenvalue margin.
inline constexpr double kMarginTol = 1e-10;
/// min_delta_on_kernel at or above 1 - this counts as norm preserving.
inline constexpr double kStructuralTol = 1e-9;

GramianBundle discrete_gramian(const ContinuousSystem& sys, double T, int N);

/// Van Loan construction of ∫₀^{T_h} S(t) B B* S(t)* dt.
GramianBundle continuous_gramian(const ContinuousSystem& sys, double T_h);

ObservabilityCertificate check_inequality(const GramianBundle& g, double C,
                                          double delta);

/// sup ‖R* φ‖² over unit φ in ker G: the smallest δ reachable as C → ∞.
double min_delta_on_kernel(const GramianBundle& g);

struct DecideOptions {
  double C_start = 1.0;
  int max_doublings = 200;
  int bisection_steps = 60;
};

/// Smallest-C certificate for one fixed Gramian, or nullopt when no C in the
/// doubling range works.
std::optional<ObservabilityCertificate> minimal_C(const GramianBundle& g,
                                                  double delta,
                                                  const DecideOptions& opts = {});

/// Searches N = 1..N_max for the discrete-observation inequality with the
/// target δ; first feasible N wins.
ObservabilityCertificate decide_dc(const ContinuousSystem& sys, double T,
                                   int N_max, double delta_target,
                                   const DecideOptions& opts = {});

/// Same decision for the continuous-observation inequality over [0, T_h].
ObservabilityCertificate decide_cc(const ContinuousSystem& sys, double T_h,
                                   double delta_target,
                                   const DecideOptions& opts = {});

/// Largest ‖R* φ‖² − C φ* G φ − δ over `samples` seeded random unit φ.
/// Never exceeds the certificate margin up to rounding.
double sampled_violation(const GramianBundle& g, double C, double delta,
                         int samples, std::uint64_t seed);

/// Periods 2kπ/|Im(λ_i − λ_j)| ≤ T_max over eigenvalue pairs with equal,
/// non-negative real parts. Sorted and deduplicated.
std::vector<double> pathological_periods(const Matrix& A, double T_max);

}  // namespace sdstab
