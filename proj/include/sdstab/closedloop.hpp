#pragma once

#include <optional>
#include <vector>

#include "sdstab/linsys.hpp"

namespace sdstab {

/// Feedback u(t) = schedule(t) y(...). A periodic law has
/// schedule(t) = F exp(G τ), τ = t − ⌊t/T⌋T; build_periodic_feedback uses
/// G = A + B F.
class FeedbackLaw {
 public:
  enum class Kind { kConstant, kPeriodic };

  static FeedbackLaw constant(Matrix F);
  static FeedbackLaw periodic(Matrix F, Matrix generator, double T);

  Kind kind() const { return kind_; }
  const Matrix& F() const { return F_; }
  const Matrix& generator() const { return generator_; }
  double period() const { return T_; }

  /// Gain at absolute time t ≥ 0.
  Matrix schedule(double t) const;
  /// Gain at phase τ ∈ [0, T] within a period (no reduction; τ = T is the
  /// left limit at the period's end).
  Matrix at_phase(double tau) const;

 private:
  FeedbackLaw(Kind kind, Matrix F, Matrix generator, double T);

  Kind kind_;
  Matrix F_;
  Matrix generator_;
  double T_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> controls;
  std::optional<double> decay_rate;
  std::optional<double> decay_constant;
};

struct DecayFit {
  double omega = 0.0;  // +inf when the state reaches exact zero
  double c = 0.0;
};

/// Sampled-state feedback y' = A y + B F y(⌊t/T⌋T), propagated exactly.
Trajectory simulate_dc(const ContinuousSystem& sys, const Matrix& F, double T,
                       const Vector& y0, double horizon, int steps_per_period);

/// y' = (A + B F) y on the grid t_j = j dt.
Trajectory simulate_cc(const ContinuousSystem& sys, const Matrix& F,
                       const Vector& y0, double horizon, double dt);

FeedbackLaw build_periodic_feedback(const ContinuousSystem& sys,
                                    const Matrix& F, double T);

struct DpOptions {
  /// Per-period defect target for the Gauss–Legendre forcing term.
  double defect_tol = 1e-10;
  int max_panels = 1 << 12;
};

/// y' = A y + B schedule(t) y(⌊t/T⌋T).
Trajectory simulate_dp(const ContinuousSystem& sys, const FeedbackLaw& law,
                       const Vector& y0, double horizon, int steps_per_period,
                       const DpOptions& opts = {});

/// y' = (A + B schedule(t)) y, classical RK4 with fixed dt. For periodic laws
/// dt must divide T.
Trajectory simulate_cp(const ContinuousSystem& sys, const FeedbackLaw& law,
                       const Vector& y0, double horizon, double dt);

/// Least-squares fit of log‖y(t)‖ over the trailing half of the horizon.
DecayFit fit_decay(const Trajectory& traj);

/// Fit and store the result on the trajectory.
void attach_decay_fit(Trajectory& traj);

/// Period map P with y((k+1)T) = P y(kT) under a periodic law, plus the
/// defect between the last two panel refinements.
struct PeriodMap {
  Matrix P;
  double defect = 0.0;
  int panels = 0;
};

PeriodMap dp_period_map(const ContinuousSystem& sys, const FeedbackLaw& law,
                        const DpOptions& opts = {});

}  // namespace sdstab
