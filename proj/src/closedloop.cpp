#include "sdstab/closedloop.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace sdstab {

FeedbackLaw::FeedbackLaw(Kind kind, Matrix F, Matrix generator, double T)
    : kind_(kind), F_(std::move(F)), generator_(std::move(generator)), T_(T) {}

FeedbackLaw FeedbackLaw::constant(Matrix F) {
  require(F.size() > 0, "gain must be non-empty");
  const Eigen::Index n = F.cols();
  return {Kind::kConstant, std::move(F), Matrix::Zero(n, n), 0.0};
}

FeedbackLaw FeedbackLaw::periodic(Matrix F, Matrix generator, double T) {
  require(T > 0.0, "period must be positive");
  require(generator.rows() == generator.cols() && generator.cols() == F.cols(),
          "schedule generator must be n x n with n = gain columns");
  return {Kind::kPeriodic, std::move(F), std::move(generator), T};
}

Matrix FeedbackLaw::at_phase(double tau) const {
  if (kind_ == Kind::kConstant) return F_;
  return F_ * expm(generator_, tau);
}

Matrix FeedbackLaw::schedule(double t) const {
  require(t >= 0.0, "schedule time must be non-negative");
  if (kind_ == Kind::kConstant) return F_;
  double tau = t - std::floor(t / T_) * T_;
  if (tau < 0.0 || tau >= T_) tau = 0.0;
  return at_phase(tau);
}

namespace {

// Grid points kT + jT/spp that do not exceed the horizon.
struct PeriodGrid {
  int periods = 0;  // complete periods stepped through
  int spp = 1;
  double T = 0.0;
  double horizon = 0.0;

  PeriodGrid(double T_, double horizon_, int spp_)
      : spp(spp_), T(T_), horizon(horizon_) {
    periods = static_cast<int>(std::ceil(horizon / T - 1e-9));
  }
  double time(int k, int j) const {
    return k * T + j * (T / static_cast<double>(spp));
  }
  bool inside(double t) const { return t <= horizon + 1e-9 * T; }
};

void check_state(const ContinuousSystem& sys, const Vector& y0) {
  require(y0.size() == sys.state_dim(), "initial state dimension mismatch");
}

void check_gain(const ContinuousSystem& sys, const Matrix& F) {
  require(F.rows() == sys.input_dim() && F.cols() == sys.state_dim(),
          "gain must be m x n");
}

// 8-point Gauss–Legendre on [-1, 1].
constexpr std::array<double, 8> kGaussNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

// ∫_a^b exp(A(b − s)) B schedule_phase(s) ds over `panels` equal panels.
Matrix forcing_integral(const ContinuousSystem& sys, const FeedbackLaw& law,
                        double a, double b, int panels) {
  const Eigen::Index n = sys.state_dim();
  Matrix acc = Matrix::Zero(n, n);
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double mid = lo + 0.5 * width;
    for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
      const double s = mid + 0.5 * width * kGaussNodes[q];
      acc += Scalar(0.5 * width * kGaussWeights[q]) * expm(sys.A(), b - s) *
             sys.B() * law.at_phase(s);
    }
  }
  return acc;
}

// Forcing operators M(τ_j), j = 0..spp, on one period.
std::vector<Matrix> forcing_table(const ContinuousSystem& sys,
                                  const FeedbackLaw& law, double T, int spp,
                                  int panels) {
  const Eigen::Index n = sys.state_dim();
  const double h = T / spp;
  const Matrix step = expm(sys.A(), h);
  std::vector<Matrix> table{Matrix::Zero(n, n)};
  for (int j = 1; j <= spp; ++j)
    table.push_back(step * table.back() +
                    forcing_integral(sys, law, (j - 1) * h, j * h, panels));
  return table;
}

struct DpTables {
  std::vector<Matrix> forcing;
  double defect = 0.0;
  int panels = 0;
};

DpTables refined_forcing(const ContinuousSystem& sys, const FeedbackLaw& law,
                         double T, int spp, const DpOptions& opts) {
  int panels = 1;
  auto coarse = forcing_table(sys, law, T, spp, panels);
  while (true) {
    auto fine = forcing_table(sys, law, T, spp, 2 * panels);
    const double scale = std::max(1.0, operator_norm(fine.back()));
    const double defect = operator_norm(fine.back() - coarse.back()) / scale;
    panels *= 2;
    if (defect < opts.defect_tol || 2 * panels > opts.max_panels)
      return {std::move(fine), defect, panels};
    coarse = std::move(fine);
  }
}

}  // namespace

Trajectory simulate_dc(const ContinuousSystem& sys, const Matrix& F, double T,
                       const Vector& y0, double horizon, int steps_per_period) {
  require(T > 0.0, "sampling period must be positive");
  require(horizon >= T, "horizon must cover at least one period");
  require(steps_per_period >= 1, "steps_per_period must be at least 1");
  check_state(sys, y0);
  check_gain(sys, F);

  const PeriodGrid grid(T, horizon, steps_per_period);
  const SampledSystem period = sample(sys, T);
  const Matrix closed = period.Phi + period.D * F;
  std::vector<SampledSystem> partial;  // exact maps to each intra-period point
  for (int j = 1; j < steps_per_period; ++j)
    partial.push_back(sample(sys, j * T / steps_per_period));

  Trajectory traj;
  Vector yk = y0;
  for (int k = 0; k <= grid.periods; ++k) {
    const Vector uk = F * yk;
    for (int j = 0; j < steps_per_period; ++j) {
      const double t = grid.time(k, j);
      if (!grid.inside(t)) break;
      traj.times.push_back(t);
      traj.controls.push_back(uk);
      if (j == 0) {
        traj.states.push_back(yk);
      } else {
        const SampledSystem& p = partial[static_cast<std::size_t>(j - 1)];
        traj.states.push_back(p.Phi * yk + p.D * uk);
      }
    }
    yk = closed * yk;
  }
  return traj;
}

Trajectory simulate_cc(const ContinuousSystem& sys, const Matrix& F,
                       const Vector& y0, double horizon, double dt) {
  require(dt > 0.0, "dt must be positive");
  require(horizon >= 0.0, "horizon must be non-negative");
  check_state(sys, y0);
  check_gain(sys, F);
  const Matrix generator = sys.A() + sys.B() * F;
  const Matrix step = expm(generator, dt);
  const auto steps = static_cast<int>(std::floor(horizon / dt + 1e-9));
  Trajectory traj;
  Vector y = y0;
  for (int j = 0; j <= steps; ++j) {
    traj.times.push_back(j * dt);
    traj.states.push_back(y);
    traj.controls.push_back(F * y);
    y = step * y;
  }
  return traj;
}

FeedbackLaw build_periodic_feedback(const ContinuousSystem& sys,
                                    const Matrix& F, double T) {
  check_gain(sys, F);
  return FeedbackLaw::periodic(F, sys.A() + sys.B() * F, T);
}

PeriodMap dp_period_map(const ContinuousSystem& sys, const FeedbackLaw& law,
                        const DpOptions& opts) {
  require(law.kind() == FeedbackLaw::Kind::kPeriodic, "law must be periodic");
  check_gain(sys, law.F());
  const double T = law.period();
  auto tables = refined_forcing(sys, law, T, 1, opts);
  return {expm(sys.A(), T) + tables.forcing.back(), tables.defect,
          tables.panels};
}

Trajectory simulate_dp(const ContinuousSystem& sys, const FeedbackLaw& law,
                       const Vector& y0, double horizon, int steps_per_period,
                       const DpOptions& opts) {
  require(law.kind() == FeedbackLaw::Kind::kPeriodic, "law must be periodic");
  require(steps_per_period >= 1, "steps_per_period must be at least 1");
  const double T = law.period();
  require(horizon >= T, "horizon must cover at least one period");
  check_state(sys, y0);
  check_gain(sys, law.F());

  const PeriodGrid grid(T, horizon, steps_per_period);
  const auto tables = refined_forcing(sys, law, T, steps_per_period, opts);
  const double h = T / steps_per_period;
  std::vector<Matrix> flow{Matrix::Identity(sys.state_dim(), sys.state_dim())};
  std::vector<Matrix> gains{law.at_phase(0.0)};
  for (int j = 1; j < steps_per_period; ++j) {
    flow.push_back(expm(sys.A(), j * h));
    gains.push_back(law.at_phase(j * h));
  }
  const Matrix period_map = expm(sys.A(), T) + tables.forcing.back();

  Trajectory traj;
  Vector yk = y0;
  for (int k = 0; k <= grid.periods; ++k) {
    for (int j = 0; j < steps_per_period; ++j) {
      const double t = grid.time(k, j);
      if (!grid.inside(t)) break;
      const auto idx = static_cast<std::size_t>(j);
      traj.times.push_back(t);
      traj.controls.push_back(gains[idx] * yk);
      traj.states.push_back(j == 0 ? Vector(yk)
                                   : Vector(flow[idx] * yk +
                                            tables.forcing[idx] * yk));
    }
    yk = period_map * yk;
  }
  return traj;
}

Trajectory simulate_cp(const ContinuousSystem& sys, const FeedbackLaw& law,
                       const Vector& y0, double horizon, double dt) {
  require(dt > 0.0, "dt must be positive");
  require(horizon >= 0.0, "horizon must be non-negative");
  check_state(sys, y0);
  check_gain(sys, law.F());

  long spp = 0;  // steps per period; 0 for constant laws
  if (law.kind() == FeedbackLaw::Kind::kPeriodic) {
    const double T = law.period();
    spp = std::lround(T / dt);
    if (spp < 1 || std::abs(spp * dt - T) > 1e-12 * std::max(1.0, T))
      throw Error(ErrorKind::kStepSizeRejected,
                  "dt does not divide the period of the feedback law");
  }
  auto rhs = [&](double tau, const Vector& y) -> Vector {
    return sys.A() * y + sys.B() * (law.at_phase(tau) * y);
  };

  const auto steps = static_cast<long>(std::floor(horizon / dt + 1e-9));
  Trajectory traj;
  Vector y = y0;
  for (long j = 0;; ++j) {
    const double tau = spp > 0 ? static_cast<double>(j % spp) * dt : 0.0;
    traj.times.push_back(static_cast<double>(j) * dt);
    traj.states.push_back(y);
    traj.controls.push_back(law.at_phase(tau) * y);
    if (j == steps) break;
    const Vector k1 = rhs(tau, y);
    const Vector k2 = rhs(tau + 0.5 * dt, y + Scalar(0.5 * dt) * k1);
    const Vector k3 = rhs(tau + 0.5 * dt, y + Scalar(0.5 * dt) * k2);
    const Vector k4 = rhs(tau + dt, y + Scalar(dt) * k3);
    y += Scalar(dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return traj;
}

DecayFit fit_decay(const Trajectory& traj) {
  require(traj.times.size() == traj.states.size(), "malformed trajectory");
  std::size_t nonzero = 0;
  for (const Vector& y : traj.states)
    if (y.norm() > 0.0) ++nonzero;
  require(nonzero >= 10, "decay fit needs at least 10 nonzero states");

  const double cutoff = 0.5 * traj.times.back();
  double st = 0, sl = 0, stt = 0, stl = 0;
  int count = 0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    if (t < cutoff) continue;
    const double norm = traj.states[i].norm();
    if (norm == 0.0)
      return {std::numeric_limits<double>::infinity(), 0.0};
    const double l = std::log(norm);
    st += t;
    sl += l;
    stt += t * t;
    stl += t * l;
    ++count;
  }
  require(count >= 2, "decay fit window holds fewer than 2 points");
  const double denom = count * stt - st * st;
  const double slope = (count * stl - st * sl) / denom;
  const double intercept = (sl - slope * st) / count;
  const double y0 = traj.states.front().norm();
  DecayFit fit;
  fit.omega = slope < -1e-9 ? -slope : 0.0;
  fit.c = std::exp(intercept) / (y0 > 0.0 ? y0 : 1.0);
  return fit;
}

void attach_decay_fit(Trajectory& traj) {
  const DecayFit fit = fit_decay(traj);
  traj.decay_rate = fit.omega;
  traj.decay_constant = fit.c;
}

}  // namespace sdstab
