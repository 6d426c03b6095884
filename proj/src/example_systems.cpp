#include "sdstab/example_systems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sdstab {

ContinuousSystem harmonic_oscillator() {
  Matrix A(2, 2);
  A << 0.0, 1.0, -1.0, 0.0;
  Matrix B(2, 1);
  B << 0.0, 1.0;
  return {std::move(A), std::move(B)};
}

DetLambda det_lambda(double T) {
  require(T > 0.0, "period must be positive");
  DetLambda out;
  out.closed_form = -2.0 * std::sin(T) * (1.0 - std::cos(T));
  // W_j (φ₁, φ₂)ᵀ = a_1j φ₁ + a_2j φ₂, so column j of Λ is W_jᵀ.
  const auto blocks = observation_blocks(harmonic_oscillator(), T, 2);
  Eigen::Matrix2d lambda;
  lambda.col(0) = blocks[0].row(0).transpose().real();
  lambda.col(1) = blocks[1].row(0).transpose().real();
  out.assembled = lambda.determinant();
  return out;
}

void ThickSetSpec::validate() const {
  require(domain_length > 0.0, "domain length must be positive");
  require(density > 0.0 && density <= 1.0, "density must lie in (0, 1]");
  auto sorted = intervals;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto [lo, hi] = sorted[i];
    require(lo < hi, "intervals must be non-empty");
    require(lo >= 0.0 && hi <= domain_length,
            "intervals must lie inside the domain");
    if (i > 0) require(sorted[i - 1].second <= lo, "intervals must be disjoint");
  }
}

bool ThickSetSpec::contains(double x) const {
  return std::any_of(intervals.begin(), intervals.end(),
                     [x](const auto& iv) { return x >= iv.first && x < iv.second; });
}

ThicknessReport is_thick(const ThickSetSpec& spec, double L) {
  spec.validate();
  require(L > 0.0 && L <= spec.domain_length,
          "window must lie in (0, domain_length]");
  auto measure = [&](double x) {
    double covered = 0.0;
    for (const auto& [lo, hi] : spec.intervals)
      covered += std::max(0.0, std::min(hi, x + L) - std::max(lo, x));
    return covered / L;
  };
  const double last = spec.domain_length - L;
  const double step = L / 100.0;
  double worst = measure(last);
  for (int k = 0; k * step < last; ++k) worst = std::min(worst, measure(k * step));
  // Window measures carry rounding from the interval arithmetic.
  return {worst >= spec.density - 1e-12, worst};
}

std::vector<double> symmetric_modes(int n_modes, double spacing) {
  require(n_modes >= 1, "need at least one mode");
  require(spacing > 0.0, "mode spacing must be positive");
  std::vector<double> modes(static_cast<std::size_t>(n_modes));
  for (int k = 0; k < n_modes; ++k)
    modes[static_cast<std::size_t>(k)] = (k - 0.5 * (n_modes - 1)) * spacing;
  return modes;
}

SpectralSystem fractional_heat(int n_modes, double s, double c,
                               const std::vector<double>& mask,
                               double spacing) {
  require(s > 1.0, "fractional order must exceed 1");
  require(c >= 0.0, "shift must be non-negative");
  return {symmetric_modes(n_modes, spacing), Symbol::fractional_heat(s, c),
          mask};
}

SpectralSystem fractional_heat(int n_modes, double s, double c,
                               const ThickSetSpec& region, double spacing) {
  region.validate();
  // Mode k sits at the cell centre (k + 1/2)·spacing of the region's axis.
  std::vector<double> mask(static_cast<std::size_t>(std::max(n_modes, 0)));
  for (int k = 0; k < n_modes; ++k)
    mask[static_cast<std::size_t>(k)] =
        region.contains((k + 0.5) * spacing) ? 1.0 : 0.0;
  return fractional_heat(n_modes, s, c, mask, spacing);
}

SpectralSystem schrodinger(int n_modes, double xi_max) {
  require(n_modes >= 1, "need at least one mode");
  require(xi_max > 0.0, "xi_max must be positive");
  std::vector<double> modes(static_cast<std::size_t>(n_modes));
  for (int k = 0; k < n_modes; ++k)
    modes[static_cast<std::size_t>(k)] = (k + 1) * xi_max / n_modes;
  return {std::move(modes), Symbol::schrodinger(),
          std::vector<double>(static_cast<std::size_t>(n_modes), 1.0)};
}

WitnessSupport witness_support(double T, int N, double epsilon) {
  require(T > 0.0, "period must be positive");
  require(N >= 1, "N must be at least 1");
  require(epsilon > 0.0, "epsilon must be positive");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double q = std::sqrt(epsilon / N);
  const double eta = two_pi * q / (T + q);
  return {eta, std::sqrt((two_pi - eta) / T), std::sqrt((two_pi + eta) / T)};
}

std::vector<double> witness_grid(double T, int N, double epsilon, int points) {
  require(points >= 2, "grid needs at least two points");
  const auto sup = witness_support(T, N, epsilon);
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k)
    grid[static_cast<std::size_t>(k)] =
        sup.lo + (sup.hi - sup.lo) * k / (points - 1);
  return grid;
}

namespace {

// Trapezoid weights on a sorted, possibly non-uniform grid.
std::vector<double> trapezoid_weights(std::span<const double> x) {
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double h = x[k + 1] - x[k];
    w[k] += 0.5 * h;
    w[k + 1] += 0.5 * h;
  }
  return w;
}

// Mollifier exp(−1/(1 − u²)) on the affine image of (lo, hi) onto (−1, 1).
double bump(double xi, double lo, double hi) {
  const double u = (2.0 * xi - lo - hi) / (hi - lo);
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

// Σ_i |∫_{(i−1)T}^{iT} e^{−iξ²t} dt|².
double resonance_weight(double xi, double T, int N) {
  const double w = xi * xi;
  double total = 0.0;
  for (int i = 1; i <= N; ++i) {
    const Scalar a = std::exp(Scalar(0.0, -w * (i - 1) * T));
    const Scalar b = std::exp(Scalar(0.0, -w * i * T));
    total += std::norm((b - a) / Scalar(0.0, -w));
  }
  return total;
}

// ∫ m |f|² / ∫ |f|² by trapezoid on the given nodes.
double observed_ratio(std::span<const double> grid, const std::vector<double>& f,
                      const std::vector<double>& m) {
  const auto w = trapezoid_weights(grid);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    num += w[k] * m[k] * f[k] * f[k];
    den += w[k] * f[k] * f[k];
  }
  return num / den;
}

}  // namespace

CounterexampleWitness schrodinger_witness(double T, int N, double epsilon,
                                          std::span<const double> grid) {
  const auto sup = witness_support(T, N, epsilon);
  require(std::is_sorted(grid.begin(), grid.end()), "grid must be sorted");
  const auto inside = std::count_if(grid.begin(), grid.end(), [&](double xi) {
    return xi > sup.lo && xi < sup.hi;
  });
  if (inside < kWitnessMinModes)
    throw Error(ErrorKind::kGridTooCoarse,
                "support interval holds " + std::to_string(inside) +
                    " grid points, need " + std::to_string(kWitnessMinModes));

  CounterexampleWitness w;
  w.T = T;
  w.N = N;
  w.epsilon = epsilon;
  w.eta = sup.eta;
  w.support = {sup.lo, sup.hi};
  w.grid.assign(grid.begin(), grid.end());
  const double ratio = sup.eta * T / (2.0 * std::numbers::pi - sup.eta);
  w.bound = N * ratio * ratio;

  std::vector<double> f(grid.size()), m(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    f[k] = bump(grid[k], sup.lo, sup.hi);
    m[k] = resonance_weight(grid[k], T, N);
  }
  const auto weights = trapezoid_weights(grid);
  double f_norm_sq = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    f_norm_sq += weights[k] * f[k] * f[k];
  const double f_norm = std::sqrt(f_norm_sq);

  w.phi.resize(static_cast<Eigen::Index>(grid.size()));
  double phi_norm_sq = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    w.phi(static_cast<Eigen::Index>(k)) = f[k] / f_norm;
    phi_norm_sq += weights[k] * std::norm(w.phi(static_cast<Eigen::Index>(k)));
  }
  w.phi_norm = std::sqrt(phi_norm_sq);
  w.observed = observed_ratio(grid, f, m);

  // Error estimate from the every-other-node subgrid.
  std::vector<double> half_grid, half_f, half_m;
  for (std::size_t k = 0; k < grid.size(); k += 2) {
    half_grid.push_back(grid[k]);
    half_f.push_back(f[k]);
    half_m.push_back(m[k]);
  }
  w.quadrature_error = std::abs(w.observed - observed_ratio(half_grid, half_f, half_m));

  for (std::size_t k = 0; k + 1 < grid.size(); ++k)
    w.grid_spacing = std::max(w.grid_spacing, grid[k + 1] - grid[k]);

  if (w.observed + w.quadrature_error > epsilon)
    throw Error(ErrorKind::kGridTooCoarse,
                "quadrature error estimate exceeds the witness margin");
  return w;
}

}  // namespace sdstab
