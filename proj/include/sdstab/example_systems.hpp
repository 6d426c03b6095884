#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sdstab/linsys.hpp"

namespace sdstab {

/// A = [[0, 1], [−1, 0]], B = [0; 1].
ContinuousSystem harmonic_oscillator();

/// Determinant of Λ = (a_ij), a_1j = ∫ sin, a_2j = ∫ cos over [(j−1)T, jT],
/// j = 1, 2: the closed form and the one assembled from observation blocks.
struct DetLambda {
  double closed_form = 0.0;
  double assembled = 0.0;
};
DetLambda det_lambda(double T);

/// Control region on a one-dimensional domain [0, domain_length].
struct ThickSetSpec {
  std::vector<std::pair<double, double>> intervals;  // disjoint [lo, hi)
  double domain_length = 1.0;
  double density = 1.0;  // claimed lower density γ ∈ (0, 1]

  void validate() const;
  bool contains(double x) const;
};

struct ThicknessReport {
  bool thick = false;
  double gamma_measured = 0.0;
};

/// Minimum of |E ∩ [x, x + L]| / L over window positions spaced L/100.
ThicknessReport is_thick(const ThickSetSpec& spec, double L);

/// Symmetric frequency grid ξ_k = (k − (n − 1)/2)·spacing, k = 0..n−1.
std::vector<double> symmetric_modes(int n_modes, double spacing = 1.0);

/// Truncated fractional heat equation: λ(ξ) = c − |ξ|^s with the control mask
/// given either as raw weights or as the indicator of a set on the mode axis.
SpectralSystem fractional_heat(int n_modes, double s, double c,
                               const std::vector<double>& mask,
                               double spacing = 1.0);
SpectralSystem fractional_heat(int n_modes, double s, double c,
                               const ThickSetSpec& region,
                               double spacing = 1.0);

/// Truncated Schrödinger group λ(ξ) = i ξ², ξ_k = (k + 1) xi_max / n_modes,
/// full control.
SpectralSystem schrodinger(int n_modes, double xi_max);

/// Near-resonance state that makes Σ_i ‖∫_{(i−1)T}^{iT} S(t)* φ dt‖² small.
struct CounterexampleWitness {
  double T = 0.0;
  int N = 0;
  double epsilon = 0.0;
  double eta = 0.0;
  std::pair<double, double> support;  // open interval I
  std::vector<double> grid;           // mode grid
  Vector phi;                         // mode-side coefficients, unit L² norm
  double phi_norm = 0.0;
  double bound = 0.0;                 // N (η T / (2π − η))²
  double observed = 0.0;
  double quadrature_error = 0.0;
  double grid_spacing = 0.0;          // largest grid step
};

/// η with (ηT/(2π − η))² = ε/N and the interval I = (√((2π−η)/T), √((2π+η)/T)).
struct WitnessSupport {
  double eta = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};
WitnessSupport witness_support(double T, int N, double epsilon);

/// Uniform grid of `points` nodes on the closed support interval.
std::vector<double> witness_grid(double T, int N, double epsilon, int points);

inline constexpr int kWitnessMinModes = 32;

/// Throws kGridTooCoarse if fewer than 32 grid points fall inside I or the
/// quadrature error estimate exceeds ε − observed.
CounterexampleWitness schrodinger_witness(double T, int N, double epsilon,
                                          std::span<const double> grid);

}  // namespace sdstab
