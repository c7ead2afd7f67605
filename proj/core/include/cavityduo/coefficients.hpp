#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace cavityduo {

using cplx = std::complex<double>;

/// Bare mode frequencies and the direct (RWA) coupling between the two modes.
struct ModelParams {
  double omega_a = 1.0;
  double omega_b = 1.0;
  double g = 0.0;

  /// Throws ValidationError listing every violated invariant.
  void validate() const;
};

/// Normal modes of the coupled two-mode Hamiltonian.
///
/// a_1 = a cos(theta) + b sin(theta), a_2 = -a sin(theta) + b cos(theta),
/// with omega_1 >= omega_2.
struct NormalModeData {
  double omega_1 = 0.0;
  double omega_2 = 0.0;
  double cos_theta = 1.0;
  double sin_theta = 0.0;
};

/// Reservoir description sampled on a frequency grid. Values between grid
/// points are obtained by linear interpolation.
struct ReservoirSpectrum {
  std::vector<double> grid;
  std::vector<double> density;
  std::vector<cplx> alpha;
  std::vector<cplx> beta;
  double tau_c = 0.0;

  void validate() const;
};

/// The eight real constants of the laboratory-frame master equation.
struct LabCoefficients {
  double k_aa = 0.0, k_ab = 0.0, k_ba = 0.0, k_bb = 0.0;
  double d_aa = 0.0, d_ab = 0.0, d_ba = 0.0, d_bb = 0.0;

  /// Finite-ness and non-negative diagonal rates (for directly entered values).
  void validate() const;
};

/// Reservoir-shifted frequencies and couplings entering the propagator.
struct EffectiveDetunings {
  double Omega_aa = 0.0;
  double Omega_bb = 0.0;
  double Omega_ab = 0.0;
  double Omega_ba = 0.0;
};

struct QuadratureOptions {
  /// Allowed change of any coefficient when the grid is doubled, relative to
  /// the largest coefficient magnitude.
  double rel_tol = 1e-6;
  /// Diagonal rates below -negative_tol are rejected.
  double negative_tol = 1e-12;
};

/// Coefficients produced by quadrature, together with the refinement estimate.
struct QuadratureResult {
  LabCoefficients coeffs;
  double max_refinement_change = 0.0;  // relative to the largest |k + i Delta|
};

NormalModeData normal_modes(const ModelParams& params);

/// Integral of exp(i (omega - omega_j) tau) over tau in [0, tau_c].
cplx xi(double omega, double omega_j, double tau_c);

/// Trapezoid quadrature of the four complex integrals k_xy + i Delta_xy.
///
/// The integral is evaluated on the supplied grid and on a grid with every
/// interval bisected (reservoir data linearly interpolated, xi evaluated
/// exactly). The refined value is returned. Throws GridTooCoarse when the two
/// disagree by more than options.rel_tol and NegativeDiagonalRate when k_aa or
/// k_bb comes out negative.
QuadratureResult coefficients_from_spectrum(const ReservoirSpectrum& spectrum,
                                            const NormalModeData& nm,
                                            const QuadratureOptions& options = {});

EffectiveDetunings effective_detunings(const ModelParams& params, const LabCoefficients& coeffs);

/// Hermitian 2x2 matrix of the jump terms a_i rho a_j^dagger:
/// [[2k_aa, (k_ab+k_ba) + i(Delta_ab-Delta_ba)], [conj, 2k_bb]].
std::array<std::array<cplx, 2>, 2> gamma_matrix(const LabCoefficients& coeffs);

/// Warnings (empty when clean) from the positive-semidefinite screen on gamma_matrix.
std::vector<std::string> physicality_warnings(const LabCoefficients& coeffs, double tol = 1e-12);

}  // namespace cavityduo
