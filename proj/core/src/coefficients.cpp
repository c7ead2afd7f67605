#include "cavityduo/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cavityduo/error.hpp"

namespace cavityduo {

namespace {

constexpr double kXiSeriesThreshold = 1e-6;

void join_and_throw(const std::vector<std::string>& problems, const char* what) {
  if (problems.empty()) return;
  std::ostringstream os;
  os << what << ": ";
  for (std::size_t i = 0; i < problems.size(); ++i) {
    if (i) os << "; ";
    os << problems[i];
  }
  throw Error(ErrorKind::ValidationError, os.str());
}

struct Sample {
  double density;
  cplx alpha;
  cplx beta;
};

Sample interpolate(const ReservoirSpectrum& s, std::size_t i, double frac) {
  const double w = 1.0 - frac;
  return {w * s.density[i] + frac * s.density[i + 1], w * s.alpha[i] + frac * s.alpha[i + 1],
          w * s.beta[i] + frac * s.beta[i + 1]};
}

// Integrands of the four laboratory coefficients at one frequency.
std::array<cplx, 4> integrand(double omega, const Sample& smp, const NormalModeData& nm,
                              double tau_c) {
  const cplx xi1 = xi(omega, nm.omega_1, tau_c);
  const cplx xi2 = xi(omega, nm.omega_2, tau_c);
  const double c2 = nm.cos_theta * nm.cos_theta;
  const double s2 = nm.sin_theta * nm.sin_theta;
  const cplx eta = xi1 * c2 + xi2 * s2;
  const cplx mu = xi2 * c2 + xi1 * s2;
  const cplx nu = (xi1 - xi2) * nm.sin_theta * nm.cos_theta;

  const cplx aa = smp.alpha * std::conj(smp.alpha);
  const cplx ab = smp.alpha * std::conj(smp.beta);
  const cplx ba = smp.beta * std::conj(smp.alpha);
  const cplx bb = smp.beta * std::conj(smp.beta);
  const double d = smp.density;
  return {d * (aa * eta + ab * nu), d * (aa * nu + ab * mu), d * (ba * eta + bb * nu),
          d * (ba * nu + bb * mu)};
}

// Composite trapezoid with each interval split into `parts` equal pieces.
std::array<cplx, 4> trapezoid(const ReservoirSpectrum& s, const NormalModeData& nm, int parts) {
  std::array<cplx, 4> sum{};
  const std::size_t n = s.grid.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = (s.grid[i + 1] - s.grid[i]) / parts;
    for (int p = 0; p <= parts; ++p) {
      const double frac = static_cast<double>(p) / parts;
      const double omega = s.grid[i] + p * h;
      const double weight = (p == 0 || p == parts) ? 0.5 * h : h;
      const auto f = integrand(omega, interpolate(s, i, frac), nm, s.tau_c);
      for (int k = 0; k < 4; ++k) sum[k] += weight * f[k];
    }
  }
  return sum;
}

LabCoefficients split(const std::array<cplx, 4>& v) {
  LabCoefficients c;
  c.k_aa = v[0].real();
  c.d_aa = v[0].imag();
  c.k_ab = v[1].real();
  c.d_ab = v[1].imag();
  c.k_ba = v[2].real();
  c.d_ba = v[2].imag();
  c.k_bb = v[3].real();
  c.d_bb = v[3].imag();
  return c;
}

}  // namespace

void ModelParams::validate() const {
  std::vector<std::string> problems;
  if (!(omega_a > 0.0) || !std::isfinite(omega_a)) problems.emplace_back("omega_a must be > 0");
  if (!(omega_b > 0.0) || !std::isfinite(omega_b)) problems.emplace_back("omega_b must be > 0");
  if (!(g >= 0.0) || !std::isfinite(g)) problems.emplace_back("g must be >= 0");
  join_and_throw(problems, "model parameters");
}

void ReservoirSpectrum::validate() const {
  std::vector<std::string> problems;
  const std::size_t n = grid.size();
  if (n < 2) problems.emplace_back("grid needs at least 2 points");
  if (density.size() != n || alpha.size() != n || beta.size() != n)
    problems.emplace_back("density/alpha/beta must have one sample per grid point");
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(grid[i + 1] > grid[i])) {
      problems.emplace_back("grid must be strictly increasing (row " + std::to_string(i + 1) + ")");
      break;
    }
  }
  for (std::size_t i = 0; i < std::min(n, density.size()); ++i) {
    if (!(density[i] >= 0.0)) {
      problems.emplace_back("density must be >= 0 (row " + std::to_string(i) + ")");
      break;
    }
  }
  if (!(tau_c > 0.0) || !std::isfinite(tau_c)) problems.emplace_back("tau_c must be > 0");
  join_and_throw(problems, "reservoir spectrum");
}

void LabCoefficients::validate() const {
  std::vector<std::string> problems;
  const double all[] = {k_aa, k_ab, k_ba, k_bb, d_aa, d_ab, d_ba, d_bb};
  if (!std::all_of(std::begin(all), std::end(all), [](double v) { return std::isfinite(v); }))
    problems.emplace_back("all coefficients must be finite");
  if (k_aa < 0.0) problems.emplace_back("k_aa must be >= 0");
  if (k_bb < 0.0) problems.emplace_back("k_bb must be >= 0");
  join_and_throw(problems, "lab coefficients");
}

NormalModeData normal_modes(const ModelParams& params) {
  const double sum = params.omega_a + params.omega_b;
  const double diff = params.omega_a - params.omega_b;
  const double split = std::hypot(diff, 2.0 * params.g);

  NormalModeData nm;
  nm.omega_1 = 0.5 * (sum + split);
  nm.omega_2 = 0.5 * (sum - split);
  if (split == 0.0) {
    // fully degenerate and uncoupled: any rotation diagonalizes, keep the identity
    nm.cos_theta = 1.0;
    nm.sin_theta = 0.0;
    return nm;
  }
  // cos^2 = (1 + diff/split)/2 loses precision when diff ~ -split; use the
  // larger of cos, sin and recover the other from sin*cos = g/split.
  const double sincos = params.g / split;
  if (diff >= 0.0) {
    nm.cos_theta = std::sqrt(0.5 * (1.0 + diff / split));
    nm.sin_theta = sincos / nm.cos_theta;
  } else {
    nm.sin_theta = std::sqrt(0.5 * (1.0 - diff / split));
    nm.cos_theta = sincos / nm.sin_theta;
  }
  return nm;
}

cplx xi(double omega, double omega_j, double tau_c) {
  const double detuning = omega - omega_j;
  const double x = detuning * tau_c;
  if (std::abs(x) < kXiSeriesThreshold) {
    // (e^{ix} - 1)/(ix) = 1 + ix/2 - x^2/6 + O(x^3)
    return tau_c * cplx(1.0 - x * x / 6.0, 0.5 * x);
  }
  const double half = std::sin(0.5 * x);
  const cplx expm1(-2.0 * half * half, std::sin(x));
  return expm1 / cplx(0.0, detuning);
}

QuadratureResult coefficients_from_spectrum(const ReservoirSpectrum& spectrum,
                                            const NormalModeData& nm,
                                            const QuadratureOptions& options) {
  spectrum.validate();
  const double lo = spectrum.grid.front();
  const double hi = spectrum.grid.back();
  if (nm.omega_2 < lo || nm.omega_1 > hi) {
    throw Error(ErrorKind::ValidationError,
                "spectrum grid does not cover the normal-mode frequencies");
  }

  const auto coarse = trapezoid(spectrum, nm, 1);
  const auto fine = trapezoid(spectrum, nm, 2);

  double scale = 0.0;
  double change = 0.0;
  for (int k = 0; k < 4; ++k) {
    scale = std::max(scale, std::abs(fine[k]));
    change = std::max(change, std::abs(fine[k] - coarse[k]));
  }
  QuadratureResult result;
  result.coeffs = split(fine);
  result.max_refinement_change = scale > 0.0 ? change / scale : change;

  if (result.max_refinement_change > options.rel_tol) {
    std::ostringstream os;
    os << "grid refinement changed coefficients by " << result.max_refinement_change
       << " (relative), tolerance " << options.rel_tol;
    throw Error(ErrorKind::GridTooCoarse, os.str());
  }
  if (result.coeffs.k_aa < -options.negative_tol || result.coeffs.k_bb < -options.negative_tol) {
    std::ostringstream os;
    os << "k_aa=" << result.coeffs.k_aa << ", k_bb=" << result.coeffs.k_bb;
    throw Error(ErrorKind::NegativeDiagonalRate, os.str());
  }
  return result;
}

EffectiveDetunings effective_detunings(const ModelParams& params, const LabCoefficients& coeffs) {
  return {params.omega_a - coeffs.d_aa, params.omega_b - coeffs.d_bb, params.g - coeffs.d_ab,
          params.g - coeffs.d_ba};
}

std::array<std::array<cplx, 2>, 2> gamma_matrix(const LabCoefficients& c) {
  const cplx off(c.k_ab + c.k_ba, c.d_ab - c.d_ba);
  return {{{cplx(2.0 * c.k_aa), off}, {std::conj(off), cplx(2.0 * c.k_bb)}}};
}

std::vector<std::string> physicality_warnings(const LabCoefficients& coeffs, double tol) {
  const auto gm = gamma_matrix(coeffs);
  const double a = gm[0][0].real();
  const double d = gm[1][1].real();
  const double det = a * d - std::norm(gm[0][1]);
  // smallest eigenvalue of a Hermitian 2x2
  const double min_eig = 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + std::norm(gm[0][1]));

  std::vector<std::string> warnings;
  if (min_eig < -tol) {
    std::ostringstream os;
    os << "dissipator matrix Gamma is not positive semidefinite (min eigenvalue " << min_eig
       << ", det " << det << "); dynamics may not be completely positive";
    warnings.push_back(os.str());
  }
  return warnings;
}

}  // namespace cavityduo
