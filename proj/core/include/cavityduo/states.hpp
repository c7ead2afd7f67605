#pragma once

#include <complex>
#include <cstddef>

#include "cavityduo/coefficients.hpp"
#include "cavityduo/fock.hpp"
#include "cavityduo/propagator.hpp"

namespace cavityduo {

/// Product coherent state |v_a> (x) |v_b>.
struct CoherentPair {
  cplx v_a;
  cplx v_b;
};

/// N^{1/2} (|w, 0> - e^{i phi} |0, w>).
struct CatState {
  cplx w;
  double phi = 0.0;

  /// Throws DegenerateCat when |w| = 0.
  void validate() const;
  /// 1 / (2 - 2 e^{-|w|^2} cos(phi)); equals (2 - 2e^{-|w|^2})^{-1} for phi = 0.
  double normalization() const;
};

/// Coherent amplitudes of the two evolved branches |sigma_1, eps_2> and |eps_1, sigma_2>.
struct CatComponents {
  double t = 0.0;
  cplx sigma_1, sigma_2, eps_1, eps_2;
};

struct EntropyPoint {
  double t = 0.0;
  double x = 0.0;      // |<0|w>|^2
  double y = 0.0;      // |<eps_1|sigma_1>| |<sigma_2|eps_2>|
  double delta = 0.0;  // linear entropy Tr(rho - rho^2)
};

struct WeakCouplingRates {
  double k_plus = 0.0;   // slow rate, k_aa + g^2/dk
  double k_minus = 0.0;  // fast rate, k_bb - g^2/dk
  double validity_ratio = 0.0;  // g / dk
};

struct CatDensity {
  DensityMatrix rho;
  /// |1 - Tr| of the projected operator before renormalization.
  double renormalization = 0.0;
};

/// <alpha|beta> for coherent states.
cplx coherent_overlap(cplx alpha, cplx beta);

CoherentPair evolve_coherent_pair(const CoherentPair& init, const PropagatorConstants& pc,
                                  const AuxFunctions& aux);

/// Decay rates of the two hybridized modes for g << k_bb - k_aa.
/// Throws WeakCouplingInvalid unless k_bb > k_aa and g < (k_bb - k_aa)/2.
WeakCouplingRates weak_coupling_rates(double k_aa, double k_bb, double g);

/// Approximate amplitudes for degenerate modes (frequency omega) without
/// reservoir cross terms, to leading order in g / (k_bb - k_aa).
CoherentPair evolve_coherent_weak(const CoherentPair& init, double t, double omega, double k_aa,
                                  double k_bb, double g);

CatComponents cat_components(const CatState& cat, const PropagatorConstants& pc,
                             const AuxFunctions& aux);

/// Evolved cat state projected onto the truncated Fock basis and renormalized.
/// Throws CutoffTooSmall when any branch amplitude leaves more than max_tail
/// of its coherent-state mass above the cutoff.
CatDensity cat_density_matrix(const CatState& cat, const CatComponents& comps, std::size_t dim_a,
                              std::size_t dim_b, double max_tail = 1e-10);

/// <a> and <b> of the evolved cat state, from the branch amplitudes and overlaps.
CoherentPair cat_mean_amplitudes(const CatState& cat, const CatComponents& comps);

EntropyPoint linear_entropy(const CatState& cat, const CatComponents& comps);

/// |x - <eps_1|sigma_1><sigma_2|eps_2>|; zero when the branch overlap is preserved.
double coherence_preservation_residual(const CatState& cat, const CatComponents& comps);

}  // namespace cavityduo
