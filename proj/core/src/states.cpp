#include "cavityduo/states.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cavityduo/error.hpp"

namespace cavityduo {

namespace {

constexpr double kUnderflowGuard = 1e-300;

}  // namespace

void CatState::validate() const {
  if (!(std::abs(w) > 0.0) || !std::isfinite(std::abs(w)))
    throw Error(ErrorKind::DegenerateCat, "cat amplitude w must be nonzero and finite");
  if (!std::isfinite(phi)) throw Error(ErrorKind::ValidationError, "cat phase phi must be finite");
}

double CatState::normalization() const {
  return 1.0 / (2.0 - 2.0 * std::exp(-std::norm(w)) * std::cos(phi));
}

cplx coherent_overlap(cplx alpha, cplx beta) {
  return std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) + std::conj(alpha) * beta);
}

CoherentPair evolve_coherent_pair(const CoherentPair& init, const PropagatorConstants& /*pc*/,
                                  const AuxFunctions& aux) {
  return {init.v_a * aux.decayed_f1 + init.v_b * aux.decayed_l1,
          init.v_a * aux.decayed_l2 + init.v_b * aux.decayed_f2};
}

WeakCouplingRates weak_coupling_rates(double k_aa, double k_bb, double g) {
  const double dk = k_bb - k_aa;
  if (!(dk > 0.0)) {
    throw Error(ErrorKind::WeakCouplingInvalid, "weak-coupling rates need k_bb > k_aa");
  }
  if (!(g < 0.5 * dk)) {
    std::ostringstream os;
    os << "g = " << g << " is not small against dk = " << dk << " (need g < dk/2)";
    throw Error(ErrorKind::WeakCouplingInvalid, os.str());
  }
  const double shift = g * g / dk;
  return {k_aa + shift, k_bb - shift, g / dk};
}

CoherentPair evolve_coherent_weak(const CoherentPair& init, double t, double omega, double k_aa,
                                  double k_bb, double g) {
  const WeakCouplingRates rates = weak_coupling_rates(k_aa, k_bb, g);
  const double dk = k_bb - k_aa;
  const cplx rotation = std::exp(cplx(0.0, -omega * t));
  const double slow = std::exp(-rates.k_plus * t);
  const double fast = std::exp(-rates.k_minus * t);
  const cplx feed = cplx(0.0, g / dk) * (fast - slow);
  return {rotation * (slow * init.v_a + feed * init.v_b),
          rotation * (fast * init.v_b + feed * init.v_a)};
}

CatComponents cat_components(const CatState& cat, const PropagatorConstants& /*pc*/,
                             const AuxFunctions& aux) {
  const cplx w = cat.w;
  return {aux.t, w * aux.decayed_f1, w * aux.decayed_f2, w * aux.decayed_l1, w * aux.decayed_l2};
}

CatDensity cat_density_matrix(const CatState& cat, const CatComponents& comps, std::size_t dim_a,
                              std::size_t dim_b, double max_tail) {
  cat.validate();
  require_cutoff(comps.sigma_1, dim_a, max_tail, "cat branch sigma_1");
  require_cutoff(comps.eps_1, dim_a, max_tail, "cat branch eps_1");
  require_cutoff(comps.sigma_2, dim_b, max_tail, "cat branch sigma_2");
  require_cutoff(comps.eps_2, dim_b, max_tail, "cat branch eps_2");

  const auto first = product_coherent(comps.sigma_1, comps.eps_2, dim_a, dim_b);
  const auto second = product_coherent(comps.eps_1, comps.sigma_2, dim_a, dim_b);

  const double x = std::exp(-std::norm(cat.w));
  // <eps_1, sigma_2 | sigma_1, eps_2>: the overlap the cross term divides by
  const cplx overlap = coherent_overlap(comps.eps_1, comps.sigma_1) *
                       coherent_overlap(comps.sigma_2, comps.eps_2);
  const cplx phase = std::polar(1.0, cat.phi);
  const cplx correction = (x - overlap) * std::conj(phase) / overlap;

  std::vector<cplx> branch_diff(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) branch_diff[i] = first[i] - phase * second[i];

  // N { (|1> - e^{i phi}|2>)(<1| - e^{-i phi}<2|) - [K |1><2| + h.c.] }
  DensityMatrix rho = DensityMatrix::outer(dim_a, dim_b, branch_diff, branch_diff);
  DensityMatrix cross = DensityMatrix::outer(dim_a, dim_b, first, second);
  cross *= correction;
  rho -= cross;
  rho -= cross.adjoint();
  rho *= cat.normalization();

  CatDensity out;
  const cplx tr = rho.trace();
  out.renormalization = std::abs(1.0 - tr);
  rho *= 1.0 / tr.real();
  out.rho = std::move(rho);
  return out;
}

CoherentPair cat_mean_amplitudes(const CatState& cat, const CatComponents& comps) {
  // Tr(a |A><B|) = sigma_1 <B|A>, and the cross-term weight times <B|A> is x e^{-i phi}
  const double x = std::exp(-std::norm(cat.w));
  const cplx u = x * std::polar(1.0, -cat.phi);
  const double n = cat.normalization();
  return {n * (comps.sigma_1 + comps.eps_1 - u * comps.sigma_1 - std::conj(u) * comps.eps_1),
          n * (comps.eps_2 + comps.sigma_2 - u * comps.eps_2 - std::conj(u) * comps.sigma_2)};
}

EntropyPoint linear_entropy(const CatState& cat, const CatComponents& comps) {
  EntropyPoint p;
  p.t = comps.t;
  p.x = std::exp(-std::norm(cat.w));
  p.y = std::abs(coherent_overlap(comps.eps_1, comps.sigma_1)) *
        std::abs(coherent_overlap(comps.sigma_2, comps.eps_2));
  const double x = p.x;
  const double y2 = std::max(p.y * p.y, kUnderflowGuard);
  if (cat.phi == 0.0) {
    p.delta = (y2 - 1.0) * (x * x - y2) / (2.0 * y2 * (1.0 - x) * (1.0 - x));
  } else {
    // Tr rho^2 = N^2 [2 Re (1-u)^2 + 2 |y^2 - u|^2 / y^2], u = x e^{-i phi}
    const double n = cat.normalization();
    const cplx u = x * std::polar(1.0, -cat.phi);
    const double purity = n * n * (2.0 * ((1.0 - u) * (1.0 - u)).real() + 2.0 * std::norm(y2 - u) / y2);
    p.delta = 1.0 - purity;
  }
  return p;
}

double coherence_preservation_residual(const CatState& cat, const CatComponents& comps) {
  const double x = std::exp(-std::norm(cat.w));
  return std::abs(x - coherent_overlap(comps.eps_1, comps.sigma_1) *
                          coherent_overlap(comps.sigma_2, comps.eps_2));
}

}  // namespace cavityduo
