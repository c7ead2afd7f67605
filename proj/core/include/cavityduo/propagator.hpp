#pragma once

#include <array>
#include <complex>

#include "cavityduo/coefficients.hpp"
#include "cavityduo/fock.hpp"

namespace cavityduo {

/// Time-independent constants of the closed-form solution.
///
/// c = (k_bb - k_aa)/2 + i (Omega_bb - Omega_aa)/2,
/// r = sqrt(c^2 + (i Omega_ba + k_ba)(i Omega_ab + k_ab)) (principal branch),
/// R = k_m + i omega_m with the mean rate and mean shifted frequency.
struct PropagatorConstants {
  cplx c;
  cplx r;
  cplx R;
  double k_m = 0.0;
  double omega_m = 0.0;
};

/// Entries of the 2x2 transfer matrix [[f1, l1], [l2, f2]] at time t.
struct AuxFunctions {
  double t = 0.0;
  cplx f1{1.0}, f2{1.0}, l1{0.0}, l2{0.0};
  /// The same entries times e^{-Rt}, evaluated without forming cosh(rt) so
  /// they stay finite when f1.. overflow at late times.
  cplx decayed_f1{1.0}, decayed_f2{1.0}, decayed_l1{0.0}, decayed_l2{0.0};
};

/// Exponents of the ordered product
///   e^{h1 a.a+} e^{h2 b.b+} e^{z_l a.b+} e^{z b.a+} e^{n_l .a+b} e^{n b+a.}
///   e^{m2 b+b.} e^{p2 .b+b} e^{m1 a+a.} e^{p1 .a+a} e^{q a+b.} e^{q_l .b+a}
/// that equals exp(L t). The diagonal exponents are stored exponentiated
/// (exp_m1 = e^{m1}, ...), which avoids tracking a complex-log branch.
struct FactorizationExponents {
  double t = 0.0;
  cplx exp_m1{1.0}, exp_m2{1.0};
  cplx h1, h2;
  cplx z, z_l;
  cplx n, n_l;
  cplx q, q_l;
  cplx exp_p1{1.0}, exp_p2{1.0};
};

/// Couplings (i Omega_ab + k_ab) and (i Omega_ba + k_ba).
cplx coupling_ab(const EffectiveDetunings& dets, const LabCoefficients& coeffs);
cplx coupling_ba(const EffectiveDetunings& dets, const LabCoefficients& coeffs);

PropagatorConstants constants(const EffectiveDetunings& dets, const LabCoefficients& coeffs);

/// f1 = cosh(rt) + c sinh(rt)/r, f2 = cosh(rt) - c sinh(rt)/r,
/// l1 = -(i Omega_ab + k_ab) sinh(rt)/r, l2 = -(i Omega_ba + k_ba) sinh(rt)/r.
///
/// Only even functions of r appear, so the result does not depend on the sign
/// chosen for r.
AuxFunctions aux_functions(double t, const PropagatorConstants& pc, const EffectiveDetunings& dets,
                           const LabCoefficients& coeffs);

/// Throws FactorizationSingular when |f1(t)| < 1e-12.
FactorizationExponents factor_exponents(double t, const PropagatorConstants& pc,
                                        const AuxFunctions& aux);

/// e^{-Rt} [[f1, l1], [l2, f2]]: maps (v_a, v_b) at 0 to the amplitudes at t.
/// Finite for all t >= 0 when the rates are non-negative.
std::array<std::array<cplx, 2>, 2> amplitude_map(const PropagatorConstants& pc,
                                                 const AuxFunctions& aux);

/// Applies the ordered product of exponentials to rho on the truncated Fock
/// space. Every factor is a terminating power series there because the
/// ladder operators are nilpotent.
DensityMatrix apply_factorized(const FactorizationExponents& e, const DensityMatrix& rho);

}  // namespace cavityduo
