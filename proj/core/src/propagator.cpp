#include "cavityduo/propagator.hpp"

#include <cmath>
#include <sstream>

#include "cavityduo/error.hpp"

namespace cavityduo {

namespace {

constexpr double kSeriesThreshold = 1e-4;
constexpr double kSingularF1 = 1e-12;

// cosh(rt) and sinh(rt)/r written as functions of (rt)^2.
struct EvenParts {
  cplx cosh_rt;
  cplx sinhc;  // sinh(rt)/r
};

EvenParts even_parts(cplx r, double t) {
  const cplx rt = r * t;
  if (std::abs(rt) < kSeriesThreshold) {
    const cplx z = rt * rt;
    return {1.0 + z * (0.5 + z / 24.0), t * (1.0 + z * (1.0 / 6.0 + z / 120.0))};
  }
  return {std::cosh(rt), std::sinh(rt) / r};
}

// Repeatedly applies `step` to accumulate sum_k coef^k/k! step^k(x). Stops once
// the term vanishes identically (nilpotent ladder products) or is negligible.
template <class Step>
DensityMatrix exp_series(cplx coef, const DensityMatrix& x, Step step) {
  DensityMatrix result = x;
  if (coef == cplx(0.0)) return result;
  DensityMatrix term = x;
  const std::size_t max_order = 2 * (x.dim_a() + x.dim_b());
  for (std::size_t k = 1; k <= max_order; ++k) {
    term = step(term);
    term *= coef / static_cast<double>(k);
    double mag = 0.0;
    for (const auto& v : term.data()) mag = std::max(mag, std::abs(v));
    if (mag == 0.0) break;
    result += term;
  }
  return result;
}

// Multiplies row i by w^{n(i)} (left) or column j by w^{n(j)} (right) for the
// number operator of `mode`.
DensityMatrix scale_by_number(const DensityMatrix& x, Mode mode, cplx w, bool left) {
  DensityMatrix out = x;
  const std::size_t d = x.dim();
  const std::size_t levels = mode == Mode::A ? x.dim_a() : x.dim_b();
  std::vector<cplx> powers(levels, 1.0);
  for (std::size_t n = 1; n < levels; ++n) powers[n] = powers[n - 1] * w;
  auto level = [&](std::size_t i) { return mode == Mode::A ? i / x.dim_b() : i % x.dim_b(); };
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out(i, j) *= powers[level(left ? i : j)];
  return out;
}

}  // namespace

cplx coupling_ab(const EffectiveDetunings& dets, const LabCoefficients& coeffs) {
  return {coeffs.k_ab, dets.Omega_ab};
}

cplx coupling_ba(const EffectiveDetunings& dets, const LabCoefficients& coeffs) {
  return {coeffs.k_ba, dets.Omega_ba};
}

PropagatorConstants constants(const EffectiveDetunings& dets, const LabCoefficients& coeffs) {
  PropagatorConstants pc;
  pc.c = cplx(0.5 * (coeffs.k_bb - coeffs.k_aa), 0.5 * (dets.Omega_bb - dets.Omega_aa));
  pc.r = std::sqrt(pc.c * pc.c + coupling_ba(dets, coeffs) * coupling_ab(dets, coeffs));
  pc.k_m = 0.5 * (coeffs.k_aa + coeffs.k_bb);
  pc.omega_m = 0.5 * (dets.Omega_aa + dets.Omega_bb);
  pc.R = cplx(pc.k_m, pc.omega_m);
  return pc;
}

AuxFunctions aux_functions(double t, const PropagatorConstants& pc, const EffectiveDetunings& dets,
                           const LabCoefficients& coeffs) {
  const EvenParts ep = even_parts(pc.r, t);
  AuxFunctions aux;
  aux.t = t;
  aux.f1 = ep.cosh_rt + pc.c * ep.sinhc;
  aux.f2 = ep.cosh_rt - pc.c * ep.sinhc;
  aux.l1 = -coupling_ab(dets, coeffs) * ep.sinhc;
  aux.l2 = -coupling_ba(dets, coeffs) * ep.sinhc;

  // e^{-Rt} cosh(rt) and e^{-Rt} sinh(rt)/r. Away from r t ~ 0 they are built
  // from e^{(+-r - R)t} directly, since cosh(rt) alone overflows near |Re(rt)| ~ 710.
  cplx cosh_d, sinhc_d;
  if (std::abs(pc.r * t) < 1.0) {
    const cplx decay = std::exp(-pc.R * t);
    cosh_d = decay * ep.cosh_rt;
    sinhc_d = decay * ep.sinhc;
  } else {
    const cplx up = std::exp((pc.r - pc.R) * t);
    const cplx down = std::exp((-pc.r - pc.R) * t);
    cosh_d = 0.5 * (up + down);
    sinhc_d = (up - down) / (2.0 * pc.r);
  }
  aux.decayed_f1 = cosh_d + pc.c * sinhc_d;
  aux.decayed_f2 = cosh_d - pc.c * sinhc_d;
  aux.decayed_l1 = -coupling_ab(dets, coeffs) * sinhc_d;
  aux.decayed_l2 = -coupling_ba(dets, coeffs) * sinhc_d;
  return aux;
}

FactorizationExponents factor_exponents(double t, const PropagatorConstants& pc,
                                        const AuxFunctions& aux) {
  if (std::abs(aux.f1) < kSingularF1) {
    std::ostringstream os;
    os << "|f1(t)| = " << std::abs(aux.f1) << " at t = " << t
       << "; the ordered factorization is undefined at this time";
    throw Error(ErrorKind::FactorizationSingular, os.str());
  }
  FactorizationExponents e;
  e.t = t;
  e.n = aux.l2 / aux.f1;
  e.q = aux.l1 / aux.f1;
  e.exp_m1 = aux.decayed_f1;
  e.exp_m2 = std::exp(-2.0 * pc.R * t) / e.exp_m1;
  const double growth = std::exp(2.0 * pc.k_m * t);
  e.h1 = (std::norm(aux.f2) + std::norm(aux.l2)) * growth - 1.0;
  e.h2 = (std::norm(aux.f1) + std::norm(aux.l1)) * growth - 1.0;
  e.z = (-aux.l1 * std::conj(aux.f2) - std::conj(aux.l2) * aux.f1) * growth;
  e.z_l = std::conj(e.z);
  e.n_l = std::conj(e.n);
  e.q_l = std::conj(e.q);
  e.exp_p1 = std::conj(e.exp_m1);
  e.exp_p2 = std::conj(e.exp_m2);
  return e;
}

std::array<std::array<cplx, 2>, 2> amplitude_map(const PropagatorConstants& /*pc*/,
                                                 const AuxFunctions& aux) {
  return {{{aux.decayed_f1, aux.decayed_l1}, {aux.decayed_l2, aux.decayed_f2}}};
}

DensityMatrix apply_factorized(const FactorizationExponents& e, const DensityMatrix& rho) {
  // rightmost factor acts first
  DensityMatrix x = exp_series(e.q_l, rho, [](const DensityMatrix& y) {
    return right_multiply(right_multiply(y, kBdag), kA);
  });
  x = exp_series(e.q, x, [](const DensityMatrix& y) {
    return left_multiply(kAdag, left_multiply(kB, y));
  });
  x = scale_by_number(x, Mode::A, e.exp_p1, false);
  x = scale_by_number(x, Mode::A, e.exp_m1, true);
  x = scale_by_number(x, Mode::B, e.exp_p2, false);
  x = scale_by_number(x, Mode::B, e.exp_m2, true);
  x = exp_series(e.n, x, [](const DensityMatrix& y) {
    return left_multiply(kBdag, left_multiply(kA, y));
  });
  x = exp_series(e.n_l, x, [](const DensityMatrix& y) {
    return right_multiply(right_multiply(y, kAdag), kB);
  });
  x = exp_series(e.z, x, [](const DensityMatrix& y) {
    return right_multiply(left_multiply(kB, y), kAdag);
  });
  x = exp_series(e.z_l, x, [](const DensityMatrix& y) {
    return right_multiply(left_multiply(kA, y), kBdag);
  });
  x = exp_series(e.h2, x, [](const DensityMatrix& y) {
    return right_multiply(left_multiply(kB, y), kBdag);
  });
  x = exp_series(e.h1, x, [](const DensityMatrix& y) {
    return right_multiply(left_multiply(kA, y), kAdag);
  });
  return x;
}

}  // namespace cavityduo
