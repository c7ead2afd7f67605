#include <random>

#include "cavityduo/error.hpp"
#include "cavityduo/lindblad.hpp"
#include "cavityduo/states.hpp"
#include "doctest.h"
#include "reference.hpp"

using namespace cavityduo;
using doctest::Approx;

namespace {

struct Model {
  ModelParams params;
  LabCoefficients coeffs;
  EffectiveDetunings dets;
  PropagatorConstants pc;

  Model(const ModelParams& p, const LabCoefficients& k)
      : params(p), coeffs(k), dets(effective_detunings(p, k)), pc(constants(dets, k)) {}

  AuxFunctions aux(double t) const { return aux_functions(t, pc, dets, coeffs); }
};

LabCoefficients lossy() {
  LabCoefficients k;
  k.k_aa = 0.01;
  k.k_bb = 0.5;
  return k;
}

LabCoefficients dfs(double k) {
  LabCoefficients c;
  c.k_aa = c.k_ab = c.k_ba = c.k_bb = k;
  return c;
}

}  // namespace

TEST_CASE("coherent overlap") {
  const cplx w(0.7, -0.4);
  CHECK(std::abs(coherent_overlap(0.0, w) - std::exp(-0.5 * std::norm(w))) <= 1e-16);
  CHECK(std::abs(coherent_overlap(w, w) - 1.0) <= 1e-15);
  CHECK(std::abs(coherent_overlap(1.0, cplx(0, 1)) - ref::overlap_series(1.0, cplx(0, 1))) <= 1e-15);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const cplx a(u(rng), u(rng)), b(u(rng), u(rng));
    CHECK(std::abs(coherent_overlap(a, b) - ref::overlap_series(a, b)) <= 1e-14);
  }
}

TEST_CASE("coherent pair evolution") {
  const CoherentPair init{cplx(1.0, 0.2), cplx(0.5, -0.1)};
  const Model m({1.0, 1.3, 0.0}, [] {
    LabCoefficients k;
    k.k_aa = 0.1;
    k.k_bb = 0.3;
    return k;
  }());
  const CoherentPair at0 = evolve_coherent_pair(init, m.pc, m.aux(0.0));
  CHECK(at0.v_a == init.v_a);
  CHECK(at0.v_b == init.v_b);
  for (double t : {0.5, 4.0}) {
    const CoherentPair v = evolve_coherent_pair(init, m.pc, m.aux(t));
    CHECK(std::abs(v.v_a - init.v_a * std::exp(-cplx(0.1, 1.0) * t)) <= 1e-14);
    CHECK(std::abs(v.v_b - init.v_b * std::exp(-cplx(0.3, 1.3) * t)) <= 1e-14);
  }
}

TEST_CASE("coherent pair matches the oracle means and stays pure") {
  const Model m({1.0, 1.0, 0.05}, lossy());
  const CoherentPair init{0.5, 0.3};
  const std::size_t dim = 10;
  oracle::EvolveOptions opt;
  opt.t_max = 5.0;
  opt.dt = 1e-3;
  opt.sample_every = 1000;
  double worst = 0.0, min_purity = 1.0;
  oracle::evolve(oracle::build_coherent(init.v_a, init.v_b, dim, dim), {m.params, m.coeffs}, opt,
                 [&](const DensityMatrix&, const oracle::Diagnostics& d) {
                   const CoherentPair v = evolve_coherent_pair(init, m.pc, m.aux(d.t));
                   worst = std::max({worst, std::abs(v.v_a - d.mean_a), std::abs(v.v_b - d.mean_b)});
                   min_purity = std::min(min_purity, d.purity);
                 });
  CHECK(worst <= 1e-6);
  CHECK(min_purity >= 1.0 - 1e-6);
}

TEST_CASE("weak-coupling rates") {
  WeakCouplingRates r = weak_coupling_rates(0.01, 0.5, 0.0);
  CHECK(r.k_plus == 0.01);
  CHECK(r.k_minus == 0.5);
  r = weak_coupling_rates(0.01, 0.5, 0.05);
  CHECK(r.k_plus == Approx(0.0151020408).epsilon(1e-9));
  CHECK(r.k_minus == Approx(0.4948979592).epsilon(1e-9));
  CHECK(r.k_plus + r.k_minus == Approx(0.51).epsilon(1e-15));
  CHECK(r.validity_ratio == Approx(0.05 / 0.49));

  // exact decay rates are Re(R -+ r); the difference is O(g^4 / dk^3)
  const Model m({1.0, 1.0, 0.05}, lossy());
  const double dk = 0.49, g = 0.05;
  CHECK(std::abs(r.k_plus - (m.pc.R - m.pc.r).real()) <= 2.0 * std::pow(g, 4) / std::pow(dk, 3));
  CHECK(std::abs(r.k_minus - (m.pc.R + m.pc.r).real()) <= 2.0 * std::pow(g, 4) / std::pow(dk, 3));

  for (auto [ka, kb, gg] : {std::tuple{0.5, 0.01, 0.0}, {0.1, 0.1, 0.0}, {0.01, 0.5, 0.245}}) {
    try {
      weak_coupling_rates(ka, kb, gg);
      FAIL("expected WeakCouplingInvalid");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::WeakCouplingInvalid);
    }
  }
}

TEST_CASE("weak-coupling amplitudes against the exact propagator") {
  // Error constant C in |v_weak - v_exact| <= C (g/dk)^2 max|v(0)|, measured over t in [0, 10/k_bb].
  const double k_aa = 0.01, k_bb = 0.5;
  const CoherentPair init{1.0, 0.5};
  const CoherentPair at0 = evolve_coherent_weak(init, 0.0, 1.0, k_aa, k_bb, 0.05);
  CHECK(at0.v_a == init.v_a);
  CHECK(at0.v_b == init.v_b);
  const CoherentPair free = evolve_coherent_weak(init, 2.0, 1.0, k_aa, k_bb, 0.0);
  CHECK(std::abs(free.v_a - std::exp(-cplx(k_aa, 1.0) * 2.0)) <= 1e-15);
  CHECK(std::abs(free.v_b - 0.5 * std::exp(-cplx(k_bb, 1.0) * 2.0)) <= 1e-15);

  for (double g : {0.01, 0.03, 0.05, 0.08}) {
    LabCoefficients k = lossy();
    const Model m({1.0, 1.0, g}, k);
    const double ratio = g / (k_bb - k_aa);
    double worst = 0.0;
    for (double t = 0.0; t <= 10.0 / k_bb; t += 0.05) {
      const CoherentPair w = evolve_coherent_weak(init, t, 1.0, k_aa, k_bb, g);
      const CoherentPair e = evolve_coherent_pair(init, m.pc, m.aux(t));
      worst = std::max({worst, std::abs(w.v_a - e.v_a), std::abs(w.v_b - e.v_b)});
    }
    CHECK(worst <= 10.0 * ratio * ratio);
  }
}

TEST_CASE("cat components") {
  const CatState cat{cplx(1.0, 0.5), 0.0};
  const Model m({1.0, 1.3, 0.0}, [] {
    LabCoefficients k;
    k.k_aa = 0.1;
    k.k_bb = 0.3;
    return k;
  }());
  const CatComponents c0 = cat_components(cat, m.pc, m.aux(0.0));
  CHECK(c0.sigma_1 == cat.w);
  CHECK(c0.sigma_2 == cat.w);
  CHECK(c0.eps_1 == cplx(0.0));
  CHECK(c0.eps_2 == cplx(0.0));
  const CatComponents c = cat_components(cat, m.pc, m.aux(2.0));
  CHECK(c.eps_1 == cplx(0.0));
  CHECK(c.eps_2 == cplx(0.0));
  CHECK(std::abs(c.sigma_1 - cat.w * std::exp(-cplx(0.1, 1.0) * 2.0)) <= 1e-15);
  CHECK(std::abs(c.sigma_2 - cat.w * std::exp(-cplx(0.3, 1.3) * 2.0)) <= 1e-15);
}

TEST_CASE("antisymmetric branch amplitude is undamped in the DFS") {
  const CatState cat{1.0, 0.0};
  const Model m({1.0, 1.0, 0.0}, dfs(0.1));
  for (double t : {0.0, 1.0, 10.0, 40.0}) {
    const CatComponents c = cat_components(cat, m.pc, m.aux(t));
    CHECK(std::abs(c.sigma_1 - c.eps_1) == Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(c.sigma_2 - c.eps_2) == Approx(1.0).epsilon(1e-12));
  }
  // and the oracle agrees: <a - b> keeps its modulus
  const std::size_t dim = 10;
  oracle::EvolveOptions opt;
  opt.t_max = 10.0;
  opt.dt = 5e-3;
  opt.sample_every = 400;
  const DensityMatrix rho0 = oracle::build_coherent(0.5, -0.5, dim, dim);
  oracle::evolve(rho0, {m.params, m.coeffs}, opt, [&](const DensityMatrix&, const oracle::Diagnostics& d) {
    CHECK(std::abs(d.mean_a - d.mean_b) == Approx(1.0).epsilon(1e-8));
  });
}

TEST_CASE("cat density matrix at t = 0 is the initial cat") {
  const Model m({1.0, 1.0, 0.05}, lossy());
  for (double phi : {0.0, 1.1}) {
    const CatState cat{cplx(0.9, 0.3), phi};
    const CatDensity cd = cat_density_matrix(cat, cat_components(cat, m.pc, m.aux(0.0)), 14, 14);
    const DensityMatrix direct = oracle::build_cat(cat.w, phi, 14, 14);
    CHECK(oracle::trace_distance(cd.rho, direct) <= 1e-10);
    CHECK(cd.renormalization <= 1e-9);
    CHECK(oracle::diagnostics(cd.rho).purity == Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("degenerate cat is rejected") {
  const CatState cat{0.0, 0.0};
  try {
    cat.validate();
    FAIL("expected DegenerateCat");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateCat);
  }
}

TEST_CASE("cat density matrix matches the oracle") {
  const Model m({1.0, 1.0, 0.05}, lossy());
  const CatState cat{0.6, 0.0};
  const std::size_t dim = 10;
  oracle::EvolveOptions opt;
  opt.t_max = 1.0;
  opt.dt = 1e-3;
  opt.sample_every = 500;
  oracle::evolve(oracle::build_cat(cat.w, cat.phi, dim, dim), {m.params, m.coeffs}, opt,
                 [&](const DensityMatrix& rho, const oracle::Diagnostics& d) {
                   const CatComponents c = cat_components(cat, m.pc, m.aux(d.t));
                   const CatDensity cd = cat_density_matrix(cat, c, dim, dim);
                   CHECK(oracle::trace_distance(rho, cd.rho) <= 1e-6);
                   CHECK(std::abs(linear_entropy(cat, c).delta - (1.0 - d.purity)) <= 1e-6);
                 });
}

TEST_CASE("linear entropy limits") {
  const Model m({1.0, 1.0, 0.05}, lossy());
  const CatState cat{1.2, 0.0};
  const EntropyPoint p0 = linear_entropy(cat, cat_components(cat, m.pc, m.aux(0.0)));
  CHECK(p0.x == std::exp(-1.44));
  CHECK(p0.y == Approx(p0.x).epsilon(1e-14));
  CHECK(std::abs(p0.delta) <= 1e-14);
  const EntropyPoint late = linear_entropy(cat, cat_components(cat, m.pc, m.aux(5000.0)));
  CHECK(late.y == Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(late.delta) <= 1e-10);
  for (double t = 0.0; t < 400.0; t += 3.7) {
    const EntropyPoint p = linear_entropy(cat, cat_components(cat, m.pc, m.aux(t)));
    CHECK(p.delta >= -1e-15);
    CHECK(p.delta <= 0.5);
  }
}

TEST_CASE("linear entropy equals 1 - Tr rho^2 of the projected state for any phase") {
  const Model m({1.0, 1.1, 0.1}, [] {
    LabCoefficients k;
    k.k_aa = 0.2;
    k.k_bb = 0.3;
    k.k_ab = 0.05;
    k.k_ba = 0.05;
    k.d_aa = 0.02;
    return k;
  }());
  for (double phi : {0.0, M_PI / 3, M_PI, 4.0}) {
    const CatState cat{cplx(0.8, 0.4), phi};
    for (double t : {0.3, 1.0, 4.0}) {
      const CatComponents c = cat_components(cat, m.pc, m.aux(t));
      const CatDensity cd = cat_density_matrix(cat, c, 14, 14);
      const ref::Mat rho = ref::to_dense(cd.rho);
      const double purity = (rho * rho).trace().real();
      CHECK(std::abs(linear_entropy(cat, c).delta - (1.0 - purity)) <= 1e-9);
      const CoherentPair means = cat_mean_amplitudes(cat, c);
      const oracle::Diagnostics d = oracle::diagnostics(cd.rho, false);
      CHECK(std::abs(means.v_a - d.mean_a) <= 1e-9);
      CHECK(std::abs(means.v_b - d.mean_b) <= 1e-9);
    }
  }
}

TEST_CASE("decoherence-free parameters keep the cat pure") {
  const Model m({1.0, 1.0, 0.0}, dfs(0.1));
  const CatState cat{1.0, 0.0};
  for (double t = 0.0; t <= 50.0; t += 0.5) {
    const CatComponents c = cat_components(cat, m.pc, m.aux(t));
    CHECK(std::abs(linear_entropy(cat, c).delta) <= 1e-10);
    CHECK(coherence_preservation_residual(cat, c) <= 1e-10);
  }
}

TEST_CASE("lossy parameters break coherence preservation") {
  const Model m({1.0, 1.0, 0.05}, lossy());
  const CatState cat{1.0, 0.0};
  CHECK(coherence_preservation_residual(cat, cat_components(cat, m.pc, m.aux(0.0))) <= 1e-15);
  for (double t : {0.5, 2.0, 8.0}) {
    const CatComponents c = cat_components(cat, m.pc, m.aux(t));
    CHECK(coherence_preservation_residual(cat, c) > 1e-4);
    CHECK(linear_entropy(cat, c).delta > 1e-4);
  }
}
