#include <benchmark/benchmark.h>

#include "cavityduo/lindblad.hpp"
#include "cavityduo/propagator.hpp"
#include "cavityduo/states.hpp"

using namespace cavityduo;

namespace {

oracle::LiouvillianSpec lossy_spec() {
  oracle::LiouvillianSpec spec;
  spec.params = {1.0, 1.0, 0.05};
  spec.coeffs.k_aa = 0.01;
  spec.coeffs.k_bb = 0.5;
  return spec;
}

void BM_Liouvillian(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const oracle::CompiledLiouvillian L = oracle::compile(lossy_spec());
  const DensityMatrix rho = oracle::build_coherent(1.0, 0.5, dim, dim, 1e-3);
  DensityMatrix out(dim, dim);
  const bool hermitian = state.range(1) != 0;
  for (auto _ : state) {
    oracle::apply_liouvillian(rho, L, out, hermitian);
    benchmark::DoNotOptimize(out.data().data());
  }
}
BENCHMARK(BM_Liouvillian)->ArgsProduct({{8, 15, 20}, {0, 1}});

void BM_CatEntropy(benchmark::State& state) {
  const auto spec = lossy_spec();
  const EffectiveDetunings dets = effective_detunings(spec.params, spec.coeffs);
  const PropagatorConstants pc = constants(dets, spec.coeffs);
  const CatState cat{1.0, 0.0};
  double t = 0.0;
  for (auto _ : state) {
    t += 1e-3;
    benchmark::DoNotOptimize(linear_entropy(cat, cat_components(cat, pc, aux_functions(t, pc, dets, spec.coeffs))));
  }
}
BENCHMARK(BM_CatEntropy);

void BM_Factorized(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto spec = lossy_spec();
  const EffectiveDetunings dets = effective_detunings(spec.params, spec.coeffs);
  const PropagatorConstants pc = constants(dets, spec.coeffs);
  const FactorizationExponents e = factor_exponents(2.0, pc, aux_functions(2.0, pc, dets, spec.coeffs));
  const DensityMatrix rho = oracle::build_coherent(1.0, 0.5, dim, dim, 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(apply_factorized(e, rho));
}
BENCHMARK(BM_Factorized)->Arg(8)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
