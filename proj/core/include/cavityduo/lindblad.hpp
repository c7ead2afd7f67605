#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "cavityduo/coefficients.hpp"
#include "cavityduo/fock.hpp"

namespace cavityduo {

/// Brute-force reference dynamics on the truncated two-mode Fock space.
namespace oracle {

struct LiouvillianSpec {
  ModelParams params;
  LabCoefficients coeffs;
};

/// Operator placed on one side of the superoperator slot.
enum class Factor { Id, A, B, Adag, Bdag, AdagA, AdagB, BdagA, BdagB };

/// coef * (left) . (right): the slot is where rho is inserted.
struct SuperTerm {
  cplx coef;
  Factor left;
  Factor right;
};

/// Every displayed term of L_A + L_B + L_int, in the order written.
std::vector<SuperTerm> master_equation_terms(const LiouvillianSpec& spec);

/// Collected form of a term list:
///   L rho = sum_ij jump[i][j] a_i rho a_j^+  + sum_ij left[i][j] a_i^+ a_j rho
///         + sum_ij right[i][j] rho a_i^+ a_j,    with a_0 = a, a_1 = b.
struct CompiledLiouvillian {
  std::array<std::array<cplx, 2>, 2> jump{};
  std::array<std::array<cplx, 2>, 2> left{};
  std::array<std::array<cplx, 2>, 2> right{};

  /// Largest coefficient magnitude, used for the RK4 step bound.
  double rate_scale() const;
};

/// Throws std::invalid_argument for term shapes outside the quadratic algebra.
CompiledLiouvillian compile(const std::vector<SuperTerm>& terms);
CompiledLiouvillian compile(const LiouvillianSpec& spec);

/// d rho / dt; linear in rho, valid for any (not necessarily Hermitian) operator.
DensityMatrix apply_liouvillian(const DensityMatrix& rho, const LiouvillianSpec& spec);
DensityMatrix apply_liouvillian(const DensityMatrix& rho, const CompiledLiouvillian& L);

/// Writes L(rho) into out, which must have rho's shape. When `hermitian` is
/// set, only the upper triangle is computed and mirrored.
void apply_liouvillian(const DensityMatrix& rho, const CompiledLiouvillian& L, DensityMatrix& out,
                       bool hermitian);

struct Diagnostics {
  double t = 0.0;
  cplx trace;
  double herm_residual = 0.0;
  double min_eig = 0.0;
  double purity = 0.0;
  cplx mean_a;
  cplx mean_b;
  double n_total = 0.0;
};

/// Hermiticity residual, spectrum minimum, purity and first moments.
/// The minimum eigenvalue is skipped (left at 0) when with_min_eig is false.
Diagnostics diagnostics(const DensityMatrix& rho, bool with_min_eig = true);

double min_eigenvalue(const DensityMatrix& rho);
/// (1/2) sum |eig(rho - sigma)| of the Hermitian part of the difference.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Throws CutoffTooSmall when a mode's coherent tail above the cutoff exceeds max_tail.
DensityMatrix build_coherent(cplx v_a, cplx v_b, std::size_t dim_a, std::size_t dim_b,
                             double max_tail = 1e-10);
/// Projector onto N^{1/2}(|w,0> - e^{i phi}|0,w>); throws DegenerateCat for w = 0.
DensityMatrix build_cat(cplx w, double phi, std::size_t dim_a, std::size_t dim_b,
                        double max_tail = 1e-10);

struct EvolveOptions {
  double t_max = 0.0;
  double dt = 1e-3;
  std::size_t sample_every = 1;
  /// Skip the dt <= 0.1 / (rate_scale * max(dim_a, dim_b)) check.
  bool allow_large_step = false;
  /// Compute the spectrum minimum at every sample.
  bool track_positivity = true;
  double positivity_warn = -1e-7;
  double positivity_fail = -1e-4;
};

struct PositivityEvent {
  double t = 0.0;
  double min_eig = 0.0;
};

struct Evolution {
  std::vector<Diagnostics> samples;
  std::vector<PositivityEvent> warnings;
  DensityMatrix final_state;
};

/// Called at every sampled time with the current state.
using SampleObserver = std::function<void(const DensityMatrix&, const Diagnostics&)>;

/// Number of RK4 steps covering [0, t_max].
std::size_t step_count(double t_max, double dt);
double max_stable_step(const CompiledLiouvillian& L, std::size_t dim_a, std::size_t dim_b);

/// Fixed-step classical RK4. Samples at steps 0, sample_every, 2*sample_every, ...
/// Throws StepTooLarge and PositivityViolation.
Evolution evolve(const DensityMatrix& rho0, const LiouvillianSpec& spec,
                 const EvolveOptions& options, const SampleObserver& observer = {});

/// CSV `row,col,re,im` of every entry.
void write_density_csv(std::ostream& out, const DensityMatrix& rho);

}  // namespace oracle
}  // namespace cavityduo
