#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cavityduo {

using cplx = std::complex<double>;

/// Operator on the truncated two-mode Fock space.
///
/// Basis index of |n_a, n_b> is n_a * dim_b + n_b; entries are stored
/// row-major, entry (i, j) = <i| rho |j>.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(std::size_t dim_a, std::size_t dim_b);

  std::size_t dim_a() const noexcept { return dim_a_; }
  std::size_t dim_b() const noexcept { return dim_b_; }
  /// Hilbert-space dimension dim_a * dim_b.
  std::size_t dim() const noexcept { return dim_a_ * dim_b_; }

  std::size_t index(std::size_t n_a, std::size_t n_b) const noexcept { return n_a * dim_b_ + n_b; }

  cplx& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * dim() + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * dim() + j];
  }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  bool same_shape(const DensityMatrix& other) const noexcept {
    return dim_a_ == other.dim_a_ && dim_b_ == other.dim_b_;
  }

  cplx trace() const noexcept;
  DensityMatrix adjoint() const;

  DensityMatrix& operator+=(const DensityMatrix& other);
  DensityMatrix& operator-=(const DensityMatrix& other);
  DensityMatrix& operator*=(cplx s) noexcept;

  /// Outer product |u><v| for vectors of length dim_a * dim_b.
  static DensityMatrix outer(std::size_t dim_a, std::size_t dim_b, std::span<const cplx> u,
                             std::span<const cplx> v);

 private:
  std::size_t dim_a_ = 0;
  std::size_t dim_b_ = 0;
  std::vector<cplx> data_;
};

DensityMatrix operator-(DensityMatrix lhs, const DensityMatrix& rhs);
DensityMatrix operator+(DensityMatrix lhs, const DensityMatrix& rhs);

/// Fock amplitudes e^{-|v|^2/2} v^n / sqrt(n!) for n < dim (not renormalized).
std::vector<cplx> coherent_amplitudes(cplx v, std::size_t dim);

/// Probability mass of a coherent state |v> on levels >= dim.
double coherent_tail_mass(cplx v, std::size_t dim);

/// Throws CutoffTooSmall when the coherent tail beyond dim exceeds max_tail.
void require_cutoff(cplx v, std::size_t dim, double max_tail, const char* what);

/// |v_a> (x) |v_b> in the truncated product basis.
std::vector<cplx> product_coherent(cplx v_a, cplx v_b, std::size_t dim_a, std::size_t dim_b);

enum class Mode { A, B };

/// Single ladder operator on one mode of the truncated space.
struct Ladder {
  Mode mode;
  bool raise;  // true: creation operator
};

inline constexpr Ladder kA{Mode::A, false};
inline constexpr Ladder kAdag{Mode::A, true};
inline constexpr Ladder kB{Mode::B, false};
inline constexpr Ladder kBdag{Mode::B, true};

/// op * X
DensityMatrix left_multiply(Ladder op, const DensityMatrix& x);
/// X * op
DensityMatrix right_multiply(const DensityMatrix& x, Ladder op);

}  // namespace cavityduo
