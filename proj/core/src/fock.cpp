#include "cavityduo/fock.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cavityduo/error.hpp"

namespace cavityduo {

DensityMatrix::DensityMatrix(std::size_t dim_a, std::size_t dim_b)
    : dim_a_(dim_a), dim_b_(dim_b), data_(dim_a * dim_b * dim_a * dim_b) {}

cplx DensityMatrix::trace() const noexcept {
  cplx t = 0.0;
  const std::size_t d = dim();
  for (std::size_t i = 0; i < d; ++i) t += data_[i * d + i];
  return t;
}

DensityMatrix DensityMatrix::adjoint() const {
  DensityMatrix out(dim_a_, dim_b_);
  const std::size_t d = dim();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out.data_[j * d + i] = std::conj(data_[i * d + j]);
  return out;
}

DensityMatrix& DensityMatrix::operator+=(const DensityMatrix& other) {
  if (!same_shape(other)) throw std::invalid_argument("DensityMatrix shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

DensityMatrix& DensityMatrix::operator-=(const DensityMatrix& other) {
  if (!same_shape(other)) throw std::invalid_argument("DensityMatrix shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

DensityMatrix& DensityMatrix::operator*=(cplx s) noexcept {
  for (auto& x : data_) x *= s;
  return *this;
}

DensityMatrix DensityMatrix::outer(std::size_t dim_a, std::size_t dim_b, std::span<const cplx> u,
                                   std::span<const cplx> v) {
  DensityMatrix out(dim_a, dim_b);
  const std::size_t d = out.dim();
  if (u.size() != d || v.size() != d) throw std::invalid_argument("outer: vector length");
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out.data_[i * d + j] = u[i] * std::conj(v[j]);
  return out;
}

DensityMatrix operator-(DensityMatrix lhs, const DensityMatrix& rhs) { return lhs -= rhs; }
DensityMatrix operator+(DensityMatrix lhs, const DensityMatrix& rhs) { return lhs += rhs; }

std::vector<cplx> coherent_amplitudes(cplx v, std::size_t dim) {
  std::vector<cplx> amp(dim);
  if (dim == 0) return amp;
  amp[0] = std::exp(-0.5 * std::norm(v));
  for (std::size_t n = 1; n < dim; ++n) amp[n] = amp[n - 1] * v / std::sqrt(static_cast<double>(n));
  return amp;
}

double coherent_tail_mass(cplx v, std::size_t dim) {
  const double mean = std::norm(v);
  if (mean == 0.0) return dim == 0 ? 1.0 : 0.0;
  // Poisson(mean) mass on n >= dim, summed upward from dim
  double tail = 0.0;
  for (std::size_t n = dim;; ++n) {
    const double nd = static_cast<double>(n);
    const double term = std::exp(-mean + nd * std::log(mean) - std::lgamma(nd + 1.0));
    tail += term;
    if (nd > mean && term <= 1e-20 * tail) break;
    if (n > dim + 100000) break;
  }
  return std::min(tail, 1.0);
}

void require_cutoff(cplx v, std::size_t dim, double max_tail, const char* what) {
  const double tail = coherent_tail_mass(v, dim);
  if (tail > max_tail) {
    std::ostringstream os;
    os << what << ": coherent amplitude |v|=" << std::abs(v) << " leaves tail mass " << tail
       << " above cutoff " << dim << " (limit " << max_tail << ")";
    throw Error(ErrorKind::CutoffTooSmall, os.str());
  }
}

std::vector<cplx> product_coherent(cplx v_a, cplx v_b, std::size_t dim_a, std::size_t dim_b) {
  const auto ca = coherent_amplitudes(v_a, dim_a);
  const auto cb = coherent_amplitudes(v_b, dim_b);
  std::vector<cplx> out(dim_a * dim_b);
  for (std::size_t i = 0; i < dim_a; ++i)
    for (std::size_t j = 0; j < dim_b; ++j) out[i * dim_b + j] = ca[i] * cb[j];
  return out;
}

}  // namespace cavityduo

namespace cavityduo {

namespace {

// Basis index after shifting the selected mode by `delta`, or -1 when it
// leaves the truncated space. `factor` receives the matrix element.
struct Shift {
  long index;
  double factor;
};

Shift shift(const DensityMatrix& x, std::size_t i, Mode mode, int delta, bool sqrt_of_target) {
  const std::size_t na = i / x.dim_b();
  const std::size_t nb = i % x.dim_b();
  const long level = static_cast<long>(mode == Mode::A ? na : nb);
  const long dim = static_cast<long>(mode == Mode::A ? x.dim_a() : x.dim_b());
  const long target = level + delta;
  if (target < 0 || target >= dim) return {-1, 0.0};
  const long idx = mode == Mode::A ? static_cast<long>(x.index(static_cast<std::size_t>(target), nb))
                                   : static_cast<long>(x.index(na, static_cast<std::size_t>(target)));
  const double n = static_cast<double>(sqrt_of_target ? target : level);
  return {idx, std::sqrt(n)};
}

}  // namespace

DensityMatrix left_multiply(Ladder op, const DensityMatrix& x) {
  // (a X)[m][n] = sqrt(m_a + 1) X[m + e_a][n];  (a+ X)[m][n] = sqrt(m_a) X[m - e_a][n]
  DensityMatrix out(x.dim_a(), x.dim_b());
  const std::size_t d = x.dim();
  for (std::size_t m = 0; m < d; ++m) {
    const Shift s = shift(x, m, op.mode, op.raise ? -1 : +1, !op.raise);
    if (s.index < 0) continue;
    const auto src = static_cast<std::size_t>(s.index);
    for (std::size_t n = 0; n < d; ++n) out(m, n) = s.factor * x(src, n);
  }
  return out;
}

DensityMatrix right_multiply(const DensityMatrix& x, Ladder op) {
  // (X a)[m][n] = sqrt(n_a) X[m][n - e_a];  (X a+)[m][n] = sqrt(n_a + 1) X[m][n + e_a]
  DensityMatrix out(x.dim_a(), x.dim_b());
  const std::size_t d = x.dim();
  for (std::size_t n = 0; n < d; ++n) {
    const Shift s = shift(x, n, op.mode, op.raise ? +1 : -1, op.raise);
    if (s.index < 0) continue;
    const auto src = static_cast<std::size_t>(s.index);
    for (std::size_t m = 0; m < d; ++m) out(m, n) = s.factor * x(m, src);
  }
  return out;
}

}  // namespace cavityduo
