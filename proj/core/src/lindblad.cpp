#include "cavityduo/lindblad.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cavityduo/error.hpp"

namespace cavityduo::oracle {

namespace {

constexpr cplx kI{0.0, 1.0};

// Neighbour tables of the basis: index of the shifted state (or -1) and the
// ladder matrix element that goes with it.
struct Neighbours {
  std::vector<long> up_a, up_b;      // m + e_a, m + e_b
  std::vector<double> up_a_f, up_b_f;  // sqrt(m_a + 1), sqrt(m_b + 1)
  std::vector<long> ab;              // m - e_a + e_b
  std::vector<double> ab_f;          // sqrt(m_a) sqrt(m_b + 1)
  std::vector<long> ba;              // m - e_b + e_a
  std::vector<double> ba_f;          // sqrt(m_b) sqrt(m_a + 1)
  std::vector<double> na, nb;
};

Neighbours neighbours(std::size_t dim_a, std::size_t dim_b) {
  const std::size_t d = dim_a * dim_b;
  Neighbours nb;
  nb.up_a.assign(d, -1);
  nb.up_b.assign(d, -1);
  nb.ab.assign(d, -1);
  nb.ba.assign(d, -1);
  nb.up_a_f.assign(d, 0.0);
  nb.up_b_f.assign(d, 0.0);
  nb.ab_f.assign(d, 0.0);
  nb.ba_f.assign(d, 0.0);
  nb.na.assign(d, 0.0);
  nb.nb.assign(d, 0.0);
  for (std::size_t a = 0; a < dim_a; ++a) {
    for (std::size_t b = 0; b < dim_b; ++b) {
      const std::size_t i = a * dim_b + b;
      nb.na[i] = static_cast<double>(a);
      nb.nb[i] = static_cast<double>(b);
      if (a + 1 < dim_a) {
        nb.up_a[i] = static_cast<long>((a + 1) * dim_b + b);
        nb.up_a_f[i] = std::sqrt(a + 1.0);
      }
      if (b + 1 < dim_b) {
        nb.up_b[i] = static_cast<long>(a * dim_b + b + 1);
        nb.up_b_f[i] = std::sqrt(b + 1.0);
      }
      if (a >= 1 && b + 1 < dim_b) {
        nb.ab[i] = static_cast<long>((a - 1) * dim_b + b + 1);
        nb.ab_f[i] = std::sqrt(static_cast<double>(a)) * std::sqrt(b + 1.0);
      }
      if (b >= 1 && a + 1 < dim_a) {
        nb.ba[i] = static_cast<long>((a + 1) * dim_b + b - 1);
        nb.ba_f[i] = std::sqrt(static_cast<double>(b)) * std::sqrt(a + 1.0);
      }
    }
  }
  return nb;
}

// Mode index (0 = a, 1 = b) of a bare ladder factor, -1 otherwise.
int lowering_mode(Factor f) {
  switch (f) {
    case Factor::A: return 0;
    case Factor::B: return 1;
    default: return -1;
  }
}

int raising_mode(Factor f) {
  switch (f) {
    case Factor::Adag: return 0;
    case Factor::Bdag: return 1;
    default: return -1;
  }
}

// (i, j) of a quadratic a_i^+ a_j factor, or (-1, -1).
std::pair<int, int> quadratic(Factor f) {
  switch (f) {
    case Factor::AdagA: return {0, 0};
    case Factor::AdagB: return {0, 1};
    case Factor::BdagA: return {1, 0};
    case Factor::BdagB: return {1, 1};
    default: return {-1, -1};
  }
}

Eigen::MatrixXcd hermitian_part(const DensityMatrix& rho) {
  const auto d = static_cast<Eigen::Index>(rho.dim());
  Eigen::MatrixXcd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      m(i, j) = 0.5 * (rho(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) +
                       std::conj(rho(static_cast<std::size_t>(j), static_cast<std::size_t>(i))));
  return m;
}

double herm_residual(const DensityMatrix& rho) {
  double res = 0.0;
  const std::size_t d = rho.dim();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) res = std::max(res, std::abs(rho(i, j) - std::conj(rho(j, i))));
  return res;
}

// y <- x + s * k
void axpy(DensityMatrix& y, const DensityMatrix& x, double s, const DensityMatrix& k) {
  auto yd = y.data();
  auto xd = x.data();
  auto kd = k.data();
  for (std::size_t i = 0; i < yd.size(); ++i) yd[i] = xd[i] + s * kd[i];
}

bool preserves_hermiticity(const CompiledLiouvillian& L) {
  constexpr double tol = 1e-14;
  auto close = [](cplx x, cplx y) { return std::abs(x - y) <= tol * (1.0 + std::abs(x)); };
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (!close(L.jump[i][j], std::conj(L.jump[j][i])) ||
          !close(L.right[i][j], std::conj(L.left[j][i])))
        return false;
  return true;
}

}  // namespace

std::vector<SuperTerm> master_equation_terms(const LiouvillianSpec& spec) {
  const auto& c = spec.coeffs;
  const auto& p = spec.params;
  using F = Factor;
  std::vector<SuperTerm> t;
  auto add = [&t](cplx coef, F l, F r) { t.push_back({coef, l, r}); };

  // L_A: k_aa (2 a.a+ - .a+a - a+a.) + i (Delta_aa - omega_a) [a+a, .]
  add(2.0 * c.k_aa, F::A, F::Adag);
  add(-c.k_aa, F::Id, F::AdagA);
  add(-c.k_aa, F::AdagA, F::Id);
  add(kI * (c.d_aa - p.omega_a), F::AdagA, F::Id);
  add(-kI * (c.d_aa - p.omega_a), F::Id, F::AdagA);

  // L_B
  add(2.0 * c.k_bb, F::B, F::Bdag);
  add(-c.k_bb, F::Id, F::BdagB);
  add(-c.k_bb, F::BdagB, F::Id);
  add(kI * (c.d_bb - p.omega_b), F::BdagB, F::Id);
  add(-kI * (c.d_bb - p.omega_b), F::Id, F::BdagB);

  // L_int, k_ab line: a.b+ + b.a+ - .b+a - a+b.
  add(c.k_ab, F::A, F::Bdag);
  add(c.k_ab, F::B, F::Adag);
  add(-c.k_ab, F::Id, F::BdagA);
  add(-c.k_ab, F::AdagB, F::Id);
  // k_ba line: b.a+ + a.b+ - .a+b - b+a.
  add(c.k_ba, F::B, F::Adag);
  add(c.k_ba, F::A, F::Bdag);
  add(-c.k_ba, F::Id, F::AdagB);
  add(-c.k_ba, F::BdagA, F::Id);
  // i (Delta_ab - Delta_ba)/2 (a.b+ - b.a+ - .b+a + a+b.)
  const cplx s1 = kI * (0.5 * (c.d_ab - c.d_ba));
  add(s1, F::A, F::Bdag);
  add(-s1, F::B, F::Adag);
  add(-s1, F::Id, F::BdagA);
  add(s1, F::AdagB, F::Id);
  // i (Delta_ba - Delta_ab)/2 (b.a+ - a.b+ - .a+b + b+a.)
  const cplx s2 = kI * (0.5 * (c.d_ba - c.d_ab));
  add(s2, F::B, F::Adag);
  add(-s2, F::A, F::Bdag);
  add(-s2, F::Id, F::AdagB);
  add(s2, F::BdagA, F::Id);
  // i ((Delta_ab + Delta_ba)/2 - g) [b+a + a+b, .]
  const cplx s3 = kI * (0.5 * (c.d_ab + c.d_ba) - p.g);
  add(s3, F::BdagA, F::Id);
  add(s3, F::AdagB, F::Id);
  add(-s3, F::Id, F::BdagA);
  add(-s3, F::Id, F::AdagB);
  return t;
}

double CompiledLiouvillian::rate_scale() const {
  double s = 0.0;
  for (const auto* block : {&jump, &left, &right})
    for (const auto& row : *block)
      for (const auto& v : row) s = std::max(s, std::abs(v));
  return s;
}

CompiledLiouvillian compile(const std::vector<SuperTerm>& terms) {
  CompiledLiouvillian L;
  for (const auto& term : terms) {
    const int lo = lowering_mode(term.left);
    const int ra = raising_mode(term.right);
    if (lo >= 0 && ra >= 0) {
      L.jump[lo][ra] += term.coef;
      continue;
    }
    if (term.right == Factor::Id) {
      const auto [i, j] = quadratic(term.left);
      if (i >= 0) {
        L.left[i][j] += term.coef;
        continue;
      }
    }
    if (term.left == Factor::Id) {
      const auto [i, j] = quadratic(term.right);
      if (i >= 0) {
        L.right[i][j] += term.coef;
        continue;
      }
    }
    throw std::invalid_argument("superoperator term outside the quadratic algebra");
  }
  return L;
}

CompiledLiouvillian compile(const LiouvillianSpec& spec) {
  return compile(master_equation_terms(spec));
}

void apply_liouvillian(const DensityMatrix& rho, const CompiledLiouvillian& L, DensityMatrix& out,
                       bool hermitian) {
  if (!rho.same_shape(out)) throw std::invalid_argument("apply_liouvillian: shape mismatch");
  const std::size_t d = rho.dim();
  // Neighbour tables depend only on the shape; cache the last one per thread.
  thread_local std::size_t cached_a = 0, cached_b = 0;
  thread_local Neighbours nb;
  if (cached_a != rho.dim_a() || cached_b != rho.dim_b()) {
    nb = neighbours(rho.dim_a(), rho.dim_b());
    cached_a = rho.dim_a();
    cached_b = rho.dim_b();
  }
  const auto& J = L.jump;
  const auto& Lf = L.left;
  const auto& Rf = L.right;
  const cplx* r = rho.data().data();
  cplx* o = out.data().data();

  for (std::size_t m = 0; m < d; ++m) {
    const long ma = nb.up_a[m], mb = nb.up_b[m];
    const double fa = nb.up_a_f[m], fb = nb.up_b_f[m];
    const cplx left_diag = Lf[0][0] * nb.na[m] + Lf[1][1] * nb.nb[m];
    const long lab = nb.ab[m], lba = nb.ba[m];
    const cplx cab = Lf[0][1] * nb.ab_f[m];  // a+ b rho: source row m - e_a + e_b
    const cplx cba = Lf[1][0] * nb.ba_f[m];  // b+ a rho: source row m - e_b + e_a
    const cplx* row = r + m * d;
    for (std::size_t n = hermitian ? m : 0; n < d; ++n) {
      cplx acc = (left_diag + Rf[0][0] * nb.na[n] + Rf[1][1] * nb.nb[n]) * row[n];
      // rho a+ b: source column n + e_a - e_b;  rho b+ a: source column n - e_a + e_b
      if (nb.ba[n] >= 0) acc += Rf[0][1] * nb.ba_f[n] * row[nb.ba[n]];
      if (nb.ab[n] >= 0) acc += Rf[1][0] * nb.ab_f[n] * row[nb.ab[n]];
      if (lab >= 0) acc += cab * r[static_cast<std::size_t>(lab) * d + n];
      if (lba >= 0) acc += cba * r[static_cast<std::size_t>(lba) * d + n];
      const long na_up = nb.up_a[n], nb_up = nb.up_b[n];
      if (ma >= 0) {
        const cplx* src = r + static_cast<std::size_t>(ma) * d;
        if (na_up >= 0) acc += J[0][0] * (fa * nb.up_a_f[n]) * src[na_up];
        if (nb_up >= 0) acc += J[0][1] * (fa * nb.up_b_f[n]) * src[nb_up];
      }
      if (mb >= 0) {
        const cplx* src = r + static_cast<std::size_t>(mb) * d;
        if (na_up >= 0) acc += J[1][0] * (fb * nb.up_a_f[n]) * src[na_up];
        if (nb_up >= 0) acc += J[1][1] * (fb * nb.up_b_f[n]) * src[nb_up];
      }
      o[m * d + n] = acc;
    }
  }
  if (hermitian) {
    for (std::size_t m = 0; m < d; ++m)
      for (std::size_t n = m + 1; n < d; ++n) o[n * d + m] = std::conj(o[m * d + n]);
  }
}

DensityMatrix apply_liouvillian(const DensityMatrix& rho, const CompiledLiouvillian& L) {
  DensityMatrix out(rho.dim_a(), rho.dim_b());
  apply_liouvillian(rho, L, out, false);
  return out;
}

DensityMatrix apply_liouvillian(const DensityMatrix& rho, const LiouvillianSpec& spec) {
  return apply_liouvillian(rho, compile(spec));
}

double min_eigenvalue(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian_part(rho),
                                                         Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!rho.same_shape(sigma)) throw std::invalid_argument("trace_distance: shape mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian_part(rho - sigma),
                                                         Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

Diagnostics diagnostics(const DensityMatrix& rho, bool with_min_eig) {
  Diagnostics dg;
  const std::size_t d = rho.dim();
  const auto nb = neighbours(rho.dim_a(), rho.dim_b());
  dg.trace = rho.trace();
  dg.herm_residual = herm_residual(rho);
  if (with_min_eig) dg.min_eig = min_eigenvalue(rho);
  double purity = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) purity += (rho(i, j) * rho(j, i)).real();
  dg.purity = purity;
  for (std::size_t m = 0; m < d; ++m) {
    // Tr(a rho) = sum_m sqrt(m_a + 1) rho[m + e_a][m]
    if (nb.up_a[m] >= 0) dg.mean_a += nb.up_a_f[m] * rho(static_cast<std::size_t>(nb.up_a[m]), m);
    if (nb.up_b[m] >= 0) dg.mean_b += nb.up_b_f[m] * rho(static_cast<std::size_t>(nb.up_b[m]), m);
    dg.n_total += (nb.na[m] + nb.nb[m]) * rho(m, m).real();
  }
  return dg;
}

DensityMatrix build_coherent(cplx v_a, cplx v_b, std::size_t dim_a, std::size_t dim_b,
                             double max_tail) {
  require_cutoff(v_a, dim_a, max_tail, "coherent mode a");
  require_cutoff(v_b, dim_b, max_tail, "coherent mode b");
  const auto psi = product_coherent(v_a, v_b, dim_a, dim_b);
  DensityMatrix rho = DensityMatrix::outer(dim_a, dim_b, psi, psi);
  rho *= 1.0 / rho.trace().real();
  return rho;
}

DensityMatrix build_cat(cplx w, double phi, std::size_t dim_a, std::size_t dim_b,
                        double max_tail) {
  if (!(std::abs(w) > 0.0)) throw Error(ErrorKind::DegenerateCat, "cat amplitude w must be nonzero");
  require_cutoff(w, dim_a, max_tail, "cat mode a");
  require_cutoff(w, dim_b, max_tail, "cat mode b");
  const auto first = product_coherent(w, 0.0, dim_a, dim_b);
  const auto second = product_coherent(0.0, w, dim_a, dim_b);
  const cplx phase = std::polar(1.0, phi);
  std::vector<cplx> psi(first.size());
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = first[i] - phase * second[i];
  DensityMatrix rho = DensityMatrix::outer(dim_a, dim_b, psi, psi);
  rho *= 1.0 / rho.trace().real();
  return rho;
}

std::size_t step_count(double t_max, double dt) {
  if (!(dt > 0.0) || !(t_max >= 0.0)) throw Error(ErrorKind::ValidationError, "need dt > 0, t_max >= 0");
  return static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
}

double max_stable_step(const CompiledLiouvillian& L, std::size_t dim_a, std::size_t dim_b) {
  const double scale = L.rate_scale() * static_cast<double>(std::max(dim_a, dim_b));
  return scale > 0.0 ? 0.1 / scale : std::numeric_limits<double>::infinity();
}

Evolution evolve(const DensityMatrix& rho0, const LiouvillianSpec& spec,
                 const EvolveOptions& options, const SampleObserver& observer) {
  if (options.sample_every == 0) throw Error(ErrorKind::ValidationError, "sample_every must be >= 1");
  const CompiledLiouvillian L = compile(spec);
  const std::size_t steps = step_count(options.t_max, options.dt);
  const double bound = max_stable_step(L, rho0.dim_a(), rho0.dim_b());
  if (options.dt > bound && !options.allow_large_step) {
    std::ostringstream os;
    os << "dt = " << options.dt << " exceeds the stability bound " << bound;
    throw Error(ErrorKind::StepTooLarge, os.str());
  }
  const bool hermitian = preserves_hermiticity(L) && herm_residual(rho0) <= 1e-12;
  const double dt = options.dt;

  Evolution ev;
  DensityMatrix rho = rho0;
  DensityMatrix k1(rho.dim_a(), rho.dim_b()), k2 = k1, k3 = k1, k4 = k1, stage = k1;

  auto sample = [&](std::size_t step) {
    Diagnostics dg = diagnostics(rho, options.track_positivity);
    dg.t = static_cast<double>(step) * dt;
    if (options.track_positivity) {
      if (dg.min_eig < options.positivity_fail) {
        std::ostringstream os;
        os << "minimum eigenvalue " << dg.min_eig << " at t = " << dg.t;
        throw Error(ErrorKind::PositivityViolation, os.str());
      }
      if (dg.min_eig < options.positivity_warn) ev.warnings.push_back({dg.t, dg.min_eig});
    }
    if (observer) observer(rho, dg);
    ev.samples.push_back(dg);
  };

  sample(0);
  for (std::size_t step = 1; step <= steps; ++step) {
    apply_liouvillian(rho, L, k1, hermitian);
    axpy(stage, rho, 0.5 * dt, k1);
    apply_liouvillian(stage, L, k2, hermitian);
    axpy(stage, rho, 0.5 * dt, k2);
    apply_liouvillian(stage, L, k3, hermitian);
    axpy(stage, rho, dt, k3);
    apply_liouvillian(stage, L, k4, hermitian);
    auto rd = rho.data();
    auto d1 = k1.data(), d2 = k2.data(), d3 = k3.data(), d4 = k4.data();
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < rd.size(); ++i) rd[i] += w * (d1[i] + 2.0 * (d2[i] + d3[i]) + d4[i]);
    if (step % options.sample_every == 0) sample(step);
  }
  ev.final_state = std::move(rho);
  return ev;
}

void write_density_csv(std::ostream& out, const DensityMatrix& rho) {
  out << "row,col,re,im\n" << std::setprecision(17);
  const std::size_t d = rho.dim();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      out << i << ',' << j << ',' << rho(i, j).real() << ',' << rho(i, j).imag() << '\n';
}

}  // namespace cavityduo::oracle
