#include "cavityduo/algebra.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cavityduo/error.hpp"

namespace cavityduo {

namespace {

using Mat = Eigen::MatrixXcd;

constexpr std::array<std::string_view, kSuperoperatorCount> kNames = {
    "a+a.", ".a+a", "a.a+", "b+b.", ".b+b", "b.b+",
    "a+b.", ".a+b", "b.a+", "b+a.", ".b+a", "a.b+"};

enum : std::size_t { AdA_L, AdA_R, A_AD, BdB_L, BdB_R, B_BD, AdB_L, AdB_R, B_AD, BdA_L, BdA_R, A_BD };

TableEntry zero() { return {}; }
TableEntry e(int c, std::size_t i) { return {{{c, i}}}; }
TableEntry e(int c1, std::size_t i1, int c2, std::size_t i2) { return {{{c1, i1}, {c2, i2}}}; }

using Table = std::array<std::array<TableEntry, kSuperoperatorCount>, kSuperoperatorCount>;

Table build_table() {
  const TableEntry o = zero();
  // Rows: chi_i; columns: chi_j; entry = [chi_i, chi_j]. Transcribed as printed.
  return Table{{
      // a+a.
      {o, o, e(-1, A_AD), o, o, o, e(1, AdB_L), o, o, e(-1, BdA_L), o, e(-1, A_BD)},
      // .a+a
      {o, o, e(-1, A_AD), o, o, o, o, e(-1, AdB_R), e(-1, B_AD), o, e(1, BdA_R), o},
      // a.a+
      {e(1, A_AD), e(1, A_AD), o, o, o, o, e(1, B_AD), o, o, o, e(1, A_BD), o},
      // b+b.
      {o, o, o, o, o, e(-1, B_BD), e(-1, AdB_L), o, e(-1, B_AD), e(1, BdA_L), o, o},
      // .b+b
      {o, o, o, o, o, e(-1, B_BD), o, e(1, AdB_R), o, o, e(-1, BdA_R), e(-1, A_BD)},
      // b.b+
      {o, o, o, e(1, B_BD), e(1, B_BD), o, o, e(1, B_AD), o, e(1, A_BD), o, o},
      // a+b.
      {e(-1, AdB_L), o, e(-1, B_AD), e(1, AdB_L), o, o, o, o, o, e(1, AdA_L, -1, BdB_L), o,
       e(-1, B_BD)},
      // .a+b
      {o, e(1, AdB_R), o, o, e(-1, AdB_R), e(-1, B_AD), o, o, o, o, e(1, BdB_R, -1, AdA_R),
       e(-1, A_AD)},
      // b.a+  (the column .b+b entry is printed as -.a+b)
      {o, e(1, B_AD), o, e(1, B_AD), e(-1, AdB_R), o, o, o, o, e(1, A_AD), e(1, B_BD), o},
      // b+a.
      {e(1, BdA_L), o, o, e(-1, BdA_L), o, e(-1, A_BD), e(1, BdB_L, -1, AdA_L), o, e(-1, A_AD),
       o, o, o},
      // .b+a
      {o, e(-1, BdA_R), e(-1, A_BD), o, e(1, BdA_R), o, o, e(1, AdA_R, -1, BdB_R), e(-1, B_BD),
       o, o, o},
      // a.b+
      {e(1, A_BD), o, o, o, e(1, A_BD), o, e(1, B_BD), e(1, A_AD), o, o, o, o},
  }};
}

struct Operators {
  Mat a, b, ad, bd;
};

Operators ladder_operators(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  Mat a1 = Mat::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) a1(k - 1, k) = std::sqrt(static_cast<double>(k));
  const Mat id = Mat::Identity(n, n);
  Operators ops;
  ops.a = Mat::Zero(n * n, n * n);
  ops.b = Mat::Zero(n * n, n * n);
  // kron(a1, id) and kron(id, a1) with index n_a * dim + n_b
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = 0; l < n; ++l) {
          ops.a(i * n + k, j * n + l) = a1(i, j) * id(k, l);
          ops.b(i * n + k, j * n + l) = id(i, j) * a1(k, l);
        }
  ops.ad = ops.a.adjoint();
  ops.bd = ops.b.adjoint();
  return ops;
}

Mat apply(std::size_t which, const Operators& o, const Mat& x) {
  switch (which) {
    case AdA_L: return o.ad * o.a * x;
    case AdA_R: return x * o.ad * o.a;
    case A_AD: return o.a * x * o.ad;
    case BdB_L: return o.bd * o.b * x;
    case BdB_R: return x * o.bd * o.b;
    case B_BD: return o.b * x * o.bd;
    case AdB_L: return o.ad * o.b * x;
    case AdB_R: return x * o.ad * o.b;
    case B_AD: return o.b * x * o.ad;
    case BdA_L: return o.bd * o.a * x;
    case BdA_R: return x * o.bd * o.a;
    case A_BD: return o.a * x * o.bd;
    default: throw std::out_of_range("superoperator index");
  }
}

Mat random_state(std::size_t dim, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat g = Mat::Zero(n * n, n * n);
  for (Eigen::Index row = 0; row < n * n; ++row)
    for (Eigen::Index na = 0; na + 1 < n; ++na)
      for (Eigen::Index nb = 0; nb + 1 < n; ++nb) {
        const double re = normal(rng);
        const double im = normal(rng);
        g(row, na * n + nb) = std::complex<double>(re, im);
      }
  Mat rho = g.adjoint() * g;
  return rho / rho.trace();
}

}  // namespace

std::string_view superoperator_name(std::size_t index) {
  if (index >= kSuperoperatorCount) throw std::out_of_range("superoperator index");
  return kNames[index];
}

const Table& commutator_table() {
  static const Table table = build_table();
  return table;
}

double CommutatorReport::max_discrepancy() const {
  double m = 0.0;
  for (const auto& row : discrepancy)
    for (double v : row) m = std::max(m, v);
  return m;
}

std::size_t CommutatorReport::mismatch_count() const {
  std::size_t count = 0;
  for (const auto& row : discrepancy)
    for (double v : row) count += v > tolerance ? 1 : 0;
  return count;
}

CommutatorReport verify_commutator_table(std::size_t dim, std::size_t trials, std::uint64_t seed,
                                         double tolerance) {
  if (dim < 4) throw Error(ErrorKind::ValidationError, "commutator check needs dim >= 4");
  if (trials == 0) throw Error(ErrorKind::ValidationError, "commutator check needs trials >= 1");
  CommutatorReport report;
  report.dim = dim;
  report.trials = trials;
  report.seed = seed;
  report.tolerance = tolerance;

  const Operators ops = ladder_operators(dim);
  const Table& table = commutator_table();
  std::mt19937_64 rng(seed);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const Mat rho = random_state(dim, rng);
    std::array<Mat, kSuperoperatorCount> single;
    for (std::size_t k = 0; k < kSuperoperatorCount; ++k) single[k] = apply(k, ops, rho);
    for (std::size_t i = 0; i < kSuperoperatorCount; ++i) {
      for (std::size_t j = 0; j < kSuperoperatorCount; ++j) {
        Mat diff = apply(i, ops, single[j]) - apply(j, ops, single[i]);
        for (const auto& term : table[i][j].terms) diff -= static_cast<double>(term.coef) * single[term.index];
        report.discrepancy[i][j] = std::max(report.discrepancy[i][j], diff.cwiseAbs().maxCoeff());
      }
    }
  }
  return report;
}

void require_table_match(const CommutatorReport& report) {
  if (report.ok()) return;
  std::ostringstream os;
  os << report.mismatch_count() << " table entries disagree:";
  for (std::size_t i = 0; i < kSuperoperatorCount; ++i)
    for (std::size_t j = 0; j < kSuperoperatorCount; ++j)
      if (report.discrepancy[i][j] > report.tolerance)
        os << " [" << kNames[i] << ", " << kNames[j] << "] (" << report.discrepancy[i][j] << ")";
  throw Error(ErrorKind::TableMismatch, os.str());
}

namespace {

std::string format_entry(const TableEntry& entry) {
  if (entry.terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : entry.terms) {
    if (t.coef < 0) os << (first ? "-" : " - ");
    else if (!first) os << " + ";
    os << kNames[t.index];
    first = false;
  }
  return os.str();
}

}  // namespace

void write_report(std::ostream& out, const CommutatorReport& report) {
  const Table& table = commutator_table();
  out << "commutator table check\n"
      << "dim " << report.dim << ", trials " << report.trials << ", seed " << report.seed
      << ", tolerance " << report.tolerance << "\n"
      << "row,col,expected,max_discrepancy,status\n";
  out << std::scientific << std::setprecision(3);
  for (std::size_t i = 0; i < kSuperoperatorCount; ++i)
    for (std::size_t j = 0; j < kSuperoperatorCount; ++j) {
      const double d = report.discrepancy[i][j];
      out << kNames[i] << ',' << kNames[j] << ',' << format_entry(table[i][j]) << ',' << d << ','
          << (d > report.tolerance ? "MISMATCH" : "ok") << '\n';
    }
  out << "max discrepancy " << report.max_discrepancy() << ", mismatches "
      << report.mismatch_count() << " of " << kSuperoperatorCount * kSuperoperatorCount << '\n';
}

}  // namespace cavityduo
