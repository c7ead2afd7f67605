#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace cavityduo {

/// The twelve quadratic superoperators of the master equation, in table order:
/// a+a., .a+a, a.a+, b+b., .b+b, b.b+, a+b., .a+b, b.a+, b+a., .b+a, a.b+
inline constexpr std::size_t kSuperoperatorCount = 12;

std::string_view superoperator_name(std::size_t index);

/// Linear combination sum coef * chi_index.
struct TableEntry {
  struct Component {
    int coef;
    std::size_t index;
  };
  std::vector<Component> terms;
};

/// Right-hand sides of [chi_row, chi_col] as tabulated, including one wrong
/// entry ([b.a+, .b+b] is listed as -.a+b; it is 0), which the check reports.
const std::array<std::array<TableEntry, kSuperoperatorCount>, kSuperoperatorCount>&
commutator_table();

struct CommutatorReport {
  std::size_t dim = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double tolerance = 1e-10;
  /// max over trials of max-abs entry of [chi_i, chi_j] rho - rhs(rho).
  std::array<std::array<double, kSuperoperatorCount>, kSuperoperatorCount> discrepancy{};

  double max_discrepancy() const;
  std::size_t mismatch_count() const;
  bool ok() const { return mismatch_count() == 0; }
};

/// Evaluates every ordered pair on random density matrices supported on Fock
/// levels <= dim-2, where single-quantum shifts are not affected by truncation.
CommutatorReport verify_commutator_table(std::size_t dim, std::size_t trials, std::uint64_t seed,
                                         double tolerance = 1e-10);

/// Throws TableMismatch listing the offending entries.
void require_table_match(const CommutatorReport& report);

void write_report(std::ostream& out, const CommutatorReport& report);

}  // namespace cavityduo
