#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "cavityduo/harness/analysis.hpp"
#include "cavityduo/harness/config.hpp"
#include "cavityduo/lindblad.hpp"

namespace cavityduo::harness {

/// One sampled time. Oracle columns are NaN when the oracle is disabled.
struct TrajectoryRow {
  double t = 0.0;
  cplx va_analytic, vb_analytic;
  cplx a_oracle, b_oracle;
  double purity_analytic = 0.0;
  double purity_oracle = 0.0;
  double delta_analytic = 0.0;
  double n_total = 0.0;
  double min_eig = 0.0;
  double trace_err = 0.0;
  // Not part of the CSV; filled for verify runs.
  double herm_residual = 0.0;
  double trace_distance = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  std::vector<oracle::PositivityEvent> positivity_warnings;
  /// Largest trace correction applied when projecting the analytic cat state.
  double max_renormalization = 0.0;
  /// Final oracle state; default-constructed without the oracle.
  DensityMatrix final_state;
  /// Oracle state at SimulateOptions::capture_time, when that time is sampled.
  DensityMatrix captured_state;
  double captured_time = -1.0;
};

struct SimulateOptions {
  /// Trace distance between the oracle state and the projected analytic state at every sample.
  bool state_distance = false;
  /// Keep the oracle state sampled at this time (negative: none).
  double capture_time = -1.0;
};

/// Largest |h1|, |h2|, |z| for which the ordered product is still evaluated
/// reliably in double precision on the truncated space. Beyond it the
/// power-series factors cancel catastrophically.
inline constexpr double kFactorizationExponentLimit = 30.0;

/// Analytic evolution of the configured initial state, plus the oracle
/// integration when config.oracle is set.
Trajectory simulate(const RunConfig& config, const SimulateOptions& options = {});

/// Header: t, re/im of the analytic amplitudes, re/im of the oracle means,
/// purity analytic/oracle, delta analytic, n_total, min_eig, trace_err.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

struct SweepRow {
  double value = 0.0;
  double slow_rate_fit = 0.0;   // ln|(a, b)| slope over the final quarter
  ModeRates mode_fit;           // transfer-matrix fit of both rates
  double slow_rate_weak = 0.0;  // k_aa + g^2/dk, NaN outside the weak-coupling regime
  double fast_rate_weak = 0.0;
  double slow_rate_exact = 0.0;  // Re(R -+ r)
  double fast_rate_exact = 0.0;
  double final_delta = 0.0;
  double max_residual = 0.0;  // max amplitude deviation analytic vs oracle, NaN without oracle
};

/// Runs every sweep point, in parallel up to `jobs`, and returns the rows in parameter order.
std::vector<SweepRow> run_sweep(const RunConfig& config, std::size_t jobs);
void write_sweep_csv(std::ostream& out, const std::string& parameter,
                     const std::vector<SweepRow>& rows);

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  /// true: value must not exceed limit; false: value must not fall below it.
  bool upper = true;
  bool passed() const;
};

struct VerifyReport {
  std::vector<Check> checks;
  std::vector<std::string> notes;
  bool passed() const;
};

VerifyReport verify(const RunConfig& config, Trajectory* trajectory = nullptr);
void write_verify_report(std::ostream& out, const RunConfig& config, const VerifyReport& report);

/// Normal modes, coefficients, detunings and propagator constants.
void write_coefficients_report(std::ostream& out, const RunConfig& config);

struct RunOptions {
  std::size_t jobs = 1;
};

/// Executes the configured scenario, writing its artifacts under config.output.
/// Returns 0, or 3 when a verify / algebra-check tolerance fails. Module
/// errors propagate as cavityduo::Error.
int run(const RunConfig& config, const RunOptions& options, std::ostream& log);

/// 17 significant digits, locale independent.
std::string format_number(double v);

}  // namespace cavityduo::harness
