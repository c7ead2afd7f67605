#include "cavityduo/harness/run.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

#include "cavityduo/algebra.hpp"
#include "cavityduo/error.hpp"
#include "cavityduo/propagator.hpp"
#include "cavityduo/states.hpp"

namespace cavityduo::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Model {
  EffectiveDetunings dets;
  PropagatorConstants pc;
};

Model model_for(const RunConfig& cfg) {
  Model m;
  m.dets = effective_detunings(cfg.params, cfg.resolved);
  m.pc = constants(m.dets, cfg.resolved);
  return m;
}

TrajectoryRow analytic_row(const RunConfig& cfg, const Model& m, double t) {
  TrajectoryRow row;
  row.t = t;
  const AuxFunctions aux = aux_functions(t, m.pc, m.dets, cfg.resolved);
  if (cfg.cat) {
    const CatComponents comps = cat_components(*cfg.cat, m.pc, aux);
    const CoherentPair means = cat_mean_amplitudes(*cfg.cat, comps);
    row.va_analytic = means.v_a;
    row.vb_analytic = means.v_b;
    row.delta_analytic = linear_entropy(*cfg.cat, comps).delta;
  } else {
    const CoherentPair v = evolve_coherent_pair(*cfg.coherent, m.pc, aux);
    row.va_analytic = v.v_a;
    row.vb_analytic = v.v_b;
    row.delta_analytic = 0.0;
  }
  row.purity_analytic = 1.0 - row.delta_analytic;
  row.a_oracle = row.b_oracle = cplx(kNaN, kNaN);
  row.purity_oracle = row.n_total = row.min_eig = row.trace_err = kNaN;
  row.herm_residual = row.trace_distance = kNaN;
  return row;
}

DensityMatrix initial_state(const RunConfig& cfg) {
  if (cfg.cat) return oracle::build_cat(cfg.cat->w, cfg.cat->phi, cfg.dim_a, cfg.dim_b);
  return oracle::build_coherent(cfg.coherent->v_a, cfg.coherent->v_b, cfg.dim_a, cfg.dim_b);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

double max_of(const std::vector<TrajectoryRow>& rows, double (*f)(const TrajectoryRow&)) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows) m = std::max(m, f(r));
  return m;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

Trajectory simulate(const RunConfig& cfg, const SimulateOptions& options) {
  if (!cfg.coherent && !cfg.cat) throw Error(ErrorKind::ValidationError, "no initial state configured");
  const Model m = model_for(cfg);
  Trajectory traj;

  if (!cfg.oracle) {
    const std::size_t steps = oracle::step_count(cfg.t_max, cfg.dt);
    for (std::size_t s = 0; s <= steps; s += cfg.sample_every)
      traj.rows.push_back(analytic_row(cfg, m, static_cast<double>(s) * cfg.dt));
    return traj;
  }

  oracle::EvolveOptions eo;
  eo.t_max = cfg.t_max;
  eo.dt = cfg.dt;
  eo.sample_every = cfg.sample_every;
  eo.allow_large_step = cfg.allow_large_step;
  eo.track_positivity = true;

  auto observe = [&](const DensityMatrix& rho, const oracle::Diagnostics& dg) {
    TrajectoryRow row = analytic_row(cfg, m, dg.t);
    row.a_oracle = dg.mean_a;
    row.b_oracle = dg.mean_b;
    row.purity_oracle = dg.purity;
    row.n_total = dg.n_total;
    row.min_eig = dg.min_eig;
    row.trace_err = std::abs(dg.trace - 1.0);
    row.herm_residual = dg.herm_residual;
    if (options.capture_time >= 0.0 && std::abs(dg.t - options.capture_time) < 0.5 * cfg.dt) {
      traj.captured_state = rho;
      traj.captured_time = dg.t;
    }
    if (options.state_distance) {
      const AuxFunctions aux = aux_functions(dg.t, m.pc, m.dets, cfg.resolved);
      if (cfg.cat) {
        const CatDensity cd = cat_density_matrix(*cfg.cat, cat_components(*cfg.cat, m.pc, aux),
                                                 cfg.dim_a, cfg.dim_b);
        traj.max_renormalization = std::max(traj.max_renormalization, cd.renormalization);
        row.trace_distance = oracle::trace_distance(rho, cd.rho);
      } else {
        const CoherentPair v = evolve_coherent_pair(*cfg.coherent, m.pc, aux);
        row.trace_distance =
            oracle::trace_distance(rho, oracle::build_coherent(v.v_a, v.v_b, cfg.dim_a, cfg.dim_b));
      }
    }
    traj.rows.push_back(row);
  };

  oracle::Evolution ev =
      oracle::evolve(initial_state(cfg), {cfg.params, cfg.resolved}, eo, observe);
  traj.positivity_warnings = std::move(ev.warnings);
  traj.final_state = std::move(ev.final_state);
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,re_va_analytic,im_va_analytic,re_vb_analytic,im_vb_analytic,"
         "re_a_oracle,im_a_oracle,re_b_oracle,im_b_oracle,"
         "purity_analytic,purity_oracle,delta_analytic,n_total,min_eig,trace_err\n";
  for (const auto& r : traj.rows) {
    const double cols[] = {r.t,
                           r.va_analytic.real(), r.va_analytic.imag(),
                           r.vb_analytic.real(), r.vb_analytic.imag(),
                           r.a_oracle.real(), r.a_oracle.imag(),
                           r.b_oracle.real(), r.b_oracle.imag(),
                           r.purity_analytic, r.purity_oracle, r.delta_analytic,
                           r.n_total, r.min_eig, r.trace_err};
    bool first = true;
    for (double v : cols) {
      if (!first) out << ',';
      out << format_number(v);
      first = false;
    }
    out << '\n';
  }
}

namespace {

SweepRow sweep_point(const RunConfig& base, double value) {
  nlohmann::json doc = base.source;
  doc.erase("sweep");
  doc["scenario"] = base.cat ? "evolve-cat" : "evolve-coherent";
  apply_override(doc, base.sweep->parameter + "=" + format_number(value));
  const RunConfig cfg = config_from_json(doc, base.base_dir);
  const Trajectory traj = simulate(cfg);

  SweepRow row;
  row.value = value;
  std::vector<double> t, magnitude;
  std::vector<cplx> a, b;
  row.max_residual = cfg.oracle ? 0.0 : kNaN;
  for (const auto& r : traj.rows) {
    const cplx ra = cfg.oracle ? r.a_oracle : r.va_analytic;
    const cplx rb = cfg.oracle ? r.b_oracle : r.vb_analytic;
    t.push_back(r.t);
    a.push_back(ra);
    b.push_back(rb);
    magnitude.push_back(std::sqrt(std::norm(ra) + std::norm(rb)));
    if (cfg.oracle)
      row.max_residual = std::max({row.max_residual, std::abs(r.va_analytic - r.a_oracle),
                                   std::abs(r.vb_analytic - r.b_oracle)});
  }
  row.slow_rate_fit = fitted_decay_rate(t, magnitude);
  row.mode_fit = fitted_mode_rates(t, a, b);

  try {
    const WeakCouplingRates w = weak_coupling_rates(cfg.resolved.k_aa, cfg.resolved.k_bb, cfg.params.g);
    row.slow_rate_weak = w.k_plus;
    row.fast_rate_weak = w.k_minus;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::WeakCouplingInvalid) throw;
    row.slow_rate_weak = row.fast_rate_weak = kNaN;
  }
  const PropagatorConstants pc = model_for(cfg).pc;
  const double minus = (pc.R - pc.r).real(), plus = (pc.R + pc.r).real();
  row.slow_rate_exact = std::min(minus, plus);
  row.fast_rate_exact = std::max(minus, plus);
  row.final_delta = traj.rows.empty() ? kNaN : traj.rows.back().delta_analytic;
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const RunConfig& cfg, std::size_t jobs) {
  if (!cfg.sweep) throw Error(ErrorKind::ValidationError, "sweep descriptor missing");
  const std::size_t n = cfg.sweep->steps;
  std::vector<SweepRow> rows(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        rows[i] = sweep_point(cfg, cfg.sweep->value(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, n);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::string& parameter,
                     const std::vector<SweepRow>& rows) {
  out << parameter
      << ",slow_rate_fit,slow_rate_modefit,fast_rate_modefit,slow_rate_weak,fast_rate_weak,"
         "slow_rate_exact,fast_rate_exact,final_delta,max_residual\n";
  for (const auto& r : rows) {
    const double slow_mode = r.mode_fit.ok ? r.mode_fit.slow : kNaN;
    const double fast_mode = r.mode_fit.ok ? r.mode_fit.fast : kNaN;
    const double cols[] = {r.value,          r.slow_rate_fit,   slow_mode,
                           fast_mode,        r.slow_rate_weak,  r.fast_rate_weak,
                           r.slow_rate_exact, r.fast_rate_exact, r.final_delta,
                           r.max_residual};
    bool first = true;
    for (double v : cols) {
      if (!first) out << ',';
      out << format_number(v);
      first = false;
    }
    out << '\n';
  }
}

bool Check::passed() const { return upper ? value <= limit : value >= limit; }

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed(); });
}

VerifyReport verify(const RunConfig& cfg, Trajectory* trajectory) {
  const Model m = model_for(cfg);

  // The factorized propagator is compared at the latest sample time at which
  // its exponents stay within the reliable range.
  double factorized_t = -1.0;
  const std::size_t steps = oracle::step_count(cfg.t_max, cfg.dt);
  for (std::size_t s = 0; s <= steps; s += cfg.sample_every) {
    const double t = static_cast<double>(s) * cfg.dt;
    try {
      const FactorizationExponents ex =
          factor_exponents(t, m.pc, aux_functions(t, m.pc, m.dets, cfg.resolved));
      if (std::max({std::abs(ex.h1), std::abs(ex.h2), std::abs(ex.z)}) > kFactorizationExponentLimit) break;
      factorized_t = t;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::FactorizationSingular) throw;
    }
  }

  SimulateOptions opt;
  opt.state_distance = true;
  opt.capture_time = factorized_t;
  Trajectory traj = simulate(cfg, opt);
  const Tolerances& tol = cfg.tolerances;
  const auto& rows = traj.rows;
  VerifyReport rep;

  rep.checks.push_back({"amplitude_a", max_of(rows, [](const TrajectoryRow& r) {
                          return std::abs(r.va_analytic - r.a_oracle);
                        }), tol.amplitude});
  rep.checks.push_back({"amplitude_b", max_of(rows, [](const TrajectoryRow& r) {
                          return std::abs(r.vb_analytic - r.b_oracle);
                        }), tol.amplitude});
  rep.checks.push_back({"delta", max_of(rows, [](const TrajectoryRow& r) {
                          return std::abs(r.purity_analytic - r.purity_oracle);
                        }), tol.delta});
  rep.checks.push_back({"trace_distance",
                        max_of(rows, [](const TrajectoryRow& r) { return r.trace_distance; }),
                        tol.trace_distance});
  rep.checks.push_back({"trace_drift",
                        max_of(rows, [](const TrajectoryRow& r) { return r.trace_err; }),
                        tol.trace_drift});
  rep.checks.push_back({"hermiticity",
                        max_of(rows, [](const TrajectoryRow& r) { return r.herm_residual; }),
                        tol.hermiticity});
  rep.checks.push_back({"min_eig",
                        -max_of(rows, [](const TrajectoryRow& r) { return -r.min_eig; }),
                        tol.min_eig, false});

  if (cfg.warnings.empty()) {
    double growth = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i)
      growth = std::max(growth, rows[i].n_total - rows[i - 1].n_total);
    rep.checks.push_back({"excitation_growth", growth, tol.excitation_growth});
  } else {
    rep.notes.emplace_back("excitation monotonicity not checked: Gamma screen failed");
  }

  // The factorized superoperator applied once, from 0 to factorized_t.
  if (traj.captured_time > 0.0) {
    const double t = traj.captured_time;
    const FactorizationExponents ex = factor_exponents(t, m.pc, aux_functions(t, m.pc, m.dets, cfg.resolved));
    const DensityMatrix rho = apply_factorized(ex, initial_state(cfg));
    rep.checks.push_back({"factorized_trace_distance", oracle::trace_distance(rho, traj.captured_state),
                          tol.trace_distance});
    rep.notes.push_back("factorized propagator compared at t = " + format_number(t));
  } else {
    rep.notes.emplace_back("factorized propagator not compared: no sample time with a regular, "
                           "well-conditioned factorization");
  }

  rep.notes.push_back("max analytic delta " + format_number(max_of(rows, [](const TrajectoryRow& r) {
                        return r.delta_analytic;
                      })));
  rep.notes.push_back("max oracle delta " + format_number(max_of(rows, [](const TrajectoryRow& r) {
                        return 1.0 - r.purity_oracle;
                      })));
  if (cfg.cat) {
    double residual = 0.0;
    for (const auto& r : rows) {
      const AuxFunctions aux = aux_functions(r.t, m.pc, m.dets, cfg.resolved);
      residual = std::max(residual,
                          coherence_preservation_residual(*cfg.cat, cat_components(*cfg.cat, m.pc, aux)));
    }
    rep.notes.push_back("max coherence preservation residual " + format_number(residual));
    rep.notes.push_back("max cat trace renormalization " + format_number(traj.max_renormalization));
  }
  for (const auto& w : cfg.warnings) rep.notes.push_back("warning: " + w);
  for (const auto& p : traj.positivity_warnings)
    rep.notes.push_back("positivity warning at t " + format_number(p.t) + ": min eig " +
                        format_number(p.min_eig));

  if (trajectory) *trajectory = std::move(traj);
  return rep;
}

void write_verify_report(std::ostream& out, const RunConfig& cfg, const VerifyReport& report) {
  out << "verify: " << (cfg.cat ? "cat" : "coherent") << " state, t_max " << format_number(cfg.t_max)
      << ", dt " << format_number(cfg.dt) << ", cutoff " << cfg.dim_a << "x" << cfg.dim_b << "\n";
  out << "observable,max_deviation,limit,status\n";
  for (const auto& c : report.checks) {
    out << c.name << ',' << format_number(c.value) << ',' << (c.upper ? "<=" : ">=")
        << format_number(c.limit) << ',' << (c.passed() ? "ok" : "EXCEEDED") << '\n';
  }
  for (const auto& n : report.notes) out << "# " << n << '\n';
  out << (report.passed() ? "result: pass\n" : "result: FAIL\n");
}

void write_coefficients_report(std::ostream& out, const RunConfig& cfg) {
  const NormalModeData nm = normal_modes(cfg.params);
  const LabCoefficients& k = cfg.resolved;
  const Model m = model_for(cfg);
  auto line = [&](const char* name, double v) { out << name << ',' << format_number(v) << '\n'; };
  auto cline = [&](const char* name, cplx v) {
    out << name << ',' << format_number(v.real()) << ',' << format_number(v.imag()) << '\n';
  };
  out << "source," << (cfg.spectrum ? "spectrum " + cfg.spectrum->path.string() : "direct") << '\n';
  line("omega_1", nm.omega_1);
  line("omega_2", nm.omega_2);
  line("cos_theta", nm.cos_theta);
  line("sin_theta", nm.sin_theta);
  line("k_aa", k.k_aa);
  line("k_ab", k.k_ab);
  line("k_ba", k.k_ba);
  line("k_bb", k.k_bb);
  line("d_aa", k.d_aa);
  line("d_ab", k.d_ab);
  line("d_ba", k.d_ba);
  line("d_bb", k.d_bb);
  line("quadrature_change", cfg.quadrature_change);
  line("Omega_aa", m.dets.Omega_aa);
  line("Omega_bb", m.dets.Omega_bb);
  line("Omega_ab", m.dets.Omega_ab);
  line("Omega_ba", m.dets.Omega_ba);
  cline("c", m.pc.c);
  cline("r", m.pc.r);
  cline("R", m.pc.R);
  for (const auto& w : cfg.warnings) out << "# warning: " << w << '\n';
}

int run(const RunConfig& cfg, const RunOptions& options, std::ostream& log) {
  std::filesystem::create_directories(cfg.output);
  for (const auto& w : cfg.warnings) log << "warning: " << w << '\n';

  switch (cfg.scenario) {
    case Scenario::EvolveCoherent:
    case Scenario::EvolveCat: {
      const Trajectory traj = simulate(cfg);
      auto out = open_output(cfg.output / "trajectory.csv");
      write_trajectory_csv(out, traj);
      for (const auto& p : traj.positivity_warnings)
        log << "warning: min eigenvalue " << p.min_eig << " at t = " << p.t << '\n';
      log << "wrote " << traj.rows.size() << " rows to " << (cfg.output / "trajectory.csv").string()
          << '\n';
      return 0;
    }
    case Scenario::Sweep: {
      const auto rows = run_sweep(cfg, options.jobs);
      auto out = open_output(cfg.output / "sweep.csv");
      write_sweep_csv(out, cfg.sweep->parameter, rows);
      log << "wrote " << rows.size() << " sweep points to " << (cfg.output / "sweep.csv").string()
          << '\n';
      return 0;
    }
    case Scenario::Verify: {
      Trajectory traj;
      const VerifyReport rep = verify(cfg, &traj);
      {
        auto out = open_output(cfg.output / "trajectory.csv");
        write_trajectory_csv(out, traj);
      }
      auto out = open_output(cfg.output / "report.txt");
      write_verify_report(out, cfg, rep);
      write_verify_report(log, cfg, rep);
      return rep.passed() ? 0 : exit_code(ErrorKind::ToleranceExceeded);
    }
    case Scenario::Coefficients: {
      auto out = open_output(cfg.output / "report.txt");
      write_coefficients_report(out, cfg);
      write_coefficients_report(log, cfg);
      return 0;
    }
    case Scenario::AlgebraCheck: {
      const CommutatorReport rep = verify_commutator_table(cfg.dim_a, cfg.trials, cfg.seed);
      auto out = open_output(cfg.output / "report.txt");
      write_report(out, rep);
      log << "commutator table: " << rep.mismatch_count() << " mismatches, max discrepancy "
          << rep.max_discrepancy() << '\n';
      return rep.ok() ? 0 : exit_code(ErrorKind::TableMismatch);
    }
  }
  return 1;
}

}  // namespace cavityduo::harness
