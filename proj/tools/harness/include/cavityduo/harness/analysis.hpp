#pragma once

#include <complex>
#include <vector>

namespace cavityduo::harness {

using cplx = std::complex<double>;

/// -d ln|v| / dt from a least-squares line through (t, ln|v|) over the last
/// `fraction` of the time window. NaN when fewer than two samples qualify or
/// an amplitude vanishes.
double fitted_decay_rate(const std::vector<double>& t, const std::vector<double>& magnitude,
                         double fraction = 0.25);

struct ModeRates {
  double slow = 0.0;
  double fast = 0.0;
  double slow_frequency = 0.0;
  double fast_frequency = 0.0;
  bool ok = false;
};

/// Fits the one-sample transfer matrix T with (a, b)(t_{i+1}) = T (a, b)(t_i)
/// by least squares and reads both decay rates off its eigenvalues. Needs a
/// uniformly sampled trajectory in which both normal modes are populated.
ModeRates fitted_mode_rates(const std::vector<double>& t, const std::vector<cplx>& a,
                            const std::vector<cplx>& b);

}  // namespace cavityduo::harness
