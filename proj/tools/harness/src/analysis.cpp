#include "cavityduo/harness/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cavityduo::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double fitted_decay_rate(const std::vector<double>& t, const std::vector<double>& magnitude,
                         double fraction) {
  if (t.size() != magnitude.size() || t.size() < 2) return kNaN;
  const double t_from = t.back() - fraction * (t.back() - t.front());
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_from) continue;
    if (!(magnitude[i] > 0.0)) return kNaN;
    const double y = std::log(magnitude[i]);
    n += 1;
    sx += t[i];
    sy += y;
    sxx += t[i] * t[i];
    sxy += t[i] * y;
  }
  const double denom = n * sxx - sx * sx;
  if (n < 2 || !(denom > 0.0)) return kNaN;
  return -(n * sxy - sx * sy) / denom;
}

ModeRates fitted_mode_rates(const std::vector<double>& t, const std::vector<cplx>& a,
                            const std::vector<cplx>& b) {
  ModeRates out;
  const std::size_t n = t.size();
  if (n < 3 || a.size() != n || b.size() != n) return out;
  const double h = t[1] - t[0];
  if (!(h > 0.0)) return out;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(t[i]))) return out;

  // Normal equations: T = (Y X^+)(X X^+)^{-1} with X = columns at i, Y at i+1.
  cplx xx[2][2] = {}, yx[2][2] = {};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const cplx x[2] = {a[i], b[i]};
    const cplx y[2] = {a[i + 1], b[i + 1]};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        xx[r][c] += x[r] * std::conj(x[c]);
        yx[r][c] += y[r] * std::conj(x[c]);
      }
  }
  const cplx det = xx[0][0] * xx[1][1] - xx[0][1] * xx[1][0];
  const double scale = std::abs(xx[0][0]) * std::abs(xx[1][1]);
  if (!(std::abs(det) > 1e-12 * scale)) return out;
  const cplx inv[2][2] = {{xx[1][1] / det, -xx[0][1] / det}, {-xx[1][0] / det, xx[0][0] / det}};
  cplx m[2][2] = {};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m[r][c] = yx[r][0] * inv[0][c] + yx[r][1] * inv[1][c];

  const cplx half_tr = 0.5 * (m[0][0] + m[1][1]);
  const cplx disc = std::sqrt(half_tr * half_tr - (m[0][0] * m[1][1] - m[0][1] * m[1][0]));
  const cplx mu[2] = {half_tr + disc, half_tr - disc};
  double rate[2], freq[2];
  for (int k = 0; k < 2; ++k) {
    if (!(std::abs(mu[k]) > 0.0)) return out;
    rate[k] = -std::log(std::abs(mu[k])) / h;
    freq[k] = -std::arg(mu[k]) / h;
  }
  const int s = rate[0] <= rate[1] ? 0 : 1;
  out.slow = rate[s];
  out.fast = rate[1 - s];
  out.slow_frequency = freq[s];
  out.fast_frequency = freq[1 - s];
  out.ok = true;
  return out;
}

}  // namespace cavityduo::harness
