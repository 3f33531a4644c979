#include "hyperlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hyperlab::stats {

void RunningStat::push(double x) {
  ++n;
  const double d = x - mean;
  mean += d / static_cast<double>(n);
  m2 += d * (x - mean);
}

void RunningStat::merge(const RunningStat& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
  const double d = o.mean - mean;
  const double nt = na + nb;
  mean += d * nb / nt;
  m2 += o.m2 + d * d * na * nb / nt;
  n += o.n;
}

double RunningStat::variance() const {
  if (n < 2) return 0.0;
  return m2 / static_cast<double>(n - 1);
}

double RunningStat::stderr_mean() const {
  if (n < 2) return 0.0;
  return std::sqrt(variance() / static_cast<double>(n));
}

BatchSummary batch_means(const std::vector<double>& xs, std::size_t n_batches) {
  BatchSummary out;
  out.n_samples = xs.size();
  if (xs.empty()) return out;
  n_batches = std::min(n_batches, xs.size());
  const std::size_t bs = xs.size() / n_batches;
  if (bs == 0) return out;
  RunningStat overall;
  RunningStat batches;
  for (std::size_t b = 0; b < n_batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * bs; i < (b + 1) * bs; ++i) s += xs[i];
    batches.push(s / static_cast<double>(bs));
  }
  for (std::size_t b = 0; b < n_batches * bs; ++b) overall.push(xs[b]);
  out.mean = overall.mean;
  out.n_batches = n_batches;
  out.se = n_batches > 1 ? std::sqrt(batches.variance() / static_cast<double>(n_batches)) : 0.0;
  return out;
}

IatResult integrated_autocorr_time(const std::vector<double>& xs) {
  IatResult r;
  const std::size_t n = xs.size();
  if (n < 8) {
    r.ess = static_cast<double>(n);
    return r;
  }
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double x : xs) c0 += (x - mean) * (x - mean);
  c0 /= static_cast<double>(n);
  if (c0 <= 0.0) {
    r.ess = static_cast<double>(n);
    return r;
  }
  // grow the window until window >= c * tau(window)
  const double c = 6.0;
  double tau = 0.5;
  std::size_t wmax = n / 4;
  for (std::size_t w = 1; w <= wmax; ++w) {
    double ck = 0.0;
    for (std::size_t i = 0; i + w < n; ++i) ck += (xs[i] - mean) * (xs[i + w] - mean);
    ck /= static_cast<double>(n - w);
    tau += ck / c0;
    if (static_cast<double>(w) >= c * tau) break;
  }
  r.tau = std::max(0.5, tau);
  r.ess = static_cast<double>(n) / (2.0 * r.tau);
  return r;
}

double z_score(double a, double se_a, double b, double se_b) {
  const double s = std::sqrt(se_a * se_a + se_b * se_b);
  if (s == 0.0) return (a == b) ? 0.0 : std::numeric_limits<double>::infinity();
  return (a - b) / s;
}

KsResult ks_uniform(std::vector<double> u) {
  KsResult out;
  if (u.empty()) return out;
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(u[i] - lo, hi - u[i]));
  }
  out.statistic = d;
  // asymptotic Kolmogorov tail: Q(x) = 2 sum_k (-1)^{k-1} exp(-2 k^2 x^2)
  const double x = d * std::sqrt(n);
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * x * x);
    q += term;
    if (std::abs(term) < 1e-16) break;
  }
  out.p_value = std::clamp(q, 0.0, 1.0);
  return out;
}

}  // namespace hyperlab::stats
