// stats.hpp: estimator bookkeeping shared by the samplers and verifiers.
#pragma once

#include <cstddef>
#include <vector>

namespace hyperlab::stats {

// streaming (count, mean, M2); merge is Chan's update and is exact for
// any fixed merge order
struct RunningStat {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x);
  void merge(const RunningStat& o);
  double variance() const;  // population-style, m2/(n-1)
  double stderr_mean() const;
};

// batch means for correlated chain output: fixed number of equal batches,
// remainder dropped, se = sd(batch means)/sqrt(B)
struct BatchSummary {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_batches = 0;
};
BatchSummary batch_means(const std::vector<double>& xs, std::size_t n_batches = 32);

// integrated autocorrelation time with Sokal's adaptive window (c = 6);
// returns tau >= 0.5, and ess = n / (2 tau)
struct IatResult {
  double tau = 0.5;
  double ess = 0.0;
};
IatResult integrated_autocorr_time(const std::vector<double>& xs);

// two-sided z-score helper: (a - b) / sqrt(se_a^2 + se_b^2)
double z_score(double a, double se_a, double b, double se_b);

// one-sample Kolmogorov-Smirnov test against a CDF given as sorted
// transformed values u_i = F(x_(i)); returns the KS statistic and the
// asymptotic p-value from the Kolmogorov distribution
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
KsResult ks_uniform(std::vector<double> u);

}  // namespace hyperlab::stats
