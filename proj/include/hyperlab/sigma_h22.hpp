// sigma_h22.hpp: the real (s, t) probability sector of the supersymmetric
// hyperbolic model.
//
// The gauge-fixed density on R^{2m} is e^{-Htilde(s,t)} with
//   Htilde = sum_{<ij>} beta_ij (cosh(t_i-t_j) - 1 + (1/2)(s_i-s_j)^2 e^{t_i+t_j})
//          + sum_i h_i (cosh t_i - 1 + (1/2) s_i^2 e^{t_i})
//          + sum_i (t_i + log 2 pi) - log det D(t),
// a genuine normalized probability measure.  Given t the s-sector is
// Gaussian with precision D(t), so sampling runs on the t-marginal
//   neg log density = B(t) + sum_i t_i - (1/2) log det D(t)  (+ const)
// and two-point functions are Rao-Blackwellized through
//   <y_a y_b> = < e^{t_a+t_b} (D(t)^{-1})_{ab} >_t,   y = e^t s.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "hyperlab/graph.hpp"
#include "hyperlab/quadrature.hpp"
#include "hyperlab/rng.hpp"
#include "hyperlab/sigma_common.hpp"

namespace hyperlab::h22 {

struct H22Config {
  std::vector<double> t;
  std::vector<double> s;
};

// full Htilde including the normalizing constants
double horo_action(const graph::WeightedGraph& g, const H22Config& c);

// B(t) + sum t - (1/2) log det D(t); drops the constant m/2 log(2 pi)
double t_marginal_neg_log_density(const graph::WeightedGraph& g, const std::vector<double>& t);

inline sigma::TMarginal t_marginal() { return {1.0, -0.5}; }

struct ChainOptions {
  sigma::McmcParams mcmc;
  bool draw_s = false;  // one exact Gaussian s per retained sample
};

struct H22Chain {
  std::vector<std::vector<double>> ts;  // retained t configurations
  std::vector<std::vector<double>> ss;  // exact s draws (empty unless draw_s)
  sigma::ChainResult info;
};

H22Chain sample_h22(const graph::WeightedGraph& g, const ChainOptions& opt, rng::Stream& rs);

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

// Rao-Blackwellized <y_a y_b>, batch-means error
Estimate estimate_two_point(const graph::WeightedGraph& g, const H22Chain& chain, int a, int b);
// plain e^{t_a+t_b} s_a s_b estimator from the stored s draws
Estimate estimate_two_point_plain(const H22Chain& chain, int a, int b);

// z-scores of <e^{t_j}> = 1 and <e^{t_j+t_l}> = 1 + <y_j y_l>; the pair
// statistic is evaluated per sample as e^{t_j+t_l}(1 - (D^{-1})_{jl}) - 1,
// which has mean zero under the target.  All pairs on graphs up to 16
// vertices, a deterministic subsample on larger ones.
struct WardReport {
  double max_abs_z = 0.0;
  bool pass = false;
  std::vector<double> z_single;                // per vertex
  std::vector<std::array<double, 3>> z_pair;   // (j, l, z)
};
WardReport ward_check(const graph::WeightedGraph& g, const H22Chain& chain);

// deterministic quadrature oracle for expectations of real (s, t)
// observables on graphs of 1 or 2 vertices.  The s-sector is handled by
// Gauss-Hermite in whitened coordinates s = L^{-T} w (D = L L^T), the
// t-sector by the shared sinh-mapped tensor grid, refined until two
// levels agree.
using RealObservable =
    std::function<double(const std::vector<double>& t, const std::vector<double>& s)>;

struct OracleOptions {
  double tail_mass = 45.0;  // t-axis reach: h_min (cosh T - 1) = tail_mass
  int gh_nodes = 48;
  quad::Options quad;
};

struct OracleResult {
  double value = 0.0;
  double err_est = 0.0;
  bool converged = false;
  int level_used = 0;
  std::size_t n_evals = 0;
  double t_radius = 0.0;
};

OracleResult exact_expectation_h22(const graph::WeightedGraph& g, const RealObservable& f,
                                   const OracleOptions& opt = {});

}  // namespace hyperlab::h22
