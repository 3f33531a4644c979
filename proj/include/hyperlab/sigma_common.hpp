// sigma_common.hpp: machinery shared by the hyperbolic sigma model samplers.
//
// Both models reduce, once the Gaussian s-sector is integrated out or
// sampled exactly, to a chain on the radial coordinates t with density
//   exp(-(B(t) + c_lin sum_i t_i + c_det log det D(t)))
// where
//   B(t) = sum_{<ij>} beta_ij (cosh(t_i - t_j) - 1) + sum_i h_i (cosh t_i - 1)
// and D(t) is the positive definite precision operator
//   D_ij = -beta_ij e^{t_i + t_j}   (i != j)
//   D_ii = sum_j beta_ij e^{t_i + t_j} + h_i e^{t_i}.
#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <functional>
#include <vector>

#include "hyperlab/graph.hpp"
#include "hyperlab/rng.hpp"

namespace hyperlab::sigma {

// overflow guard on the radial coordinate: cosh(700) is near the double
// ceiling, and a healthy pinned chain never gets anywhere close
constexpr double kTGuard = 700.0;

class PrecisionOperator {
 public:
  // the fill-reducing ordering is computed once per graph; requires some
  // h_i > 0, otherwise D(t) is singular and the measure unnormalizable
  explicit PrecisionOperator(const graph::WeightedGraph& g);

  // numeric refactorization at t; throws on loss of positive definiteness
  void assemble(const std::vector<double>& t);

  int size() const { return n_; }
  bool assembled() const { return assembled_; }
  double log_det() const;
  double entry(int i, int j) const;

  // (v, D v) directly from the sparse matrix
  double quadratic_form(const std::vector<double>& v) const;
  std::vector<double> solve(const std::vector<double>& rhs) const;
  // (D^{-1})_{ab} via a single solve
  double inverse_entry(int a, int b) const;
  Eigen::MatrixXd inverse_dense() const;
  // deterministic map taking w ~ N(0, I) to a vector with covariance D^{-1}
  std::vector<double> unwhiten(const std::vector<double>& w) const;
  // one exact draw s ~ N(0, D^{-1}); consumes size() normals
  std::vector<double> sample_gaussian(rng::Stream& rs) const;

 private:
  graph::WeightedGraph g_;  // by value: the operator outlives any temporary it was built from
  int n_ = 0;
  Eigen::SparseMatrix<double> d_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool assembled_ = false;
};

// B(t) as above
double confining_energy(const graph::WeightedGraph& g, const std::vector<double>& t);

// neg-log density of a t-marginal, up to an additive constant
struct TMarginal {
  double c_lin = 0.0;
  double c_det = 0.0;
};

// assembles D at t and returns B(t) + c_lin sum t + c_det log det D(t)
double t_marginal_neg_log(const graph::WeightedGraph& g, const TMarginal& marg,
                          const std::vector<double>& t, PrecisionOperator& d);

struct McmcParams {
  int burn_in_sweeps = 10000;
  int sweeps = 20000;
  int thin = 10;
  double target_acceptance = 0.4;
  double adapt_rate = 0.05;   // per-proposal log-step nudge during burn-in
  double initial_step = 0.8;
};

struct SweepRecord {
  int sweep = 0;            // index within the measurement phase
  double neg_log = 0.0;     // marginal neg-log at the retained state
  double acceptance = 0.0;  // site acceptance fraction of this sweep
  double t_min = 0.0;
  double t_max = 0.0;
};

struct ChainResult {
  std::size_t n_retained = 0;
  double mean_acceptance = 0.0;  // measurement phase only
  std::vector<SweepRecord> records;
};

// called at every retained state with D assembled at the current t
using ChainVisitor = std::function<void(const std::vector<double>& t, PrecisionOperator& d)>;

// per-site adaptive Gaussian Metropolis on t.  Step scales adapt toward the
// target acceptance during burn-in and are frozen afterwards, so the
// measurement phase is a fixed reversible kernel.  Every proposal does a
// full sparse refactorization; each proposal consumes exactly two draws
// (one normal, one uniform) so replay is independent of the accept pattern.
ChainResult run_t_chain(const graph::WeightedGraph& g, const TMarginal& marg,
                        const McmcParams& params, rng::Stream& rs, const ChainVisitor& visit);

}  // namespace hyperlab::sigma
