// vrjp.hpp: event-driven simulation of the vertex-reinforced jump process
// and unbiased estimation of discounted functionals.
//
// From vertex i the walk jumps to a neighbour j at rate beta_ij (1 + ell_j),
// where ell_j is the accumulated local time at j. While the walk holds at i
// only ell_i grows and no exit rate depends on ell_i, so the total exit rate
// R = sum_j beta_ij (1 + ell_j) is constant over the holding interval: the
// holding time is exactly Exponential(R) and the destination is chosen with
// probability beta_ij (1 + ell_j) / R. No discretization error anywhere.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hyperlab/graph.hpp"
#include "hyperlab/rng.hpp"

namespace hyperlab::vrjp {

using LocalTimes = std::vector<double>;

struct Trajectory {
  std::vector<double> jump_times;  // strictly increasing, first after 0
  std::vector<int> states;         // one longer than jump_times
  LocalTimes initial_local_times;
  LocalTimes final_local_times;
  double horizon = 0.0;  // elapsed simulated time
};

// exact sample of (X_t, L_t) on [0, horizon]
Trajectory simulate(const graph::WeightedGraph& g, int start, const LocalTimes& ell0,
                    double horizon, rng::Stream& rs);

// int_0^horizon 1_{X_t = b} e^{-h t} dt in closed form per holding interval
double discounted_occupation(const Trajectory& traj, int b, double h);

// g(b, ell) = 1_{b = b0} exp(-<c, ell>); c empty means a plain indicator
struct TiltedIndicator {
  int b0 = 0;
  std::vector<double> c;
};

// int_0^horizon 1_{X_t = b0} e^{-<c, L_t>} e^{-<hvec, L_t - ell0>} dt, closed
// form per interval: with r = h_{b0} + c_{b0}, each visit contributes
// e^{-<h, l_k - ell0> - <c, l_k>} (1 - e^{-r dt}) / r.  With uniform hvec = h
// this is the e^{-h t} discount by time conservation; vertex-dependent hvec
// is the pinning that appears in the isomorphisms.
double discounted_tilted_occupation(const Trajectory& traj, const TiltedIndicator& g,
                                    const std::vector<double>& hvec);

// a functional g(X, L) together with the structure the estimators can use
struct Functional {
  std::function<double(int, const LocalTimes&)> eval;
  std::optional<TiltedIndicator> tilted;  // set when g has the closed form
};
Functional bounded_functional(std::function<double(int, const LocalTimes&)> f);
Functional tilted_functional(const TiltedIndicator& g);

enum class Strategy {
  interval,  // closed-form integral over a truncated trajectory; tilted only
  killing,   // simulate to an Exponential(h) time, return g there / h
};

struct FunctionalEstimate {
  double value = 0.0;
  double se = 0.0;
  std::size_t n_samples = 0;
  double horizon = 0.0;     // interval strategy: the truncation T*
  double tail_bound = 0.0;  // interval strategy: |g|_inf e^{-h T*} / h
};

struct FunctionalOptions {
  Strategy strategy = Strategy::interval;
  double eps_tail = 1e-10;  // truncate where the tail bound reaches this of 1/h
};

// unbiased estimate of int_0^infty E_{start, ell0}[g(X_t, L_t)] e^{-h t} dt.
// The killing strategy is unbiased for any bounded g; the interval strategy
// integrates tilted indicators exactly up to the reported tail bound.
FunctionalEstimate estimate_discounted_functional(const graph::WeightedGraph& g, int start,
                                                  const LocalTimes& ell0, double h,
                                                  const Functional& func, std::size_t n_samples,
                                                  rng::Stream& rs,
                                                  const FunctionalOptions& opt = {});

}  // namespace hyperlab::vrjp
