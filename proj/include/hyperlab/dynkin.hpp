// dynkin.hpp: the isomorphism between discounted functionals of the
// vertex-reinforced jump process and spin correlations of the hyperbolic
// models, checked as statistical equality of independently sampled sides.
//
// For the supersymmetric model and g(b, l) = 1_{b = b0} e^{-<c, l>},
//   <y_a y_{b0} e^{-<c, z - 1>}>  =  int_0^inf E_{a,0}[ g(X_u, L_u) D(u) ] du,
// where the walk starts at a with zero initial local times and D(u) is the
// discount e^{-hu} (vertex-dependent fields h_i discount through
// e^{-<h, L_u>} instead, which reduces to e^{-hu} when h is uniform).
// The spin side is sampled over the t-marginal chain: conditionally on t
// the s and Grassmann sectors are Gaussian, and the insertion integrates to
//   e^{t_a + t_{b0}} e^{-<c, cosh t - 1>} sqrt(det(D+C)/det D) ((D+C)^{-1})_{a b0}
// with C = diag(c_i e^{t_i}).  D + C is the precision operator of the same
// graph with field h + c, so both factorizations share one code path.
//
// For the H^n model the correspondence holds in annealed form,
//   sum_b <y_a y_b g(b, z - 1)> = <z_a int_0^inf E_{a,z-1}[g(X_u, L_u)] e^{-hu} du>,
// and the walk side nests jump-process replicas inside the spin average:
// each retained spin sample hands its z field to K walks started at a with
// initial local times z - 1, and the replica mean is weighted by z_a.
#pragma once

#include <cstdint>
#include <vector>

#include "hyperlab/graph.hpp"
#include "hyperlab/sigma_common.hpp"

namespace hyperlab::dynkin {

enum class Model { h22, hn };
enum class Verdict { pass, fail, inconclusive };

struct IsomorphismCase {
  graph::WeightedGraph g;
  Model model = Model::h22;
  int n = 2;                       // H^n sphere dimension when model == hn
  int a = 0;                       // walk start and y_a vertex
  int b = 0;                       // the b0 picked out by the indicator in g
  std::vector<double> c;           // decay rates of g, empty or zero means no tilt
  int n_walks = 200000;            // jump-process trajectories (h22 walk side)
  int inner_replicas = 8;          // walks per spin sample (hn nested side)
  sigma::McmcParams mcmc;          // budgets for the spin chains
  std::uint64_t master_seed = 1;
  std::uint64_t case_id = 0;       // seed lane separator between cases
  bool shared_seed_debug = false;  // reuse the spin lane on the walk side (debug aid)
  double eps_tail = 1e-10;         // discount mass left outside the walk horizon
  double min_ess = 100.0;          // chain effective-sample-size gate
  bool with_oracle = true;         // attach the deterministic value on small graphs
  double oracle_rel_tol = 1e-7;    // refinement target for the attached oracle
};

struct SideEstimate {
  double value = 0.0;
  double se = 0.0;
  std::size_t n = 0;   // samples entering the estimate
  double ess = 0.0;    // effective sample size; equals n for independent draws
  bool converged = false;
};

struct IsomorphismReport {
  SideEstimate lhs;  // spin-model side
  SideEstimate rhs;  // jump-process side
  double z = 0.0;
  Verdict verdict = Verdict::inconclusive;
  bool shared_seed_flag = false;
  bool budget_warning = false;  // hn: replica noise dominates the spin spread
  double oracle = 0.0;          // deterministic value on graphs of 1 or 2 vertices
  double oracle_err = 0.0;
  bool has_oracle = false;
};

// g identically one in the class above: plain discounted occupation of b
// against the Rao-Blackwellized two-point function
IsomorphismReport verify_h22_two_point(const IsomorphismCase& c);

// the tilted family g = 1_{b = b0} e^{-<c, l>}; covers two_point at c = 0
IsomorphismReport verify_h22_general_g(const IsomorphismCase& c);

// H^n version with the nested walk estimator, n = 2 or 3
IsomorphismReport verify_hn(const IsomorphismCase& c);

// conditional spin-side insertion at one t configuration; d_plain holds the
// field h, d_shift the field h + c, both assembled at t
double h22_tilted_insertion(const sigma::PrecisionOperator& d_plain,
                            const sigma::PrecisionOperator& d_shift,
                            const std::vector<double>& t, int a, int b,
                            const std::vector<double>& c);

}  // namespace hyperlab::dynkin
