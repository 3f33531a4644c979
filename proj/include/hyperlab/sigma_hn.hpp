// sigma_hn.hpp: the hyperbolic H^n sigma model in horospherical coordinates.
//
// A spin u = (x, y^1..y^{n-1}, z) lives on the upper sheet of the Minkowski
// hyperboloid u.u = x^2 + |y|^2 - z^2 = -1, z > 0, parametrised by
//   x = sinh t - (1/2)|s|^2 e^t,  y^c = e^t s^c,  z = cosh t + (1/2)|s|^2 e^t.
// The invariant measure dx dy / z pulls back to e^{(n-1)t} dt ds, and for
// fixed t the s-sector of the Gibbs weight is exactly Gaussian with the
// precision operator D(t), so the chain block-alternates exact s draws with
// Metropolis on the analytically s-marginalised t density
//   exp(-(B(t) - (n-1) sum_i t_i + ((n-1)/2) log det D(t))).
#pragma once

#include <functional>
#include <vector>

#include "hyperlab/graph.hpp"
#include "hyperlab/quadrature.hpp"
#include "hyperlab/rng.hpp"
#include "hyperlab/sigma_common.hpp"
#include "hyperlab/stats.hpp"

namespace hyperlab::hn {

struct HnConfig {
  int n = 2;                         // hyperbolic dimension, >= 2
  std::vector<double> t;             // per vertex
  std::vector<std::vector<double>> s;  // s[c][i], component c < n-1, vertex i
  int size() const { return static_cast<int>(t.size()); }
};

struct AmbientHn {
  std::vector<double> x, z;
  std::vector<std::vector<double>> y;  // y[c][i]
  int size() const { return static_cast<int>(x.size()); }
};

// horospherical chart -> ambient spins; rejects |t| beyond the cosh
// overflow guard
AmbientHn ambient_from_horo(const HnConfig& c);

// Minkowski product u_i . u_j = x_i x_j + y_i . y_j - z_i z_j
double minkowski_dot(const AmbientHn& u, int i, int j);

// sum_{<ij>} beta (cosh dt - 1 + (1/2)|ds|^2 e^{t_i + t_j})
//   + sum_i h_i (cosh t_i - 1 + (1/2)|s_i|^2 e^{t_i})
double energy_horo(const graph::WeightedGraph& g, const HnConfig& c);

// the same energy through the ambient chart: -sum beta (u_i.u_j + 1)
//   + sum h_i (z_i - 1)
double energy_ambient(const graph::WeightedGraph& g, const AmbientHn& u);

// t-marginal coefficients for dimension n
inline sigma::TMarginal t_marginal(int n) {
  return {-static_cast<double>(n - 1), 0.5 * (n - 1)};
}

struct HnChain {
  int n = 2;
  std::vector<HnConfig> configs;   // retained joint states
  std::vector<double> energies;    // energy_horo at each retained state
  sigma::ChainResult info;
};

// block Gibbs sampler: adaptive per-site Metropolis on t against the
// marginal density, one exact Gaussian draw per s component at every
// retained state
HnChain sample_hn(const graph::WeightedGraph& g, int n, const sigma::McmcParams& params,
                  rng::Stream& rs);

// batch-means estimate of a function of the ambient spins along a chain
stats::BatchSummary estimate_observable(const HnChain& chain,
                                        const std::function<double(const AmbientHn&)>& f);

struct HnOracleOptions {
  double tail_mass = 60.0;   // truncate where h (cosh T - 1) reaches this
  int gh_nodes = 48;         // Gauss-Hermite nodes per s dimension
  double growth_exp_z = 0.0; // declared envelope: |F| <= poly * e^{a sum z}
  quad::Options quad;
};

struct HnOracleResult {
  double value = 0.0;
  double err_est = 0.0;
  bool converged = false;
  int level_used = 0;
  std::size_t n_evals = 0;
  double t_radius = 0.0;
};

// deterministic expectation of F(u) for n = 2 on graphs with at most two
// vertices: sinh-mapped trapezoid grid in t, Gauss-Hermite in the whitened
// Gaussian s-sector, normalisation computed from the same passes.
// Observables must declare exponential growth in z through growth_exp_z;
// a >= h_min makes the expectation diverge and is rejected.
HnOracleResult exact_expectation_hn(const graph::WeightedGraph& g, int n,
                                    const std::function<double(const AmbientHn&)>& f,
                                    const HnOracleOptions& opt = {});

// finite-difference checks of the chart derivative identities
//   dz/ds^c = y^c,  dy^{c'}/ds^c = (x+z) delta_{cc'},
//   d(u_i.u_j)/ds_i^c = y_j^c (x_i+z_i) - y_i^c (x_j+z_j),
//   d2 z / d(s^c)^2 = x+z,  d2(u_i.u_j)/ds_i^c ds_l^{c'} = 0 for l != i, j
struct CoordinateReport {
  double max_first_err = 0.0;
  double max_second_err = 0.0;
  double max_mixed_err = 0.0;
  bool pass = false;
};
CoordinateReport verify_coordinate_identities(const HnConfig& point, double step = 1e-5,
                                              double tol = 1e-6);

// finite-difference determinant of the single-vertex chart map
// (t, s) -> (x, y) against the closed form e^{(n-1)t} z
struct JacobianReport {
  double det_fd = 0.0;
  double det_closed = 0.0;
  double rel_err = 0.0;
  bool pass = false;
};
JacobianReport verify_jacobian_hn(int n, double t, const std::vector<double>& s_tilde,
                                  double step = 1e-5, double tol = 1e-6);

}  // namespace hyperlab::hn
