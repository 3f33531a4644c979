// quadrature.hpp: deterministic tensor-product quadrature over R^d, d <= 4.
//
// Each axis maps Gauss-Legendre nodes on [-1,1] through x = c sinh(T w)
// (T = asinh(xmax/c)), which packs nodes near the origin and stretches
// them double-exponentially into the tails.  Refinement raises the node
// count per axis until two successive levels agree, so the reported error
// estimate is a self-convergence difference, not a formal bound.
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace hyperlab::quad {

struct Axis {
  double xmax = 10.0;   // half-width of the covered interval
  double scale = 1.0;   // structure scale near the origin
  bool linear = false;  // affine map instead of sinh
};

struct Options {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int n_start = 24;
  int max_level = 3;
};

struct Result {
  double value = 0.0;
  double err_est = 0.0;
  int level_used = 0;
  std::size_t n_evals = 0;
  bool converged = false;
};

struct ResultVec {
  std::vector<double> values;
  double err_est = 0.0;
  int level_used = 0;
  std::size_t n_evals = 0;
  bool converged = false;
};

// Gauss-Legendre nodes and weights on [-1, 1]
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// mapped points of one axis at a given node count
struct MappedPoint {
  double x = 0.0;
  double w = 0.0;
};
std::vector<MappedPoint> axis_points(const Axis& axis, int n);

// Gauss-Hermite nodes for the weight e^{-x^2/2}/sqrt(2 pi); weights sum to
// one, so sums against them are expectations under a standard normal
std::vector<MappedPoint> gauss_hermite(int n);

// node counts per refinement level
int level_points(const Options& opt, int level);

Result integrate(const std::function<double(const double*)>& f, const std::vector<Axis>& axes,
                 const Options& opt = {});

// integrates n_out components in one pass (f fills out[0..n_out-1]);
// convergence is checked on every component
ResultVec integrate_many(const std::function<void(const double*, double*)>& f, int n_out,
                         const std::vector<Axis>& axes, const Options& opt = {});

}  // namespace hyperlab::quad
