// graph.hpp: finite weighted graphs and translation-invariant tori.
//
// Sites of a d-dimensional torus of side L are indexed row-major with the
// last coordinate fastest.  Momenta live on the dual lattice p = 2 pi k / L,
// k in {0..L-1}^d, enumerated in the same row-major order.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hyperlab::graph {

struct Neighbor {
  int j = 0;
  double w = 0.0;
};

class WeightedGraph {
 public:
  // edges are undirected (i, j, w) with i != j, w > 0, listed once;
  // h is the per-vertex pinning (all entries >= 0)
  static WeightedGraph from_edges(int n, const std::vector<std::array<double, 3>>& edges,
                                  std::vector<double> h);

  int size() const { return n_; }
  const std::vector<Neighbor>& neighbors(int i) const { return adj_[i]; }
  const std::vector<std::array<double, 3>>& edges() const { return edges_; }
  double beta(int i, int j) const;  // 0 if not adjacent
  const std::vector<double>& h() const { return h_; }
  double h(int i) const { return h_[i]; }
  double h_min() const;
  double h_max() const;
  bool h_uniform() const;
  int degree(int i) const { return static_cast<int>(adj_[i].size()); }

 private:
  int n_ = 0;
  std::vector<std::vector<Neighbor>> adj_;
  std::vector<std::array<double, 3>> edges_;
  std::vector<double> h_;
};

// a displacement with its coupling; tori keep the full +/- symmetric set
struct RangeWeight {
  std::array<int, 3> step{0, 0, 0};  // only the first d entries are used
  double w = 0.0;
};

struct TorusSpec {
  int d = 1;
  int L = 2;
  std::vector<RangeWeight> range_weights;
  double h = 1.0;

  // nearest-neighbour torus with uniform coupling
  static TorusSpec nearest_neighbor(int d, int L, double beta, double h);
  int volume() const;
};

// validates the spec (d in {1,2,3}, symmetric steps, 2*max|step| < L so
// distinct torus edges do not collapse) and builds the graph
WeightedGraph build_torus(const TorusSpec& spec);

int site_of(const TorusSpec& spec, const std::array<int, 3>& coord);
std::array<int, 3> coord_of(const TorusSpec& spec, int site);

// dual lattice momenta as integer vectors k (p = 2 pi k / L), row-major
std::vector<std::array<int, 3>> dual_lattice(const TorusSpec& spec);

// folds k into the symmetric window (-L/2, L/2]
std::array<int, 3> fold_momentum(const TorusSpec& spec, const std::array<int, 3>& k);

// lattice dispersion lambda(p) = sum_j beta_{0j} (1 - cos(p . j))
double lambda_of(const TorusSpec& spec, const std::array<int, 3>& k);
// overload taking real momentum components; rejects p off the dual lattice
double lambda_of(const TorusSpec& spec, const std::vector<double>& p);

// curvature constant C(beta) = (1/2) sum_j beta_{0j} |j|^2 appearing in the
// quadratic dispersion bound lambda(p) <= C |p|^2
double curvature_constant(const TorusSpec& spec);

}  // namespace hyperlab::graph
