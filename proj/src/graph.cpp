#include "hyperlab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace hyperlab::graph {

WeightedGraph WeightedGraph::from_edges(int n, const std::vector<std::array<double, 3>>& edges,
                                        std::vector<double> h) {
  if (n <= 0) throw std::invalid_argument("graph: need at least one vertex");
  if (static_cast<int>(h.size()) != n) throw std::invalid_argument("graph: h size mismatch");
  for (double hv : h) {
    if (!(hv >= 0.0) || !std::isfinite(hv)) throw std::invalid_argument("graph: h must be >= 0");
  }
  WeightedGraph g;
  g.n_ = n;
  g.h_ = std::move(h);
  g.adj_.resize(n);
  std::map<std::pair<int, int>, double> seen;
  for (const auto& e : edges) {
    const int i = static_cast<int>(e[0]), j = static_cast<int>(e[1]);
    const double w = e[2];
    if (i < 0 || i >= n || j < 0 || j >= n) throw std::invalid_argument("graph: vertex out of range");
    if (i == j) throw std::invalid_argument("graph: self loops are not allowed");
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("graph: weights must be > 0");
    const auto key = std::minmax(i, j);
    if (seen.count({key.first, key.second})) throw std::invalid_argument("graph: duplicate edge");
    seen[{key.first, key.second}] = w;
  }
  for (const auto& [key, w] : seen) {
    g.edges_.push_back({static_cast<double>(key.first), static_cast<double>(key.second), w});
    g.adj_[key.first].push_back({key.second, w});
    g.adj_[key.second].push_back({key.first, w});
  }
  for (auto& lst : g.adj_) {
    std::sort(lst.begin(), lst.end(), [](const Neighbor& a, const Neighbor& b) { return a.j < b.j; });
  }
  return g;
}

double WeightedGraph::beta(int i, int j) const {
  const auto& lst = adj_[i];
  auto it = std::lower_bound(lst.begin(), lst.end(), j,
                             [](const Neighbor& a, int v) { return a.j < v; });
  if (it != lst.end() && it->j == j) return it->w;
  return 0.0;
}

double WeightedGraph::h_min() const { return *std::min_element(h_.begin(), h_.end()); }
double WeightedGraph::h_max() const { return *std::max_element(h_.begin(), h_.end()); }

bool WeightedGraph::h_uniform() const {
  for (double v : h_) {
    if (v != h_[0]) return false;
  }
  return true;
}

TorusSpec TorusSpec::nearest_neighbor(int d, int L, double beta, double h) {
  TorusSpec s;
  s.d = d;
  s.L = L;
  s.h = h;
  for (int axis = 0; axis < d; ++axis) {
    for (int sign : {+1, -1}) {
      RangeWeight rw;
      rw.step[axis] = sign;
      rw.w = beta;
      s.range_weights.push_back(rw);
    }
  }
  return s;
}

int TorusSpec::volume() const {
  int v = 1;
  for (int k = 0; k < d; ++k) v *= L;
  return v;
}

namespace {

void validate(const TorusSpec& spec) {
  if (spec.d < 1 || spec.d > 3) throw std::invalid_argument("torus: d must be 1, 2 or 3");
  if (spec.L < 2) throw std::invalid_argument("torus: L must be >= 2");
  if (spec.range_weights.empty()) throw std::invalid_argument("torus: no couplings");
  if (!(spec.h >= 0.0)) throw std::invalid_argument("torus: h must be >= 0");
  std::map<std::array<int, 3>, double> table;
  for (const auto& rw : spec.range_weights) {
    bool zero = true;
    for (int k = 0; k < spec.d; ++k) {
      if (rw.step[k] != 0) zero = false;
      // keep distinct displacements distinct on the torus
      if (2 * std::abs(rw.step[k]) >= spec.L)
        throw std::invalid_argument("torus: L too small for coupling range");
    }
    for (int k = spec.d; k < 3; ++k) {
      if (rw.step[k] != 0) throw std::invalid_argument("torus: step beyond dimension");
    }
    if (zero) throw std::invalid_argument("torus: zero displacement");
    if (!(rw.w > 0.0)) throw std::invalid_argument("torus: weights must be > 0");
    if (table.count(rw.step)) throw std::invalid_argument("torus: duplicate displacement");
    table[rw.step] = rw.w;
  }
  for (const auto& [step, w] : table) {
    std::array<int, 3> neg{-step[0], -step[1], -step[2]};
    auto it = table.find(neg);
    if (it == table.end() || it->second != w)
      throw std::invalid_argument("torus: couplings must be symmetric under negation");
  }
}

}  // namespace

int site_of(const TorusSpec& spec, const std::array<int, 3>& coord) {
  int idx = 0;
  for (int k = 0; k < spec.d; ++k) {
    int c = coord[k] % spec.L;
    if (c < 0) c += spec.L;
    idx = idx * spec.L + c;
  }
  return idx;
}

std::array<int, 3> coord_of(const TorusSpec& spec, int site) {
  std::array<int, 3> c{0, 0, 0};
  for (int k = spec.d - 1; k >= 0; --k) {
    c[k] = site % spec.L;
    site /= spec.L;
  }
  return c;
}

WeightedGraph build_torus(const TorusSpec& spec) {
  validate(spec);
  const int n = spec.volume();
  std::vector<std::array<double, 3>> edges;
  for (int site = 0; site < n; ++site) {
    const auto c = coord_of(spec, site);
    for (const auto& rw : spec.range_weights) {
      std::array<int, 3> nb = c;
      for (int k = 0; k < spec.d; ++k) nb[k] += rw.step[k];
      const int other = site_of(spec, nb);
      if (other > site) edges.push_back({static_cast<double>(site), static_cast<double>(other), rw.w});
    }
  }
  return WeightedGraph::from_edges(n, edges, std::vector<double>(n, spec.h));
}

std::vector<std::array<int, 3>> dual_lattice(const TorusSpec& spec) {
  std::vector<std::array<int, 3>> ks;
  ks.reserve(spec.volume());
  for (int site = 0; site < spec.volume(); ++site) ks.push_back(coord_of(spec, site));
  return ks;
}

std::array<int, 3> fold_momentum(const TorusSpec& spec, const std::array<int, 3>& k) {
  std::array<int, 3> f{0, 0, 0};
  for (int a = 0; a < spec.d; ++a) {
    int v = k[a] % spec.L;
    if (v < 0) v += spec.L;
    if (2 * v > spec.L) v -= spec.L;
    f[a] = v;
  }
  return f;
}

double lambda_of(const TorusSpec& spec, const std::array<int, 3>& k) {
  const double twopi = 6.283185307179586476925286766559;
  double s = 0.0;
  for (const auto& rw : spec.range_weights) {
    double phase = 0.0;
    for (int a = 0; a < spec.d; ++a) phase += static_cast<double>(k[a]) * rw.step[a];
    s += rw.w * (1.0 - std::cos(twopi * phase / spec.L));
  }
  return s;
}

double lambda_of(const TorusSpec& spec, const std::vector<double>& p) {
  if (static_cast<int>(p.size()) != spec.d) throw std::invalid_argument("lambda: momentum dimension");
  const double twopi = 6.283185307179586476925286766559;
  std::array<int, 3> k{0, 0, 0};
  for (int a = 0; a < spec.d; ++a) {
    const double kr = p[a] * spec.L / twopi;
    const double snapped = std::round(kr);
    if (std::abs(kr - snapped) > 1e-9)
      throw std::invalid_argument("lambda: momentum is not on the dual lattice");
    k[a] = static_cast<int>(snapped);
  }
  return lambda_of(spec, k);
}

double curvature_constant(const TorusSpec& spec) {
  double c = 0.0;
  for (const auto& rw : spec.range_weights) {
    double j2 = 0.0;
    for (int a = 0; a < spec.d; ++a) j2 += static_cast<double>(rw.step[a]) * rw.step[a];
    c += rw.w * j2;
  }
  return 0.5 * c;
}

}  // namespace hyperlab::graph
