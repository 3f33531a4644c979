// grassmann_h22.hpp: the H^{2|2} target built on the superalgebra engine.
//
// Ambient supercoordinates per vertex: (x, y, xi, eta) with radius
// z = sqrt(1 + x^2 + y^2 + 2 xi eta) >= 1.  The sigma-model expectation of
// a form F on a weighted graph is the superintegral of
//   F * exp(-H) * prod_i (1/z_i),
//   H = sum_edges beta_ij (-u_i.u_j - 1) + sum_i h_i (z_i - 1),
// and supersymmetric normalisation makes <1> = 1 exactly.
//
// Horospherical coordinates (t, s, psi, psibar) parametrise the same
// supermanifold through
//   x = sinh t - e^t (s^2/2 + psibar psi),  y = e^t s,
//   z = cosh t + e^t (s^2/2 + psibar psi),
//   xi = e^t psibar,  eta = e^t psi,
// with flat superintegration weight e^{-t} per vertex.
#pragma once

#include "hyperlab/graph.hpp"
#include "hyperlab/grassmann.hpp"

namespace hyperlab::grassmann {

struct H22OracleOptions {
  // decay budget: |F| is assumed bounded by poly(coords) * exp(growth * sum_i z_i),
  // so the truncation radius is chosen from min_i h_i - growth
  double growth = 0.0;
  double poly_degree = 6.0;
  double xmax_override = 0.0;  // > 0 forces the box half-width
  quad::Options quad;
};

struct H22OracleResult {
  double value = 0.0;
  double err_est = 0.0;
  int level_used = 0;
  std::size_t n_evals = 0;
  bool converged = false;
  double boundary_max = 0.0;
  double xmax = 0.0;
};

// exact sigma-model expectation on graphs with 1 or 2 vertices by tensor
// quadrature over the ambient coordinates; the Grassmann sector is carried
// exactly by the engine
H22OracleResult h22_expectation_exact(const graph::WeightedGraph& g, const FastForm& f,
                                      const H22OracleOptions& opt = {});

// horospherical evaluation point; when seeded, dual direction 2i tracks
// d/dt_i and direction 2i+1 tracks d/ds_i
template <class T>
struct HoroPointT {
  int m = 1;
  std::vector<T> ts, ss;

  static HoroPointT plain(int m, const double* t, const double* s) {
    HoroPointT p;
    p.m = m;
    for (int i = 0; i < m; ++i) {
      p.ts.push_back(T(t[i]));
      p.ss.push_back(T(s[i]));
    }
    return p;
  }
  static HoroPointT seeded(int m, const double* t, const double* s)
    requires std::same_as<T, Dual>
  {
    HoroPointT p;
    p.m = m;
    const int nd = 2 * m;
    for (int i = 0; i < m; ++i) {
      p.ts.push_back(Dual::seeded(t[i], 2 * i, nd));
      p.ss.push_back(Dual::seeded(s[i], 2 * i + 1, nd));
    }
    return p;
  }

  SupernumberT<T> constant(double c) const { return SupernumberT<T>::scalar(m, T(c)); }
  SupernumberT<T> T_of(int i) const { return SupernumberT<T>::scalar(m, ts[i]); }
  SupernumberT<T> S_of(int i) const { return SupernumberT<T>::scalar(m, ss[i]); }
  SupernumberT<T> psi(int i) const { return SupernumberT<T>::generator(m, 2 * i); }
  SupernumberT<T> psibar(int i) const { return SupernumberT<T>::generator(m, 2 * i + 1); }
};

using HoroPoint = HoroPointT<Dual>;
using FastHoroPoint = HoroPointT<double>;

template <class T>
struct HoroSpinsT {
  SupernumberT<T> x, y, z, xi, eta;
};
using HoroSpins = HoroSpinsT<Dual>;

template <class T>
HoroSpinsT<T> horo_susy_map(const HoroPointT<T>& p, int i) {
  const T& t = p.ts[i];
  const T& s = p.ss[i];
  const T et = cexp(t);

  // nilpotent shift n = s^2/2 + psibar psi
  SupernumberT<T> n = SupernumberT<T>::scalar(p.m, s * s * 0.5);
  n += mul(p.psibar(i), p.psi(i));
  const SupernumberT<T> et_n = n * et;

  HoroSpinsT<T> out;
  out.x = SupernumberT<T>::scalar(p.m, csinh(t)) - et_n;
  out.y = SupernumberT<T>::scalar(p.m, et * s);
  out.z = SupernumberT<T>::scalar(p.m, ccosh(t)) + et_n;
  out.xi = p.psibar(i) * et;
  out.eta = p.psi(i) * et;
  return out;
}

using HoroForm = std::function<FastSupernumber(const FastHoroPoint&)>;

// superintegral in horospherical coordinates: top coefficient integrated
// against prod_i e^{-t_i} dt_i ds_i / (2 pi)
SuperIntegralResult horo_superintegrate(const HoroForm& f, int m, const quad::Axis& axis_t,
                                        const quad::Axis& axis_s, const quad::Options& opt = {});

struct MapIdentityReport {
  double max_dev = 0.0;
  bool pass = false;
};

// checks, coefficient by coefficient on a deterministic point set:
//   * the mapped spins satisfy z = sqrt(1 + x^2 + y^2 + 2 xi eta) and
//     u.u = -1, and x + z = e^t exactly;
//   * pair identity  -u_i.u_j = cosh(t_i - t_j)
//       + ((s_i-s_j)^2/2 + (psibar_i-psibar_j)(psi_i-psi_j)) e^{t_i+t_j};
//   * first s-derivatives  dz/ds = y,  dy/ds = x + z,
//       d(u_i.u_j)/ds_i = y_j (x_i + z_i) - y_i (x_j + z_j);
//   * second s-derivatives, taken as dual derivatives of the closed-form
//     first derivatives:  d2z_i/ds_i^2 = e^{t_i} and
//       d2(-1 - u_j.u_l)/ds_i ds_l = -e^{t_j+t_l} (i=j), +e^{t_j+t_l} (i=l)
MapIdentityReport verify_susy_horo_identities(int n_points = 24, double tol = 1e-12);

// builds the map's super-Jacobian (rows = sources t,s,psi,psibar, columns
// = targets x,y,eta,xi; odd rows by left derivatives) and checks
// sdet(J) * (1/z) = e^{-t} coefficient by coefficient
MapIdentityReport verify_berezinian(int n_points = 16, double tol = 1e-12);

}  // namespace hyperlab::grassmann
