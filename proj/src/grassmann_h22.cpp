#include "hyperlab/grassmann_h22.hpp"

#include <cmath>
#include <stdexcept>

namespace hyperlab::grassmann {

namespace {

constexpr double kTwoPi = 6.283185307179586;

// half-width that pushes exp(-h_eff (rho - 1)) * rho^p below ~1e-15
double tail_radius(double h_eff, double poly_deg) {
  double r = 35.0 / h_eff;
  for (int it = 0; it < 4; ++it) {
    const double rho = std::sqrt(1.0 + r * r);
    r = (35.0 + poly_deg * std::log(std::max(2.0, rho))) / h_eff;
  }
  return std::max(6.0, r);
}

// exp(-h (z_i - 1)) / z_i as a supernumber supported on vertex i
FastSupernumber vertex_weight(const FastSupernumber& zi, double h) {
  FastSupernumber arg = zi * (-h);
  arg.coeff(0) += h;
  return mul(apply_analytic(kExp, arg), apply_analytic(kReciprocal, zi));
}

}  // namespace

H22OracleResult h22_expectation_exact(const graph::WeightedGraph& g, const FastForm& f,
                                      const H22OracleOptions& opt) {
  const int n_v = g.size();
  if (n_v < 1 || n_v > 2)
    throw std::invalid_argument("h22_expectation_exact: supports 1 or 2 vertices");

  H22OracleResult out;
  const double h_eff = g.h_min() - opt.growth;
  if (opt.xmax_override > 0.0) {
    out.xmax = opt.xmax_override;
  } else {
    if (h_eff <= 0.0)
      throw std::invalid_argument("h22_expectation_exact: no pinning left after growth budget");
    out.xmax = tail_radius(h_eff, opt.poly_degree);
  }
  const quad::Axis axis{out.xmax, 1.0, false};
  const double beta01 = (n_v == 2) ? g.beta(0, 1) : 0.0;
  const double weight_scale = std::pow(kTwoPi, -n_v);

  // full integrand at one ambient point, organised so vertex factors can be
  // reused from a cache in the two-vertex loop
  const auto assemble = [&](const FastAmbientPoint& pt, const FastSupernumber& z0,
                            const FastSupernumber& w0, const FastSupernumber* z1,
                            const FastSupernumber* w1) {
    FastSupernumber val = mul(f(pt), w0);
    if (n_v == 2) {
      val = mul(val, *w1);
      // u_0.u_1 + 1, built directly on the generator masks
      FastSupernumber u01(2);
      u01.coeff(0) = pt.xs[0] * pt.xs[1] + pt.ys[0] * pt.ys[1] + 1.0;
      u01.coeff(0b0110) = 1.0;   // xi_0 eta_1 = e1 e2
      u01.coeff(0b1001) = -1.0;  // -eta_0 xi_1 = -e0 e3
      u01 += mul(z0, *z1) * (-1.0);
      val = mul(val, apply_analytic(kExp, u01 * beta01));
    }
    return val;
  };

  double prev = 0.0;
  bool have_prev = false;
  for (int level = 0; level <= opt.quad.max_level; ++level) {
    const int n = quad::level_points(opt.quad, level);
    const auto pts = quad::axis_points(axis, n);

    double sum = 0.0;
    if (n_v == 1) {
      double xy[2];
      for (const auto& px : pts)
        for (const auto& py : pts) {
          xy[0] = px.x;
          xy[1] = py.x;
          const FastAmbientPoint pt = FastAmbientPoint::plain(1, &xy[0], &xy[1]);
          const FastSupernumber z0 = pt.z(0);
          sum += px.w * py.w * assemble(pt, z0, vertex_weight(z0, g.h(0)), nullptr, nullptr).top();
          ++out.n_evals;
        }
    } else {
      // cache vertex-1 factors over its (x, y) grid
      struct VertexCache {
        FastSupernumber z, w;
      };
      std::vector<VertexCache> cache(pts.size() * pts.size());
      double xs[2] = {0.0, 0.0}, ys[2] = {0.0, 0.0};
      for (std::size_t ix = 0; ix < pts.size(); ++ix)
        for (std::size_t iy = 0; iy < pts.size(); ++iy) {
          xs[1] = pts[ix].x;
          ys[1] = pts[iy].x;
          const FastAmbientPoint pt = FastAmbientPoint::plain(2, xs, ys);
          VertexCache& c = cache[ix * pts.size() + iy];
          c.z = pt.z(1);
          c.w = vertex_weight(c.z, g.h(1));
        }
      for (std::size_t ix0 = 0; ix0 < pts.size(); ++ix0)
        for (std::size_t iy0 = 0; iy0 < pts.size(); ++iy0) {
          xs[0] = pts[ix0].x;
          ys[0] = pts[iy0].x;
          xs[1] = 0.0;
          ys[1] = 0.0;
          const FastAmbientPoint p0 = FastAmbientPoint::plain(2, xs, ys);
          const FastSupernumber z0 = p0.z(0);
          const FastSupernumber w0 = vertex_weight(z0, g.h(0));
          const double qw0 = pts[ix0].w * pts[iy0].w;
          for (std::size_t ix1 = 0; ix1 < pts.size(); ++ix1)
            for (std::size_t iy1 = 0; iy1 < pts.size(); ++iy1) {
              const VertexCache& c = cache[ix1 * pts.size() + iy1];
              xs[1] = pts[ix1].x;
              ys[1] = pts[iy1].x;
              const FastAmbientPoint pt = FastAmbientPoint::plain(2, xs, ys);
              sum += qw0 * pts[ix1].w * pts[iy1].w * assemble(pt, z0, w0, &c.z, &c.w).top();
              ++out.n_evals;
            }
        }
    }
    sum *= weight_scale;
    out.value = sum;
    out.level_used = level;
    if (have_prev) {
      out.err_est = std::fabs(sum - prev);
      const double tol = std::max(opt.quad.abs_tol, opt.quad.rel_tol * std::fabs(sum));
      if (out.err_est <= tol) {
        out.converged = true;
        break;
      }
    }
    prev = sum;
    have_prev = true;
  }

  // decay probe on the truncation shell
  const double edge = out.xmax;
  const double probes[4][2] = {{edge, 0.0}, {0.0, edge}, {-edge, 0.0}, {edge, edge}};
  for (const auto& pr : probes) {
    for (int i = 0; i < n_v; ++i) {
      std::vector<double> px(n_v, 0.3), py(n_v, -0.2);
      px[i] = pr[0];
      py[i] = pr[1];
      const FastAmbientPoint pt = FastAmbientPoint::plain(n_v, px.data(), py.data());
      const FastSupernumber z0 = pt.z(0);
      const FastSupernumber w0 = vertex_weight(z0, g.h(0));
      FastSupernumber z1, w1;
      if (n_v == 2) {
        z1 = pt.z(1);
        w1 = vertex_weight(z1, g.h(1));
      }
      const double val = assemble(pt, z0, w0, &z1, &w1).top();
      out.boundary_max = std::max(out.boundary_max, std::fabs(val));
    }
  }
  return out;
}

SuperIntegralResult horo_superintegrate(const HoroForm& f, int m, const quad::Axis& axis_t,
                                        const quad::Axis& axis_s, const quad::Options& opt) {
  SuperIntegralResult out;
  const double weight_scale = std::pow(kTwoPi, -m);
  std::vector<double> ts(m), ss(m);

  double prev = 0.0;
  bool have_prev = false;
  for (int level = 0; level <= opt.max_level; ++level) {
    const int n = quad::level_points(opt, level);
    const auto pt_t = quad::axis_points(axis_t, n);
    const auto pt_s = quad::axis_points(axis_s, n);
    const int dims = 2 * m;
    std::vector<int> idx(dims, 0);
    double sum = 0.0;
    while (true) {
      double w = weight_scale;
      for (int dd = 0; dd < dims; ++dd) {
        if (dd % 2 == 0) {
          ts[dd / 2] = pt_t[idx[dd]].x;
          w *= pt_t[idx[dd]].w * std::exp(-pt_t[idx[dd]].x);
        } else {
          ss[dd / 2] = pt_s[idx[dd]].x;
          w *= pt_s[idx[dd]].w;
        }
      }
      const FastSupernumber F = f(FastHoroPoint::plain(m, ts.data(), ss.data()));
      sum += w * F.top();
      ++out.n_evals;
      int dd = dims - 1;
      while (dd >= 0 && ++idx[dd] == n) idx[dd--] = 0;
      if (dd < 0) break;
    }
    out.value = sum;
    out.level_used = level;
    if (have_prev) {
      out.err_est = std::fabs(sum - prev);
      const double tol = std::max(opt.abs_tol, opt.rel_tol * std::fabs(sum));
      if (out.err_est <= tol) {
        out.converged = true;
        break;
      }
    }
    prev = sum;
    have_prev = true;
  }

  const double shell[4][2] = {{axis_t.xmax, 0.0}, {-axis_t.xmax, 0.0}, {0.0, axis_s.xmax}, {0.0, -axis_s.xmax}};
  for (const auto& se : shell) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        ts[j] = (j == i) ? se[0] : 0.1;
        ss[j] = (j == i) ? se[1] : 0.1;
      }
      double w = 1.0;
      for (int j = 0; j < m; ++j) w *= std::exp(-ts[j]);
      const FastSupernumber F = f(FastHoroPoint::plain(m, ts.data(), ss.data()));
      out.boundary_max = std::max(out.boundary_max, std::fabs(F.top() * w));
    }
  }
  return out;
}

namespace {

// dual-derivative extraction: the supernumber whose coefficients are the
// dir-component of every coefficient's gradient
Supernumber dpartial(const Supernumber& F, int dir) {
  Supernumber r(F.pairs());
  for (unsigned k = 0; k < F.n_coeff(); ++k) r.coeff(k) = Dual(F.coeff(k).g[dir]);
  return r;
}

double max_dev_values(const Supernumber& a, const Supernumber& b) {
  double m = 0.0;
  for (unsigned k = 0; k < a.n_coeff(); ++k) m = std::max(m, std::fabs(a.coeff(k).v - b.coeff(k).v));
  return m;
}

// u_i . u_j between two mapped spin supernumbers
Supernumber spins_u_dot(const HoroSpins& a, const HoroSpins& b) {
  Supernumber r = mul(a.x, b.x);
  r += mul(a.y, b.y);
  r += mul(a.z, b.z) * (-1.0);
  r += mul(a.xi, b.eta);
  r += mul(a.eta, b.xi) * (-1.0);
  return r;
}

double next01(double& u, double step) {
  u += step;
  u -= std::floor(u);
  return u;
}

}  // namespace

MapIdentityReport verify_susy_horo_identities(int n_points, double tol) {
  MapIdentityReport rep;
  const double golden = 0.6180339887498949;
  double u = 0.25;
  for (int p = 0; p < n_points; ++p) {
    double t[2], s[2];
    for (int i = 0; i < 2; ++i) {
      t[i] = 3.0 * next01(u, golden) - 1.5;
      s[i] = 4.0 * next01(u, golden) - 2.0;
    }
    const HoroPoint hp = HoroPoint::seeded(2, t, s);
    const HoroSpins sp[2] = {horo_susy_map(hp, 0), horo_susy_map(hp, 1)};

    for (int i = 0; i < 2; ++i) {
      // z agrees with the ambient radius sqrt(1 + tau_ii)
      Supernumber tau_ii = mul(sp[i].x, sp[i].x) + mul(sp[i].y, sp[i].y);
      tau_ii += mul(sp[i].xi, sp[i].eta) * 2.0;
      Supernumber rad = apply_analytic(kSqrt, tau_ii + Supernumber::scalar(2, 1.0));
      rep.max_dev = std::max(rep.max_dev, (rad - sp[i].z).max_abs());

      // u.u = -1
      rep.max_dev =
          std::max(rep.max_dev, (spins_u_dot(sp[i], sp[i]) + Supernumber::scalar(2, 1.0)).max_abs());

      // x + z = e^t
      rep.max_dev = std::max(
          rep.max_dev, (sp[i].x + sp[i].z - Supernumber::scalar(2, dual_exp(hp.ts[i]))).max_abs());

      // dz/ds = y and dy/ds = x + z; the latter doubles as the second
      // derivative d2z/ds2 = e^t given the former
      rep.max_dev = std::max(rep.max_dev, max_dev_values(dpartial(sp[i].z, 2 * i + 1), sp[i].y));
      rep.max_dev =
          std::max(rep.max_dev, max_dev_values(dpartial(sp[i].y, 2 * i + 1), sp[i].x + sp[i].z));
    }

    // pair identity for -u_0.u_1
    {
      const Supernumber lhs = -spins_u_dot(sp[0], sp[1]);
      const Dual dt = hp.ts[0] - hp.ts[1];
      const Dual ds = hp.ss[0] - hp.ss[1];
      Supernumber nil = Supernumber::scalar(2, ds * ds * 0.5);
      nil += mul(hp.psibar(0) - hp.psibar(1), hp.psi(0) - hp.psi(1));
      const Supernumber rhs =
          Supernumber::scalar(2, dual_cosh(dt)) + nil * dual_exp(hp.ts[0] + hp.ts[1]);
      rep.max_dev = std::max(rep.max_dev, (lhs - rhs).max_abs());
    }

    // d(u_i.u_j)/ds_i = y_j (x_i + z_i) - y_i (x_j + z_j)
    const Supernumber u01 = spins_u_dot(sp[0], sp[1]);
    for (int i = 0; i < 2; ++i) {
      const int j = 1 - i;
      const Supernumber closed =
          mul(sp[j].y, sp[i].x + sp[i].z) - mul(sp[i].y, sp[j].x + sp[j].z);
      rep.max_dev = std::max(rep.max_dev, max_dev_values(dpartial(u01, 2 * i + 1), closed));
    }

    // second derivatives of G = -1 - u_0.u_1 through the closed-form first
    // derivative R = dG/ds_1
    {
      const Supernumber R =
          mul(sp[1].y, sp[0].x + sp[0].z) - mul(sp[0].y, sp[1].x + sp[1].z);
      const Supernumber e_tt =
          mul(sp[0].x + sp[0].z, sp[1].x + sp[1].z);  // e^{t_0 + t_1}
      // d2G/ds_0 ds_1 = -e^{t_0+t_1}
      rep.max_dev = std::max(rep.max_dev, max_dev_values(dpartial(R, 1), -e_tt));
      // d2G/ds_1^2 = +e^{t_0+t_1}
      rep.max_dev = std::max(rep.max_dev, max_dev_values(dpartial(R, 3), e_tt));
    }
  }
  rep.pass = rep.max_dev < tol;
  return rep;
}

MapIdentityReport verify_berezinian(int n_points, double tol) {
  MapIdentityReport rep;
  const double golden = 0.6180339887498949;
  double u = 0.75;
  for (int p = 0; p < n_points; ++p) {
    const double t = 3.0 * next01(u, golden) - 1.5;
    const double s = 4.0 * next01(u, golden) - 2.0;
    const HoroPoint hp = HoroPoint::seeded(1, &t, &s);
    const HoroSpins sp = horo_susy_map(hp, 0);

    // J[source][target], sources (t, s | psi, psibar), targets (x, y | eta, xi)
    const Supernumber even_t[2] = {sp.x, sp.y};
    const Supernumber odd_t[2] = {sp.eta, sp.xi};
    Supernumber A[2][2], B[2][2], C[2][2], D[2][2];
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        A[r][c] = dpartial(even_t[c], r);
        B[r][c] = dpartial(odd_t[c], r);
        C[r][c] = gen_derivative(even_t[c], r);
        D[r][c] = gen_derivative(odd_t[c], r);
      }

    // sdet = det(A - B D^{-1} C) / det(D); all reduced entries are even
    const Supernumber detD = mul(D[0][0], D[1][1]) - mul(D[0][1], D[1][0]);
    const Supernumber inv_detD = apply_analytic(kReciprocal, detD);
    Supernumber Dinv[2][2] = {{mul(D[1][1], inv_detD), mul(D[0][1], inv_detD) * (-1.0)},
                              {mul(D[1][0], inv_detD) * (-1.0), mul(D[0][0], inv_detD)}};
    Supernumber M[2][2];
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        M[r][c] = A[r][c];
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) M[r][c] += mul(mul(B[r][k], Dinv[k][l]), C[l][c]) * (-1.0);
      }
    const Supernumber detM = mul(M[0][0], M[1][1]) - mul(M[0][1], M[1][0]);
    const Supernumber sdet = mul(detM, inv_detD);

    const Supernumber lhs = mul(sdet, apply_analytic(kReciprocal, sp.z));
    const Supernumber rhs = Supernumber::scalar(1, std::exp(-t));
    rep.max_dev = std::max(rep.max_dev, max_dev_values(lhs, rhs));
  }
  rep.pass = rep.max_dev < tol;
  return rep;
}

}  // namespace hyperlab::grassmann
