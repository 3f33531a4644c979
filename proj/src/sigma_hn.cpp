#include "hyperlab/sigma_hn.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace hyperlab::hn {

namespace {

void check_config(const HnConfig& c) {
  if (c.n < 2) throw std::invalid_argument("hn: dimension n must be >= 2");
  if (static_cast<int>(c.s.size()) != c.n - 1)
    throw std::invalid_argument("hn: expected n - 1 transverse components");
  for (const auto& comp : c.s)
    if (comp.size() != c.t.size()) throw std::invalid_argument("hn: component size mismatch");
  for (double ti : c.t)
    if (!std::isfinite(ti) || std::fabs(ti) > sigma::kTGuard)
      throw std::invalid_argument("hn: radial coordinate out of range");
  for (const auto& comp : c.s)
    for (double si : comp)
      if (!std::isfinite(si)) throw std::invalid_argument("hn: transverse coordinate not finite");
}

double s_norm2(const HnConfig& c, int i) {
  double v = 0.0;
  for (const auto& comp : c.s) v += comp[i] * comp[i];
  return v;
}

}  // namespace

AmbientHn ambient_from_horo(const HnConfig& c) {
  check_config(c);
  const int m = c.size();
  AmbientHn u;
  u.x.resize(m);
  u.z.resize(m);
  u.y.assign(c.s.size(), std::vector<double>(m));
  for (int i = 0; i < m; ++i) {
    const double et = std::exp(c.t[i]);
    const double half = 0.5 * s_norm2(c, i) * et;
    u.x[i] = std::sinh(c.t[i]) - half;
    u.z[i] = std::cosh(c.t[i]) + half;
    for (std::size_t comp = 0; comp < c.s.size(); ++comp) u.y[comp][i] = et * c.s[comp][i];
  }
  return u;
}

double minkowski_dot(const AmbientHn& u, int i, int j) {
  double v = u.x[i] * u.x[j] - u.z[i] * u.z[j];
  for (const auto& yc : u.y) v += yc[i] * yc[j];
  return v;
}

double energy_horo(const graph::WeightedGraph& g, const HnConfig& c) {
  check_config(c);
  if (c.size() != g.size()) throw std::invalid_argument("hn: graph size mismatch");
  double e = 0.0;
  for (const auto& ed : g.edges()) {
    const int i = static_cast<int>(ed[0]), j = static_cast<int>(ed[1]);
    double ds2 = 0.0;
    for (const auto& comp : c.s) {
      const double d = comp[i] - comp[j];
      ds2 += d * d;
    }
    e += ed[2] * (std::cosh(c.t[i] - c.t[j]) - 1.0 + 0.5 * ds2 * std::exp(c.t[i] + c.t[j]));
  }
  for (int i = 0; i < g.size(); ++i)
    e += g.h(i) * (std::cosh(c.t[i]) - 1.0 + 0.5 * s_norm2(c, i) * std::exp(c.t[i]));
  return e;
}

double energy_ambient(const graph::WeightedGraph& g, const AmbientHn& u) {
  if (u.size() != g.size()) throw std::invalid_argument("hn: graph size mismatch");
  double e = 0.0;
  for (const auto& ed : g.edges()) {
    const int i = static_cast<int>(ed[0]), j = static_cast<int>(ed[1]);
    e -= ed[2] * (minkowski_dot(u, i, j) + 1.0);
  }
  for (int i = 0; i < g.size(); ++i) e += g.h(i) * (u.z[i] - 1.0);
  return e;
}

HnChain sample_hn(const graph::WeightedGraph& g, int n, const sigma::McmcParams& params,
                  rng::Stream& rs) {
  if (n < 2) throw std::invalid_argument("hn: dimension n must be >= 2");
  HnChain out;
  out.n = n;
  out.info = sigma::run_t_chain(
      g, t_marginal(n), params, rs,
      [&out, &g, &rs, n](const std::vector<double>& t, sigma::PrecisionOperator& d) {
        HnConfig c;
        c.n = n;
        c.t = t;
        c.s.resize(n - 1);
        for (int comp = 0; comp < n - 1; ++comp) c.s[comp] = d.sample_gaussian(rs);
        out.energies.push_back(energy_horo(g, c));
        out.configs.push_back(std::move(c));
      });
  return out;
}

stats::BatchSummary estimate_observable(const HnChain& chain,
                                        const std::function<double(const AmbientHn&)>& f) {
  if (chain.configs.size() < 100)
    throw std::invalid_argument("hn: need at least 100 retained samples");
  std::vector<double> vals;
  vals.reserve(chain.configs.size());
  for (const auto& c : chain.configs) vals.push_back(f(ambient_from_horo(c)));
  return stats::batch_means(vals);
}

HnOracleResult exact_expectation_hn(const graph::WeightedGraph& g, int n,
                                    const std::function<double(const AmbientHn&)>& f,
                                    const HnOracleOptions& opt) {
  if (n != 2) throw std::invalid_argument("hn oracle: only n = 2 is quadrature sized");
  const int m = g.size();
  if (m > 2) throw std::invalid_argument("hn oracle: at most two vertices");
  const double hmin = g.h_min();
  if (hmin <= 0.0) throw std::invalid_argument("hn oracle: needs pinning h > 0");
  if (opt.growth_exp_z >= hmin)
    throw std::invalid_argument("hn oracle: envelope e^{a z} needs a < h_min");

  HnOracleResult out;
  const double h_eff = hmin - opt.growth_exp_z;
  out.t_radius = std::acosh(1.0 + opt.tail_mass / h_eff);
  const quad::Axis t_axis{out.t_radius, 1.0, false};

  sigma::PrecisionOperator d(g);
  HnConfig c;
  c.n = 2;
  c.t.resize(m);
  c.s.assign(1, std::vector<double>(m));

  // one pass returns (numerator, denominator) at the given resolutions
  const auto pass = [&](int n_t, int n_gh) {
    const auto tp = quad::axis_points(t_axis, n_t);
    const auto gh = quad::gauss_hermite(n_gh);
    double num = 0.0, den = 0.0;
    std::vector<int> it(m, 0);
    std::vector<double> w(m);
    for (;;) {
      double wt = 1.0;
      for (int k = 0; k < m; ++k) {
        c.t[k] = tp[it[k]].x;
        wt *= tp[it[k]].w;
      }
      d.assemble(c.t);
      double sum_t = 0.0;
      for (double tv : c.t) sum_t += tv;
      wt *= std::exp(-sigma::confining_energy(g, c.t) + sum_t - 0.5 * d.log_det());

      std::vector<int> is(m, 0);
      for (;;) {
        double ws = 1.0;
        for (int k = 0; k < m; ++k) {
          w[k] = gh[is[k]].x;
          ws *= gh[is[k]].w;
        }
        c.s[0] = d.unwhiten(w);
        const double fv = f(ambient_from_horo(c));
        num += wt * ws * fv;
        den += wt * ws;
        ++out.n_evals;
        int k = 0;
        while (k < m && ++is[k] == n_gh) is[k++] = 0;
        if (k == m) break;
      }
      int k = 0;
      while (k < m && ++it[k] == n_t) it[k++] = 0;
      if (k == m) break;
    }
    return std::pair<double, double>(num, den);
  };

  double prev = 0.0;
  bool have_prev = false;
  for (int level = 0; level <= opt.quad.max_level; ++level) {
    const auto [num, den] = pass(quad::level_points(opt.quad, level), opt.gh_nodes);
    const double val = num / den;
    out.level_used = level;
    if (have_prev) {
      out.err_est = std::fabs(val - prev);
      if (out.err_est <= std::max(opt.quad.abs_tol, opt.quad.rel_tol * std::fabs(val))) {
        out.converged = true;
        out.value = val;
        break;
      }
    }
    prev = val;
    out.value = val;
    have_prev = true;
  }

  // independent refinement of the Gauss-Hermite direction
  const auto [num, den] = pass(quad::level_points(opt.quad, out.level_used), opt.gh_nodes * 3 / 2);
  const double dense = num / den;
  const double gh_err = std::fabs(dense - out.value);
  out.err_est = std::max(out.err_est, gh_err);
  out.value = dense;
  if (gh_err > std::max(opt.quad.abs_tol, opt.quad.rel_tol * std::fabs(dense)))
    out.converged = false;
  return out;
}

CoordinateReport verify_coordinate_identities(const HnConfig& point, double step, double tol) {
  check_config(point);
  const int m = point.size();
  const int nc = point.n - 1;
  const auto u0 = ambient_from_horo(point);
  CoordinateReport rep;
  // second differences divide by step^2, so the first-derivative step would
  // drown in rounding; the targets are quadratic in s and a coarser step
  // costs no truncation
  const double step2 = 100.0 * step;

  const auto perturbed = [&](int i, int comp, double eps) {
    HnConfig p = point;
    p.s[comp][i] += eps;
    return ambient_from_horo(p);
  };
  const auto track = [](double& worst, double got, double want) {
    const double err = std::fabs(got - want);
    if (err > worst) worst = err;
  };

  for (int i = 0; i < m; ++i) {
    const double xz = u0.x[i] + u0.z[i];
    for (int comp = 0; comp < nc; ++comp) {
      const auto up = perturbed(i, comp, step), um = perturbed(i, comp, -step);
      // first derivatives of the chart
      track(rep.max_first_err, (up.z[i] - um.z[i]) / (2 * step), u0.y[comp][i]);
      track(rep.max_first_err, (up.x[i] - um.x[i]) / (2 * step), -u0.y[comp][i]);
      for (int cp = 0; cp < nc; ++cp)
        track(rep.max_first_err, (up.y[cp][i] - um.y[cp][i]) / (2 * step),
              cp == comp ? xz : 0.0);
      const auto up2 = perturbed(i, comp, step2), um2 = perturbed(i, comp, -step2);
      // diagonal second derivative
      track(rep.max_second_err, (up2.z[i] - 2 * u0.z[i] + um2.z[i]) / (step2 * step2), xz);
      // pair products against the closed forms
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        const double want =
            u0.y[comp][j] * xz - u0.y[comp][i] * (u0.x[j] + u0.z[j]);
        track(rep.max_first_err,
              (minkowski_dot(up, i, j) - minkowski_dot(um, i, j)) / (2 * step), want);
        track(rep.max_second_err,
              (minkowski_dot(up2, i, j) - 2 * minkowski_dot(u0, i, j) +
               minkowski_dot(um2, i, j)) /
                  (step2 * step2),
              -xz * (u0.x[j] + u0.z[j]));
      }
    }
  }

  // mixed derivatives through a third vertex vanish
  for (int i = 0; i < m && m >= 3; ++i)
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      for (int l = 0; l < m; ++l) {
        if (l == i || l == j) continue;
        HnConfig pp = point, pm = point, mp = point, mm = point;
        pp.s[0][i] += step2;
        pp.s[0][l] += step2;
        pm.s[0][i] += step2;
        pm.s[0][l] -= step2;
        mp.s[0][i] -= step2;
        mp.s[0][l] += step2;
        mm.s[0][i] -= step2;
        mm.s[0][l] -= step2;
        const double mixed = (minkowski_dot(ambient_from_horo(pp), i, j) -
                              minkowski_dot(ambient_from_horo(pm), i, j) -
                              minkowski_dot(ambient_from_horo(mp), i, j) +
                              minkowski_dot(ambient_from_horo(mm), i, j)) /
                             (4 * step2 * step2);
        track(rep.max_mixed_err, mixed, 0.0);
      }
    }

  rep.pass = rep.max_first_err < tol && rep.max_second_err < tol && rep.max_mixed_err < tol;
  return rep;
}

JacobianReport verify_jacobian_hn(int n, double t, const std::vector<double>& s_tilde,
                                  double step, double tol) {
  if (n != 2 && n != 3) throw std::invalid_argument("hn jacobian: n must be 2 or 3");
  if (static_cast<int>(s_tilde.size()) != n - 1)
    throw std::invalid_argument("hn jacobian: s dimension mismatch");

  const auto chart = [n](const Eigen::VectorXd& q) {
    HnConfig c;
    c.n = n;
    c.t = {q[0]};
    c.s.resize(n - 1);
    for (int k = 0; k < n - 1; ++k) c.s[k] = {q[k + 1]};
    const auto u = ambient_from_horo(c);
    Eigen::VectorXd out(n);
    out[0] = u.x[0];
    for (int k = 0; k < n - 1; ++k) out[k + 1] = u.y[k][0];
    return out;
  };

  Eigen::VectorXd q(n);
  q[0] = t;
  for (int k = 0; k < n - 1; ++k) q[k + 1] = s_tilde[k];
  Eigen::MatrixXd jac(n, n);
  for (int col = 0; col < n; ++col) {
    Eigen::VectorXd qp = q, qm = q;
    qp[col] += step;
    qm[col] -= step;
    jac.col(col) = (chart(qp) - chart(qm)) / (2 * step);
  }

  JacobianReport rep;
  rep.det_fd = jac.determinant();
  double s2 = 0.0;
  for (double sv : s_tilde) s2 += sv * sv;
  rep.det_closed = std::exp((n - 1) * t) * (std::cosh(t) + 0.5 * s2 * std::exp(t));
  rep.rel_err = std::fabs(rep.det_fd - rep.det_closed) / std::fabs(rep.det_closed);
  rep.pass = rep.rel_err < tol;
  return rep;
}

}  // namespace hyperlab::hn
