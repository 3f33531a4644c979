#include "hyperlab/sigma_h22.hpp"

#include <cmath>
#include <stdexcept>

#include "hyperlab/stats.hpp"

namespace hyperlab::h22 {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kTwoPi = 6.2831853071795864769;

}  // namespace

double horo_action(const graph::WeightedGraph& g, const H22Config& c) {
  if (static_cast<int>(c.s.size()) != g.size()) throw std::invalid_argument("s dimension mismatch");
  sigma::PrecisionOperator d(g);
  // confining_energy validates t and the |t| guard
  double v = sigma::confining_energy(g, c.t);
  d.assemble(c.t);
  v += 0.5 * d.quadratic_form(c.s);
  for (double ti : c.t) v += ti + kLog2Pi;
  v -= d.log_det();
  return v;
}

double t_marginal_neg_log_density(const graph::WeightedGraph& g, const std::vector<double>& t) {
  sigma::PrecisionOperator d(g);
  return sigma::t_marginal_neg_log(g, t_marginal(), t, d);
}

H22Chain sample_h22(const graph::WeightedGraph& g, const ChainOptions& opt, rng::Stream& rs) {
  H22Chain chain;
  chain.info = sigma::run_t_chain(
      g, t_marginal(), opt.mcmc, rs,
      [&chain, &opt, &rs](const std::vector<double>& t, sigma::PrecisionOperator& d) {
        chain.ts.push_back(t);
        if (opt.draw_s) chain.ss.push_back(d.sample_gaussian(rs));
      });
  return chain;
}

Estimate estimate_two_point(const graph::WeightedGraph& g, const H22Chain& chain, int a, int b) {
  if (chain.ts.size() < 100) throw std::invalid_argument("estimate_two_point: chain too short");
  sigma::PrecisionOperator d(g);
  std::vector<double> xs;
  xs.reserve(chain.ts.size());
  for (const auto& t : chain.ts) {
    d.assemble(t);
    xs.push_back(std::exp(t[a] + t[b]) * d.inverse_entry(a, b));
  }
  const auto bm = stats::batch_means(xs);
  return {bm.mean, bm.se};
}

Estimate estimate_two_point_plain(const H22Chain& chain, int a, int b) {
  if (chain.ss.size() < 100)
    throw std::invalid_argument("estimate_two_point_plain: no stored s draws");
  std::vector<double> xs;
  xs.reserve(chain.ss.size());
  for (std::size_t k = 0; k < chain.ss.size(); ++k) {
    const auto& t = chain.ts[k];
    const auto& s = chain.ss[k];
    xs.push_back(std::exp(t[a] + t[b]) * s[a] * s[b]);
  }
  const auto bm = stats::batch_means(xs);
  return {bm.mean, bm.se};
}

WardReport ward_check(const graph::WeightedGraph& g, const H22Chain& chain) {
  if (chain.ts.size() < 100) throw std::invalid_argument("ward_check: chain too short");
  const int n = g.size();
  const std::size_t m = chain.ts.size();

  // pair list: exhaustive on small graphs, deterministic strided subsample
  // on larger ones
  std::vector<std::array<int, 2>> pairs;
  if (n <= 16) {
    for (int j = 0; j < n; ++j)
      for (int l = j; l < n; ++l) pairs.push_back({j, l});
  } else {
    for (int j = 0; j < n; ++j) pairs.push_back({j, j});
    const int stride = std::max(1, n / 8);
    for (int j = 0; j < n && pairs.size() < 200; j += stride)
      for (int l = j + 1; l < n && pairs.size() < 200; l += stride) pairs.push_back({j, l});
  }

  std::vector<std::vector<double>> single_series(n), pair_series(pairs.size());
  for (int j = 0; j < n; ++j) single_series[j].reserve(m);
  for (auto& ps : pair_series) ps.reserve(m);

  sigma::PrecisionOperator d(g);
  for (const auto& t : chain.ts) {
    d.assemble(t);
    const Eigen::MatrixXd dinv = d.inverse_dense();
    for (int j = 0; j < n; ++j) single_series[j].push_back(std::exp(t[j]) - 1.0);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const int j = pairs[k][0], l = pairs[k][1];
      pair_series[k].push_back(std::exp(t[j] + t[l]) * (1.0 - dinv(j, l)) - 1.0);
    }
  }

  WardReport rep;
  for (int j = 0; j < n; ++j) {
    const auto bm = stats::batch_means(single_series[j]);
    const double z = bm.se > 0.0 ? bm.mean / bm.se : 0.0;
    rep.z_single.push_back(z);
    rep.max_abs_z = std::max(rep.max_abs_z, std::fabs(z));
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto bm = stats::batch_means(pair_series[k]);
    const double z = bm.se > 0.0 ? bm.mean / bm.se : 0.0;
    rep.z_pair.push_back({static_cast<double>(pairs[k][0]), static_cast<double>(pairs[k][1]), z});
    rep.max_abs_z = std::max(rep.max_abs_z, std::fabs(z));
  }
  rep.pass = rep.max_abs_z < 4.0;
  return rep;
}

namespace {

// closed-form Cholesky of D(t) for one or two vertices
struct SmallChol {
  int m = 1;
  double l00 = 0.0, l10 = 0.0, l11 = 1.0;

  void factor(const graph::WeightedGraph& g, const double* t) {
    m = g.size();
    if (m == 1) {
      l00 = std::sqrt(g.h(0) * std::exp(t[0]));
      return;
    }
    const double cross = g.beta(0, 1) * std::exp(t[0] + t[1]);
    const double d00 = g.h(0) * std::exp(t[0]) + cross;
    const double d11 = g.h(1) * std::exp(t[1]) + cross;
    l00 = std::sqrt(d00);
    l10 = -cross / l00;
    l11 = std::sqrt(d11 - l10 * l10);
  }
  double sqrt_det() const { return m == 1 ? l00 : l00 * l11; }
  // s = L^{-T} w
  void unwhiten(const double* w, double* s) const {
    if (m == 1) {
      s[0] = w[0] / l00;
      return;
    }
    s[1] = w[1] / l11;
    s[0] = (w[0] - l10 * s[1]) / l00;
  }
};

}  // namespace

OracleResult exact_expectation_h22(const graph::WeightedGraph& g, const RealObservable& f,
                                   const OracleOptions& opt) {
  const int m = g.size();
  if (m < 1 || m > 2)
    throw std::invalid_argument("exact_expectation_h22: needs 1 or 2 vertices");
  if (g.h_min() <= 0.0)
    throw std::invalid_argument("exact_expectation_h22: every vertex must be pinned");

  OracleResult out;
  out.t_radius = std::acosh(1.0 + opt.tail_mass / g.h_min());
  const quad::Axis t_axis{out.t_radius, 1.0, false};

  const auto pass = [&](int n_t, int n_gh) {
    const auto tp = quad::axis_points(t_axis, n_t);
    const auto gh = quad::gauss_hermite(n_gh);
    std::vector<double> tv(m), sv(m);
    SmallChol chol;
    double total = 0.0;
    if (m == 1) {
      for (const auto& p0 : tp) {
        tv[0] = p0.x;
        chol.factor(g, tv.data());
        const double wt = p0.w * std::exp(-sigma::confining_energy(g, tv) - tv[0]) *
                          chol.sqrt_det() / std::sqrt(kTwoPi);
        double inner = 0.0;
        for (const auto& q0 : gh) {
          chol.unwhiten(&q0.x, sv.data());
          inner += q0.w * f(tv, sv);
          ++out.n_evals;
        }
        total += wt * inner;
      }
      return total;
    }
    for (const auto& p0 : tp) {
      for (const auto& p1 : tp) {
        tv[0] = p0.x;
        tv[1] = p1.x;
        chol.factor(g, tv.data());
        const double wt = p0.w * p1.w *
                          std::exp(-sigma::confining_energy(g, tv) - tv[0] - tv[1]) *
                          chol.sqrt_det() / kTwoPi;
        double inner = 0.0;
        double wv[2];
        for (const auto& q0 : gh) {
          wv[0] = q0.x;
          for (const auto& q1 : gh) {
            wv[1] = q1.x;
            chol.unwhiten(wv, sv.data());
            inner += q0.w * q1.w * f(tv, sv);
            ++out.n_evals;
          }
        }
        total += wt * inner;
      }
    }
    return total;
  };

  double prev = 0.0;
  for (int level = 0; level <= opt.quad.max_level; ++level) {
    const double cur = pass(quad::level_points(opt.quad, level), opt.gh_nodes);
    out.level_used = level;
    if (level > 0) {
      out.err_est = std::fabs(cur - prev);
      if (out.err_est <= std::max(opt.quad.abs_tol, opt.quad.rel_tol * std::fabs(cur))) {
        out.value = cur;
        out.converged = true;
        break;
      }
    }
    prev = cur;
    out.value = cur;
  }
  if (!out.converged) return out;

  // refine the Gauss-Hermite sector once at the accepted outer level
  const double dense = pass(quad::level_points(opt.quad, out.level_used), opt.gh_nodes * 3 / 2);
  const double gh_err = std::fabs(dense - out.value);
  out.err_est = std::max(out.err_est, gh_err);
  out.value = dense;
  if (gh_err > std::max(opt.quad.abs_tol, opt.quad.rel_tol * std::fabs(dense)))
    out.converged = false;
  return out;
}

}  // namespace hyperlab::h22
