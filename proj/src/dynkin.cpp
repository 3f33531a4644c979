#include "hyperlab/dynkin.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hyperlab/grassmann_h22.hpp"
#include "hyperlab/rng.hpp"
#include "hyperlab/sigma_h22.hpp"
#include "hyperlab/sigma_hn.hpp"
#include "hyperlab/stats.hpp"
#include "hyperlab/vrjp.hpp"

namespace hyperlab::dynkin {

namespace {

constexpr std::uint64_t kLanesPerCase = 8;

rng::Stream lane(const IsomorphismCase& c, std::uint64_t slot) {
  return rng::Stream(c.master_seed, rng::Module::dynkin, c.case_id * kLanesPerCase + slot, 0);
}

std::vector<double> checked_decay(const IsomorphismCase& c) {
  std::vector<double> cv = c.c;
  if (cv.empty()) cv.assign(c.g.size(), 0.0);
  if (static_cast<int>(cv.size()) != c.g.size())
    throw std::invalid_argument("dynkin: decay vector size mismatch");
  for (double v : cv)
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("dynkin: decay rates must be finite and nonnegative");
  return cv;
}

bool any_positive(const std::vector<double>& v) {
  for (double x : v)
    if (x > 0.0) return true;
  return false;
}

void check_case(const IsomorphismCase& c) {
  if (c.a < 0 || c.a >= c.g.size() || c.b < 0 || c.b >= c.g.size())
    throw std::invalid_argument("dynkin: vertex out of range");
  if (c.n_walks < 100) throw std::invalid_argument("dynkin: needs at least 100 walks");
  if (c.inner_replicas < 1) throw std::invalid_argument("dynkin: needs at least one replica");
  if (!(c.eps_tail > 0.0) || c.eps_tail >= 1.0)
    throw std::invalid_argument("dynkin: eps_tail must lie in (0, 1)");
}

SideEstimate chain_estimate(const std::vector<double>& series, double min_ess) {
  const auto bm = stats::batch_means(series);
  const auto ac = stats::integrated_autocorr_time(series);
  SideEstimate s;
  s.value = bm.mean;
  s.se = bm.se;
  s.n = series.size();
  s.ess = ac.ess;
  s.converged = std::isfinite(s.value) && std::isfinite(s.se) && s.ess >= min_ess;
  return s;
}

SideEstimate walk_estimate(const vrjp::FunctionalEstimate& est) {
  SideEstimate s;
  s.value = est.value;
  s.se = est.se;
  s.n = est.n_samples;
  s.ess = static_cast<double>(est.n_samples);  // independent draws
  s.converged = est.n_samples >= 100 && std::isfinite(est.value) && std::isfinite(est.se);
  return s;
}

void conclude(IsomorphismReport& rep) {
  const double denom = std::hypot(rep.lhs.se, rep.rhs.se);
  const double diff = rep.lhs.value - rep.rhs.value;
  rep.z = denom > 0.0 ? diff / denom
                      : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  if (!rep.lhs.converged || !rep.rhs.converged)
    rep.verdict = Verdict::inconclusive;
  else
    rep.verdict = std::fabs(rep.z) < 4.0 ? Verdict::pass : Verdict::fail;
}

// exact sigma-model expectation of y_a y_b e^{-<c, z-1>} with the Grassmann
// sector carried by the superalgebra engine; graphs of 1 or 2 vertices
void attach_oracle(IsomorphismReport& rep, const IsomorphismCase& c,
                   const std::vector<double>& cv) {
  if (!c.with_oracle || c.g.size() > 2) return;
  const int a = c.a, b = c.b;
  const grassmann::FastForm f = [&](const grassmann::FastAmbientPoint& p) {
    grassmann::FastSupernumber out = p.constant(p.ys[a] * p.ys[b]);
    for (int i = 0; i < p.m; ++i) {
      if (cv[i] == 0.0) continue;
      auto arg = p.z(i);
      arg.coeff(0) -= 1.0;
      out = mul(out, apply_analytic(grassmann::kExp, arg * (-cv[i])));
    }
    return out;
  };
  grassmann::H22OracleOptions opt;
  opt.quad.rel_tol = c.oracle_rel_tol;
  const auto r = grassmann::h22_expectation_exact(c.g, f, opt);
  rep.oracle = r.value;
  rep.oracle_err = r.err_est;
  rep.has_oracle = r.converged;
}

// spin side of the supersymmetric check: per retained t the conditional
// expectation of the insertion, batch-means error, autocorrelation gate
SideEstimate h22_spin_side(const IsomorphismCase& c, const std::vector<double>& cv,
                           rng::Stream& rs) {
  h22::ChainOptions copt;
  copt.mcmc = c.mcmc;
  const auto chain = h22::sample_h22(c.g, copt, rs);

  const bool tilted = any_positive(cv);
  sigma::PrecisionOperator d_plain(c.g);
  std::vector<double> h_shift = c.g.h();
  for (std::size_t i = 0; i < h_shift.size(); ++i) h_shift[i] += cv[i];
  const auto g_shift =
      graph::WeightedGraph::from_edges(c.g.size(), c.g.edges(), std::move(h_shift));
  sigma::PrecisionOperator d_shift(g_shift);

  std::vector<double> series;
  series.reserve(chain.ts.size());
  for (const auto& t : chain.ts) {
    d_shift.assemble(t);
    if (tilted) d_plain.assemble(t);
    series.push_back(h22_tilted_insertion(tilted ? d_plain : d_shift, d_shift, t, c.a, c.b, cv));
  }
  return chain_estimate(series, c.min_ess);
}

// walk side of the supersymmetric check; vertex-dependent fields discount
// through e^{-<h, L>} and truncate on the smallest rate
SideEstimate h22_walk_side(const IsomorphismCase& c, const std::vector<double>& cv,
                           rng::Stream& rs) {
  const vrjp::LocalTimes zero(c.g.size(), 0.0);
  const vrjp::TiltedIndicator gi{c.b, any_positive(cv) ? cv : std::vector<double>{}};
  if (c.g.h_uniform()) {
    vrjp::FunctionalOptions opt;
    opt.strategy = vrjp::Strategy::interval;
    opt.eps_tail = c.eps_tail;
    const auto est = vrjp::estimate_discounted_functional(
        c.g, c.a, zero, c.g.h(0), vrjp::tilted_functional(gi),
        static_cast<std::size_t>(c.n_walks), rs, opt);
    return walk_estimate(est);
  }

  const double hmin = c.g.h_min();
  if (!(hmin > 0.0))
    throw std::invalid_argument("dynkin: the walk horizon needs min_i h_i > 0");
  const double horizon = std::log(1.0 / (hmin * c.eps_tail)) / hmin;
  stats::RunningStat st;
  for (int k = 0; k < c.n_walks; ++k) {
    const auto traj = vrjp::simulate(c.g, c.a, zero, horizon, rs);
    st.push(vrjp::discounted_tilted_occupation(traj, gi, c.g.h()));
  }
  vrjp::FunctionalEstimate est;
  est.value = st.mean;
  est.se = st.stderr_mean();
  est.n_samples = st.n;
  est.horizon = horizon;
  est.tail_bound = c.eps_tail;
  return walk_estimate(est);
}

}  // namespace

double h22_tilted_insertion(const sigma::PrecisionOperator& d_plain,
                            const sigma::PrecisionOperator& d_shift,
                            const std::vector<double>& t, int a, int b,
                            const std::vector<double>& c) {
  double expo = t[a] + t[b];
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] != 0.0) expo -= c[i] * (std::cosh(t[i]) - 1.0);
  expo += 0.5 * (d_shift.log_det() - d_plain.log_det());
  return std::exp(expo) * d_shift.inverse_entry(a, b);
}

IsomorphismReport verify_h22_two_point(const IsomorphismCase& c) {
  check_case(c);
  const auto cv = checked_decay(c);
  if (any_positive(cv))
    throw std::invalid_argument("verify_h22_two_point: wants an untilted functional");
  if (!c.g.h_uniform())
    throw std::invalid_argument("verify_h22_two_point: wants a uniform field");

  IsomorphismReport rep;
  rep.shared_seed_flag = c.shared_seed_debug;

  // spin side: Rao-Blackwellized two-point function along a fresh chain
  {
    auto rs = lane(c, 0);
    h22::ChainOptions copt;
    copt.mcmc = c.mcmc;
    const auto chain = h22::sample_h22(c.g, copt, rs);
    const auto est = h22::estimate_two_point(c.g, chain, c.a, c.b);

    // recompute the per-sample series for the autocorrelation gate
    sigma::PrecisionOperator d(c.g);
    std::vector<double> series;
    series.reserve(chain.ts.size());
    for (const auto& t : chain.ts) {
      d.assemble(t);
      series.push_back(std::exp(t[c.a] + t[c.b]) * d.inverse_entry(c.a, c.b));
    }
    rep.lhs = chain_estimate(series, c.min_ess);
    rep.lhs.value = est.value;
    rep.lhs.se = est.se;
  }

  {
    auto rs = lane(c, c.shared_seed_debug ? 0 : 1);
    rep.rhs = h22_walk_side(c, cv, rs);
  }

  attach_oracle(rep, c, cv);
  conclude(rep);
  return rep;
}

IsomorphismReport verify_h22_general_g(const IsomorphismCase& c) {
  check_case(c);
  const auto cv = checked_decay(c);

  IsomorphismReport rep;
  rep.shared_seed_flag = c.shared_seed_debug;
  {
    auto rs = lane(c, 0);
    rep.lhs = h22_spin_side(c, cv, rs);
  }
  {
    auto rs = lane(c, c.shared_seed_debug ? 0 : 1);
    rep.rhs = h22_walk_side(c, cv, rs);
  }
  attach_oracle(rep, c, cv);
  conclude(rep);
  return rep;
}

IsomorphismReport verify_hn(const IsomorphismCase& c) {
  check_case(c);
  const auto cv = checked_decay(c);
  if (c.n < 2 || c.n > 3) throw std::invalid_argument("verify_hn: n must be 2 or 3");
  if (!c.g.h_uniform() || !(c.g.h_min() > 0.0))
    throw std::invalid_argument("verify_hn: wants a uniform positive field");
  const double h = c.g.h(0);

  IsomorphismReport rep;
  rep.shared_seed_flag = c.shared_seed_debug;

  // spin side: plain estimator of y_a y_b e^{-<c, z-1>} over the ambient spins
  {
    auto rs = lane(c, 0);
    const auto chain = hn::sample_hn(c.g, c.n, c.mcmc, rs);
    std::vector<double> series;
    series.reserve(chain.configs.size());
    for (const auto& cfg : chain.configs) {
      const auto u = hn::ambient_from_horo(cfg);
      double v = u.y[0][c.a] * u.y[0][c.b];
      for (int i = 0; i < c.g.size(); ++i)
        if (cv[i] > 0.0) v *= std::exp(-cv[i] * (u.z[i] - 1.0));
      series.push_back(v);
    }
    rep.lhs = chain_estimate(series, c.min_ess);
  }

  // walk side: an independent spin chain feeds z to nested walk replicas,
  // started at a with initial local times z - 1 and weighted by z_a
  {
    auto rs = lane(c, c.shared_seed_debug ? 0 : 1);
    const auto chain = hn::sample_hn(c.g, c.n, c.mcmc, rs);
    const double horizon = std::log(1.0 / (h * c.eps_tail)) / h;
    const vrjp::TiltedIndicator gi{c.b, any_positive(cv) ? cv : std::vector<double>{}};

    std::vector<double> series;
    series.reserve(chain.configs.size());
    double inner_noise = 0.0;
    std::size_t inner_n = 0;
    for (std::size_t k = 0; k < chain.configs.size(); ++k) {
      const auto& cfg = chain.configs[k];
      const auto u = hn::ambient_from_horo(cfg);
      vrjp::LocalTimes ell0(u.z.size());
      for (std::size_t i = 0; i < u.z.size(); ++i) ell0[i] = u.z[i] - 1.0;
      // one stream per spin sample so the walk draws do not depend on the
      // order the samples are worked through
      rng::Stream wrs(c.master_seed, rng::Module::dynkin, c.case_id * kLanesPerCase + 2, k);
      stats::RunningStat rep_stat;
      for (int r = 0; r < c.inner_replicas; ++r) {
        const auto traj = vrjp::simulate(c.g, c.a, ell0, horizon, wrs);
        rep_stat.push(vrjp::discounted_tilted_occupation(traj, gi, c.g.h()));
      }
      const double za = u.z[c.a];
      series.push_back(za * rep_stat.mean);
      if (rep_stat.n >= 2) {
        inner_noise += za * za * rep_stat.variance() / static_cast<double>(rep_stat.n);
        ++inner_n;
      }
    }
    rep.rhs = chain_estimate(series, c.min_ess);

    // replica-noise share of the total spread; dominant inner noise means
    // the budget should move from outer samples to replicas
    if (inner_n > 0 && series.size() >= 2) {
      stats::RunningStat tot;
      for (double v : series) tot.push(v);
      const double between = tot.variance();
      if (between > 0.0) rep.budget_warning = inner_noise / static_cast<double>(inner_n) > 0.5 * between;
    }
  }

  if (c.with_oracle && c.g.size() <= 2 && c.n == 2) {
    hn::HnOracleOptions opt;
    opt.quad.rel_tol = c.oracle_rel_tol;
    const auto r = hn::exact_expectation_hn(
        c.g, 2,
        [&](const hn::AmbientHn& u) {
          double v = u.y[0][c.a] * u.y[0][c.b];
          for (int i = 0; i < c.g.size(); ++i)
            if (cv[i] > 0.0) v *= std::exp(-cv[i] * (u.z[i] - 1.0));
          return v;
        },
        opt);
    rep.oracle = r.value;
    rep.oracle_err = r.err_est;
    rep.has_oracle = r.converged;
  }

  conclude(rep);
  return rep;
}

}  // namespace hyperlab::dynkin
