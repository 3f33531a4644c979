#include "hyperlab/merminwagner.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "hyperlab/sigma_h22.hpp"
#include "hyperlab/sigma_hn.hpp"
#include "hyperlab/stats.hpp"

namespace hyperlab::mw {

namespace {

constexpr std::uint64_t kMaxLadder = 32;  // lanes reserved per h row in a scan

sigma::TMarginal marginal_of(Model model, int n) {
  return model == Model::h22 ? h22::t_marginal() : hn::t_marginal(n);
}

bool coupling_free(const graph::TorusSpec& spec) {
  for (const auto& rw : spec.range_weights) {
    if (rw.w != 0.0) return false;
  }
  return true;
}

graph::WeightedGraph torus_graph(const graph::TorusSpec& spec) {
  if (coupling_free(spec)) {
    return graph::WeightedGraph::from_edges(spec.volume(), {},
                                            std::vector<double>(spec.volume(), spec.h));
  }
  return graph::build_torus(spec);
}

void check_spectrum_inputs(const graph::TorusSpec& spec, const SpectrumOptions& opt) {
  if (spec.d < 1 || spec.d > 3) throw std::invalid_argument("spectrum: d must be 1, 2 or 3");
  if (spec.L < 2 || spec.L > max_torus_side(spec.d))
    throw std::invalid_argument("spectrum: L outside the desk-scale range");
  if (!(spec.h > 0.0)) throw std::invalid_argument("spectrum: h must be > 0");
  if (opt.model == Model::hn && (opt.n < 2 || opt.n > 3))
    throw std::invalid_argument("spectrum: hyperbolic dimension must be 2 or 3");
  if (!(opt.min_ess >= 1.0)) throw std::invalid_argument("spectrum: min_ess must be >= 1");
  const long retained = static_cast<long>(opt.mcmc.sweeps) / std::max(1, opt.mcmc.thin);
  if (retained < 64) throw std::invalid_argument("spectrum: budget keeps fewer than 64 samples");
}

// index of the momentum -k on the row-major dual lattice
std::vector<int> negation_table(const graph::TorusSpec& spec) {
  const auto ks = graph::dual_lattice(spec);
  std::vector<int> neg(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    std::array<int, 3> m{0, 0, 0};
    for (int a = 0; a < spec.d; ++a) m[a] = (spec.L - ks[i][a]) % spec.L;
    neg[i] = graph::site_of(spec, m);
  }
  return neg;
}

// one naive DFT pass along the axis with the given stride; length-L lines
void dft_axis(std::vector<std::complex<double>>& f, const std::vector<std::complex<double>>& tw,
              int L, int stride) {
  const int vol = static_cast<int>(f.size());
  std::vector<std::complex<double>> line(L);
  for (int outer = 0; outer < vol / (L * stride); ++outer) {
    for (int inner = 0; inner < stride; ++inner) {
      const int base = outer * L * stride + inner;
      for (int k = 0; k < L; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (int m = 0; m < L; ++m) acc += tw[(k * m) % L] * f[base + m * stride];
        line[k] = acc;
      }
      for (int k = 0; k < L; ++k) f[base + k * stride] = line[k];
    }
  }
}

struct SeriesStat {
  double value = 0.0;
  double se = 0.0;
};

SeriesStat summarize(const std::vector<double>& xs) {
  const auto b = stats::batch_means(xs);
  return {b.mean, b.se};
}

}  // namespace

int max_torus_side(int d) {
  switch (d) {
    case 1: return 128;
    case 2: return 32;
    case 3: return 8;
    default: throw std::invalid_argument("torus side cap: d must be 1, 2 or 3");
  }
}

SpectralEstimate estimate_spectrum(const graph::TorusSpec& spec, const SpectrumOptions& opt) {
  check_spectrum_inputs(spec, opt);
  const graph::WeightedGraph g = torus_graph(spec);
  const int vol = spec.volume();
  const int L = spec.L;

  SpectralEstimate est;
  est.spec = spec;
  est.model = opt.model;
  est.n = opt.model == Model::h22 ? 2 : opt.n;
  est.momenta = graph::dual_lattice(spec);
  est.lambda.resize(vol);
  for (int k = 0; k < vol; ++k) est.lambda[k] = graph::lambda_of(spec, est.momenta[k]);

  const std::vector<int> neg = negation_table(spec);
  std::vector<std::complex<double>> tw(L);
  const double step = 2.0 * std::acos(-1.0) / L;
  for (int k = 0; k < L; ++k) tw[k] = {std::cos(step * k), std::sin(step * k)};

  std::vector<std::vector<double>> ghat_series(vol);
  std::vector<double> g0_series, bulk_series, rb_series;
  std::vector<std::complex<double>> f(vol);
  std::vector<double> y(vol), w(vol), raw(vol);

  rng::Stream chain_rs(opt.master_seed, rng::Module::merminwagner, 2 * opt.cell_id, 0);
  rng::Stream draw_rs(opt.master_seed, rng::Module::merminwagner, 2 * opt.cell_id + 1, 0);

  double max_dev = 0.0;
  const auto info = sigma::run_t_chain(
      g, marginal_of(opt.model, est.n), opt.mcmc, chain_rs,
      [&](const std::vector<double>& t, sigma::PrecisionOperator& d) {
        // one exact conditional Gaussian; for H^n this is the first of the
        // n - 1 exchangeable components, which is all the spectrum needs
        const std::vector<double> s = d.sample_gaussian(draw_rs);
        double sum_y2 = 0.0;
        for (int j = 0; j < vol; ++j) {
          y[j] = std::exp(t[j]) * s[j];
          f[j] = {y[j], 0.0};
          sum_y2 += y[j] * y[j];
        }
        int stride = 1;
        for (int a = spec.d - 1; a >= 0; --a) {
          dft_axis(f, tw, L, stride);
          stride *= L;
        }
        double sum_raw = 0.0;
        for (int k = 0; k < vol; ++k) {
          raw[k] = std::norm(f[k]) / vol;
          sum_raw += raw[k];
        }
        max_dev = std::max(max_dev, std::abs(sum_raw - sum_y2) / std::max(1.0, sum_y2));
        for (int k = 0; k < vol; ++k) ghat_series[k].push_back(0.5 * (raw[k] + raw[neg[k]]));
        // G(0) through the audited Parseval sum, so removing the zero mode
        // (row-major index 0) is an exact per-sample decomposition
        g0_series.push_back(sum_raw / vol);
        bulk_series.push_back((sum_raw - raw[0]) / vol);
        for (int j = 0; j < vol; ++j) w[j] = std::exp(t[j]);
        const std::vector<double> x = d.solve(w);
        double quad = 0.0;
        for (int j = 0; j < vol; ++j) quad += w[j] * x[j];
        rb_series.push_back(quad / vol);
      });

  est.n_samples = info.n_retained;
  est.parseval_max_dev = max_dev;
  est.ghat.resize(vol);
  est.ghat_se.resize(vol);
  for (int k = 0; k < vol; ++k) {
    const auto s = summarize(ghat_series[k]);
    est.ghat[k] = s.value;
    est.ghat_se[k] = s.se;
  }
  const auto s0 = summarize(g0_series);
  est.g0 = s0.value;
  est.g0_se = s0.se;
  const auto sb = summarize(bulk_series);
  est.g0_bulk = sb.value;
  est.g0_bulk_se = sb.se;
  const auto srb = summarize(rb_series);
  est.ghat0_rb = srb.value;
  est.ghat0_rb_se = srb.se;

  const auto iat_g0 = stats::integrated_autocorr_time(g0_series);
  const auto iat_rb = stats::integrated_autocorr_time(rb_series);
  est.ess = std::min(iat_g0.ess, iat_rb.ess);
  bool finite = std::isfinite(est.g0) && std::isfinite(est.ghat0_rb);
  for (int k = 0; k < vol; ++k) finite = finite && std::isfinite(est.ghat[k]);
  est.converged = finite && est.ess >= opt.min_ess;
  return est;
}

BoundReport check_bound(const SpectralEstimate& est) {
  const int vol = static_cast<int>(est.ghat.size());
  if (vol == 0 || est.lambda.size() != est.ghat.size())
    throw std::invalid_argument("check_bound: estimate carries no spectrum");
  const double h = est.h();
  const double kappa = est.kappa();

  BoundReport rep;
  rep.kappa = kappa;
  rep.bound.resize(vol);
  rep.margin.resize(vol);
  rep.margin_se.resize(vol);
  rep.min_z = std::numeric_limits<double>::infinity();
  for (int k = 0; k < vol; ++k) {
    const double denom = (1.0 + kappa * est.g0) * est.lambda[k] + h;
    rep.bound[k] = 1.0 / denom;
    rep.margin[k] = est.ghat[k] - rep.bound[k];
    // the bound rises when G0 falls; propagate through d(bound)/d(G0)
    const double dbound = kappa * est.lambda[k] / (denom * denom);
    rep.margin_se[k] = std::hypot(est.ghat_se[k], dbound * est.g0_se);
    const double z = rep.margin_se[k] > 0.0
                         ? rep.margin[k] / rep.margin_se[k]
                         : (rep.margin[k] == 0.0 ? 0.0
                                                 : std::copysign(std::numeric_limits<double>::infinity(),
                                                                 rep.margin[k]));
    if (z < rep.min_z) {
      rep.min_z = z;
      rep.worst = k;
    }
  }
  const int k0 = graph::site_of(est.spec, {0, 0, 0});
  rep.z_sum_rule = est.ghat_se[k0] > 0.0
                       ? (est.ghat[k0] - 1.0 / h) / est.ghat_se[k0]
                       : 0.0;
  rep.pass = rep.min_z > -4.0;
  return rep;
}

SelfConsistency self_consistency(const SpectralEstimate& est) {
  const int vol = static_cast<int>(est.ghat.size());
  if (vol == 0) throw std::invalid_argument("self_consistency: estimate carries no spectrum");
  const double h = est.h();
  const double kappa = est.kappa();

  SelfConsistency sc;
  sc.lhs = est.g0;
  double rhs = 0.0, drhs = 0.0;
  for (int k = 0; k < vol; ++k) {
    const double denom = (1.0 + kappa * est.g0) * est.lambda[k] + h;
    rhs += 1.0 / denom;
    drhs -= kappa * est.lambda[k] / (denom * denom);
  }
  sc.rhs = rhs / vol;
  sc.margin = sc.lhs - sc.rhs;
  // G0 enters both sides; d(margin)/d(G0) = 1 - d(rhs)/d(G0) >= 1
  sc.margin_se = (1.0 - drhs / vol) * est.g0_se;
  sc.z = sc.margin_se > 0.0 ? sc.margin / sc.margin_se : 0.0;
  sc.pass = sc.margin > -4.0 * sc.margin_se;
  return sc;
}

ScanReport h_scan(const ScanOptions& opt) {
  if (opt.d < 1 || opt.d > 3) throw std::invalid_argument("h_scan: d must be 1, 2 or 3");
  if (!(opt.beta > 0.0)) throw std::invalid_argument("h_scan: beta must be > 0");
  if (opt.l_ladder.empty() || opt.l_ladder.size() > kMaxLadder)
    throw std::invalid_argument("h_scan: ladder must hold 1 to 32 sizes");
  for (std::size_t i = 0; i < opt.l_ladder.size(); ++i) {
    if (opt.l_ladder[i] < 2 || opt.l_ladder[i] > max_torus_side(opt.d))
      throw std::invalid_argument("h_scan: ladder size outside the desk-scale range");
    if (i > 0 && opt.l_ladder[i] <= opt.l_ladder[i - 1])
      throw std::invalid_argument("h_scan: ladder must be strictly increasing");
  }
  if (opt.h_list.empty()) throw std::invalid_argument("h_scan: empty h list");
  for (std::size_t i = 0; i < opt.h_list.size(); ++i) {
    if (!(opt.h_list[i] > 0.0)) throw std::invalid_argument("h_scan: h must be > 0");
    if (i > 0 && opt.h_list[i] >= opt.h_list[i - 1])
      throw std::invalid_argument("h_scan: h list must be strictly decreasing");
  }

  ScanReport rep;
  for (std::size_t hi = 0; hi < opt.h_list.size(); ++hi) {
    const double h = opt.h_list[hi];
    ScanRow row;
    row.h = h;
    ScanCell prev;
    bool have_prev = false;
    for (std::size_t li = 0; li < opt.l_ladder.size(); ++li) {
      const int L = opt.l_ladder[li];
      const auto ts = graph::TorusSpec::nearest_neighbor(opt.d, L, opt.beta, h);
      SpectrumOptions so;
      so.model = opt.model;
      so.n = opt.n;
      so.mcmc = opt.mcmc;
      so.master_seed = opt.master_seed;
      so.cell_id = hi * kMaxLadder + li;
      so.min_ess = opt.min_ess;
      const auto est = estimate_spectrum(ts, so);
      const auto sc = self_consistency(est);

      ScanCell cell;
      cell.L = L;
      cell.h = h;
      cell.g0 = est.g0;
      cell.g0_se = est.g0_se;
      cell.g0_bulk = est.g0_bulk;
      cell.g0_bulk_se = est.g0_bulk_se;
      cell.sc_margin = sc.margin;
      cell.sc_margin_se = sc.margin_se;
      cell.ess = est.ess;
      cell.converged = est.converged;
      rep.cells.push_back(cell);

      row.L = L;
      row.g0 = cell.g0;
      row.g0_se = cell.g0_se;
      row.g0_bulk = cell.g0_bulk;
      row.g0_bulk_se = cell.g0_bulk_se;
      row.selfcons_pass = sc.pass;
      if (!cell.converged) break;  // a longer chain, not a larger box, is the fix
      // d = 3 plateaus on the bulk value: the zero-mode share of G(0) keeps
      // shrinking with the volume and would mask the genuine limit
      const double cur = opt.d == 3 ? cell.g0_bulk : cell.g0;
      const double cur_se = opt.d == 3 ? cell.g0_bulk_se : cell.g0_se;
      const double old = opt.d == 3 ? prev.g0_bulk : prev.g0;
      const double old_se = opt.d == 3 ? prev.g0_bulk_se : prev.g0_se;
      if (have_prev && std::abs(cur - old) <= 2.0 * std::hypot(cur_se, old_se)) {
        row.plateau = true;
        break;
      }
      prev = cell;
      have_prev = true;
    }
    rep.rows.push_back(row);
  }

  rep.all_plateau = true;
  for (const auto& r : rep.rows) rep.all_plateau = rep.all_plateau && r.plateau;
  bool monotone = rep.rows.size() >= 2 && rep.all_plateau;
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
    const auto& lo = rep.rows[i];      // larger h
    const auto& hi = rep.rows[i + 1];  // smaller h
    const double z = (hi.g0 - lo.g0) / std::hypot(hi.g0_se, lo.g0_se);
    rep.growth_z.push_back(z);
    monotone = monotone && z > 4.0;
    if (lo.plateau && hi.plateau && lo.g0 != 0.0)
      rep.max_rel_change = std::max(rep.max_rel_change, std::abs(hi.g0 / lo.g0 - 1.0));
    if (lo.plateau && hi.plateau && lo.g0_bulk != 0.0)
      rep.max_bulk_rel_change =
          std::max(rep.max_bulk_rel_change, std::abs(hi.g0_bulk / lo.g0_bulk - 1.0));
  }
  rep.monotone_pass = opt.d <= 2 && monotone;
  return rep;
}

}  // namespace hyperlab::mw
