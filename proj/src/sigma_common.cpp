#include "hyperlab/sigma_common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "hyperlab/stats.hpp"

namespace hyperlab::sigma {

namespace {

void check_t(const std::vector<double>& t, int n) {
  if (static_cast<int>(t.size()) != n) throw std::invalid_argument("t dimension mismatch");
  for (double ti : t) {
    if (!std::isfinite(ti) || std::fabs(ti) > kTGuard) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "radial coordinate out of range: t = %.6g", ti);
      throw std::runtime_error(buf);
    }
  }
}

}  // namespace

PrecisionOperator::PrecisionOperator(const graph::WeightedGraph& g) : g_(g), n_(g.size()) {
  if (g.h_max() <= 0.0)
    throw std::invalid_argument("PrecisionOperator: needs some pinning h_i > 0");
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n_) + 2 * g.edges().size());
  for (int i = 0; i < n_; ++i) trip.emplace_back(i, i, 1.0);
  for (const auto& e : g.edges()) {
    const int i = static_cast<int>(e[0]), j = static_cast<int>(e[1]);
    trip.emplace_back(i, j, -0.1);
    trip.emplace_back(j, i, -0.1);
  }
  d_.resize(n_, n_);
  d_.setFromTriplets(trip.begin(), trip.end());
  d_.makeCompressed();
  ldlt_.analyzePattern(d_);
}

void PrecisionOperator::assemble(const std::vector<double>& t) {
  check_t(t, n_);
  const auto& g = g_;
  for (int col = 0; col < n_; ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(d_, col); it; ++it) {
      const int row = static_cast<int>(it.row());
      if (row == col) {
        double diag = g.h(row) * std::exp(t[row]);
        for (const auto& nb : g.neighbors(row)) diag += nb.w * std::exp(t[row] + t[nb.j]);
        it.valueRef() = diag;
      } else {
        it.valueRef() = -g.beta(row, col) * std::exp(t[row] + t[col]);
      }
    }
  }
  ldlt_.factorize(d_);
  if (ldlt_.info() != Eigen::Success)
    throw std::runtime_error("PrecisionOperator: sparse factorization failed");
  const auto& vd = ldlt_.vectorD();
  for (int i = 0; i < n_; ++i)
    if (!(vd[i] > 0.0)) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "PrecisionOperator: lost positive definiteness (pivot %d = %.6g)", i, vd[i]);
      throw std::runtime_error(buf);
    }
  assembled_ = true;
}

double PrecisionOperator::log_det() const {
  const auto& vd = ldlt_.vectorD();
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += std::log(vd[i]);
  return s;
}

double PrecisionOperator::entry(int i, int j) const { return d_.coeff(i, j); }

double PrecisionOperator::quadratic_form(const std::vector<double>& v) const {
  Eigen::Map<const Eigen::VectorXd> x(v.data(), n_);
  return x.dot(d_ * x);
}

std::vector<double> PrecisionOperator::solve(const std::vector<double>& rhs) const {
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n_);
  Eigen::VectorXd x = ldlt_.solve(b);
  return std::vector<double>(x.data(), x.data() + n_);
}

double PrecisionOperator::inverse_entry(int a, int b) const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n_);
  e[b] = 1.0;
  Eigen::VectorXd x = ldlt_.solve(e);
  return x[a];
}

Eigen::MatrixXd PrecisionOperator::inverse_dense() const {
  return ldlt_.solve(Eigen::MatrixXd::Identity(n_, n_));
}

std::vector<double> PrecisionOperator::unwhiten(const std::vector<double>& w) const {
  // with P D P^T = L diag(vd) L^T, the image s = P^T L^{-T} vd^{-1/2} w of a
  // standard normal has covariance exactly D^{-1}
  Eigen::VectorXd xi = Eigen::Map<const Eigen::VectorXd>(w.data(), n_);
  const auto& vd = ldlt_.vectorD();
  for (int i = 0; i < n_; ++i) xi[i] /= std::sqrt(vd[i]);
  Eigen::VectorXd u = ldlt_.matrixU().solve(xi);
  Eigen::VectorXd s = ldlt_.permutationPinv() * u;
  return std::vector<double>(s.data(), s.data() + n_);
}

std::vector<double> PrecisionOperator::sample_gaussian(rng::Stream& rs) const {
  std::vector<double> xi(n_);
  for (auto& v : xi) v = rs.normal();
  return unwhiten(xi);
}

double confining_energy(const graph::WeightedGraph& g, const std::vector<double>& t) {
  check_t(t, g.size());
  double b = 0.0;
  for (const auto& e : g.edges()) {
    const int i = static_cast<int>(e[0]), j = static_cast<int>(e[1]);
    b += e[2] * (std::cosh(t[i] - t[j]) - 1.0);
  }
  for (int i = 0; i < g.size(); ++i) b += g.h(i) * (std::cosh(t[i]) - 1.0);
  return b;
}

double t_marginal_neg_log(const graph::WeightedGraph& g, const TMarginal& marg,
                          const std::vector<double>& t, PrecisionOperator& d) {
  double v = confining_energy(g, t);
  for (double ti : t) v += marg.c_lin * ti;
  if (marg.c_det != 0.0) {
    d.assemble(t);
    v += marg.c_det * d.log_det();
  }
  return v;
}

ChainResult run_t_chain(const graph::WeightedGraph& g, const TMarginal& marg,
                        const McmcParams& params, rng::Stream& rs, const ChainVisitor& visit) {
  const int n = g.size();
  PrecisionOperator d(g);
  std::vector<double> t(n, 0.0);
  std::vector<double> step(n, params.initial_step);
  double neg_log_cur = t_marginal_neg_log(g, marg, t, d);
  // the neg-log evaluation factorizes D only when the density needs it
  bool d_at_current = marg.c_det != 0.0;

  ChainResult out;
  stats::RunningStat acc_meas;

  const int total = params.burn_in_sweeps + params.sweeps;
  for (int sweep = 0; sweep < total; ++sweep) {
    const bool adapting = sweep < params.burn_in_sweeps;
    int n_accept = 0;
    for (int i = 0; i < n; ++i) {
      const double dt = step[i] * rs.normal();
      const double u = rs.uniform01();
      std::vector<double> t_prop = t;
      t_prop[i] += dt;
      const double neg_log_prop = t_marginal_neg_log(g, marg, t_prop, d);
      d_at_current = false;
      const bool accept = std::log(u) < neg_log_cur - neg_log_prop;
      if (accept) {
        t = std::move(t_prop);
        neg_log_cur = neg_log_prop;
        d_at_current = marg.c_det != 0.0;
        ++n_accept;
      }
      if (adapting) {
        step[i] *= std::exp(params.adapt_rate * ((accept ? 1.0 : 0.0) - params.target_acceptance));
        step[i] = std::min(10.0, std::max(1e-3, step[i]));
      }
    }
    if (adapting) continue;

    const int meas = sweep - params.burn_in_sweeps;
    const double acc = static_cast<double>(n_accept) / n;
    acc_meas.push(acc);
    if (meas % params.thin != 0) continue;

    if (!d_at_current) {
      d.assemble(t);
      d_at_current = true;
    }
    SweepRecord rec;
    rec.sweep = meas;
    rec.neg_log = neg_log_cur;
    rec.acceptance = acc;
    rec.t_min = *std::min_element(t.begin(), t.end());
    rec.t_max = *std::max_element(t.begin(), t.end());
    out.records.push_back(rec);
    ++out.n_retained;
    if (visit) visit(t, d);
  }
  out.mean_acceptance = acc_meas.n > 0 ? acc_meas.mean : 0.0;
  return out;
}

}  // namespace hyperlab::sigma
