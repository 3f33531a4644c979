#include "hyperlab/vrjp.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "hyperlab/stats.hpp"

namespace hyperlab::vrjp {

namespace {

// (1 - e^{-r dt}) / r, continuous at r = 0
double expm1_ratio(double r, double dt) {
  if (r == 0.0) return dt;
  return -std::expm1(-r * dt) / r;
}

}  // namespace

Trajectory simulate(const graph::WeightedGraph& g, int start, const LocalTimes& ell0,
                    double horizon, rng::Stream& rs) {
  if (start < 0 || start >= g.size()) throw std::invalid_argument("vrjp: start out of range");
  if (static_cast<int>(ell0.size()) != g.size())
    throw std::invalid_argument("vrjp: ell0 size mismatch");
  for (double l : ell0)
    if (!(l >= 0.0) || !std::isfinite(l))
      throw std::invalid_argument("vrjp: initial local times must be finite and >= 0");
  if (!std::isfinite(horizon) || horizon <= 0.0)
    throw std::invalid_argument("vrjp: horizon must be finite and positive");

  Trajectory traj;
  traj.initial_local_times = ell0;
  traj.final_local_times = ell0;
  traj.horizon = horizon;
  traj.states.push_back(start);

  auto& ell = traj.final_local_times;
  int x = start;
  double now = 0.0;
  for (;;) {
    // exit rates are frozen during the holding interval: only ell_x grows
    // and there are no self loops
    double rate = 0.0;
    for (const auto& nb : g.neighbors(x)) rate += nb.w * (1.0 + ell[nb.j]);
    if (rate == 0.0) {
      ell[x] += horizon - now;
      break;
    }
    const double hold = rs.exponential(rate);
    if (now + hold >= horizon) {
      ell[x] += horizon - now;
      break;
    }
    ell[x] += hold;
    now += hold;

    double u = rs.uniform01() * rate;
    int dest = -1;
    for (const auto& nb : g.neighbors(x)) {
      u -= nb.w * (1.0 + ell[nb.j]);
      dest = nb.j;
      if (u <= 0.0) break;
    }
    assert(dest >= 0);
    assert(traj.jump_times.empty() || now > traj.jump_times.back());
    traj.jump_times.push_back(now);
    traj.states.push_back(dest);
    x = dest;
  }
  return traj;
}

double discounted_occupation(const Trajectory& traj, int b, double h) {
  if (h <= 0.0) throw std::invalid_argument("vrjp: discount h must be positive");
  double acc = 0.0;
  double t0 = 0.0;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double t1 = k < traj.jump_times.size() ? traj.jump_times[k] : traj.horizon;
    if (traj.states[k] == b) acc += (std::exp(-h * t0) - std::exp(-h * t1)) / h;
    t0 = t1;
  }
  return acc;
}

double discounted_tilted_occupation(const Trajectory& traj, const TiltedIndicator& g,
                                    const std::vector<double>& hvec) {
  const std::size_t n = traj.final_local_times.size();
  if (hvec.size() != n) throw std::invalid_argument("vrjp: pinning size mismatch");
  if (!g.c.empty() && g.c.size() != n) throw std::invalid_argument("vrjp: tilt size mismatch");
  if (g.b0 < 0 || static_cast<std::size_t>(g.b0) >= n)
    throw std::invalid_argument("vrjp: tilt vertex out of range");

  // walk the trajectory accumulating local times interval by interval
  LocalTimes ell = traj.initial_local_times;
  const double cb = g.c.empty() ? 0.0 : g.c[g.b0];
  const double r = hvec[g.b0] + cb;
  double acc = 0.0;
  double t0 = 0.0;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double t1 = k < traj.jump_times.size() ? traj.jump_times[k] : traj.horizon;
    const double dt = t1 - t0;
    const int v = traj.states[k];
    if (v == g.b0) {
      double expo = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        expo += hvec[i] * (ell[i] - traj.initial_local_times[i]);
        if (!g.c.empty()) expo += g.c[i] * ell[i];
      }
      acc += std::exp(-expo) * expm1_ratio(r, dt);
    }
    ell[v] += dt;
    t0 = t1;
  }
  return acc;
}

Functional bounded_functional(std::function<double(int, const LocalTimes&)> f) {
  Functional out;
  out.eval = std::move(f);
  return out;
}

Functional tilted_functional(const TiltedIndicator& g) {
  Functional out;
  out.tilted = g;
  out.eval = [g](int b, const LocalTimes& ell) {
    if (b != g.b0) return 0.0;
    double expo = 0.0;
    for (std::size_t i = 0; i < g.c.size(); ++i) expo += g.c[i] * ell[i];
    return std::exp(-expo);
  };
  return out;
}

FunctionalEstimate estimate_discounted_functional(const graph::WeightedGraph& g, int start,
                                                  const LocalTimes& ell0, double h,
                                                  const Functional& func, std::size_t n_samples,
                                                  rng::Stream& rs, const FunctionalOptions& opt) {
  if (h <= 0.0) throw std::invalid_argument("vrjp: discount h must be positive");
  if (n_samples == 0) throw std::invalid_argument("vrjp: need at least one sample");
  if (!func.eval && !func.tilted) throw std::invalid_argument("vrjp: empty functional");

  FunctionalEstimate out;
  stats::RunningStat st;

  if (opt.strategy == Strategy::interval) {
    if (!func.tilted)
      throw std::invalid_argument("vrjp: interval strategy needs a tilted indicator");
    out.horizon = std::log(1.0 / (h * opt.eps_tail)) / h;
    out.tail_bound = std::exp(-h * out.horizon) / h;
    const std::vector<double> hvec(g.size(), h);
    for (std::size_t k = 0; k < n_samples; ++k) {
      const auto traj = simulate(g, start, ell0, out.horizon, rs);
      st.push(discounted_tilted_occupation(traj, *func.tilted, hvec));
    }
  } else {
    // kill at an independent Exponential(h) time; conditional on tau the
    // value g(X_tau, L_tau)/h has the target mean, no truncation involved
    for (std::size_t k = 0; k < n_samples; ++k) {
      const double tau = rs.exponential(h);
      const auto traj = simulate(g, start, ell0, tau, rs);
      st.push(func.eval(traj.states.back(), traj.final_local_times) / h);
    }
  }
  out.value = st.mean;
  out.se = st.stderr_mean();
  out.n_samples = n_samples;
  return out;
}

}  // namespace hyperlab::vrjp
