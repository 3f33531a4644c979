#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hyperlab/sigma_h22.hpp"
#include "hyperlab/stats.hpp"
#include "hyperlab/vrjp.hpp"

using namespace hyperlab;

namespace {

graph::WeightedGraph one_vertex(double h) { return graph::WeightedGraph::from_edges(1, {}, {h}); }

graph::WeightedGraph edge_graph(double beta, double h) {
  return graph::WeightedGraph::from_edges(2, {{{0.0, 1.0, beta}}}, {h, h});
}

double elapsed_check(const vrjp::Trajectory& t) {
  double in = 0.0, fin = 0.0;
  for (double v : t.initial_local_times) in += v;
  for (double v : t.final_local_times) fin += v;
  return fin - in;
}

}  // namespace

TEST_SUITE("vrjp") {
  TEST_CASE("isolated vertex accumulates the whole horizon") {
    rng::Stream rs(3, rng::Module::vrjp, 1, 0);
    const auto traj = vrjp::simulate(one_vertex(1.0), 0, {1.5}, 7.0, rs);
    CHECK(traj.jump_times.empty());
    CHECK(traj.states.size() == 1);
    CHECK(traj.final_local_times[0] == doctest::Approx(8.5).epsilon(1e-15));

    CHECK_THROWS_AS(vrjp::simulate(one_vertex(1.0), 0, {1.5},
                                   std::numeric_limits<double>::infinity(), rs),
                    std::invalid_argument);
    CHECK_THROWS_AS(vrjp::simulate(one_vertex(1.0), 0, {-0.1}, 1.0, rs), std::invalid_argument);
    CHECK_THROWS_AS(vrjp::simulate(one_vertex(1.0), 2, {0.0}, 1.0, rs), std::invalid_argument);
  }

  TEST_CASE("trajectories satisfy the pathwise invariants") {
    const auto spec = graph::TorusSpec::nearest_neighbor(2, 3, 0.8, 0.5);
    const auto g = graph::build_torus(spec);
    rng::Stream rs(3, rng::Module::vrjp, 2, 0);
    vrjp::LocalTimes ell0(g.size());
    for (auto& l : ell0) l = rs.uniform01();

    for (int rep = 0; rep < 50; ++rep) {
      const auto traj = vrjp::simulate(g, rep % g.size(), ell0, 5.0, rs);
      REQUIRE(traj.states.size() == traj.jump_times.size() + 1);
      CHECK(elapsed_check(traj) == doctest::Approx(5.0).epsilon(1e-12));
      for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
        CHECK(traj.states[k] != traj.states[k + 1]);
        CHECK(g.beta(traj.states[k], traj.states[k + 1]) > 0.0);
        if (k > 0) CHECK(traj.jump_times[k] > traj.jump_times[k - 1]);
      }
      for (int i = 0; i < g.size(); ++i) CHECK(traj.final_local_times[i] >= ell0[i]);
    }
  }

  TEST_CASE("holding times are exponential at the frozen rate") {
    // fresh walk: rate beta (1 + 0) = 1
    rng::Stream rs(3, rng::Module::vrjp, 3, 0);
    const auto g = edge_graph(1.0, 1.0);
    const int n = 100000;
    stats::RunningStat first;
    std::vector<double> u;
    u.reserve(n);
    for (int k = 0; k < n; ++k) {
      const auto traj = vrjp::simulate(g, 0, {0.0, 0.0}, 40.0, rs);
      REQUIRE_FALSE(traj.jump_times.empty());
      first.push(traj.jump_times.front());
      u.push_back(-std::expm1(-traj.jump_times.front()));
    }
    CHECK(std::fabs(first.mean - 1.0) < 3.0 * first.stderr_mean());
    CHECK(stats::ks_uniform(u).p_value > 1e-3);

    // frozen nonzero local times: rate beta (1 + ell_b) = 0.7 * 3.3
    rng::Stream rs2(3, rng::Module::vrjp, 4, 0);
    const auto g2 = edge_graph(0.7, 1.0);
    const double rate = 0.7 * (1.0 + 2.3);
    std::vector<double> u2;
    u2.reserve(n);
    for (int k = 0; k < n; ++k) {
      const auto traj = vrjp::simulate(g2, 0, {0.6, 2.3}, 25.0, rs2);
      REQUIRE_FALSE(traj.jump_times.empty());
      u2.push_back(-std::expm1(-rate * traj.jump_times.front()));
    }
    CHECK(stats::ks_uniform(u2).p_value > 1e-3);
  }

  TEST_CASE("first jump from a path midpoint splits evenly") {
    const auto g = graph::WeightedGraph::from_edges(3, {{{0.0, 1.0, 1.0}}, {{1.0, 2.0, 1.0}}},
                                                    {1.0, 1.0, 1.0});
    rng::Stream rs(3, rng::Module::vrjp, 5, 0);
    const int n = 100000;
    int to_left = 0;
    for (int k = 0; k < n; ++k) {
      const auto traj = vrjp::simulate(g, 1, {0.0, 0.0, 0.0}, 20.0, rs);
      REQUIRE(traj.states.size() >= 2);
      if (traj.states[1] == 0) ++to_left;
    }
    const double p = static_cast<double>(to_left) / n;
    CHECK(std::fabs(p - 0.5) < 3.0 * 0.5 / std::sqrt(static_cast<double>(n)));
  }

  TEST_CASE("discounted occupation integrates the indicator in closed form") {
    rng::Stream rs(3, rng::Module::vrjp, 6, 0);
    const double h = 0.5;
    const double horizon = std::log(1.0 / (h * 1e-12)) / h;
    const auto traj = vrjp::simulate(one_vertex(1.0), 0, {0.0}, horizon, rs);
    CHECK(vrjp::discounted_occupation(traj, 0, h) == doctest::Approx(2.0).epsilon(1e-11));

    // a vertex the walk never visits contributes nothing
    const auto g = edge_graph(1.0, 1.0);
    const auto t2 = vrjp::simulate(g, 0, {0.0, 0.0}, 10.0, rs);
    int absent = t2.final_local_times[1] == 0.0 ? 1 : 0;  // may or may not visit
    CHECK(vrjp::discounted_occupation(t2, 1, h) >= 0.0);
    CHECK(absent * vrjp::discounted_occupation(t2, 1, h) == 0.0);

    CHECK_THROWS_AS(vrjp::discounted_occupation(traj, 0, 0.0), std::invalid_argument);
  }

  TEST_CASE("occupation estimate matches the sigma model two-point function") {
    // E_0 int 1_{X=0} e^{-t} dt equals the supersymmetric <y_0 y_0> on the edge
    const auto g = edge_graph(1.0, 1.0);
    const auto oracle = h22::exact_expectation_h22(
        g, [](const std::vector<double>& t, const std::vector<double>& s) {
          return std::exp(2.0 * t[0]) * s[0] * s[0];
        });
    REQUIRE(oracle.converged);

    rng::Stream rs(3, rng::Module::vrjp, 7, 0);
    const double h = 1.0;
    const double horizon = std::log(1.0 / (h * 1e-10)) / h;
    stats::RunningStat st;
    for (int k = 0; k < 20000; ++k) {
      const auto traj = vrjp::simulate(g, 0, {0.0, 0.0}, horizon, rs);
      st.push(vrjp::discounted_occupation(traj, 0, h));
    }
    CHECK(std::fabs(st.mean - oracle.value) < 3.0 * st.stderr_mean());
  }

  TEST_CASE("per trajectory occupations obey the exact sum rule") {
    const auto spec = graph::TorusSpec::nearest_neighbor(1, 4, 0.9, 0.4);
    const auto g = graph::build_torus(spec);
    rng::Stream rs(3, rng::Module::vrjp, 8, 0);
    const double h = 0.4;
    const std::vector<double> hvec(g.size(), h);
    vrjp::LocalTimes ell0(g.size(), 0.0);
    ell0[2] = 1.3;
    for (int rep = 0; rep < 20; ++rep) {
      const auto traj = vrjp::simulate(g, 0, ell0, 12.0, rs);
      double total = 0.0;
      for (int b = 0; b < g.size(); ++b) {
        total += vrjp::discounted_tilted_occupation(traj, {b, {}}, hvec);
        CHECK(vrjp::discounted_tilted_occupation(traj, {b, {}}, hvec) ==
              doctest::Approx(vrjp::discounted_occupation(traj, b, h)).epsilon(1e-12));
      }
      CHECK(total == doctest::Approx(-std::expm1(-h * 12.0) / h).epsilon(1e-12));
    }
  }

  TEST_CASE("functional estimators hit exact values and each other") {
    rng::Stream rs(3, rng::Module::vrjp, 9, 0);
    const auto g1 = one_vertex(1.0);

    // g = 1: every killed sample returns exactly 1/h
    const auto flat = vrjp::bounded_functional([](int, const vrjp::LocalTimes&) { return 1.0; });
    vrjp::FunctionalOptions kill;
    kill.strategy = vrjp::Strategy::killing;
    const auto rk = vrjp::estimate_discounted_functional(g1, 0, {0.0}, 0.25, flat, 200, rs, kill);
    CHECK(rk.value == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(rk.se == 0.0);

    // single vertex indicator through the interval strategy
    const auto ind = vrjp::tilted_functional({0, {}});
    const auto ri = vrjp::estimate_discounted_functional(g1, 0, {0.0}, 0.25, ind, 10, rs);
    CHECK(ri.value == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(ri.tail_bound < 1e-9);
    CHECK(ri.se == 0.0);  // deterministic on an isolated vertex

    // tilted indicator on the edge: interval and killing agree
    const auto g2 = edge_graph(1.0, 1.0);
    const auto tilt = vrjp::tilted_functional({1, {1.0, 1.0}});
    rng::Stream ra(3, rng::Module::vrjp, 10, 0);
    rng::Stream rb(3, rng::Module::vrjp, 11, 0);
    const auto ea = vrjp::estimate_discounted_functional(g2, 0, {0.0, 0.0}, 1.0, tilt, 20000, ra);
    const auto eb =
        vrjp::estimate_discounted_functional(g2, 0, {0.0, 0.0}, 1.0, tilt, 20000, rb, kill);
    CHECK(std::fabs(stats::z_score(ea.value, ea.se, eb.value, eb.se)) < 3.0);
    CHECK(ea.se < eb.se);  // the closed form integrates out the killing noise

    CHECK_THROWS_AS(
        vrjp::estimate_discounted_functional(g1, 0, {0.0}, 0.0, flat, 10, rs, kill),
        std::invalid_argument);
    CHECK_THROWS_AS(vrjp::estimate_discounted_functional(g1, 0, {0.0}, 1.0, flat, 0, rs, kill),
                    std::invalid_argument);
    CHECK_THROWS_AS(vrjp::estimate_discounted_functional(g1, 0, {0.0}, 1.0, flat, 10, rs),
                    std::invalid_argument);  // interval needs the closed form
  }

  TEST_CASE("the walk is self attracting on an edge") {
    rng::Stream rs(3, rng::Module::vrjp, 12, 0);
    const auto g = edge_graph(1.0, 1.0);
    const auto share_at = [&](double T) {
      stats::RunningStat st;
      for (int k = 0; k < 20000; ++k) {
        const auto traj = vrjp::simulate(g, 0, {0.0, 0.0}, T, rs);
        st.push(traj.final_local_times[0] / T);
      }
      return st;
    };
    const auto s_half = share_at(0.5);
    const auto s_two = share_at(2.0);
    CHECK((s_half.mean - 0.5) > 3.0 * s_half.stderr_mean());
    CHECK((s_two.mean - 0.5) > 3.0 * s_two.stderr_mean());
    CHECK(stats::z_score(s_half.mean, s_half.stderr_mean(), s_two.mean, s_two.stderr_mean()) >
          3.0);
  }
}
