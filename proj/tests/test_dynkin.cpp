#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hyperlab/dynkin.hpp"
#include "hyperlab/sigma_h22.hpp"
#include "hyperlab/stats.hpp"

using namespace hyperlab;

namespace {

graph::WeightedGraph one_vertex(double h) { return graph::WeightedGraph::from_edges(1, {}, {h}); }

graph::WeightedGraph edge_graph(double beta, double h0, double h1) {
  return graph::WeightedGraph::from_edges(2, {{{0.0, 1.0, beta}}}, {h0, h1});
}

// deterministic (s, t) quadrature of the conditional spin-side insertion;
// independent of the chain, shares only the insertion formula
double insertion_quadrature(const graph::WeightedGraph& g, int a, int b,
                            const std::vector<double>& cv) {
  std::vector<double> h_shift = g.h();
  for (std::size_t i = 0; i < h_shift.size(); ++i) h_shift[i] += cv[i];
  const auto g_shift = graph::WeightedGraph::from_edges(g.size(), g.edges(), std::move(h_shift));
  sigma::PrecisionOperator dp(g);
  sigma::PrecisionOperator ds(g_shift);
  h22::OracleOptions opt;
  opt.gh_nodes = 4;  // the integrand is constant in s
  const auto r = h22::exact_expectation_h22(
      g,
      [&](const std::vector<double>& t, const std::vector<double>&) {
        dp.assemble(t);
        ds.assemble(t);
        return dynkin::h22_tilted_insertion(dp, ds, t, a, b, cv);
      },
      opt);
  REQUIRE(r.converged);
  return r.value;
}

}  // namespace

TEST_SUITE("dynkin") {
  TEST_CASE("isolated vertex ties the two point function to the walk") {
    dynkin::IsomorphismCase c;
    c.g = one_vertex(0.5);
    c.a = c.b = 0;
    c.n_walks = 1000;
    c.master_seed = 13;
    c.case_id = 1;
    const auto r = dynkin::verify_h22_two_point(c);

    // the walk side integrates the indicator in closed form
    CHECK(r.rhs.value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(r.rhs.se == 0.0);
    CHECK(r.has_oracle);
    CHECK(r.oracle == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(std::fabs(r.lhs.value - 2.0) < 4.0 * r.lhs.se);
    CHECK(r.lhs.ess >= 100.0);
    CHECK(r.verdict == dynkin::Verdict::pass);
    CHECK_FALSE(r.shared_seed_flag);
  }

  TEST_CASE("isolated vertex tilted functional matches the elementary integral") {
    dynkin::IsomorphismCase c;
    c.g = one_vertex(1.0);
    c.a = c.b = 0;
    c.c = {1.0};
    c.n_walks = 1000;
    c.master_seed = 13;
    c.case_id = 2;
    const auto r = dynkin::verify_h22_general_g(c);

    CHECK(r.rhs.value == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.rhs.se == 0.0);
    CHECK(r.has_oracle);
    CHECK(r.oracle == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(std::fabs(r.lhs.value - 0.5) < 4.0 * r.lhs.se);
    CHECK(r.verdict == dynkin::Verdict::pass);
  }

  TEST_CASE("edge tilt agrees across superintegral, quadrature and walks") {
    dynkin::IsomorphismCase c;
    c.g = edge_graph(1.0, 1.0, 1.0);
    c.a = 0;
    c.b = 1;
    c.c = {1.0, 1.0};
    c.n_walks = 50000;
    c.master_seed = 13;
    c.case_id = 3;
    c.oracle_rel_tol = 1e-6;
    const auto r = dynkin::verify_h22_general_g(c);

    REQUIRE(r.has_oracle);
    // two deterministic routes: the ambient superintegral carries the
    // Grassmann sector exactly, the horospherical quadrature integrates the
    // conditional insertion; they share no code beyond the graph
    const double quad = insertion_quadrature(c.g, c.a, c.b, c.c);
    CHECK(std::fabs(quad - r.oracle) < 1e-6);

    CHECK(std::fabs(r.lhs.value - r.oracle) < 4.0 * r.lhs.se);
    CHECK(std::fabs(r.rhs.value - r.oracle) < 4.0 * r.rhs.se);
    CHECK(r.verdict == dynkin::Verdict::pass);
  }

  TEST_CASE("path endpoints cross check without a closed form") {
    dynkin::IsomorphismCase c;
    c.g = graph::WeightedGraph::from_edges(3, {{{0.0, 1.0, 1.0}}, {{1.0, 2.0, 1.0}}},
                                           {1.0, 1.0, 1.0});
    c.a = 0;
    c.b = 2;
    c.n_walks = 100000;
    c.master_seed = 13;
    c.case_id = 4;
    const auto r = dynkin::verify_h22_two_point(c);

    CHECK_FALSE(r.has_oracle);  // three vertices, no deterministic route
    CHECK(r.lhs.converged);
    CHECK(r.rhs.converged);
    CHECK(r.verdict == dynkin::Verdict::pass);
  }

  TEST_CASE("vertex dependent fields discount through the local times") {
    dynkin::IsomorphismCase c;
    c.g = edge_graph(0.8, 0.6, 1.4);
    c.a = 0;
    c.b = 1;
    c.c = {0.5, 0.0};
    c.n_walks = 50000;
    c.master_seed = 13;
    c.case_id = 5;
    c.with_oracle = false;
    const auto r = dynkin::verify_h22_general_g(c);

    CHECK(r.verdict == dynkin::Verdict::pass);
    // pin the walk side against the deterministic quadrature value
    const double quad = insertion_quadrature(c.g, c.a, c.b, c.c);
    CHECK(std::fabs(r.rhs.value - quad) < 4.0 * r.rhs.se);
    CHECK(std::fabs(r.lhs.value - quad) < 4.0 * r.lhs.se);
  }

  TEST_CASE("hn isolated vertex equates spin moments and discounted walks") {
    dynkin::IsomorphismCase c;
    c.g = one_vertex(1.0);
    c.model = dynkin::Model::hn;
    c.a = c.b = 0;
    c.master_seed = 13;
    c.case_id = 6;
    const auto r = dynkin::verify_hn(c);

    CHECK(r.has_oracle);
    CHECK(r.oracle == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(std::fabs(r.lhs.value - 2.0) < 4.0 * r.lhs.se);
    CHECK(std::fabs(r.rhs.value - 2.0) < 4.0 * r.rhs.se);
    CHECK(r.verdict == dynkin::Verdict::pass);
    // the inner integral is deterministic on one vertex, so replica noise
    // cannot dominate
    CHECK_FALSE(r.budget_warning);

    // same identity one sphere dimension up, statistical sides only
    dynkin::IsomorphismCase c3 = c;
    c3.n = 3;
    c3.case_id = 7;
    const auto r3 = dynkin::verify_hn(c3);
    CHECK_FALSE(r3.has_oracle);
    CHECK(r3.verdict == dynkin::Verdict::pass);
    CHECK(std::fabs(stats::z_score(r3.lhs.value, r3.lhs.se, r3.rhs.value, r3.rhs.se)) < 4.0);
  }

  TEST_CASE("hn edge with tilt agrees across spin and walk sides") {
    dynkin::IsomorphismCase c;
    c.g = edge_graph(1.0, 1.0, 1.0);
    c.model = dynkin::Model::hn;
    c.a = 0;
    c.b = 1;
    c.c = {0.7, 0.7};
    c.master_seed = 13;
    c.case_id = 8;
    const auto r = dynkin::verify_hn(c);

    REQUIRE(r.has_oracle);
    CHECK(std::fabs(r.lhs.value - r.oracle) < 4.0 * r.lhs.se);
    CHECK(std::fabs(r.rhs.value - r.oracle) < 4.0 * r.rhs.se);
    CHECK(r.verdict == dynkin::Verdict::pass);
  }

  TEST_CASE("seed lanes separate the sides and shared mode is flagged") {
    dynkin::IsomorphismCase c;
    c.g = edge_graph(1.0, 1.0, 1.0);
    c.a = 0;
    c.b = 1;
    c.n_walks = 200;
    c.mcmc.burn_in_sweeps = 2000;
    c.mcmc.sweeps = 3000;
    c.mcmc.thin = 10;
    c.master_seed = 13;
    c.case_id = 9;
    const auto plain = dynkin::verify_h22_two_point(c);
    c.shared_seed_debug = true;
    const auto shared = dynkin::verify_h22_two_point(c);

    CHECK_FALSE(plain.shared_seed_flag);
    CHECK(shared.shared_seed_flag);
    // the spin lane is unchanged, the walk side moves onto it
    CHECK(plain.lhs.value == shared.lhs.value);
    CHECK(plain.rhs.value != shared.rhs.value);

    // replaying the same case reproduces every estimate exactly
    c.shared_seed_debug = false;
    const auto again = dynkin::verify_h22_two_point(c);
    CHECK(again.lhs.value == plain.lhs.value);
    CHECK(again.rhs.value == plain.rhs.value);
  }

  TEST_CASE("hn replay is exact across runs") {
    dynkin::IsomorphismCase c;
    c.g = one_vertex(0.8);
    c.model = dynkin::Model::hn;
    c.a = c.b = 0;
    c.mcmc.burn_in_sweeps = 2000;
    c.mcmc.sweeps = 3000;
    c.mcmc.thin = 10;
    c.inner_replicas = 2;
    c.with_oracle = false;
    c.master_seed = 13;
    c.case_id = 10;
    const auto ra = dynkin::verify_hn(c);
    const auto rb = dynkin::verify_hn(c);
    CHECK(ra.lhs.value == rb.lhs.value);
    CHECK(ra.rhs.value == rb.rhs.value);
    CHECK(ra.rhs.se == rb.rhs.se);
  }

  TEST_CASE("a starved chain reports inconclusive instead of judging") {
    dynkin::IsomorphismCase c;
    c.g = one_vertex(1.0);
    c.a = c.b = 0;
    c.n_walks = 1000;
    c.mcmc.burn_in_sweeps = 2000;
    c.mcmc.sweeps = 3000;
    c.mcmc.thin = 10;
    c.min_ess = 1e9;  // no finite chain can satisfy this
    c.master_seed = 13;
    c.case_id = 11;
    const auto r = dynkin::verify_h22_two_point(c);
    CHECK(r.verdict == dynkin::Verdict::inconclusive);
  }

  TEST_CASE("malformed cases are rejected") {
    dynkin::IsomorphismCase base;
    base.g = edge_graph(1.0, 1.0, 1.0);
    base.a = 0;
    base.b = 1;

    auto c = base;
    c.c = {1.0, 1.0};
    CHECK_THROWS_AS(dynkin::verify_h22_two_point(c), std::invalid_argument);

    c = base;
    c.g = edge_graph(1.0, 0.5, 1.5);
    CHECK_THROWS_AS(dynkin::verify_h22_two_point(c), std::invalid_argument);

    c = base;
    c.c = {-0.5, 0.0};
    CHECK_THROWS_AS(dynkin::verify_h22_general_g(c), std::invalid_argument);

    c = base;
    c.c = {1.0};
    CHECK_THROWS_AS(dynkin::verify_h22_general_g(c), std::invalid_argument);

    c = base;
    c.b = 5;
    CHECK_THROWS_AS(dynkin::verify_h22_general_g(c), std::invalid_argument);

    c = base;
    c.n_walks = 10;
    CHECK_THROWS_AS(dynkin::verify_h22_general_g(c), std::invalid_argument);

    c = base;
    c.eps_tail = 0.0;
    CHECK_THROWS_AS(dynkin::verify_h22_general_g(c), std::invalid_argument);

    c = base;
    c.n = 4;
    CHECK_THROWS_AS(dynkin::verify_hn(c), std::invalid_argument);

    c = base;
    c.g = edge_graph(1.0, 0.5, 1.5);
    CHECK_THROWS_AS(dynkin::verify_hn(c), std::invalid_argument);
  }
}
