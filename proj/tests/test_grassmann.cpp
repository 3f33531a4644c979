#include <doctest.h>

#include <bit>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hyperlab/grassmann.hpp"
#include "hyperlab/rng.hpp"

using namespace hyperlab;
using namespace hyperlab::grassmann;

namespace {

// independent sign oracle: concatenate the generator lists and bubble-sort,
// counting transpositions
int naive_sign(unsigned a, unsigned b) {
  std::vector<int> gens;
  for (int g = 0; g < 8; ++g)
    if (a & (1u << g)) gens.push_back(g);
  for (int g = 0; g < 8; ++g)
    if (b & (1u << g)) gens.push_back(g);
  int swaps = 0;
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = 0; j + 1 < gens.size() - i; ++j)
      if (gens[j] > gens[j + 1]) {
        std::swap(gens[j], gens[j + 1]);
        ++swaps;
      }
  return swaps % 2 == 0 ? 1 : -1;
}

Supernumber random_supernumber(int m, rng::Stream& rs, bool sparse = true) {
  Supernumber s(m);
  for (unsigned k = 0; k < s.n_coeff(); ++k) {
    if (sparse && rs.uniform01() < 0.5) continue;
    s.coeff(k) = Dual(2.0 * rs.uniform01() - 1.0);
  }
  return s;
}

double max_coeff_dev(const Supernumber& a, const Supernumber& b) {
  double m = 0.0;
  for (unsigned k = 0; k < a.n_coeff(); ++k) m = std::max(m, std::fabs(a.coeff(k).v - b.coeff(k).v));
  return m;
}

}  // namespace

TEST_SUITE("grassmann") {
  TEST_CASE("dual numbers propagate first derivatives") {
    const Dual x = Dual::seeded(1.5, 0, 2);
    const Dual y = Dual::seeded(-0.75, 1, 2);
    const Dual p = x * y + x * 2.0;
    CHECK(p.v == doctest::Approx(1.5 * -0.75 + 3.0));
    CHECK(p.g[0] == doctest::Approx(-0.75 + 2.0));
    CHECK(p.g[1] == doctest::Approx(1.5));

    const Dual e = dual_exp(x * x);
    CHECK(e.v == doctest::Approx(std::exp(2.25)));
    CHECK(e.g[0] == doctest::Approx(2.0 * 1.5 * std::exp(2.25)));
  }

  TEST_CASE("generators anticommute and square to zero") {
    const int m = 3;
    for (int g1 = 0; g1 < 2 * m; ++g1) {
      const Supernumber e1 = Supernumber::generator(m, g1);
      CHECK(mul(e1, e1).max_abs() == 0.0);
      for (int g2 = 0; g2 < 2 * m; ++g2) {
        if (g1 == g2) continue;
        const Supernumber ab = mul(e1, Supernumber::generator(m, g2));
        const Supernumber ba = mul(Supernumber::generator(m, g2), e1);
        CHECK((ab + ba).max_abs() == 0.0);
        CHECK(ab.max_abs() == 1.0);
      }
    }
  }

  TEST_CASE("product sign matches the transposition-count oracle") {
    for (unsigned a = 0; a < 256; ++a)
      for (unsigned b = 0; b < 256; ++b) {
        if (a & b) continue;
        CHECK(interleave_sign(a, b) == naive_sign(a, b));
      }
  }

  TEST_CASE("multiplication is associative and distributive") {
    rng::Stream rs(7, rng::Module::test, 1, 0);
    for (int rep = 0; rep < 25; ++rep) {
      const int m = 3;
      const Supernumber a = random_supernumber(m, rs);
      const Supernumber b = random_supernumber(m, rs);
      const Supernumber c = random_supernumber(m, rs);
      CHECK((mul(mul(a, b), c) - mul(a, mul(b, c))).max_abs() < 1e-13);
      CHECK((mul(a, b + c) - (mul(a, b) + mul(a, c))).max_abs() < 1e-14);
    }
  }

  TEST_CASE("left generator derivative is an anti-derivation") {
    rng::Stream rs(7, rng::Module::test, 2, 0);
    const int m = 2;
    for (int rep = 0; rep < 20; ++rep) {
      // split a random supernumber into even and odd parts to control parity
      const Supernumber r1 = random_supernumber(m, rs, false);
      const Supernumber r2 = random_supernumber(m, rs, false);
      Supernumber f_even(m), f_odd(m), g_all(m);
      for (unsigned k = 0; k < r1.n_coeff(); ++k) {
        if (std::popcount(k) % 2 == 0)
          f_even.coeff(k) = r1.coeff(k);
        else
          f_odd.coeff(k) = r1.coeff(k);
        g_all.coeff(k) = r2.coeff(k);
      }
      for (int g = 0; g < 2 * m; ++g) {
        // even f: d(f g) = (d f) g + f (d g)
        Supernumber lhs = gen_derivative(mul(f_even, g_all), g);
        Supernumber rhs = mul(gen_derivative(f_even, g), g_all) + mul(f_even, gen_derivative(g_all, g));
        CHECK((lhs - rhs).max_abs() < 1e-13);
        // odd f: d(f g) = (d f) g - f (d g)
        lhs = gen_derivative(mul(f_odd, g_all), g);
        rhs = mul(gen_derivative(f_odd, g), g_all) - mul(f_odd, gen_derivative(g_all, g));
        CHECK((lhs - rhs).max_abs() < 1e-13);
      }
    }
  }

  TEST_CASE("analytic functions of even arguments") {
    const int m = 2;
    // exp on a single nilpotent direction has a two-term expansion
    Supernumber arg(m);
    arg.coeff(0) = Dual(0.7);
    arg.coeff(0b0011) = Dual(-1.3);
    const Supernumber e = apply_analytic(kExp, arg);
    CHECK(e.coeff(0).v == doctest::Approx(std::exp(0.7)));
    CHECK(e.coeff(0b0011).v == doctest::Approx(-1.3 * std::exp(0.7)));
    CHECK(e.coeff(0b1111).v == 0.0);

    rng::Stream rs(7, rng::Module::test, 3, 0);
    for (int rep = 0; rep < 10; ++rep) {
      Supernumber a(m);
      a.coeff(0) = Dual(1.0 + rs.uniform01());
      a.coeff(0b0011) = Dual(2.0 * rs.uniform01() - 1.0);
      a.coeff(0b1100) = Dual(2.0 * rs.uniform01() - 1.0);
      a.coeff(0b0110) = Dual(2.0 * rs.uniform01() - 1.0);
      a.coeff(0b1111) = Dual(2.0 * rs.uniform01() - 1.0);

      const Supernumber root = apply_analytic(kSqrt, a);
      CHECK(max_coeff_dev(mul(root, root), a) < 1e-13);

      const Supernumber inv = apply_analytic(kReciprocal, a);
      CHECK(max_coeff_dev(mul(inv, a), Supernumber::scalar(m, 1.0)) < 1e-13);

      const Supernumber ch = apply_analytic(kCosh, a);
      const Supernumber sh = apply_analytic(kSinh, a);
      CHECK(max_coeff_dev(mul(ch, ch) - mul(sh, sh), Supernumber::scalar(m, 1.0)) < 1e-12);
    }

    // odd arguments are rejected
    Supernumber bad(m);
    bad.coeff(0b0001) = Dual(1.0);
    CHECK_THROWS_AS(apply_analytic(kExp, bad), std::invalid_argument);
  }

  TEST_CASE("fermionic gaussian integral gives the determinant") {
    // top coefficient of exp(-sum psibar_i A_ij psi_j) with psi_i at
    // generator 2i and psibar_i at 2i+1
    rng::Stream rs(7, rng::Module::test, 4, 0);
    const int m = 2;
    for (int rep = 0; rep < 12; ++rep) {
      double A[2][2];
      for (auto& row : A)
        for (double& v : row) v = 2.0 * rs.uniform01() - 1.0;
      Supernumber quad_form(m);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const Supernumber term =
              mul(Supernumber::generator(m, 2 * i + 1), Supernumber::generator(m, 2 * j));
          quad_form += term * A[i][j];
        }
      const Supernumber e = apply_analytic(kExp, -quad_form);
      const double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
      CHECK(e.top().v == doctest::Approx(det).epsilon(1e-12));
    }
  }

  TEST_CASE("supersymmetry generator annihilates the invariant forms") {
    const Form tau01 = [](const AmbientPoint& p) { return p.tau(0, 1); };
    const Form tau00 = [](const AmbientPoint& p) { return p.tau(0, 0); };
    const Form z0 = [](const AmbientPoint& p) { return p.z(0); };
    const Form exp_tau = [](const AmbientPoint& p) {
      return apply_analytic(kExp, p.tau(0, 1) * (-0.8));
    };
    const Form x0 = [](const AmbientPoint& p) { return p.X(0); };

    const double xs[2] = {0.4, -1.1};
    const double ys[2] = {-0.3, 0.9};
    CHECK(apply_Q(tau01, 2, xs, ys).max_abs() < 1e-13);
    CHECK(apply_Q(tau00, 2, xs, ys).max_abs() < 1e-13);
    CHECK(apply_Q(z0, 2, xs, ys).max_abs() < 1e-13);
    CHECK(apply_Q(exp_tau, 2, xs, ys).max_abs() < 1e-12);

    // non-invariant control: Q x_0 = xi_0
    const Supernumber qx = apply_Q(x0, 2, xs, ys);
    CHECK((qx - Supernumber::generator(2, 1)).max_abs() < 1e-14);
  }

  TEST_CASE("superintegral of an explicit top form") {
    // F = eta xi g(x, y) integrates g against dx dy / (2 pi)
    const FastForm f = [](const FastAmbientPoint& p) {
      const double r2 = p.xs[0] * p.xs[0] + p.ys[0] * p.ys[0];
      return mul(p.eta(0), p.xi(0)) * std::exp(-0.5 * r2);
    };
    const auto r = superintegrate(f, 1, quad::Axis{10.0, 1.0});
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.boundary_max < 1e-12);
  }

  TEST_CASE("string rendering lists monomials in mask order") {
    Supernumber s(1);
    s.coeff(0) = Dual(2.0);
    s.coeff(0b11) = Dual(-0.5);
    CHECK(s.to_string() == std::string("2 + -0.5*e0*e1"));
  }
}
