#include "hyperlab/grassmann.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace hyperlab::grassmann {

Dual Dual::seeded(double value, int dir, int nd) {
  if (dir < 0 || dir >= nd || nd > kMaxDirs) throw std::invalid_argument("Dual::seeded: bad direction");
  Dual d(value);
  d.nd = nd;
  d.g[dir] = 1.0;
  return d;
}

Dual Dual::operator-() const {
  Dual r(-v);
  r.nd = nd;
  for (int k = 0; k < nd; ++k) r.g[k] = -g[k];
  return r;
}

Dual Dual::operator+(const Dual& o) const {
  Dual r(v + o.v);
  r.nd = nd > o.nd ? nd : o.nd;
  for (int k = 0; k < r.nd; ++k) r.g[k] = g[k] + o.g[k];
  return r;
}

Dual Dual::operator-(const Dual& o) const {
  Dual r(v - o.v);
  r.nd = nd > o.nd ? nd : o.nd;
  for (int k = 0; k < r.nd; ++k) r.g[k] = g[k] - o.g[k];
  return r;
}

Dual Dual::operator*(const Dual& o) const {
  Dual r(v * o.v);
  r.nd = nd > o.nd ? nd : o.nd;
  for (int k = 0; k < r.nd; ++k) r.g[k] = v * o.g[k] + o.v * g[k];
  return r;
}

Dual Dual::operator*(double c) const {
  Dual r(v * c);
  r.nd = nd;
  for (int k = 0; k < nd; ++k) r.g[k] = g[k] * c;
  return r;
}

Dual& Dual::operator+=(const Dual& o) {
  v += o.v;
  if (o.nd > nd) nd = o.nd;
  for (int k = 0; k < nd; ++k) g[k] += o.g[k];
  return *this;
}

namespace {

Dual dual_chain(const Dual& d, double f, double fprime) {
  Dual r(f);
  r.nd = d.nd;
  for (int k = 0; k < d.nd; ++k) r.g[k] = fprime * d.g[k];
  return r;
}

}  // namespace

Dual dual_exp(const Dual& d) {
  const double e = std::exp(d.v);
  return dual_chain(d, e, e);
}

Dual dual_sinh(const Dual& d) { return dual_chain(d, std::sinh(d.v), std::cosh(d.v)); }

Dual dual_cosh(const Dual& d) { return dual_chain(d, std::cosh(d.v), std::sinh(d.v)); }

int interleave_sign(unsigned a, unsigned b) {
  // moving each generator of b past the generators of a that sit above it
  int swaps = 0;
  unsigned rest = b;
  while (rest) {
    const int g = std::countr_zero(rest);
    rest &= rest - 1;
    swaps += std::popcount(a >> (g + 1));
  }
  return (swaps % 2 == 0) ? 1 : -1;
}

namespace {

void derivs_exp(double x, int k, double* d) {
  const double e = std::exp(x);
  for (int j = 0; j <= k; ++j) d[j] = e;
}

void derivs_sqrt(double x, int k, double* d) {
  if (!(x > 0.0)) throw std::domain_error("apply_analytic(sqrt): body must be positive");
  d[0] = std::sqrt(x);
  for (int j = 1; j <= k; ++j) d[j] = d[j - 1] * (0.5 - (j - 1)) / x;
}

void derivs_reciprocal(double x, int k, double* d) {
  if (x == 0.0) throw std::domain_error("apply_analytic(reciprocal): body must be nonzero");
  d[0] = 1.0 / x;
  for (int j = 1; j <= k; ++j) d[j] = d[j - 1] * (-j) / x;
}

void derivs_cosh(double x, int k, double* d) {
  const double c = std::cosh(x), s = std::sinh(x);
  for (int j = 0; j <= k; ++j) d[j] = (j % 2 == 0) ? c : s;
}

void derivs_sinh(double x, int k, double* d) {
  const double c = std::cosh(x), s = std::sinh(x);
  for (int j = 0; j <= k; ++j) d[j] = (j % 2 == 0) ? s : c;
}

}  // namespace

const AnalyticFn kExp{derivs_exp, "exp"};
const AnalyticFn kSqrt{derivs_sqrt, "sqrt"};
const AnalyticFn kReciprocal{derivs_reciprocal, "reciprocal"};
const AnalyticFn kCosh{derivs_cosh, "cosh"};
const AnalyticFn kSinh{derivs_sinh, "sinh"};

Supernumber apply_Q(const Form& f, int m, const double* x, const double* y) {
  const AmbientPoint p = AmbientPoint::seeded(m, x, y);
  const Supernumber F = f(p);
  // the result mixes dual partials with generator derivatives, so it is
  // returned value-only: coefficient gradients are stripped throughout
  Supernumber Fv(m);
  for (unsigned k = 0; k < F.n_coeff(); ++k) Fv.coeff(k) = Dual(F.coeff(k).v);
  Supernumber q(m);
  for (int i = 0; i < m; ++i) {
    Supernumber dFdx(m), dFdy(m);
    for (unsigned k = 0; k < F.n_coeff(); ++k) {
      dFdx.coeff(k) = Dual(F.coeff(k).g[2 * i]);
      dFdy.coeff(k) = Dual(F.coeff(k).g[2 * i + 1]);
    }
    q += mul(Supernumber::generator(m, 2 * i + 1), dFdx);  // xi_i d/dx_i
    q += mul(Supernumber::generator(m, 2 * i), dFdy);      // eta_i d/dy_i
    q += gen_derivative(Fv, 2 * i) * Dual(x[i]);           // x_i d/deta_i
    q += gen_derivative(Fv, 2 * i + 1) * Dual(-y[i]);      // -y_i d/dxi_i
  }
  return q;
}

SuperIntegralResult superintegrate(const FastForm& f, int m, const quad::Axis& axis,
                                   const quad::Options& opt) {
  SuperIntegralResult out;
  const double two_pi = 8.0 * std::atan(1.0);
  const double weight_scale = std::pow(two_pi, -m);
  std::vector<double> xs(m), ys(m);

  double prev = 0.0;
  bool have_prev = false;
  for (int level = 0; level <= opt.max_level; ++level) {
    const int n = quad::level_points(opt, level);
    const auto pts = quad::axis_points(axis, n);
    const int dims = 2 * m;
    std::vector<int> idx(dims, 0);
    double sum = 0.0;
    while (true) {
      double w = weight_scale;
      for (int dd = 0; dd < dims; ++dd) {
        const auto& pt = pts[idx[dd]];
        if (dd % 2 == 0)
          xs[dd / 2] = pt.x;
        else
          ys[dd / 2] = pt.x;
        w *= pt.w;
      }
      const FastSupernumber F = f(FastAmbientPoint::plain(m, xs.data(), ys.data()));
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

  // decay probe on the truncation shell
  const double edge = axis.xmax;
  const double shell[8][2] = {{edge, 0.0}, {-edge, 0.0}, {0.0, edge},   {0.0, -edge},
                              {edge, edge}, {-edge, edge}, {edge, -edge}, {-edge, -edge}};
  for (const auto& se : shell) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        xs[j] = (j == i) ? se[0] : 0.5;
        ys[j] = (j == i) ? se[1] : 0.5;
      }
      const FastSupernumber F = f(FastAmbientPoint::plain(m, xs.data(), ys.data()));
      out.boundary_max = std::max(out.boundary_max, std::fabs(F.top()));
    }
  }
  return out;
}

std::vector<std::vector<double>> q_probe_points(int m, int n_points) {
  // origin plus a fixed low-discrepancy spread in [-2, 2]^{2m}
  std::vector<std::vector<double>> probes;
  probes.push_back(std::vector<double>(2 * m, 0.0));
  const double golden = 0.6180339887498949;
  double u = 0.0;
  for (int p = 0; p < n_points; ++p) {
    std::vector<double> pt(2 * m);
    for (int d = 0; d < 2 * m; ++d) {
      u += golden * (d + 1);
      u -= std::floor(u);
      pt[d] = 4.0 * u - 2.0;
    }
    probes.push_back(pt);
  }
  return probes;
}

}  // namespace hyperlab::grassmann
