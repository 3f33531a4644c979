#include "hyperlab/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace hyperlab::quad {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const double pi = 3.14159265358979323846264338328;
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton iteration from the Chebyshev-like initial guess
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

std::vector<MappedPoint> axis_points(const Axis& axis, int n) {
  std::vector<double> gn, gw;
  gauss_legendre(n, gn, gw);
  std::vector<MappedPoint> pts(n);
  if (axis.linear) {
    for (int i = 0; i < n; ++i) {
      pts[i].x = axis.xmax * gn[i];
      pts[i].w = axis.xmax * gw[i];
    }
    return pts;
  }
  const double c = axis.scale;
  const double T = std::asinh(axis.xmax / c);
  for (int i = 0; i < n; ++i) {
    pts[i].x = c * std::sinh(T * gn[i]);
    pts[i].w = c * T * std::cosh(T * gn[i]) * gw[i];
  }
  return pts;
}

std::vector<MappedPoint> gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n >= 1");
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite
  // recurrence (diagonal 0, off-diagonal sqrt(k)); the weights come out
  // normalized because the zeroth moment of e^{-x^2/2}/sqrt(2 pi) is one
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(static_cast<double>(k));
    jac(k, k - 1) = b;
    jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  std::vector<MappedPoint> pts(n);
  for (int i = 0; i < n; ++i) {
    pts[i].x = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    pts[i].w = v0 * v0;
  }
  return pts;
}

int level_points(const Options& opt, int level) {
  double n = opt.n_start;
  for (int l = 0; l < level; ++l) n *= 1.5;
  return static_cast<int>(n + 0.5);
}

namespace {

void tensor_pass(const std::function<void(const double*, double*)>& f, int n_out,
                 const std::vector<Axis>& axes, int n_points, std::vector<double>& acc,
                 std::size_t& evals) {
  const int d = static_cast<int>(axes.size());
  std::vector<std::vector<MappedPoint>> pts(d);
  for (int a = 0; a < d; ++a) pts[a] = axis_points(axes[a], n_points);
  acc.assign(n_out, 0.0);
  std::vector<int> idx(d, 0);
  std::vector<double> x(d, 0.0);
  std::vector<double> out(n_out, 0.0);
  for (;;) {
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      x[a] = pts[a][idx[a]].x;
      w *= pts[a][idx[a]].w;
    }
    f(x.data(), out.data());
    ++evals;
    for (int c = 0; c < n_out; ++c) acc[c] += w * out[c];
    int a = d - 1;
    while (a >= 0 && ++idx[a] == n_points) idx[a--] = 0;
    if (a < 0) break;
  }
}

}  // namespace

ResultVec integrate_many(const std::function<void(const double*, double*)>& f, int n_out,
                         const std::vector<Axis>& axes, const Options& opt) {
  if (axes.empty() || axes.size() > 4) throw std::invalid_argument("integrate: 1 to 4 axes");
  ResultVec res;
  res.values.assign(n_out, 0.0);
  std::vector<double> prev;
  for (int level = 0; level <= opt.max_level; ++level) {
    std::vector<double> cur;
    tensor_pass(f, n_out, axes, level_points(opt, level), cur, res.n_evals);
    res.level_used = level;
    if (level > 0) {
      double err = 0.0;
      double scale = 0.0;
      for (int c = 0; c < n_out; ++c) {
        err = std::max(err, std::abs(cur[c] - prev[c]));
        scale = std::max(scale, std::abs(cur[c]));
      }
      res.err_est = err;
      if (err <= std::max(opt.abs_tol, opt.rel_tol * scale)) {
        res.values = cur;
        res.converged = true;
        return res;
      }
    }
    prev = cur;
    res.values = cur;
  }
  return res;
}

Result integrate(const std::function<double(const double*)>& f, const std::vector<Axis>& axes,
                 const Options& opt) {
  auto wrapped = [&f](const double* x, double* out) { out[0] = f(x); };
  ResultVec rv = integrate_many(wrapped, 1, axes, opt);
  Result r;
  r.value = rv.values[0];
  r.err_est = rv.err_est;
  r.level_used = rv.level_used;
  r.n_evals = rv.n_evals;
  r.converged = rv.converged;
  return r;
}

}  // namespace hyperlab::quad
