// grassmann.hpp: exact finite-dimensional superalgebra engine.
//
// A supernumber is an element of the Grassmann algebra on 2m generators
// (m vertex pairs, m <= 4).  Masks index monomials: bit g set means
// generator g is present, and a monomial is stored relative to the
// canonical ascending product e_{g1} e_{g2} ... (g1 < g2 < ...).
//
// Coefficients are carried either as plain doubles (fast path, used by the
// quadrature oracles) or as first-order dual numbers (Dual), so coordinate
// derivatives ride along every evaluation where they are needed.
//
// Generator layout per vertex i:
//   ambient sector       eta_i = generator 2i,  xi_i = generator 2i+1
//   horospherical sector psi_i = generator 2i,  psibar_i = generator 2i+1
// With this layout the canonical full monomial reads
//   eta_0 xi_0 eta_1 xi_1 ...     resp.   psi_0 psibar_0 psi_1 psibar_1 ...
// which is exactly the monomial the Berezin integral extracts, so the
// "top" coefficient is coeff[(1 << 2m) - 1] with no extra sign.
//
// The superintegral of a form F(x, y, xi, eta) is the Lebesgue integral of
// that top coefficient with weight 1/(2 pi) per vertex.
#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperlab/quadrature.hpp"

namespace hyperlab::grassmann {

constexpr int kMaxPairs = 4;
constexpr int kMaxDirs = 8;

// first-order dual number with up to kMaxDirs derivative directions
struct Dual {
  double v = 0.0;
  int nd = 0;
  std::array<double, kMaxDirs> g{};

  Dual() = default;
  explicit Dual(double value) : v(value) {}
  static Dual seeded(double value, int dir, int nd);

  Dual operator-() const;
  Dual operator+(const Dual& o) const;
  Dual operator-(const Dual& o) const;
  Dual operator*(const Dual& o) const;
  Dual operator*(double c) const;
  Dual& operator+=(const Dual& o);
};

Dual dual_exp(const Dual& d);
Dual dual_sinh(const Dual& d);
Dual dual_cosh(const Dual& d);

// coefficient helpers shared by the double and Dual instantiations
inline double scalar_value(double c) { return c; }
inline double scalar_value(const Dual& c) { return c.v; }
inline double scalar_max_abs(double c) { return std::fabs(c); }
inline double scalar_max_abs(const Dual& c) {
  double m = std::fabs(c.v);
  for (int k = 0; k < c.nd; ++k) m = std::max(m, std::fabs(c.g[k]));
  return m;
}
inline double cexp(double x) { return std::exp(x); }
inline Dual cexp(const Dual& d) { return dual_exp(d); }
inline double csinh(double x) { return std::sinh(x); }
inline Dual csinh(const Dual& d) { return dual_sinh(d); }
inline double ccosh(double x) { return std::cosh(x); }
inline Dual ccosh(const Dual& d) { return dual_cosh(d); }

// sign of sorting the concatenation of canonical monomials a and b into
// canonical order; a and b must be disjoint
int interleave_sign(unsigned a, unsigned b);

template <class T>
class SupernumberT {
 public:
  SupernumberT() = default;
  explicit SupernumberT(int m) : m_(m) {
    if (m < 1 || m > kMaxPairs) throw std::invalid_argument("SupernumberT: need 1 <= m <= 4 vertex pairs");
    c_.assign(std::size_t{1} << (2 * m), T{});
  }
  static SupernumberT scalar(int m, const T& c) {
    SupernumberT s(m);
    s.c_[0] = c;
    return s;
  }
  static SupernumberT scalar(int m, double c)
    requires(!std::same_as<T, double>)
  {
    return scalar(m, T(c));
  }
  static SupernumberT generator(int m, int g) {
    SupernumberT s(m);
    if (g < 0 || g >= 2 * m) throw std::invalid_argument("SupernumberT::generator: index out of range");
    s.c_[std::size_t{1} << g] = T(1.0);
    return s;
  }

  int pairs() const { return m_; }
  int n_gen() const { return 2 * m_; }
  unsigned n_coeff() const { return 1u << (2 * m_); }
  unsigned full_mask() const { return n_coeff() - 1; }

  const T& coeff(unsigned mask) const { return c_[mask]; }
  T& coeff(unsigned mask) { return c_[mask]; }
  const T& body() const { return c_[0]; }
  const T& top() const { return c_[full_mask()]; }

  SupernumberT operator+(const SupernumberT& o) const {
    check_same(o);
    SupernumberT r(m_);
    for (unsigned k = 0; k < n_coeff(); ++k) r.c_[k] = c_[k] + o.c_[k];
    return r;
  }
  SupernumberT operator-(const SupernumberT& o) const {
    check_same(o);
    SupernumberT r(m_);
    for (unsigned k = 0; k < n_coeff(); ++k) r.c_[k] = c_[k] - o.c_[k];
    return r;
  }
  SupernumberT operator-() const {
    SupernumberT r(m_);
    for (unsigned k = 0; k < n_coeff(); ++k) r.c_[k] = -c_[k];
    return r;
  }
  SupernumberT& operator+=(const SupernumberT& o) {
    check_same(o);
    for (unsigned k = 0; k < n_coeff(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  SupernumberT operator*(double c) const {
    SupernumberT r(m_);
    for (unsigned k = 0; k < n_coeff(); ++k) r.c_[k] = c_[k] * c;
    return r;
  }
  SupernumberT operator*(const T& c) const
    requires(!std::same_as<T, double>)
  {
    SupernumberT r(m_);
    for (unsigned k = 0; k < n_coeff(); ++k) r.c_[k] = c_[k] * c;
    return r;
  }

  // true when every coefficient of the wrong parity is below tol in
  // absolute value (derivative entries included)
  bool is_even(double tol = 0.0) const {
    for (unsigned k = 0; k < n_coeff(); ++k)
      if (std::popcount(k) % 2 == 1 && scalar_max_abs(c_[k]) > tol) return false;
    return true;
  }
  bool is_odd(double tol = 0.0) const {
    for (unsigned k = 0; k < n_coeff(); ++k)
      if (std::popcount(k) % 2 == 0 && scalar_max_abs(c_[k]) > tol) return false;
    return true;
  }
  double max_abs() const {
    double m = 0.0;
    for (unsigned k = 0; k < n_coeff(); ++k) m = std::max(m, scalar_max_abs(c_[k]));
    return m;
  }

  std::string to_string() const;

 private:
  void check_same(const SupernumberT& o) const {
    if (m_ != o.m_) throw std::invalid_argument("SupernumberT: mixed algebra sizes");
  }
  int m_ = 0;
  std::vector<T> c_;
};

using Supernumber = SupernumberT<Dual>;
using FastSupernumber = SupernumberT<double>;

// ordered monomial listing, e.g. "1.5 + 2*e0*e1"; stable across runs
template <class T>
std::string SupernumberT<T>::to_string() const {
  std::string out;
  for (unsigned k = 0; k < n_coeff(); ++k) {
    if (scalar_max_abs(c_[k]) == 0.0 && k != 0) continue;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", scalar_value(c_[k]));
    if (!out.empty()) out += " + ";
    out += buf;
    for (int g = 0; g < 2 * m_; ++g)
      if (k & (1u << g)) {
        std::snprintf(buf, sizeof buf, "*e%d", g);
        out += buf;
      }
  }
  if (out.empty()) out = "0";
  return out;
}

template <class T>
SupernumberT<T> mul(const SupernumberT<T>& a, const SupernumberT<T>& b) {
  if (a.pairs() != b.pairs()) throw std::invalid_argument("mul: mixed algebra sizes");
  const unsigned n = a.n_coeff();
  SupernumberT<T> r(a.pairs());
  for (unsigned ka = 0; ka < n; ++ka) {
    if (scalar_max_abs(a.coeff(ka)) == 0.0) continue;
    const unsigned comp = (n - 1) & ~ka;
    // enumerate subsets kb of the complement of ka
    unsigned kb = comp;
    while (true) {
      if (scalar_max_abs(b.coeff(kb)) != 0.0) {
        const int s = interleave_sign(ka, kb);
        T term = a.coeff(ka) * b.coeff(kb);
        if (s < 0) term = -term;
        r.coeff(ka | kb) += term;
      }
      if (kb == 0) break;
      kb = (kb - 1) & comp;
    }
  }
  return r;
}

// left derivative with respect to generator g
template <class T>
SupernumberT<T> gen_derivative(const SupernumberT<T>& f, int g) {
  if (g < 0 || g >= f.n_gen()) throw std::invalid_argument("gen_derivative: index out of range");
  const unsigned bit = 1u << g;
  const unsigned below = bit - 1;
  SupernumberT<T> r(f.pairs());
  for (unsigned k = 0; k < f.n_coeff(); ++k) {
    if (!(k & bit)) continue;
    const T& c = f.coeff(k);
    if (scalar_max_abs(c) == 0.0) continue;
    // left derivative: commute g past the generators below it in the
    // canonical ordering
    const int s = std::popcount(k & below) % 2 == 0 ? 1 : -1;
    r.coeff(k ^ bit) += (s > 0) ? c : -c;
  }
  return r;
}

// smooth scalar functions applied to even supernumbers by the finite
// Taylor expansion around the body (the soul is nilpotent)
struct AnalyticFn {
  void (*derivs)(double x, int k, double* d);  // d[j] = f^(j)(x), j = 0..k
  const char* name;
};
extern const AnalyticFn kExp;
extern const AnalyticFn kSqrt;
extern const AnalyticFn kReciprocal;
extern const AnalyticFn kCosh;
extern const AnalyticFn kSinh;

// Taylor coefficient f^(k)(body)/k! lifted to the coefficient type: the
// Dual version carries f^(k+1)(body)/k! * body.g as its gradient
inline double taylor_coeff(double /*body*/, double dk, double /*dk1*/, double factorial) {
  return dk / factorial;
}
inline Dual taylor_coeff(const Dual& body, double dk, double dk1, double factorial) {
  Dual r(dk / factorial);
  r.nd = body.nd;
  for (int t = 0; t < body.nd; ++t) r.g[t] = dk1 / factorial * body.g[t];
  return r;
}

template <class T>
SupernumberT<T> apply_analytic(const AnalyticFn& fn, const SupernumberT<T>& arg) {
  const double scale = arg.max_abs();
  if (!arg.is_even(1e-13 * (scale > 1.0 ? scale : 1.0)))
    throw std::invalid_argument("apply_analytic: argument must be even");
  const int m = arg.pairs();
  const T body = arg.body();
  SupernumberT<T> soul = arg;
  soul.coeff(0) = T{};

  // soul^(m+1) = 0: every nonzero soul monomial has degree >= 2
  const int kmax = m;
  double d[kMaxPairs + 2];
  fn.derivs(scalar_value(body), kmax + 1, d);

  SupernumberT<T> result(m);
  SupernumberT<T> soul_pow = SupernumberT<T>::scalar(m, T(1.0));
  double factorial = 1.0;
  for (int k = 0; k <= kmax; ++k) {
    if (k > 0) {
      soul_pow = mul(soul_pow, soul);
      factorial *= k;
      if (soul_pow.max_abs() == 0.0) break;
    }
    result += soul_pow * taylor_coeff(body, d[k], d[k + 1], factorial);
  }
  return result;
}

// ambient evaluation point: coordinates x_i, y_i per vertex; when seeded,
// dual direction 2i tracks d/dx_i and direction 2i+1 tracks d/dy_i
template <class T>
struct AmbientPointT {
  int m = 1;
  std::vector<T> xs, ys;

  static AmbientPointT plain(int m, const double* x, const double* y) {
    AmbientPointT p;
    p.m = m;
    for (int i = 0; i < m; ++i) {
      p.xs.push_back(T(x[i]));
      p.ys.push_back(T(y[i]));
    }
    return p;
  }
  static AmbientPointT seeded(int m, const double* x, const double* y)
    requires std::same_as<T, Dual>
  {
    AmbientPointT p;
    p.m = m;
    const int nd = 2 * m;
    for (int i = 0; i < m; ++i) {
      p.xs.push_back(Dual::seeded(x[i], 2 * i, nd));
      p.ys.push_back(Dual::seeded(y[i], 2 * i + 1, nd));
    }
    return p;
  }

  SupernumberT<T> constant(double c) const { return SupernumberT<T>::scalar(m, T(c)); }
  SupernumberT<T> X(int i) const { return SupernumberT<T>::scalar(m, xs[i]); }
  SupernumberT<T> Y(int i) const { return SupernumberT<T>::scalar(m, ys[i]); }
  SupernumberT<T> xi(int i) const { return SupernumberT<T>::generator(m, 2 * i + 1); }
  SupernumberT<T> eta(int i) const { return SupernumberT<T>::generator(m, 2 * i); }

  // tau_ij = x_i x_j + y_i y_j + xi_i eta_j - eta_i xi_j
  SupernumberT<T> tau(int i, int j) const {
    SupernumberT<T> t = SupernumberT<T>::scalar(m, xs[i] * xs[j] + ys[i] * ys[j]);
    t += mul(xi(i), eta(j));
    t += mul(eta(i), xi(j)) * (-1.0);
    return t;
  }
  // z_i = sqrt(1 + tau_ii), the vertex radius
  SupernumberT<T> z(int i) const {
    SupernumberT<T> arg = tau(i, i);
    arg.coeff(0) += T(1.0);
    return apply_analytic(kSqrt, arg);
  }
  SupernumberT<T> inv_z(int i) const { return apply_analytic(kReciprocal, z(i)); }
  // u_i . u_j = x_i x_j + y_i y_j - z_i z_j + xi_i eta_j - eta_i xi_j
  SupernumberT<T> u_dot(int i, int j) const {
    SupernumberT<T> t = tau(i, j);
    t += mul(z(i), z(j)) * (-1.0);
    return t;
  }
};

using AmbientPoint = AmbientPointT<Dual>;
using FastAmbientPoint = AmbientPointT<double>;

// dual-carrying form for derivative work, plain form for quadrature
using Form = std::function<Supernumber(const AmbientPoint&)>;
using FastForm = std::function<FastSupernumber(const FastAmbientPoint&)>;

// supersymmetry generator Q = sum_i (xi_i d/dx_i + eta_i d/dy_i
//                                    + x_i d/deta_i - y_i d/dxi_i)
// evaluated at one point; the result is value-only (coefficient gradients
// are stripped, since the terms mix dual and generator derivatives)
Supernumber apply_Q(const Form& f, int m, const double* x, const double* y);

// superintegral over R^{2m} x Grassmann, weight (2 pi)^-m; the same axes
// are used for every coordinate
struct SuperIntegralResult {
  double value = 0.0;
  double err_est = 0.0;
  int level_used = 0;
  std::size_t n_evals = 0;
  bool converged = false;
  double boundary_max = 0.0;  // largest |top| seen on the truncation shell
};
SuperIntegralResult superintegrate(const FastForm& f, int m, const quad::Axis& axis,
                                   const quad::Options& opt = {});

struct LocalisationReport {
  double q_residual = 0.0;   // max |Q F| over the probe points
  bool susy_ok = false;
  double integral = 0.0;
  double integral_err = 0.0;
  double f00_origin = 0.0;   // body coefficient of F at the origin
  double discrepancy = 0.0;  // |integral - f00_origin|
  bool pass = false;
};

// deterministic probe set used for the Q-residual scan
std::vector<std::vector<double>> q_probe_points(int m, int n_points);

// checks Q F = 0 on a deterministic probe set, then compares the
// superintegral against the degree-zero value at the origin; pass a
// generic callable usable with both coefficient types
template <class F>
LocalisationReport localisation_check(F&& f, int m, const quad::Axis& axis, double tol = 1e-7,
                                      const quad::Options& opt = {}) {
  LocalisationReport rep;
  for (const auto& pt : q_probe_points(m, 20)) {
    std::vector<double> x(m), y(m);
    for (int i = 0; i < m; ++i) {
      x[i] = pt[2 * i];
      y[i] = pt[2 * i + 1];
    }
    const Supernumber q = apply_Q(Form(f), m, x.data(), y.data());
    rep.q_residual = std::max(rep.q_residual, q.max_abs());
  }
  rep.susy_ok = rep.q_residual < 1e-8;

  const auto I = superintegrate(FastForm(f), m, axis, opt);
  rep.integral = I.value;
  rep.integral_err = I.err_est;

  std::vector<double> zero(m, 0.0);
  const FastSupernumber F0 = FastForm(f)(FastAmbientPoint::plain(m, zero.data(), zero.data()));
  rep.f00_origin = F0.body();
  rep.discrepancy = std::fabs(rep.integral - rep.f00_origin);
  rep.pass = rep.susy_ok && rep.discrepancy < tol;
  return rep;
}

}  // namespace hyperlab::grassmann
