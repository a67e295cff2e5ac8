#pragma once

// The sharp constants: C_{p,k}, the root on [1, inf) of
//   (p-1) C^p - p C^(p-1) - (k-1) = 0,
// and lambda_{r,k}, the root on [1, inf) of
//   lambda (1-r) - (k-1) r lambda^((r-1)/r) - 1 = 0.
// Both left-hand sides are increasing on [1, inf) and negative at 1.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace spider::constants {

enum class Kind { Cpk, Lambda };

struct SharpConstant {
  Kind kind = Kind::Cpk;
  double param = 0;  // p for Cpk, r for Lambda
  int k = 1;
  double value = 0;
  double residual = 0;
  double lo = 0, hi = 0;
  double tol = 0;
  int iterations = 0;
};

namespace detail {

/// Bracket the root of an increasing f with f(1) < 0 by doubling, then
/// Newton steps that fall back to bisection whenever they leave the bracket.
/// Iterates to roundoff; tol sets the width of the reported bracket.
inline SharpConstant solve_increasing(const std::function<double(double)>& f, const std::function<double(double)>& df,
                                      double tol) {
  SharpConstant out;
  double lo = 1.0, hi = 2.0;
  if (!(f(lo) < 0)) throw std::logic_error("solve_increasing: f(1) must be negative");
  double fh;
  while (!((fh = f(hi)) > 0)) {
    if (fh == 0) break;
    lo = hi;
    hi *= 2;
    if (hi > 1e300) throw std::runtime_error("solve_increasing: no sign change");
  }
  double x = fh == 0 ? hi : 0.5 * (lo + hi);
  if (fh == 0) lo = hi;
  int it = 0;
  for (; it < 500 && lo < hi; ++it) {
    double fx = f(x);
    if (fx == 0) {
      lo = hi = x;
      break;
    }
    if (fx < 0) lo = x;
    else hi = x;
    double d = df(x);
    double nx = (d > 0) ? x - fx / d : lo - 1;
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (std::fabs(nx - x) <= 4 * std::numeric_limits<double>::epsilon() * x) {
      x = nx;
      break;
    }
    x = nx;
  }
  // Newton may stop before the bracket shrinks; certify a tight one.
  const double h = 0.5 * tol * std::max(1.0, x);
  if (hi - lo > 2 * h && f(x - h) < 0 && f(x + h) > 0) {
    lo = x - h;
    hi = x + h;
  }
  out.value = x;
  out.residual = f(x);
  out.lo = lo;
  out.hi = hi;
  out.tol = tol;
  out.iterations = it;
  return out;
}

}  // namespace detail

inline double cpk_equation(double s, double p, int k) {
  return (p - 1) * std::pow(s, p) - p * std::pow(s, p - 1) - (k - 1);
}

inline double lambda_equation(double l, double r, int k) {
  return l * (1 - r) - (k - 1) * r * std::exp(((r - 1) / r) * std::log(l)) - 1;
}

inline SharpConstant solve_cpk(double p, int k, double tol = 1e-12) {
  if (!(p > 1) || !std::isfinite(p)) throw std::invalid_argument("solve_cpk: p must be finite and exceed 1");
  if (k < 1) throw std::invalid_argument("solve_cpk: k must be >= 1");
  if (!(tol > 0)) throw std::invalid_argument("solve_cpk: tol must be positive");
  auto f = [=](double s) { return cpk_equation(s, p, k); };
  auto df = [=](double s) { return p * (p - 1) * std::pow(s, p - 2) * (s - 1); };
  auto out = detail::solve_increasing(f, df, tol);
  out.kind = Kind::Cpk;
  out.param = p;
  out.k = k;
  return out;
}

inline SharpConstant solve_lambda(double r, int k, double tol = 1e-12) {
  if (!(r > 0 && r < 1)) throw std::invalid_argument("solve_lambda: r must lie in (0,1)");
  if (k < 1) throw std::invalid_argument("solve_lambda: k must be >= 1");
  if (!(tol > 0)) throw std::invalid_argument("solve_lambda: tol must be positive");
  auto f = [=](double l) { return lambda_equation(l, r, k); };
  auto df = [=](double l) { return (1 - r) + (k - 1) * (1 - r) * std::exp((-1 / r) * std::log(l)); };
  auto out = detail::solve_increasing(f, df, tol);
  out.kind = Kind::Lambda;
  out.param = r;
  out.k = k;
  return out;
}

struct ConvergenceRow {
  double r;
  double lambda;
  double gap;
};

struct ConvergenceReport {
  double p;
  int k;
  double cpk;
  std::vector<ConvergenceRow> rows;
  bool gaps_decreasing;  // meaningful when r is increasing along the list
};

inline ConvergenceReport convergence_report(double p, int k, const std::vector<double>& r_list, double tol = 1e-12) {
  auto c = solve_cpk(p, k, tol);
  ConvergenceReport rep{p, k, c.value, {}, true};
  for (double r : r_list) {
    if (!(r > 0 && r < 1 / p)) throw std::invalid_argument("convergence_report: every r must lie in (0, 1/p)");
    auto l = solve_lambda(r, k, tol);
    rep.rows.push_back({r, l.value, c.value - l.value});
  }
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    if (rep.rows[i].r > rep.rows[i - 1].r && !(rep.rows[i].gap < rep.rows[i - 1].gap)) rep.gaps_decreasing = false;
  return rep;
}

}  // namespace spider::constants
