#pragma once

// Piecewise-Mobius functions: on each piece x -> (a + b x) / (c + d x).
// This is the exact shape of the maximal function of a step function.

#include "spider/scalar.hpp"
#include "spider/step_function.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace spider {

template <Scalar S>
struct Mobius {
  S a = S(0), b = S(0), c = S(1), d = S(0);

  static Mobius constant(const S& v) { return {v, S(0), S(1), S(0)}; }

  S numerator(const S& x) const { return S(a + b * x); }
  S denominator(const S& x) const { return S(c + d * x); }
  S operator()(const S& x) const { return S((a + b * x) / (c + d * x)); }

  /// Sign of the derivative: (b c - a d) / (c + d x)^2.
  S slope_numerator() const { return S(b * c - a * d); }
  S derivative(const S& x) const {
    S den = denominator(x);
    return S(slope_numerator() / (den * den));
  }

  bool is_constant() const { return slope_numerator() == 0; }

  /// The x with value s, when the equation a + b x = s (c + d x) has a
  /// unique solution.
  std::optional<S> solve(const S& s) const {
    S coef = b - s * d;
    if (coef == 0) return std::nullopt;
    return S((s * c - a) / coef);
  }

  Mobius scaled(const S& k) const { return {S(a * k), S(b * k), c, d}; }
};

template <Scalar S>
struct MobiusPiece {
  S lo, hi;
  Mobius<S> g;
};

/// Result of a quadrature: value plus an absolute error bound.
struct Quadrature {
  double value = 0;
  double error = 0;
};

namespace detail {

template <class F>
void adaptive_gk(const F& f, double lo, double hi, double budget, int depth, Quadrature& acc) {
  // Kronrod minus embedded Gauss; boost's own estimate carries a floor of
  // eps * max|f| that does not shrink with the interval.
  double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 0, 0.0);
  double err = std::fabs(v - boost::math::quadrature::gauss<double, 7>::integrate(f, lo, hi));
  // Estimates at roundoff level relative to the piece cannot shrink further.
  const double floor = 64 * std::numeric_limits<double>::epsilon() * std::fabs(v);
  if (err <= std::max(budget, floor) || depth >= 40 ||
      !(hi - lo > 4 * std::numeric_limits<double>::epsilon() * std::fabs(hi))) {
    acc.value += v;
    acc.error += err;
    return;
  }
  double mid = 0.5 * (lo + hi);
  adaptive_gk(f, lo, mid, 0.5 * budget, depth + 1, acc);
  adaptive_gk(f, mid, hi, 0.5 * budget, depth + 1, acc);
}

}  // namespace detail

template <Scalar S>
class PiecewiseMobius {
 public:
  using Ray = std::vector<MobiusPiece<S>>;

  PiecewiseMobius(int k, std::vector<Ray> rays) : k_(k), rays_(std::move(rays)) { validate(); }

  static PiecewiseMobius constant(int k, const S& v) {
    return PiecewiseMobius(k, std::vector<Ray>(k, Ray{{S(0), S(1), Mobius<S>::constant(v)}}));
  }

  int k() const { return k_; }
  const Ray& ray(int j) const { return rays_.at(j); }
  std::size_t piece_count() const {
    std::size_t n = 0;
    for (const auto& r : rays_) n += r.size();
    return n;
  }

  S value_at(int j, const S& pos) const {
    const auto& r = rays_.at(j);
    auto it = std::upper_bound(r.begin(), r.end(), pos, [](const S& x, const MobiusPiece<S>& p) { return x < p.lo; });
    std::size_t idx = it == r.begin() ? 0 : static_cast<std::size_t>(it - r.begin()) - 1;
    return r[idx].g(pos);
  }

  /// Largest jump between adjacent pieces and between the rays at the hub,
  /// relative to max(1, |left|, |right|).
  double continuity_defect() const {
    auto jump = [](double x, double y) { return std::fabs(x - y) / std::max({1.0, std::fabs(x), std::fabs(y)}); };
    double worst = 0;
    double hub = to_double(rays_[0].front().g(S(0)));
    for (const auto& r : rays_) {
      worst = std::max(worst, jump(to_double(r.front().g(S(0))), hub));
      for (std::size_t i = 1; i < r.size(); ++i)
        worst = std::max(worst, jump(to_double(r[i - 1].g(r[i].lo)), to_double(r[i].g(r[i].lo))));
    }
    return worst;
  }

 private:
  void validate() const {
    if (k_ < 1 || static_cast<int>(rays_.size()) != k_) throw std::invalid_argument("PiecewiseMobius: need one piece list per ray");
    for (const auto& r : rays_) {
      if (r.empty() || r.front().lo != 0 || r.back().hi != 1)
        throw std::invalid_argument("PiecewiseMobius: pieces must tile [0,1]");
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (!(r[i].lo < r[i].hi)) throw std::invalid_argument("PiecewiseMobius: empty piece");
        if (i > 0 && r[i].lo != r[i - 1].hi) throw std::invalid_argument("PiecewiseMobius: pieces must tile [0,1]");
        if (!(r[i].g.denominator(r[i].lo) > 0) || !(r[i].g.denominator(r[i].hi) > 0))
          throw std::invalid_argument("PiecewiseMobius: denominator must be positive on its piece");
      }
    }
  }

  int k_;
  std::vector<Ray> rays_;
};

/// Measure of {x in [lo,hi) : g(x) > s} (or >= s) for a single Mobius
/// piece. Mobius maps are monotone on intervals where the denominator has
/// constant sign, so the set is a prefix or a suffix of the piece.
template <Scalar S>
S piece_superlevel(const MobiusPiece<S>& p, const S& s, bool strict, S* prefix_end = nullptr, S* suffix_begin = nullptr) {
  auto above = [&](const S& v) { return strict ? v > s : v >= s; };
  S vlo = p.g(p.lo), vhi = p.g(p.hi);
  bool alo = above(vlo), ahi = above(vhi);
  S pre = p.lo, suf = p.hi;
  if (alo && ahi) {
    pre = p.hi;
  } else if (alo || ahi) {
    auto x = p.g.solve(s);
    S cut = x ? std::clamp<S>(*x, p.lo, p.hi) : (alo ? p.hi : p.lo);
    if (alo) pre = cut;
    else suf = cut;
  }
  if (prefix_end) *prefix_end = pre;
  if (suffix_begin) *suffix_begin = suf;
  if (pre == p.hi) return S(p.hi - p.lo);
  return S((pre - p.lo) + (p.hi - suf));
}

/// lambda_k(g > s) (or >= s).
template <Scalar S>
S level_measure(const PiecewiseMobius<S>& g, const S& s, bool strict = true) {
  S total(0);
  for (int j = 0; j < g.k(); ++j)
    for (const auto& p : g.ray(j)) total += piece_superlevel(p, s, strict);
  return S(total / S(g.k()));
}

/// Integral of the step function f over {g > s} (or >= s).
template <Scalar S>
S restricted_integral(const PiecewiseMobius<S>& g, const StepFunction<S>& f, const S& s, bool strict = true) {
  if (g.k() != f.k()) throw std::invalid_argument("restricted_integral: k mismatch");
  S total(0);
  for (int j = 0; j < g.k(); ++j) {
    for (const auto& p : g.ray(j)) {
      S pre, suf;
      piece_superlevel(p, s, strict, &pre, &suf);
      total += f.ray_integral(j, pre) - f.ray_integral(j, p.lo);
      if (pre < suf) total += f.ray_integral(j, p.hi) - f.ray_integral(j, suf);
    }
  }
  return S(total / S(g.k()));
}

/// Integral of |g|^p against lambda_k by adaptive Gauss-Kronrod per piece.
/// The error bound is below `tol` unless a piece reaches roundoff level.
template <Scalar S>
Quadrature power_integral(const PiecewiseMobius<S>& g, double p, double tol = 1e-10) {
  if (!(p > 0)) throw std::invalid_argument("power_integral: p must be positive");
  Quadrature acc;
  std::size_t n = g.piece_count();
  double budget = tol * g.k() / static_cast<double>(n);
  for (int j = 0; j < g.k(); ++j) {
    for (const auto& piece : g.ray(j)) {
      double a = to_double(piece.g.a), b = to_double(piece.g.b), c = to_double(piece.g.c), d = to_double(piece.g.d);
      double lo = to_double(piece.lo), hi = to_double(piece.hi);
      if (piece.g.is_constant()) {
        double v = std::pow(std::fabs(to_double(piece.g(piece.lo))), p);
        acc.value += v * (hi - lo);
        continue;
      }
      auto integrand = [=](double x) { return std::pow(std::fabs((a + b * x) / (c + d * x)), p); };
      detail::adaptive_gk(integrand, lo, hi, budget, 0, acc);
    }
  }
  acc.value /= g.k();
  acc.error /= g.k();
  return acc;
}

template <Scalar S>
double lp_norm(const PiecewiseMobius<S>& g, double p, double tol = 1e-10) {
  if (!(p > 1)) throw std::invalid_argument("lp_norm: p must exceed 1");
  return std::pow(power_integral(g, p, tol).value, 1.0 / p);
}

}  // namespace spider
