#pragma once

// Step functions on the spider: finitely many constant pieces per ray.

#include "spider/domain.hpp"
#include "spider/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace spider {

/// Pieces of one ray: value values[i] on [breaks[i], breaks[i+1]).
template <Scalar S>
struct RayPieces {
  std::vector<S> breaks;
  std::vector<S> values;

  std::size_t size() const { return values.size(); }
  S length(std::size_t i) const { return S(breaks[i + 1] - breaks[i]); }
};

template <Scalar S>
class StepFunction {
 public:
  StepFunction(int k, std::vector<RayPieces<S>> rays) : k_(k), rays_(std::move(rays)) { validate(); }

  static StepFunction constant(int k, const S& c) {
    return StepFunction(k, std::vector<RayPieces<S>>(k, RayPieces<S>{{S(0), S(1)}, {c}}));
  }

  /// The same pieces copied onto every ray.
  static StepFunction radial(int k, std::vector<S> breaks, std::vector<S> values) {
    return StepFunction(k, std::vector<RayPieces<S>>(k, RayPieces<S>{std::move(breaks), std::move(values)}));
  }

  /// Indicator of {|x| < a}.
  static StepFunction ball_indicator(int k, const S& a) {
    if (!(a > 0 && a <= 1)) throw std::invalid_argument("ball_indicator: need 0 < a <= 1");
    if (a == 1) return constant(k, S(1));
    return radial(k, {S(0), a, S(1)}, {S(1), S(0)});
  }

  int k() const { return k_; }
  const RayPieces<S>& ray(int j) const { return rays_.at(j); }
  const std::vector<RayPieces<S>>& rays() const { return rays_; }

  std::size_t piece_count() const {
    std::size_t n = 0;
    for (const auto& r : rays_) n += r.size();
    return n;
  }

  /// Index of the piece of ray j containing pos (right-continuous; pos == 1
  /// belongs to the last piece).
  std::size_t piece_index(int j, const S& pos) const {
    const auto& br = rays_.at(j).breaks;
    auto it = std::upper_bound(br.begin(), br.end(), pos);
    std::size_t idx = static_cast<std::size_t>(it - br.begin());
    if (idx == 0) return 0;
    return std::min(idx - 1, rays_[j].size() - 1);
  }

  S value_at(int j, const S& pos) const { return rays_.at(j).values[piece_index(j, pos)]; }
  S value_at(const SpiderPoint<S>& x) const { return value_at(x.ray, x.pos); }

  StepFunction abs() const {
    auto out = rays_;
    for (auto& r : out)
      for (auto& v : r.values) v = abs_of(v);
    return StepFunction(k_, std::move(out));
  }

  StepFunction scaled(const S& c) const {
    auto out = rays_;
    for (auto& r : out)
      for (auto& v : r.values) v = S(v * c);
    return StepFunction(k_, std::move(out));
  }

  /// Adjacent equal values merged.
  StepFunction canonical() const {
    std::vector<RayPieces<S>> out(k_);
    for (int j = 0; j < k_; ++j) {
      const auto& r = rays_[j];
      out[j].breaks.push_back(r.breaks[0]);
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (!out[j].values.empty() && out[j].values.back() == r.values[i]) {
          out[j].breaks.back() = r.breaks[i + 1];
        } else {
          out[j].values.push_back(r.values[i]);
          out[j].breaks.push_back(r.breaks[i + 1]);
        }
      }
    }
    return StepFunction(k_, std::move(out));
  }

  /// Integral of f over [0, y) of ray j (length measure, not normalized).
  S ray_integral(int j, const S& y) const {
    const auto& r = rays_.at(j);
    S acc(0);
    for (std::size_t i = 0; i < r.size() && r.breaks[i] < y; ++i) {
      S hi = std::min<S>(r.breaks[i + 1], y);
      acc += r.values[i] * (hi - r.breaks[i]);
    }
    return acc;
  }

  S max_value() const {
    S m = rays_[0].values[0];
    for (const auto& r : rays_)
      for (const auto& v : r.values) m = std::max<S>(m, v);
    return m;
  }

  /// Identical on every ray and non-increasing in |x|.
  bool is_radially_decreasing() const {
    for (int j = 1; j < k_; ++j)
      if (rays_[j].breaks != rays_[0].breaks || rays_[j].values != rays_[0].values) return false;
    const auto& v = rays_[0].values;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] > v[i - 1]) return false;
    return true;
  }

  /// Sorted breakpoints of all rays together.
  std::vector<S> all_breaks() const {
    std::vector<S> out;
    for (const auto& r : rays_) out.insert(out.end(), r.breaks.begin(), r.breaks.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  friend bool operator==(const StepFunction& a, const StepFunction& b) {
    if (a.k_ != b.k_) return false;
    for (int j = 0; j < a.k_; ++j)
      if (a.rays_[j].breaks != b.rays_[j].breaks || a.rays_[j].values != b.rays_[j].values) return false;
    return true;
  }

 private:
  void validate() const {
    if (k_ < 1) throw std::invalid_argument("StepFunction: k must be >= 1");
    if (static_cast<int>(rays_.size()) != k_) throw std::invalid_argument("StepFunction: need one piece list per ray");
    for (const auto& r : rays_) {
      if (r.values.empty() || r.breaks.size() != r.values.size() + 1)
        throw std::invalid_argument("StepFunction: breaks must have one more entry than values");
      if (r.breaks.front() != 0 || r.breaks.back() != 1)
        throw std::invalid_argument("StepFunction: breakpoints must start at 0 and end at 1");
      for (std::size_t i = 1; i < r.breaks.size(); ++i)
        if (!(r.breaks[i - 1] < r.breaks[i])) throw std::invalid_argument("StepFunction: breakpoints must increase");
      if constexpr (std::same_as<S, double>) {
        for (double v : r.values)
          if (!std::isfinite(v)) throw std::invalid_argument("StepFunction: non-finite value");
      }
    }
  }

  int k_;
  std::vector<RayPieces<S>> rays_;
};

/// Integral of f against lambda_k.
template <Scalar S>
S integrate(const StepFunction<S>& f) {
  S total(0);
  for (const auto& r : f.rays())
    for (std::size_t i = 0; i < r.size(); ++i) total += r.values[i] * r.length(i);
  return S(total / S(f.k()));
}

/// Integral of |f|^p against lambda_k, evaluated in double precision.
template <Scalar S>
double power_integral(const StepFunction<S>& f, double p) {
  if (!(p > 0)) throw std::invalid_argument("power_integral: p must be positive");
  double total = 0;
  for (const auto& r : f.rays())
    for (std::size_t i = 0; i < r.size(); ++i)
      total += std::pow(std::fabs(to_double(r.values[i])), p) * to_double(r.length(i));
  return total / f.k();
}

/// Exact integral of |f|^p for an integer exponent.
template <Scalar S>
S power_integral_exact(const StepFunction<S>& f, unsigned p) {
  S total(0);
  for (const auto& r : f.rays())
    for (std::size_t i = 0; i < r.size(); ++i) {
      S term(1);
      S a = abs_of(r.values[i]);
      for (unsigned e = 0; e < p; ++e) term *= a;
      total += term * r.length(i);
    }
  return S(total / S(f.k()));
}

template <Scalar S>
double lp_norm(const StepFunction<S>& f, double p) {
  if (!(p > 1)) throw std::invalid_argument("lp_norm: p must exceed 1");
  return std::pow(power_integral(f, p), 1.0 / p);
}

/// lambda_k(g > s), or lambda_k(g >= s) when strict is false.
template <Scalar S>
S level_measure(const StepFunction<S>& g, const S& s, bool strict = true) {
  S total(0);
  for (const auto& r : g.rays())
    for (std::size_t i = 0; i < r.size(); ++i)
      if (strict ? r.values[i] > s : r.values[i] >= s) total += r.length(i);
  return S(total / S(g.k()));
}

/// Integral of f over {g > s} (or {g >= s}) against lambda_k.
template <Scalar S>
S restricted_integral(const StepFunction<S>& g, const StepFunction<S>& f, const S& s, bool strict = true) {
  if (g.k() != f.k()) throw std::invalid_argument("restricted_integral: k mismatch");
  S total(0);
  for (int j = 0; j < g.k(); ++j) {
    const auto& rg = g.ray(j);
    const auto& rf = f.ray(j);
    std::size_t a = 0, b = 0;
    S lo(0);
    while (a < rg.size() && b < rf.size()) {
      S hi = std::min<S>(rg.breaks[a + 1], rf.breaks[b + 1]);
      bool in = strict ? rg.values[a] > s : rg.values[a] >= s;
      if (in) total += rf.values[b] * (hi - lo);
      lo = hi;
      if (rg.breaks[a + 1] == hi) ++a;
      if (rf.breaks[b + 1] == hi) ++b;
    }
  }
  return S(total / S(g.k()));
}

template <Scalar S>
StepFunction<double> to_double(const StepFunction<S>& f) {
  if constexpr (std::same_as<S, double>) {
    return f;
  } else {
    std::vector<RayPieces<double>> rays;
    for (const auto& r : f.rays()) {
      RayPieces<double> out;
      for (const auto& b : r.breaks) out.breaks.push_back(spider::to_double(b));
      for (const auto& v : r.values) out.values.push_back(spider::to_double(v));
      rays.push_back(std::move(out));
    }
    return StepFunction<double>(f.k(), std::move(rays));
  }
}

}  // namespace spider
