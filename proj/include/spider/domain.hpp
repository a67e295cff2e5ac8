#pragma once

// Geometry of the k-ray spider: points, half-open spans on a ray, balls of
// the railway metric and their traces, and the normalized length measure
// (every ray carries mass 1/k).

#include "spider/scalar.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace spider {

/// A point of the spider. Rays are numbered 0..k-1; pos == 0 is the hub
/// and is shared by all rays.
template <Scalar S>
struct SpiderPoint {
  int ray = 0;
  S pos = S(0);

  bool is_origin() const { return pos == 0; }
};

/// Half-open span [lo, hi) of positions on one ray. Empty when lo >= hi.
template <Scalar S>
struct Span {
  S lo = S(0);
  S hi = S(0);

  bool empty() const { return !(lo < hi); }
  S length() const { return empty() ? S(0) : S(hi - lo); }
  bool contains(const S& x) const { return lo <= x && x < hi; }
  bool overlaps(const Span& o) const { return lo < o.hi && o.lo < hi; }
  bool covers(const Span& o) const { return o.empty() || (lo <= o.lo && o.hi <= hi); }
  friend bool operator==(const Span&, const Span&) = default;
};

/// Ball that does not reach the hub: [a, b) on a single ray.
template <Scalar S>
struct IntervalBall {
  int ray = 0;
  S a = S(0);
  S b = S(0);
};

/// Ball around the hub: [0, b) on its home ray and [0, t) on every other
/// ray, with t <= b.
template <Scalar S>
struct StarBall {
  int ray = 0;
  S b = S(0);
  S t = S(0);
};

template <Scalar S>
class Ball {
 public:
  Ball(IntervalBall<S> iv) : shape_(std::move(iv)) {
    const auto& v = std::get<IntervalBall<S>>(shape_);
    if (!(v.a >= 0 && v.a < v.b && v.b <= 1))
      throw std::invalid_argument("IntervalBall requires 0 <= a < b <= 1");
    if (v.ray < 0) throw std::invalid_argument("IntervalBall: negative ray");
  }

  Ball(StarBall<S> st) : shape_(std::move(st)) {
    const auto& v = std::get<StarBall<S>>(shape_);
    if (!(v.b > 0 && v.b <= 1)) throw std::invalid_argument("StarBall requires 0 < b <= 1");
    if (!(v.t >= 0 && v.t <= v.b)) throw std::invalid_argument("StarBall requires 0 <= t <= b");
    if (v.ray < 0) throw std::invalid_argument("StarBall: negative ray");
  }

  /// The railway-metric ball of the given radius around a point, clipped
  /// to the unit rays.
  static Ball from_center(const SpiderPoint<S>& c, const S& radius) {
    if (!(radius > 0)) throw std::invalid_argument("Ball::from_center: radius must be positive");
    S one(1);
    S b = std::min<S>(S(c.pos + radius), one);
    if (radius > c.pos) {
      S t = std::min<S>(S(radius - c.pos), one);
      return Ball(StarBall<S>{c.ray, b, t});
    }
    return Ball(IntervalBall<S>{c.ray, S(c.pos - radius), b});
  }

  bool is_star() const { return std::holds_alternative<StarBall<S>>(shape_); }
  const IntervalBall<S>& interval() const { return std::get<IntervalBall<S>>(shape_); }
  const StarBall<S>& star() const { return std::get<StarBall<S>>(shape_); }

  int home_ray() const { return is_star() ? star().ray : interval().ray; }

  /// The positions on `ray` covered by the ball.
  Span<S> trace(int ray) const {
    if (is_star()) {
      const auto& s = star();
      return ray == s.ray ? Span<S>{S(0), s.b} : Span<S>{S(0), s.t};
    }
    const auto& iv = interval();
    return ray == iv.ray ? Span<S>{iv.a, iv.b} : Span<S>{S(0), S(0)};
  }

  /// True when the ball contains the hub (under the half-open convention,
  /// an interval starting at 0 does).
  bool contains_origin() const { return is_star() || interval().a == 0; }

  bool contains(const SpiderPoint<S>& x) const {
    if (x.is_origin()) return contains_origin();
    return trace(x.ray).contains(x.pos);
  }

  /// Ball measure under lambda_k.
  S measure(int k) const {
    S len(0);
    for (int j = 0; j < k; ++j) len += trace(j).length();
    return S(len / S(k));
  }

  bool subset_of(const Ball& o, int k) const {
    for (int j = 0; j < k; ++j)
      if (!o.trace(j).covers(trace(j))) return false;
    return true;
  }

  friend bool operator==(const Ball& x, const Ball& y) {
    if (x.is_star() != y.is_star()) return false;
    if (x.is_star())
      return x.star().ray == y.star().ray && x.star().b == y.star().b && x.star().t == y.star().t;
    return x.interval().ray == y.interval().ray && x.interval().a == y.interval().a &&
           x.interval().b == y.interval().b;
  }

 private:
  std::variant<IntervalBall<S>, StarBall<S>> shape_;
};

template <Scalar S>
Span<S> ball_trace(const Ball<S>& ball, int ray) {
  return ball.trace(ray);
}

/// Per-ray lists of spans, one list per ray.
template <Scalar S>
using Traces = std::vector<std::vector<Span<S>>>;

/// lambda_k of a union of spans. Spans on one ray must not overlap; use
/// canonical_union() first when they might.
template <Scalar S>
S measure(const Traces<S>& traces, int k) {
  if (k < 1) throw std::invalid_argument("measure: k must be >= 1");
  if (static_cast<int>(traces.size()) > k) throw std::invalid_argument("measure: more rays than k");
  S total(0);
  for (const auto& ray : traces) {
    std::vector<Span<S>> sorted;
    for (const auto& sp : ray) {
      if (sp.empty()) continue;
      if (sp.lo < 0 || sp.hi > 1) throw std::invalid_argument("measure: span outside [0,1]");
      sorted.push_back(sp);
    }
    std::sort(sorted.begin(), sorted.end(), [](const Span<S>& x, const Span<S>& y) { return x.lo < y.lo; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (i > 0 && sorted[i].lo < sorted[i - 1].hi)
        throw std::invalid_argument("measure: overlapping spans on one ray");
      total += sorted[i].length();
    }
  }
  return S(total / S(k));
}

template <Scalar S>
S measure(const Ball<S>& ball, int k) {
  return ball.measure(k);
}

/// Sorted, disjoint, non-adjacent spans with the same union.
template <Scalar S>
std::vector<Span<S>> canonical_union(std::vector<Span<S>> spans) {
  std::erase_if(spans, [](const Span<S>& s) { return s.empty(); });
  std::sort(spans.begin(), spans.end(), [](const Span<S>& x, const Span<S>& y) { return x.lo < y.lo; });
  std::vector<Span<S>> out;
  for (const auto& s : spans) {
    if (!out.empty() && s.lo <= out.back().hi) {
      if (out.back().hi < s.hi) out.back().hi = s.hi;
    } else {
      out.push_back(s);
    }
  }
  return out;
}

/// Canonical per-ray union of a family of balls.
template <Scalar S>
Traces<S> union_traces(const std::vector<Ball<S>>& balls, int k) {
  Traces<S> out(k);
  for (int j = 0; j < k; ++j) {
    std::vector<Span<S>> spans;
    for (const auto& b : balls) spans.push_back(b.trace(j));
    out[j] = canonical_union(std::move(spans));
  }
  return out;
}

}  // namespace spider
