#pragma once

// Ray-by-ray greedy selection of a subfamily of balls with the same union
// and bounded overlap.

#include "spider/domain.hpp"
#include "spider/scalar.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

namespace spider::cover {

template <Scalar S>
struct SelectionResult {
  std::vector<Ball<S>> selected;
  std::vector<std::size_t> selected_index;  // positions in the input family
  // Per ray, the input positions of J_0, J_1, ... in selection order. When
  // no ball has a trace starting at the hub on that ray, J_0 is empty and
  // the list starts at J_1 (starts_at_hub is false).
  std::vector<std::vector<std::size_t>> per_ray_sequences;
  std::vector<bool> starts_at_hub;
  std::vector<Ball<S>> removed;
  std::vector<std::size_t> removed_index;
};

template <Scalar S>
struct Multiplicity {
  std::size_t max = 0;
  SpiderPoint<S> witness{};
};

/// Largest number of balls covering a point off the hub. The count is
/// constant on the cells cut out by the trace endpoints of each ray, so
/// the maximum is read at cell midpoints. The hub is a single point and
/// is not counted.
template <Scalar S>
Multiplicity<S> multiplicity_audit(const std::vector<Ball<S>>& balls, int k) {
  Multiplicity<S> out;
  for (int j = 0; j < k; ++j) {
    std::vector<S> ends{S(0), S(1)};
    for (const auto& b : balls) {
      auto t = b.trace(j);
      if (t.empty()) continue;
      ends.push_back(t.lo);
      ends.push_back(t.hi);
    }
    std::sort(ends.begin(), ends.end());
    ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
    for (std::size_t i = 0; i + 1 < ends.size(); ++i) {
      S mid = S((ends[i] + ends[i + 1]) / S(2));
      std::size_t count = 0;
      for (const auto& b : balls)
        if (b.trace(j).contains(mid)) ++count;
      if (count > out.max) out = {count, SpiderPoint<S>{j, mid}};
    }
  }
  return out;
}

/// Drops every ball contained in another one; of identical balls the first
/// is kept.
template <Scalar S>
std::vector<Ball<S>> containment_filter(const std::vector<Ball<S>>& balls, int k) {
  std::vector<Ball<S>> out;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    bool drop = false;
    for (std::size_t m = 0; m < balls.size() && !drop; ++m) {
      if (m == i || !balls[i].subset_of(balls[m], k)) continue;
      drop = !(balls[m].subset_of(balls[i], k)) || m < i;
    }
    if (!drop) out.push_back(balls[i]);
  }
  return out;
}

namespace detail {

/// Index of the preferred ball among `ids`: larger total measure first,
/// then the smaller position.
template <Scalar S>
std::size_t prefer_measure(const std::vector<Ball<S>>& balls, int k, const std::vector<std::size_t>& ids) {
  std::size_t best = ids.front();
  S best_m = balls[best].measure(k);
  for (std::size_t i : ids) {
    S m = balls[i].measure(k);
    if (m > best_m || (m == best_m && i < best)) {
      best = i;
      best_m = m;
    }
  }
  return best;
}

template <Scalar S>
std::vector<std::size_t> run_ray(const std::vector<Ball<S>>& balls, int k, int j, bool& starts_at_hub) {
  std::vector<std::size_t> on_ray;
  for (std::size_t i = 0; i < balls.size(); ++i)
    if (!balls[i].trace(j).empty()) on_ray.push_back(i);

  std::vector<std::size_t> seq;
  // J_0: the hub ball with the longest trace on this ray.
  std::optional<S> longest;
  for (std::size_t i : on_ray) {
    auto t = balls[i].trace(j);
    if (t.lo == 0 && (!longest || t.hi > *longest)) longest = t.hi;
  }
  starts_at_hub = longest.has_value();
  if (longest) {
    std::vector<std::size_t> ties;
    for (std::size_t i : on_ray)
      if (balls[i].trace(j).lo == 0 && balls[i].trace(j).hi == *longest) ties.push_back(i);
    seq.push_back(prefer_measure(balls, k, ties));
  }

  while (true) {
    S sup = seq.empty() ? S(0) : balls[seq.back()].trace(j).hi;
    std::vector<std::size_t> fam;
    if (!seq.empty()) {
      auto cur = balls[seq.back()].trace(j);
      for (std::size_t i : on_ray) {
        auto t = balls[i].trace(j);
        if (t.overlaps(cur) && t.hi > sup) fam.push_back(i);
      }
    }
    bool largest_left = !fam.empty();
    if (fam.empty())
      for (std::size_t i : on_ray)
        if (balls[i].trace(j).lo >= sup) fam.push_back(i);
    if (fam.empty()) break;
    S edge = balls[fam.front()].trace(j).lo;
    for (std::size_t i : fam) {
      const S& lo = balls[i].trace(j).lo;
      if (largest_left ? lo > edge : lo < edge) edge = lo;
    }
    std::vector<std::size_t> ties;
    for (std::size_t i : fam)
      if (balls[i].trace(j).lo == edge) ties.push_back(i);
    seq.push_back(prefer_measure(balls, k, ties));
  }
  return seq;
}

}  // namespace detail

/// Runs the per-ray selection, keeps every selected ball (J_0 included) and
/// then, for k >= 2, removes the J_0 of the witness ray while some point is
/// covered k + 1 times.
template <Scalar S>
SelectionResult<S> select(const std::vector<Ball<S>>& balls, int k) {
  if (k < 1) throw std::invalid_argument("select: k must be >= 1");
  for (const auto& b : balls)
    if (b.home_ray() >= k) throw std::invalid_argument("select: ball on a ray outside 0..k-1");
  for (std::size_t i = 0; i < balls.size(); ++i)
    for (std::size_t m = 0; m < balls.size(); ++m)
      if (i != m && balls[i].subset_of(balls[m], k))
        throw std::invalid_argument("select: family contains nested balls; apply containment_filter first");

  SelectionResult<S> res;
  res.per_ray_sequences.resize(k);
  res.starts_at_hub.resize(k);
  std::vector<bool> chosen(balls.size(), false);
  for (int j = 0; j < k; ++j) {
    bool hub = false;
    res.per_ray_sequences[j] = detail::run_ray(balls, k, j, hub);
    res.starts_at_hub[j] = hub;
    for (std::size_t i : res.per_ray_sequences[j]) chosen[i] = true;
  }

  auto family = [&] {
    std::vector<Ball<S>> f;
    for (std::size_t i = 0; i < balls.size(); ++i)
      if (chosen[i]) f.push_back(balls[i]);
    return f;
  };

  if (k >= 2) {
    const auto target = union_traces(balls, k);
    while (true) {
      auto audit = multiplicity_audit(family(), k);
      if (audit.max <= static_cast<std::size_t>(k)) break;
      const int h = audit.witness.ray;
      if (!res.starts_at_hub[h]) throw std::logic_error("select: overlap above k on a ray without a hub ball");
      const std::size_t j0 = res.per_ray_sequences[h].front();
      if (!chosen[j0] || !balls[j0].contains(audit.witness))
        throw std::logic_error("select: overlap above k not resolved by removing J_0");
      chosen[j0] = false;
      if (union_traces(family(), k) != target) throw std::logic_error("select: removing J_0 changed the union");
      res.removed.push_back(balls[j0]);
      res.removed_index.push_back(j0);
    }
  }

  for (std::size_t i = 0; i < balls.size(); ++i)
    if (chosen[i]) {
      res.selected.push_back(balls[i]);
      res.selected_index.push_back(i);
    }
  return res;
}

/// J_0, J_2, ... are pairwise disjoint on their ray, and so are J_1, J_3, ...
template <Scalar S>
bool parity_disjoint(const std::vector<Ball<S>>& balls, const SelectionResult<S>& res) {
  for (std::size_t j = 0; j < res.per_ray_sequences.size(); ++j) {
    const auto& seq = res.per_ray_sequences[j];
    for (std::size_t a = 0; a < seq.size(); ++a)
      for (std::size_t b = a + 2; b < seq.size(); b += 2)
        if (balls[seq[a]].trace(static_cast<int>(j)).overlaps(balls[seq[b]].trace(static_cast<int>(j)))) return false;
  }
  return true;
}

}  // namespace spider::cover
