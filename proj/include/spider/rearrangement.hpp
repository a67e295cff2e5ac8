#pragma once

// Distribution functions and the k-decreasing rearrangement: the radially
// decreasing function on the spider that is equidistributed with |xi| and
// identical on every ray.

#include "spider/probability.hpp"
#include "spider/scalar.hpp"
#include "spider/step_function.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

namespace spider::rearr {

/// s -> P(|xi| > s), a right-continuous non-increasing step function.
template <Scalar S>
class DistributionFunction {
 public:
  /// levels: distinct |values| in decreasing order; tail[i] = P(|xi| >= levels[i]).
  DistributionFunction(std::vector<S> levels, std::vector<S> tail) : levels_(std::move(levels)), tail_(std::move(tail)) {}

  S operator()(const S& s) const {
    S out(0);
    for (std::size_t i = 0; i < levels_.size() && levels_[i] > s; ++i) out = tail_[i];
    return out;
  }

  const std::vector<S>& levels() const { return levels_; }
  const std::vector<S>& tail() const { return tail_; }

 private:
  std::vector<S> levels_;
  std::vector<S> tail_;
};

namespace detail {

/// (|value|, mass) pairs merged by value, sorted by decreasing value.
template <Scalar S>
std::vector<std::pair<S, S>> sorted_masses(std::vector<std::pair<S, S>> items) {
  for (auto& [v, m] : items) v = abs_of(v);
  std::sort(items.begin(), items.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  std::vector<std::pair<S, S>> out;
  for (const auto& [v, m] : items) {
    if (!out.empty() && out.back().first == v) out.back().second += m;
    else out.emplace_back(v, m);
  }
  return out;
}

/// Radially decreasing step function with the given (value, mass) list;
/// each value occupies `mass` of lambda_k, i.e. that length on every ray.
template <Scalar S>
StepFunction<S> radial_from_masses(const std::vector<std::pair<S, S>>& masses, int k) {
  std::vector<S> breaks{S(0)};
  std::vector<S> values;
  S acc(0);
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (!(masses[i].second > 0)) continue;
    acc += masses[i].second;
    values.push_back(masses[i].first);
    breaks.push_back(acc);
  }
  if (values.empty()) throw std::invalid_argument("rearrange: no mass");
  breaks.back() = S(1);  // absorbs rounding in the float backend
  return StepFunction<S>::radial(k, std::move(breaks), std::move(values));
}

}  // namespace detail

template <Scalar S>
DistributionFunction<S> distribution_function(const FiniteProbSpace<S>& space, const Rv<S>& xi) {
  if (xi.size() != space.size()) throw std::invalid_argument("distribution_function: size mismatch");
  std::vector<std::pair<S, S>> items;
  for (std::size_t i = 0; i < xi.size(); ++i) items.emplace_back(xi[i], space.prob(i));
  auto masses = detail::sorted_masses(std::move(items));
  std::vector<S> levels, tail;
  S acc(0);
  for (const auto& [v, m] : masses) {
    acc += m;
    if (v == 0) break;  // P(|xi| > s) never counts zeros for s >= 0
    levels.push_back(v);
    tail.push_back(acc);
  }
  return DistributionFunction<S>(std::move(levels), std::move(tail));
}

/// xi*_(k): breakpoints are cumulative probabilities of the sorted |values|.
template <Scalar S>
StepFunction<S> rearrange(const FiniteProbSpace<S>& space, const Rv<S>& xi, int k) {
  if (xi.size() != space.size()) throw std::invalid_argument("rearrange: size mismatch");
  if (k < 1) throw std::invalid_argument("rearrange: k must be >= 1");
  std::vector<std::pair<S, S>> items;
  for (std::size_t i = 0; i < xi.size(); ++i) items.emplace_back(xi[i], space.prob(i));
  return detail::radial_from_masses(detail::sorted_masses(std::move(items)), k);
}

/// Rearrangement of a step function on the spider: each piece of length
/// len on one ray has lambda_k-mass len / k.
template <Scalar S>
StepFunction<S> rearrange_step(const StepFunction<S>& f) {
  std::vector<std::pair<S, S>> items;
  const S k(f.k());
  for (const auto& r : f.rays())
    for (std::size_t i = 0; i < r.size(); ++i) items.emplace_back(r.values[i], S(r.length(i) / k));
  return detail::radial_from_masses(detail::sorted_masses(std::move(items)), f.k());
}

}  // namespace spider::rearr
