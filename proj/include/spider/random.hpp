#pragma once

// Seeded generators of random instances for property sweeps. Values are
// drawn on coarse rational grids so the exact backend stays cheap.

#include "spider/domain.hpp"
#include "spider/probability.hpp"
#include "spider/scalar.hpp"
#include "spider/step_function.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <vector>

namespace spider::gen {

using Rng = std::mt19937_64;

inline long uniform_int(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

/// `count` distinct interior points of {1/den, ..., (den-1)/den}, sorted,
/// framed by 0 and 1.
template <Scalar S>
std::vector<S> random_breaks(Rng& rng, std::size_t count, long den) {
  std::set<long> cuts;
  count = std::min<std::size_t>(count, static_cast<std::size_t>(den - 1));
  while (cuts.size() < count) cuts.insert(uniform_int(rng, 1, den - 1));
  std::vector<S> out{S(0)};
  for (long c : cuts) out.push_back(ratio<S>(c, den));
  out.push_back(S(1));
  return out;
}

/// Step function with 1..max_pieces pieces per ray and values in
/// {-max_value, ..., max_value} / value_den.
template <Scalar S>
StepFunction<S> random_step(Rng& rng, int k, std::size_t max_pieces, long den = 64, long max_value = 9,
                            long value_den = 1) {
  std::vector<RayPieces<S>> rays;
  for (int j = 0; j < k; ++j) {
    auto breaks = random_breaks<S>(rng, static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long>(max_pieces) - 1)), den);
    std::vector<S> values;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) values.push_back(ratio<S>(uniform_int(rng, -max_value, max_value), value_den));
    rays.push_back({std::move(breaks), std::move(values)});
  }
  return StepFunction<S>(k, std::move(rays));
}

/// Non-negative radially decreasing step function with exactly `pieces`
/// pieces and distinct positive values.
template <Scalar S>
StepFunction<S> random_radial(Rng& rng, int k, std::size_t pieces, long den = 64, long max_value = 40) {
  auto breaks = random_breaks<S>(rng, pieces - 1, den);
  std::set<long> vals;
  while (vals.size() < breaks.size() - 1) vals.insert(uniform_int(rng, 1, max_value));
  std::vector<S> values;
  for (auto it = vals.rbegin(); it != vals.rend(); ++it) values.push_back(S(*it));
  return StepFunction<S>::radial(k, std::move(breaks), std::move(values));
}

/// A random ball with endpoints on the grid 1/den.
template <Scalar S>
Ball<S> random_ball(Rng& rng, int k, long den = 32) {
  const int ray = static_cast<int>(uniform_int(rng, 0, k - 1));
  if (uniform_int(rng, 0, 2) == 0) {
    long b = uniform_int(rng, 1, den);
    long t = uniform_int(rng, 0, b);
    return Ball<S>(StarBall<S>{ray, ratio<S>(b, den), ratio<S>(t, den)});
  }
  long a = uniform_int(rng, 0, den - 1);
  long b = uniform_int(rng, a + 1, den);
  return Ball<S>(IntervalBall<S>{ray, ratio<S>(a, den), ratio<S>(b, den)});
}

template <Scalar S>
std::vector<Ball<S>> random_family(Rng& rng, int k, std::size_t max_balls, long den = 32) {
  std::vector<Ball<S>> out;
  auto n = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<long>(max_balls)));
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_ball<S>(rng, k, den));
  return out;
}

/// Probabilities in multiples of 1/den with every atom positive.
template <Scalar S>
FiniteProbSpace<S> random_space(Rng& rng, std::size_t atoms, long den = 10) {
  std::set<long> picked;
  while (picked.size() + 1 < atoms) picked.insert(uniform_int(rng, 1, den - 1));
  long prev = 0;
  std::vector<S> probs;
  for (long c : picked) {
    probs.push_back(ratio<S>(c - prev, den));
    prev = c;
  }
  probs.push_back(ratio<S>(den - prev, den));
  return FiniteProbSpace<S>(std::move(probs));
}

template <Scalar S>
Rv<S> random_values(Rng& rng, std::size_t atoms, long lo = -9, long hi = 9) {
  Rv<S> out;
  for (std::size_t i = 0; i < atoms; ++i) out.push_back(S(uniform_int(rng, lo, hi)));
  return out;
}

/// A random refining chain of the given length over `atoms` atoms.
inline PartitionChain random_chain(Rng& rng, std::size_t atoms, std::size_t length) {
  std::vector<Partition> levels;
  std::vector<int> labels(atoms, 0);
  levels.push_back(Partition::from_labels(labels));
  int next = 1;
  for (std::size_t l = 1; l < length; ++l) {
    // Split some blocks by moving atoms to fresh labels within their block.
    std::vector<int> fresh(next, -1);
    for (std::size_t a = 0; a < atoms; ++a) {
      if (uniform_int(rng, 0, 2) != 0) continue;
      int& f = fresh[labels[a]];
      if (f < 0) f = next++;
      labels[a] = f;
    }
    levels.push_back(Partition::from_labels([&] {
      std::vector<int> dense(labels.size());
      std::vector<int> remap(next, -1);
      int c = 0;
      for (std::size_t a = 0; a < labels.size(); ++a) {
        if (remap[labels[a]] < 0) remap[labels[a]] = c++;
        dense[a] = remap[labels[a]];
      }
      return dense;
    }()));
  }
  return PartitionChain(std::move(levels));
}

}  // namespace spider::gen
