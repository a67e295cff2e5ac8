#pragma once

// Conditional expectations on finite spaces, the maximal function of a
// union of filtrations, and the tail comparison with the maximal operator
// on the spider.

#include "spider/maximal.hpp"
#include "spider/probability.hpp"
#include "spider/rearrangement.hpp"
#include "spider/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace spider::lab {

/// E(xi | sigma(partition)): the probability-weighted block averages.
template <Scalar S>
Rv<S> cond_expectation(const FiniteProbSpace<S>& space, const Rv<S>& xi, const Partition& partition) {
  if (xi.size() != space.size() || partition.atoms() != space.size())
    throw std::invalid_argument("cond_expectation: partition does not match the space");
  Rv<S> out(xi.size());
  for (const auto& block : partition.blocks()) {
    S mass(0), acc(0);
    for (int a : block) {
      mass += space.prob(a);
      acc += space.prob(a) * xi[a];
    }
    S avg = S(acc / mass);
    for (int a : block) out[a] = avg;
  }
  return out;
}

/// Atomwise max over all (i, j) of |E(xi | G_i^j)|. With adjoin_full the
/// discrete partition ends every chain, so the result dominates |xi|.
template <Scalar S>
Rv<S> doob_maximal(const FiniteProbSpace<S>& space, const Rv<S>& xi, const FiltrationUnion& g, bool adjoin_full = false) {
  if (g.atoms() != space.size()) throw std::invalid_argument("doob_maximal: union does not match the space");
  Rv<S> out(xi.size(), S(0));
  auto absorb = [&](const Partition& p) {
    auto e = cond_expectation(space, xi, p);
    for (std::size_t a = 0; a < e.size(); ++a) out[a] = std::max<S>(out[a], abs_of(e[a]));
  };
  for (const auto& chain : g.chains())
    for (const auto& p : chain.levels()) absorb(p);
  if (adjoin_full) absorb(Partition::discrete(space.size()));
  return out;
}

/// Integral over A = {max_i |E(xi|G_i)| > s} of (s - |xi|); Doob's weak-type
/// bound for a single filtration makes this non-positive.
template <Scalar S>
S chain_weak_type(const FiniteProbSpace<S>& space, const Rv<S>& xi, const PartitionChain& chain, const S& s) {
  auto m = doob_maximal(space, xi, FiltrationUnion({chain}));
  S acc(0);
  for (std::size_t a = 0; a < xi.size(); ++a)
    if (m[a] > s) acc += space.prob(a) * (s - abs_of(xi[a]));
  return acc;
}

template <Scalar S>
struct TailReport {
  bool ok = true;
  S worst_level = S(0);  // level with the smallest slack
  S slack = S(0);        // min over checked levels of rhs - lhs
  std::size_t levels = 0;
};

/// Checks P(M_G xi > s) <= lambda_k(M xi* > s) for all s. The left side is
/// a right-continuous step function of s jumping only at values a of
/// M_G xi, and the right side is continuous and non-increasing, so it is
/// enough to compare P(M_G xi >= a) with lambda_k(M xi* >= a) at those a.
template <Scalar S>
TailReport<S> verify_tail(const FiniteProbSpace<S>& space, const Rv<S>& xi, const FiltrationUnion& g,
                          S tolerance = S(0)) {
  const int k = g.k();
  const auto star = rearr::rearrange(space, xi, k);
  const auto m = doob_maximal(space, xi, g);

  std::vector<std::size_t> order(m.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return m[x] > m[y]; });

  TailReport<S> rep;
  S lhs(0);
  bool first = true;
  for (std::size_t idx = 0; idx < order.size();) {
    const S a = m[order[idx]];
    while (idx < order.size() && m[order[idx]] == a) lhs += space.prob(order[idx++]);
    S rhs = maxop::radial_extent(star, a, /*strict=*/false);
    S slack = S(rhs - lhs);
    if (first || slack < rep.slack) {
      rep.slack = slack;
      rep.worst_level = a;
      first = false;
    }
    if (slack < -tolerance) rep.ok = false;
    ++rep.levels;
  }
  return rep;
}

/// ||M_G xi||_p / ||xi||_p under the atomic measure.
template <Scalar S>
double doob_ratio(const FiniteProbSpace<S>& space, const Rv<S>& xi, const FiltrationUnion& g, double p,
                  bool adjoin_full = false) {
  if (!(p > 1)) throw std::invalid_argument("doob_ratio: p must exceed 1");
  auto m = doob_maximal(space, xi, g, adjoin_full);
  double num = 0, den = 0;
  for (std::size_t a = 0; a < xi.size(); ++a) {
    double w = to_double(space.prob(a));
    num += w * std::pow(std::fabs(to_double(m[a])), p);
    den += w * std::pow(std::fabs(to_double(xi[a])), p);
  }
  if (!(den > 0)) throw std::invalid_argument("doob_ratio: xi vanishes almost surely");
  return std::pow(num / den, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Enumeration of small instances.

constexpr std::size_t max_enumeration_atoms = 6;

/// Every partition of n atoms (Bell(n) of them), via restricted growth strings.
inline std::vector<Partition> all_partitions(std::size_t n) {
  if (n > max_enumeration_atoms) throw std::invalid_argument("all_partitions: too many atoms");
  std::vector<Partition> out;
  if (n == 0) return out;
  std::vector<int> rgs(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int maxlabel) {
    if (pos == n) {
      out.push_back(Partition::from_labels(rgs));
      return;
    }
    for (int l = 0; l <= maxlabel + 1; ++l) {
      rgs[pos] = l;
      rec(pos + 1, std::max(maxlabel, l));
    }
  };
  rgs[0] = 0;
  rec(1, 0);
  return out;
}

/// Every chain of 1..max_len partitions, each strictly finer than the last.
inline std::vector<PartitionChain> all_chains(std::size_t n, std::size_t max_len) {
  auto parts = all_partitions(n);
  std::vector<PartitionChain> out;
  std::vector<Partition> cur;
  std::function<void()> rec = [&]() {
    out.emplace_back(cur);
    if (cur.size() == max_len) return;
    for (const auto& p : parts) {
      if (p == cur.back() || !p.refines(cur.back())) continue;
      cur.push_back(p);
      rec();
      cur.pop_back();
    }
  };
  for (const auto& p : parts) {
    cur = {p};
    rec();
  }
  return out;
}

/// Visits every union of k chains (as a multiset, i.e. up to reordering of
/// the chains) over n atoms with chains of length <= max_len.
template <class Fn>
void for_each_union(std::size_t n, int k, std::size_t max_len, Fn&& fn) {
  if (n > max_enumeration_atoms) throw std::invalid_argument("for_each_union: at most 6 atoms are supported");
  if (k < 1 || max_len < 1) throw std::invalid_argument("for_each_union: need k >= 1 and max_len >= 1");
  const auto chains = all_chains(n, max_len);
  std::vector<std::size_t> idx(k, 0);
  while (true) {
    std::vector<PartitionChain> pick;
    for (auto i : idx) pick.push_back(chains[i]);
    fn(FiltrationUnion(std::move(pick)));
    int pos = k - 1;
    while (pos >= 0 && idx[pos] + 1 == chains.size()) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int q = pos + 1; q < k; ++q) idx[q] = idx[pos];
  }
}

inline std::vector<FiltrationUnion> enumerate_unions(std::size_t n, int k, std::size_t max_len) {
  std::vector<FiltrationUnion> out;
  for_each_union(n, k, max_len, [&](FiltrationUnion g) { out.push_back(std::move(g)); });
  return out;
}

/// Ordered compositions of `total` into n positive parts.
inline std::vector<std::vector<int>> compositions(int total, std::size_t n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int left) {
    if (cur.size() + 1 == n) {
      if (left >= 1) {
        cur.push_back(left);
        out.push_back(cur);
        cur.pop_back();
      }
      return;
    }
    for (int v = 1; v <= left - static_cast<int>(n - cur.size() - 1); ++v) {
      cur.push_back(v);
      rec(left - v);
      cur.pop_back();
    }
  };
  if (n >= 1) rec(total);
  return out;
}

}  // namespace spider::lab
