#pragma once

// Finite atomic probability spaces, random variables and sigma-algebras
// represented as partitions of the atom set.

#include "spider/scalar.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace spider {

template <Scalar S>
class FiniteProbSpace {
 public:
  explicit FiniteProbSpace(std::vector<S> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("FiniteProbSpace: no atoms");
    S total(0);
    for (const auto& p : probs_) {
      if (!(p > 0)) throw std::invalid_argument("FiniteProbSpace: atom probabilities must be positive");
      total += p;
    }
    if constexpr (scalar_traits<S>::exact) {
      if (total != 1) throw std::invalid_argument("FiniteProbSpace: probabilities must sum to 1");
    } else {
      if (std::fabs(total - 1.0) > 1e-12) throw std::invalid_argument("FiniteProbSpace: probabilities must sum to 1");
    }
  }

  static FiniteProbSpace uniform(std::size_t n) { return FiniteProbSpace(std::vector<S>(n, ratio<S>(1, static_cast<long>(n)))); }

  std::size_t size() const { return probs_.size(); }
  const S& prob(std::size_t i) const { return probs_[i]; }
  const std::vector<S>& probs() const { return probs_; }

 private:
  std::vector<S> probs_;
};

/// A random variable: one value per atom.
template <Scalar S>
using Rv = std::vector<S>;

/// A partition of {0..n-1} into non-empty disjoint blocks. Stored in
/// canonical form: blocks sorted internally and ordered by least element.
class Partition {
 public:
  Partition() = default;

  Partition(std::size_t atoms, std::vector<std::vector<int>> blocks) : block_of_(atoms, -1) {
    for (auto& b : blocks) {
      if (b.empty()) throw std::invalid_argument("Partition: empty block");
      std::sort(b.begin(), b.end());
    }
    std::sort(blocks.begin(), blocks.end());
    for (std::size_t i = 0; i < blocks.size(); ++i)
      for (int a : blocks[i]) {
        if (a < 0 || static_cast<std::size_t>(a) >= atoms) throw std::invalid_argument("Partition: atom out of range");
        if (block_of_[a] != -1) throw std::invalid_argument("Partition: blocks overlap");
        block_of_[a] = static_cast<int>(i);
      }
    for (int b : block_of_)
      if (b < 0) throw std::invalid_argument("Partition: blocks do not cover every atom");
    blocks_ = std::move(blocks);
  }

  /// Builds from a block label per atom (restricted growth strings work).
  static Partition from_labels(const std::vector<int>& labels) {
    int nb = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<std::vector<int>> blocks(nb);
    for (std::size_t a = 0; a < labels.size(); ++a) blocks.at(labels[a]).push_back(static_cast<int>(a));
    std::erase_if(blocks, [](const auto& b) { return b.empty(); });
    return Partition(labels.size(), std::move(blocks));
  }

  static Partition trivial(std::size_t atoms) {
    std::vector<int> all(atoms);
    std::iota(all.begin(), all.end(), 0);
    return Partition(atoms, {all});
  }

  static Partition discrete(std::size_t atoms) { return from_labels([&] {
    std::vector<int> l(atoms);
    std::iota(l.begin(), l.end(), 0);
    return l;
  }()); }

  std::size_t atoms() const { return block_of_.size(); }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  int block_of(std::size_t atom) const { return block_of_[atom]; }

  /// Every block of *this lies inside a block of coarser.
  bool refines(const Partition& coarser) const {
    if (coarser.atoms() != atoms()) return false;
    for (const auto& b : blocks_)
      for (int a : b)
        if (coarser.block_of(a) != coarser.block_of(b.front())) return false;
    return true;
  }

  friend bool operator==(const Partition& x, const Partition& y) { return x.blocks_ == y.blocks_; }
  friend auto operator<=>(const Partition& x, const Partition& y) { return x.blocks_ <=> y.blocks_; }

 private:
  std::vector<std::vector<int>> blocks_;
  std::vector<int> block_of_;
};

/// A filtration: partitions each refining the previous one.
class PartitionChain {
 public:
  explicit PartitionChain(std::vector<Partition> levels) : levels_(std::move(levels)) {
    if (levels_.empty()) throw std::invalid_argument("PartitionChain: empty chain");
    for (std::size_t i = 1; i < levels_.size(); ++i)
      if (!levels_[i].refines(levels_[i - 1])) throw std::invalid_argument("PartitionChain: partitions must refine");
  }

  std::size_t size() const { return levels_.size(); }
  std::size_t atoms() const { return levels_.front().atoms(); }
  const Partition& operator[](std::size_t i) const { return levels_[i]; }
  const std::vector<Partition>& levels() const { return levels_; }

  PartitionChain with_full() const {
    auto l = levels_;
    auto full = Partition::discrete(atoms());
    if (l.back() != full) l.push_back(full);
    return PartitionChain(std::move(l));
  }

  friend bool operator==(const PartitionChain&, const PartitionChain&) = default;
  friend auto operator<=>(const PartitionChain& x, const PartitionChain& y) { return x.levels_ <=> y.levels_; }

 private:
  std::vector<Partition> levels_;
};

/// k filtrations on the same atoms with no relation imposed between them.
class FiltrationUnion {
 public:
  explicit FiltrationUnion(std::vector<PartitionChain> chains) : chains_(std::move(chains)) {
    if (chains_.empty()) throw std::invalid_argument("FiltrationUnion: need at least one chain");
    for (const auto& c : chains_)
      if (c.atoms() != chains_.front().atoms()) throw std::invalid_argument("FiltrationUnion: chains on different atom sets");
  }

  int k() const { return static_cast<int>(chains_.size()); }
  std::size_t atoms() const { return chains_.front().atoms(); }
  const PartitionChain& chain(int j) const { return chains_.at(j); }
  const std::vector<PartitionChain>& chains() const { return chains_; }

  FiltrationUnion with_full() const {
    std::vector<PartitionChain> c;
    for (const auto& ch : chains_) c.push_back(ch.with_full());
    return FiltrationUnion(std::move(c));
  }

 private:
  std::vector<PartitionChain> chains_;
};

}  // namespace spider
