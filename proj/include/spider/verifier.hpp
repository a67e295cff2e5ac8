#pragma once

// Checks of the level-set identity for radially decreasing functions, the
// weak-type inequality, the L^p polynomial bound, and the extremal
// constructions (the nested-ball filtrations and the discretized power
// functions).

#include "spider/constants.hpp"
#include "spider/filtration.hpp"
#include "spider/maximal.hpp"
#include "spider/probability.hpp"
#include "spider/scalar.hpp"
#include "spider/step_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace spider::verify {

struct InequalityReport {
  std::string name;
  std::string instance;
  double lhs = 0;
  double rhs = 0;
  double slack = 0;  // rhs - lhs; |rhs - lhs| for identities
  std::string lhs_exact;  // "p/q" in the exact backend, empty otherwise
  std::string rhs_exact;
  bool ok = true;
  bool applicable = true;
  bool identity = false;
  std::string backend;
  double tolerance = 0;
};

namespace detail {

template <Scalar S>
InequalityReport make_report(std::string name, const S& lhs, const S& rhs, bool identity, double tolerance) {
  InequalityReport rep;
  rep.name = std::move(name);
  rep.identity = identity;
  rep.backend = std::string(scalar_traits<S>::name);
  rep.tolerance = tolerance;
  rep.lhs = to_double(lhs);
  rep.rhs = to_double(rhs);
  if constexpr (scalar_traits<S>::exact) {
    rep.lhs_exact = format_scalar(lhs);
    rep.rhs_exact = format_scalar(rhs);
    S diff = S(rhs - lhs);
    rep.slack = identity ? std::fabs(to_double(diff)) : to_double(diff);
    rep.ok = identity ? diff == 0 : diff >= 0;
  } else {
    rep.slack = identity ? std::fabs(rep.rhs - rep.lhs) : rep.rhs - rep.lhs;
    rep.ok = identity ? rep.slack <= tolerance : rep.slack >= -tolerance;
  }
  return rep;
}

}  // namespace detail

/// s((k-1) lambda(f > s) + lambda(Mf > s)) against
/// (k-1) int_{f > s} f + int_{Mf > s} f for radially decreasing f >= 0.
/// Level sets of Mf come from the general candidate enumeration.
template <Scalar S>
InequalityReport lemma_aux_check(const StepFunction<S>& f, const S& s, double tolerance = 1e-9) {
  if (!f.is_radially_decreasing()) throw std::invalid_argument("lemma_aux_check: f must be radially decreasing");
  if (f.ray(0).values.back() < 0) throw std::invalid_argument("lemma_aux_check: f must be non-negative");
  const int k = f.k();
  const S km1(k - 1);
  const maxop::CandidateTable<S> table(f);
  const S m_level = maxop::level_measure(table, s);
  if (!(s < f.max_value()) || !(m_level < 1)) {
    auto rep = detail::make_report<S>("lemma_aux", S(0), S(0), true, tolerance);
    rep.applicable = false;
    return rep;
  }
  S lhs = S(s * (km1 * level_measure(f, s) + m_level));
  S rhs = S(km1 * restricted_integral(f, f, s) + maxop::restricted_integral(table, f, s));
  return detail::make_report<S>("lemma_aux", lhs, rhs, true, tolerance);
}

/// s lambda(Mf > s) + s(k-1) lambda(|f| > s) <= int_{Mf > s}|f| + (k-1) int_{|f| > s}|f|
/// for k >= 2. A single ray is an interval, where the uncentered operator
/// only satisfies s lambda(Mf > s) <= 2 int_{Mf > s}|f|; that form is used
/// for k = 1.
template <Scalar S>
InequalityReport weak_type_check(const StepFunction<S>& f, const S& s, double tolerance = 1e-9) {
  if (!(s > 0)) throw std::invalid_argument("weak_type_check: s must be positive");
  const maxop::CandidateTable<S> table(f);
  if (f.k() == 1) {
    S lhs = S(s * maxop::level_measure(table, s));
    S rhs = S(S(2) * maxop::restricted_integral(table, f, s));
    auto rep = detail::make_report<S>("weak_type", lhs, rhs, false, tolerance);
    rep.instance = "k=1 interval form";
    return rep;
  }
  const S km1(f.k() - 1);
  const auto g = f.abs();
  S lhs = S(s * maxop::level_measure(table, s) + s * km1 * level_measure(g, s));
  S rhs = S(maxop::restricted_integral(table, f, s) + km1 * restricted_integral(g, g, s));
  return detail::make_report<S>("weak_type", lhs, rhs, false, tolerance);
}

/// Evaluates (p-1)R^p - pR^(p-1) - (k-1) at R = ||Mf||_p / ||f||_p; a
/// non-positive value places R below C_{p,k}. Reported as lhs = value,
/// rhs = 0.
template <Scalar S>
InequalityReport lp_chain_check(const StepFunction<S>& f, double p, double tolerance = 1e-9) {
  const double ratio = maxop::operator_ratio(f, p);
  const double value = constants::cpk_equation(ratio, p, f.k());
  auto rep = detail::make_report<double>("lp_chain", value, 0.0, false, tolerance);
  rep.instance = "ratio=" + format_double(ratio);
  return rep;
}

/// For radially decreasing f >= 0 and A = {Mf > s}: every union E of atoms
/// (pieces of f, cut at the boundary of A) with lambda(E) >= lambda(A)
/// carries at least as much of (s - f)_+ as A does. lhs is the integral
/// over A, rhs the smallest integral over the admissible E.
template <Scalar S>
InequalityReport reversed_monotonicity_check(const StepFunction<S>& f, const S& s, std::size_t max_atoms = 16,
                                             double tolerance = 1e-12) {
  if (!f.is_radially_decreasing()) throw std::invalid_argument("reversed_monotonicity_check: f must be radially decreasing");
  const int k = f.k();
  const S rho = maxop::radial_extent(f, s);
  struct Atom {
    S mass;
    S weight;  // integral of (s - f)_+ over the atom
    bool in_a;
  };
  std::vector<Atom> atoms;
  const auto& r = f.ray(0);
  for (int j = 0; j < k; ++j)
    for (std::size_t i = 0; i < r.size(); ++i) {
      S gap = s > r.values[i] ? S(s - r.values[i]) : S(0);
      auto push = [&](const S& lo, const S& hi, bool in_a) {
        if (lo < hi) atoms.push_back({S((hi - lo) / S(k)), S(gap * (hi - lo) / S(k)), in_a});
      };
      push(r.breaks[i], std::min<S>(r.breaks[i + 1], rho), true);
      push(std::max<S>(r.breaks[i], rho), r.breaks[i + 1], false);
    }
  if (atoms.size() > max_atoms) throw std::invalid_argument("reversed_monotonicity_check: too many atoms to enumerate");

  S mass_a(0), on_a(0);
  for (const auto& a : atoms)
    if (a.in_a) {
      mass_a += a.mass;
      on_a += a.weight;
    }
  bool found = false;
  S best(0);
  for (unsigned long mask = 0; mask < (1UL << atoms.size()); ++mask) {
    S mass(0), w(0);
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (mask >> i & 1UL) {
        mass += atoms[i].mass;
        w += atoms[i].weight;
      }
    if (mass < mass_a) continue;
    if (!found || w < best) best = w;
    found = true;
  }
  auto rep = detail::make_report<S>("reversed_monotonicity", on_a, best, false, tolerance);
  rep.instance = "atoms=" + std::to_string(atoms.size());
  return rep;
}

// ---------------------------------------------------------------------------
// Extremal constructions for the power function |x|^-r.

/// Average of |x|^-r over the ball covering [0,1] on its home ray and
/// [0, rho) on every other ray.
inline double power_ball_average(double r, int k, double rho) {
  return (1 + (k - 1) * std::pow(rho, 1 - r)) / ((1 - r) * (1 + (k - 1) * rho));
}

/// Extent rho = lambda_{r,k}^(-1/r) of the extremal ball on the other rays.
inline double extremal_extent(double r, int k) { return std::pow(constants::solve_lambda(r, k).value, -1 / r); }

/// Smallest delta in (0,1) such that the scaled extremal ball average at
/// scale |x| dominates (lambda_{r,k} - eps) |y|^-r for every y on the home
/// ray with delta < |y|/|x| <= 1. Found by bisection on delta.
inline double delta_for_epsilon(double r, int k, double eps) {
  if (!(r > 0 && r < 1)) throw std::invalid_argument("delta_for_epsilon: r must lie in (0,1)");
  const double lambda = constants::solve_lambda(r, k).value;
  if (!(eps > 0 && eps < lambda)) throw std::invalid_argument("delta_for_epsilon: eps must lie in (0, lambda_{r,k})");
  const double avg = power_ball_average(r, k, extremal_extent(r, k));
  // The worst y sits at |y| = delta |x|; ok(delta) is monotone in delta.
  auto ok = [&](double d) { return avg >= (lambda - eps) * std::pow(d, -r); };
  double lo = 0, hi = 1;
  for (int it = 0; it < 200 && hi - lo > 0; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

struct ExtremalAtom {
  int ray = -1;  // -1 for the lumped core
  double lo = 0;
  double hi = 0;
};

struct ExtremalModel {
  FiniteProbSpace<double> space;
  Rv<double> xi;
  FiltrationUnion union_;
  std::vector<ExtremalAtom> atoms;
  double r = 0, lambda = 0, rho = 0, delta = 0;
  int k = 1, n = 1;
  double eta = 0;        // radius of the lumped core actually used
  double core_mass = 0;  // lambda_k of the core
  double core_value = 0;  // xi on the core
};

namespace detail {

/// Average of x^-r over [a, b) via the antiderivative x^(1-r)/(1-r).
inline double power_average(double r, double a, double b) {
  return (std::pow(b, 1 - r) - std::pow(a, 1 - r)) / ((1 - r) * (b - a));
}

}  // namespace detail

/// Atomic model of (R_k, lambda_k) for xi = |x|^-r and the filtrations
/// G^j_n = sigma(B_j, delta B_j, ..., delta^(n-1) B_j), n = 1..N. Atoms are
/// the cells between consecutive trace endpoints on each ray, plus the core
/// {|x| < eta}, lumped across rays. eta is clamped to the smallest trace
/// endpoint rho delta^(N-1) so the core lies inside every ball.
inline ExtremalModel build_extremal(double r, int k, double delta, int n_levels, double eta) {
  if (!(r > 0 && r < 1)) throw std::invalid_argument("build_extremal: r must lie in (0,1)");
  if (k < 1) throw std::invalid_argument("build_extremal: k must be >= 1");
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("build_extremal: delta must lie in (0,1)");
  if (n_levels < 1) throw std::invalid_argument("build_extremal: N must be >= 1");
  if (!(eta > 0 && eta < std::pow(delta, n_levels))) throw std::invalid_argument("build_extremal: need 0 < eta < delta^N");

  const double lambda = constants::solve_lambda(r, k).value;
  const double rho = std::pow(lambda, -1 / r);
  std::vector<double> scale(n_levels);
  for (int n = 0; n < n_levels; ++n) scale[n] = std::pow(delta, n);
  const double floor_end = (k > 1 ? rho : 1.0) * scale.back();
  const double core = std::min(eta, floor_end);

  std::vector<ExtremalAtom> atoms{{-1, 0, core}};
  for (int i = 0; i < k; ++i) {
    std::vector<double> ends{core, 1};
    for (double sc : scale) {
      ends.push_back(sc);
      if (k > 1) ends.push_back(rho * sc);
    }
    std::sort(ends.begin(), ends.end());
    ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
    for (std::size_t c = 0; c + 1 < ends.size(); ++c) atoms.push_back({i, ends[c], ends[c + 1]});
  }

  std::vector<double> probs;
  Rv<double> xi;
  for (const auto& a : atoms) {
    probs.push_back(a.ray < 0 ? a.hi : (a.hi - a.lo) / k);
    xi.push_back(a.ray < 0 ? std::pow(a.hi, -r) / (1 - r) : detail::power_average(r, a.lo, a.hi));
  }
  // Absorb rounding so the masses sum to one.
  double total = 0;
  for (double p : probs) total += p;
  probs.back() += 1 - total;

  // Label of an atom in G^j_n: how many of B_j, ..., delta^(n-1) B_j contain it.
  auto inside = [&](const ExtremalAtom& a, int j, int m) {
    if (a.ray < 0) return true;
    double reach = (a.ray == j ? 1.0 : rho) * scale[m];
    return a.hi <= reach;
  };
  std::vector<PartitionChain> chains;
  for (int j = 0; j < k; ++j) {
    std::vector<Partition> levels;
    for (int n = 1; n <= n_levels; ++n) {
      std::vector<int> labels;
      for (const auto& a : atoms) {
        int c = 0;
        while (c < n && inside(a, j, c)) ++c;
        labels.push_back(c);
      }
      // Relabel to consecutive block ids.
      std::vector<int> remap(n + 1, -1);
      int next = 0;
      for (auto& l : labels) {
        if (remap[l] < 0) remap[l] = next++;
        l = remap[l];
      }
      auto p = Partition::from_labels(labels);
      if (levels.empty() || p != levels.back()) levels.push_back(std::move(p));
    }
    chains.emplace_back(std::move(levels));
  }

  ExtremalModel m{FiniteProbSpace<double>(std::move(probs)), std::move(xi), FiltrationUnion(std::move(chains)), std::move(atoms)};
  m.r = r;
  m.lambda = lambda;
  m.rho = rho;
  m.delta = delta;
  m.k = k;
  m.n = n_levels;
  m.eta = core;
  m.core_mass = core;
  m.core_value = m.xi.front();
  return m;
}

/// Smallest M_G xi / xi over the atoms of each home ray lying outside
/// delta^N B_j.
inline double extremal_min_gain(const ExtremalModel& m) {
  auto mg = lab::doob_maximal(m.space, m.xi, m.union_);
  const double edge = std::pow(m.delta, m.n);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < m.atoms.size(); ++a) {
    const auto& at = m.atoms[a];
    if (at.ray < 0 || at.lo < edge) continue;
    worst = std::min(worst, mg[a] / m.xi[a]);
  }
  return worst;
}

/// Radial step function approximating |x|^-r: geometric breakpoints
/// lowest = g_0 < g_1 < ... < g_{n-1} = 1 with cell averages computed from
/// the antiderivative, and the average over [0, lowest) on the first cell.
inline StepFunction<double> discretized_power(double r, int k, std::size_t points, double lowest) {
  if (!(r > 0 && r < 1)) throw std::invalid_argument("discretized_power: r must lie in (0,1)");
  if (points < 2) throw std::invalid_argument("discretized_power: need at least two grid points");
  if (!(lowest > 0 && lowest < 1)) throw std::invalid_argument("discretized_power: lowest must lie in (0,1)");
  std::vector<double> breaks{0};
  const double step = std::log(lowest) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) breaks.push_back(i + 1 == points ? 1.0 : std::exp(step * static_cast<double>(points - 1 - i)));
  std::vector<double> values{std::pow(lowest, -r) / (1 - r)};
  for (std::size_t i = 1; i + 1 < breaks.size(); ++i) values.push_back(detail::power_average(r, breaks[i], breaks[i + 1]));
  return StepFunction<double>::radial(k, std::move(breaks), std::move(values));
}

struct SweepRow {
  double r;
  double lambda;
  double ratio;
  double cpk;
  double gap;  // cpk - ratio
};

inline constexpr std::size_t default_sweep_points = 2000;
inline constexpr double default_sweep_lowest = 1e-150;

inline std::vector<SweepRow> sharpness_sweep(double p, int k, const std::vector<double>& r_list,
                                             std::size_t points = default_sweep_points,
                                             double lowest = default_sweep_lowest) {
  if (!(p > 1)) throw std::invalid_argument("sharpness_sweep: p must exceed 1");
  const double cpk = constants::solve_cpk(p, k).value;
  std::vector<SweepRow> rows;
  for (double r : r_list) {
    if (!(r > 0 && r < 1 / p)) throw std::invalid_argument("sharpness_sweep: every r must lie in (0, 1/p)");
    const double ratio = maxop::operator_ratio(discretized_power(r, k, points, lowest), p);
    rows.push_back({r, constants::solve_lambda(r, k).value, ratio, cpk, cpk - ratio});
  }
  return rows;
}

}  // namespace spider::verify
