#pragma once

// The uncentered Hardy-Littlewood maximal operator on the spider, applied
// to step functions.
//
// For a fixed point x the average of |f| over a ball is, on every cell
// where the ball's free endpoints stay inside constant pieces of f, a ratio
// of affine functions of those endpoints. Such ratios attain their maximum
// over a polygon at a vertex, so the supremum over all balls containing x
// is a maximum over finitely many candidate balls whose endpoints lie on
// breakpoints of f, on |x|, or on the diagonal t == b of a star. Every
// routine below enumerates those candidates.

#include "spider/domain.hpp"
#include "spider/mobius.hpp"
#include "spider/scalar.hpp"
#include "spider/step_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace spider::maxop {

namespace detail {

/// Sorted union of `base` and `extra`.
template <Scalar S>
std::vector<S> with_point(std::vector<S> base, const S& extra) {
  auto it = std::lower_bound(base.begin(), base.end(), extra);
  if (it == base.end() || *it != extra) base.insert(it, extra);
  return base;
}

template <Scalar S>
std::vector<S> merged(const std::vector<S>& x, const std::vector<S>& y) {
  std::vector<S> out;
  std::merge(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Prefix integrals of |f| on every ray.
template <Scalar S>
class Primitive {
 public:
  explicit Primitive(const StepFunction<S>& f) : f_(f.abs()) {
    for (int j = 0; j < f_.k(); ++j) {
      const auto& r = f_.ray(j);
      std::vector<S> acc{S(0)};
      for (std::size_t i = 0; i < r.size(); ++i) acc.push_back(S(acc.back() + r.values[i] * r.length(i)));
      prefix_.push_back(std::move(acc));
    }
  }

  const StepFunction<S>& abs_f() const { return f_; }

  /// Integral of |f_j| over [0, y).
  S operator()(int j, const S& y) const {
    std::size_t i = f_.piece_index(j, y);
    const auto& r = f_.ray(j);
    return S(prefix_[j][i] + r.values[i] * (y - r.breaks[i]));
  }

  S total(const S& y) const {
    S acc(0);
    for (int j = 0; j < f_.k(); ++j) acc += (*this)(j, y);
    return acc;
  }

 private:
  StepFunction<S> f_;
  std::vector<std::vector<S>> prefix_;
};

}  // namespace detail

/// M|f| at a single point, by direct enumeration of candidate balls.
/// O(B^2) in the total number of breakpoints B.
template <Scalar S>
S eval_at(const StepFunction<S>& f, const SpiderPoint<S>& x) {
  const int k = f.k();
  if (x.ray < 0 || x.ray >= k) throw std::invalid_argument("eval_at: ray out of range");
  if (x.pos < 0 || x.pos > 1) throw std::invalid_argument("eval_at: position outside [0,1]");
  const detail::Primitive<S> F(f);
  const S& p = x.pos;
  const int j = x.ray;
  S best(0);
  bool have = false;
  auto offer = [&](const S& v) {
    if (!have || v > best) best = v;
    have = true;
  };

  // Balls on ray j that stay away from the hub.
  auto ends = detail::with_point(f.ray(j).breaks, p);
  for (const auto& a : ends) {
    if (a > p) break;
    for (const auto& b : ends) {
      if (b < p || !(a < b)) continue;
      offer(S((F(j, b) - F(j, a)) / (b - a)));
    }
  }

  // Stars around the hub. Home-ray extent b, extent t elsewhere.
  const auto all = detail::with_point(f.all_breaks(), p);
  for (int h = 0; h < k; ++h) {
    std::vector<S> others{S(0)};
    for (int i = 0; i < k; ++i)
      if (i != h) others = detail::merged(others, f.ray(i).breaks);
    others = detail::with_point(others, p);
    auto bs = detail::with_point(f.ray(h).breaks, p);
    auto contains = [&](const S& b, const S& t) { return h == j ? b >= p : t >= p; };
    auto star = [&](const S& b, const S& t) {
      return S((F(h, b) + (F.total(t) - F(h, t))) / (b + S(k - 1) * t));
    };
    for (const auto& b : bs) {
      if (!(b > 0)) continue;
      for (const auto& t : others) {
        if (t > b) break;
        if (contains(b, t)) offer(star(b, t));
      }
    }
    for (const auto& d : all)
      if (d > 0 && contains(d, d)) offer(star(d, d));
  }
  return best;
}

/// Candidate data for every ray and every elementary interval of the
/// common refinement of all rays' breakpoints. Holds O(k B) values and
/// O(k B) precomputed constants; Mobius candidates are generated on demand.
template <Scalar S>
class CandidateTable {
 public:
  explicit CandidateTable(const StepFunction<S>& f) : k_(f.k()), grid_(f.all_breaks()) {
    const auto g = f.abs();
    const std::size_t n = grid_.size();
    on_ray_.assign(k_, std::vector<char>(n, 0));
    on_other_.assign(k_, std::vector<char>(n, 0));
    cum_.assign(k_, std::vector<S>(n, S(0)));
    val_.assign(k_, std::vector<S>(n - 1, S(0)));
    total_.assign(n, S(0));
    total_val_.assign(n - 1, S(0));
    for (int j = 0; j < k_; ++j) {
      const auto& r = g.ray(j);
      std::size_t piece = 0;
      for (std::size_t u = 0; u < n; ++u) {
        if (std::binary_search(r.breaks.begin(), r.breaks.end(), grid_[u])) on_ray_[j][u] = 1;
        if (u + 1 < n) {
          while (r.breaks[piece + 1] <= grid_[u]) ++piece;
          val_[j][u] = r.values[piece];
          total_val_[u] += r.values[piece];
        }
        if (u > 0) cum_[j][u] = S(cum_[j][u - 1] + val_[j][u - 1] * (grid_[u] - grid_[u - 1]));
        total_[u] += cum_[j][u];
      }
    }
    for (int h = 0; h < k_; ++h)
      for (int i = 0; i < k_; ++i)
        if (i != h)
          for (std::size_t u = 0; u < n; ++u) on_other_[h][u] |= on_ray_[i][u];
    for (int h = 0; h < k_; ++h) on_other_[h][0] = 1;  // t = 0 is always a vertex
    build_constants();
  }

  int k() const { return k_; }
  const std::vector<S>& grid() const { return grid_; }
  std::size_t cells() const { return grid_.size() - 1; }

  /// |f| on cell e of ray j.
  const S& value(int j, std::size_t e) const { return val_[j][e]; }

  /// Best average among candidate balls that do not move with x and contain
  /// the whole cell e of ray j.
  const S& fixed_best(int j, std::size_t e) const { return fixed_[j][e]; }

  /// Calls fn(Mobius) for every candidate ball with an endpoint pinned at x,
  /// for x ranging over cell e of ray j.
  template <class Fn>
  void for_each_moving(int j, std::size_t e, Fn&& fn) const {
    const S& l = grid_[e];
    const S& v = val_[j][e];
    const S one(1), zero(0);
    const S km1(k_ - 1);
    const S base_j = S(cum_[j][e] - v * l);  // F_j(x) = base_j + v x on the cell
    const S vt = total_val_[e];
    const S base_t = S(total_[e] - vt * l);

    fn(Mobius<S>::constant(v));  // shrinking balls around x
    // [a, x] and [x, b] on ray j.
    for (std::size_t u = 0; u < e; ++u)
      if (on_ray_[j][u]) fn(Mobius<S>{S(base_j - cum_[j][u]), v, S(-grid_[u]), one});
    for (std::size_t u = e + 2; u < grid_.size(); ++u)
      if (on_ray_[j][u]) fn(Mobius<S>{S(cum_[j][u] - base_j), S(-v), grid_[u], S(-one)});
    // Star with home ray j and b = x.
    for (std::size_t w = 0; w <= e; ++w) {
      if (!on_other_[j][w]) continue;
      if (e == 0 && w == 0) continue;  // same as the shrinking ball
      S rest = S(total_[w] - cum_[j][w]);
      fn(Mobius<S>{S(base_j + rest), v, S(km1 * grid_[w]), one});
    }
    // Star with b = t = x.
    if (e == 0) fn(Mobius<S>::constant(S(vt / S(k_))));
    else fn(Mobius<S>{base_t, vt, zero, S(k_)});
    // Star with t = x and b at a breakpoint of its home ray h.
    for (int h = 0; h < k_; ++h) {
      if (h == j) continue;
      const S w = S(vt - val_[h][e]);
      const S base_rest = S(total_[e] - cum_[h][e] - w * l);
      for (std::size_t u = e + 1; u < grid_.size(); ++u)
        if (on_ray_[h][u]) fn(Mobius<S>{S(cum_[h][u] + base_rest), w, grid_[u], km1});
    }
  }

 private:
  // Star average with home h, extent b = grid_[u] on h and t = grid_[w].
  S star(int h, std::size_t u, std::size_t w) const {
    return S((cum_[h][u] + total_[w] - cum_[h][w]) / (grid_[u] + S(k_ - 1) * grid_[w]));
  }

  void build_constants() {
    const std::size_t n = grid_.size();
    const std::size_t cells = n - 1;
    const S lowest(0);
    fixed_.assign(k_, std::vector<S>(cells, lowest));

    // Stars with b = t.
    std::vector<S> diag(n, lowest);
    for (std::size_t u = 1; u < n; ++u) diag[u] = S(total_[u] / (S(k_) * grid_[u]));

    // Best star per home ray with fixed b (contains x on the home ray when
    // b >= x) and best star with fixed t (contains x elsewhere when t >= x).
    std::vector<std::vector<S>> by_b(k_, std::vector<S>(n, lowest));
    std::vector<std::vector<S>> by_t(k_, std::vector<S>(n, lowest));
    for (int h = 0; h < k_; ++h) {
      for (std::size_t u = 1; u < n; ++u) {
        if (!on_ray_[h][u]) continue;
        for (std::size_t w = 0; w <= u; ++w) {
          if (!on_other_[h][w]) continue;
          S g = star(h, u, w);
          if (g > by_b[h][u]) by_b[h][u] = g;
          if (w > 0 && g > by_t[h][w]) by_t[h][w] = g;
        }
      }
    }
    // Suffix maxima.
    auto suffix = [&](std::vector<S> v) {
      for (std::size_t u = v.size() - 1; u-- > 0;)
        if (v[u + 1] > v[u]) v[u] = v[u + 1];
      return v;
    };
    const auto diag_suf = suffix(diag);
    std::vector<std::vector<S>> b_suf(k_), t_suf(k_);
    for (int h = 0; h < k_; ++h) {
      b_suf[h] = suffix(by_b[h]);
      t_suf[h] = suffix(by_t[h]);
    }

    for (int j = 0; j < k_; ++j) {
      // Intervals [a, b] on ray j with a <= left end and b >= right end of
      // the cell.
      std::vector<S> column(n, lowest);
      for (std::size_t e = 0; e < cells; ++e) {
        if (on_ray_[j][e])
          for (std::size_t u = e + 1; u < n; ++u)
            if (on_ray_[j][u]) {
              S avg = S((cum_[j][u] - cum_[j][e]) / (grid_[u] - grid_[e]));
              if (avg > column[u]) column[u] = avg;
            }
        S best = lowest;
        for (std::size_t u = e + 1; u < n; ++u)
          if (column[u] > best) best = column[u];
        best = std::max<S>(best, diag_suf[e + 1]);
        best = std::max<S>(best, b_suf[j][e + 1]);
        for (int h = 0; h < k_; ++h)
          if (h != j) best = std::max<S>(best, t_suf[h][e + 1]);
        fixed_[j][e] = best;
      }
    }
  }

  int k_;
  std::vector<S> grid_;
  std::vector<std::vector<char>> on_ray_;    // grid point is a breakpoint of ray j
  std::vector<std::vector<char>> on_other_;  // ... of some other ray (or is 0)
  std::vector<std::vector<S>> cum_;          // F_j at grid points
  std::vector<std::vector<S>> val_;          // |f_j| on cells
  std::vector<S> total_;                     // sum_j F_j at grid points
  std::vector<S> total_val_;                 // sum_j |f_j| on cells
  std::vector<std::vector<S>> fixed_;
};

/// Per-ray spans of {M|f| > s} (or >= s when strict is false), exact in
/// the rational backend.
template <Scalar S>
Traces<S> superlevel(const CandidateTable<S>& table, const S& s, bool strict = true) {
  if (s < 0) throw std::invalid_argument("superlevel: level must be non-negative");
  auto above = [&](const S& v) { return strict ? v > s : v >= s; };
  const auto& grid = table.grid();
  Traces<S> out(table.k());
  for (int j = 0; j < table.k(); ++j) {
    std::vector<Span<S>> spans;
    for (std::size_t e = 0; e < table.cells(); ++e) {
      const S& l = grid[e];
      const S& r = grid[e + 1];
      if (above(table.fixed_best(j, e))) {
        spans.push_back({l, r});
        continue;
      }
      S pre = l, suf = r;
      table.for_each_moving(j, e, [&](const Mobius<S>& g) {
        if (pre == r) return;
        S p_end, s_begin;
        piece_superlevel(MobiusPiece<S>{l, r, g}, s, strict, &p_end, &s_begin);
        if (p_end > pre) pre = p_end;
        if (s_begin < suf) suf = s_begin;
      });
      if (pre >= suf) {
        spans.push_back({l, r});
      } else {
        if (l < pre) spans.push_back({l, pre});
        if (suf < r) spans.push_back({suf, r});
      }
    }
    out[j] = canonical_union(std::move(spans));
  }
  return out;
}

template <Scalar S>
Traces<S> superlevel(const StepFunction<S>& f, const S& s, bool strict = true) {
  return superlevel(CandidateTable<S>(f), s, strict);
}

/// lambda_k(M|f| > s).
template <Scalar S>
S level_measure(const CandidateTable<S>& table, const S& s, bool strict = true) {
  return measure(superlevel(table, s, strict), table.k());
}

/// Integral of |f| over {M|f| > s}.
template <Scalar S>
S restricted_integral(const CandidateTable<S>& table, const StepFunction<S>& f, const S& s, bool strict = true) {
  auto level = superlevel(table, s, strict);
  S total(0);
  for (int j = 0; j < f.k(); ++j) {
    const auto& r = f.ray(j);
    for (const auto& sp : level[j]) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        S lo = std::max<S>(sp.lo, r.breaks[i]);
        S hi = std::min<S>(sp.hi, r.breaks[i + 1]);
        if (lo < hi) total += abs_of(r.values[i]) * (hi - lo);
      }
    }
  }
  return S(total / S(f.k()));
}

/// Extent rho with {M f > s} = {|x| < rho} (or {M f >= s}) for a radially
/// decreasing non-negative f. With H(y) = F(y) - s y and tau the end of
/// {f > s}, the best ball at |x| = b >= tau is the star with other-ray
/// extent tau, so M f(b) >= s iff H(b) + (k - 1) H(tau) >= 0.
template <Scalar S>
S radial_extent(const StepFunction<S>& f, const S& s, bool strict = true) {
  if (!f.is_radially_decreasing()) throw std::invalid_argument("radial_extent: f must be radially decreasing");
  if (s < 0) throw std::invalid_argument("radial_extent: level must be non-negative");
  const auto& r = f.ray(0);
  if (r.values.back() < 0) throw std::invalid_argument("radial_extent: f must be non-negative");
  const int k = f.k();
  std::size_t i = 0;
  S H(0);
  while (i < r.size() && r.values[i] > s) {
    H += (r.values[i] - s) * r.length(i);
    ++i;
  }
  const S tau = r.breaks[i];
  const S threshold = S(-S(k - 1) * H);
  if (strict && !(tau > 0)) return S(0);
  auto ok = [&](const S& h) { return strict ? h > threshold : h >= threshold; };
  for (; i < r.size(); ++i) {
    S next = S(H + (r.values[i] - s) * r.length(i));
    if (ok(next)) {
      H = next;
      continue;
    }
    if (!ok(H)) return r.breaks[i];
    return S(r.breaks[i] + (H - threshold) / (s - r.values[i]));
  }
  return S(1);
}

/// Mobius pieces of the upper envelope of `cands` on [lo, hi].
inline std::vector<MobiusPiece<double>> envelope(const std::vector<Mobius<double>>& cands, double lo, double hi) {
  std::vector<MobiusPiece<double>> out;
  if (cands.empty()) throw std::invalid_argument("envelope: no candidates");
  const double width = hi - lo;
  auto pick = [&](double x) {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& g : cands) top = std::max(top, g(x));
    double tol = 1e-13 * std::max(1.0, std::fabs(top));
    std::size_t best = 0;
    double best_slope = -std::numeric_limits<double>::infinity();
    double best_den = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (cands[i](x) < top - tol) continue;
      double slope = cands[i].derivative(x);
      double den = cands[i].denominator(x);
      if (slope > best_slope || (slope == best_slope && den > best_den)) {
        best = i;
        best_slope = slope;
        best_den = den;
      }
    }
    return best;
  };

  double x = lo;
  std::size_t cur = pick(lo);
  const Mobius<double>* last = nullptr;
  for (int guard = 0; guard < 100000; ++guard) {
    const auto& g = cands[cur];
    double next = hi;
    // Earliest point after x where another candidate rises above g:
    // roots of N_c D_g - N_g D_c = A t^2 + B t + C with a sign change upward.
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (i == cur) continue;
      const auto& c = cands[i];
      double A = c.b * g.d - g.b * c.d;
      double B = c.a * g.d + c.b * g.c - g.a * c.d - g.b * c.c;
      double C = c.a * g.c - g.a * c.c;
      double roots[2];
      int nr = 0;
      double scale = std::max({std::fabs(A), std::fabs(B), std::fabs(C)});
      if (scale == 0) continue;
      if (std::fabs(A) <= 1e-15 * scale) {
        if (B != 0) roots[nr++] = -C / B;
      } else {
        double disc = B * B - 4 * A * C;
        if (disc < 0) continue;
        double sq = std::sqrt(disc);
        double q = -0.5 * (B + std::copysign(sq, B));
        if (q != 0) roots[nr++] = q / A;
        if (q != 0) roots[nr++] = C / q;
        else roots[nr++] = 0.0;
      }
      for (int t = 0; t < nr; ++t) {
        double root = roots[t];
        if (!(root > x + 1e-12 * width) || !(root < next)) continue;
        double dd = 2 * A * root + B;
        // D must become positive: c overtakes g.
        double probe = std::min(root + 1e-9 * width, 0.5 * (root + next));
        double after = (c.a + c.b * probe) * (g.c + g.d * probe) - (g.a + g.b * probe) * (c.c + c.d * probe);
        if (dd > 0 || after > 0) {
          if (c(probe) > g(probe)) next = root;
        }
      }
    }
    if (!out.empty() && out.back().hi == x && &cands[cur] == last)
      out.back().hi = next;
    else
      out.push_back({x, next, g});
    last = &cands[cur];
    if (next >= hi) break;
    x = next;
    cur = pick(x);
  }
  out.back().hi = hi;
  return out;
}

/// M|f| on the whole spider as a continuous piecewise-Mobius function
/// (double backend). On each cell of the common refinement the maximal
/// function is the upper envelope of the fixed candidates and of the
/// candidates with an endpoint pinned at x; competing pieces are separated
/// at roots of quadratics.
inline PiecewiseMobius<double> compute(const StepFunction<double>& f) {
  const CandidateTable<double> table(f);
  const auto& grid = table.grid();
  std::vector<std::vector<MobiusPiece<double>>> rays(f.k());
  std::vector<Mobius<double>> cands;
  for (int j = 0; j < f.k(); ++j) {
    auto& out = rays[j];
    for (std::size_t e = 0; e < table.cells(); ++e) {
      const double l = grid[e], r = grid[e + 1];
      cands.clear();
      cands.push_back(Mobius<double>::constant(table.fixed_best(j, e)));
      double floor = table.fixed_best(j, e);
      table.for_each_moving(j, e, [&](const Mobius<double>& g) {
        double gl = g(l), gr = g(r);
        floor = std::max(floor, std::min(gl, gr));
        if (std::max(gl, gr) >= floor * (1 - 1e-12)) cands.push_back(g);
      });
      std::erase_if(cands, [&](const Mobius<double>& g) { return std::max(g(l), g(r)) < floor * (1 - 1e-12); });
      for (auto& piece : envelope(cands, l, r)) {
        if (piece.g.is_constant()) piece.g = Mobius<double>::constant(piece.g(0.5 * (piece.lo + piece.hi)));
        if (!out.empty()) {
          const auto& prev = out.back().g;
          const auto& cur = piece.g;
          if (prev.a == cur.a && prev.b == cur.b && prev.c == cur.c && prev.d == cur.d) {
            out.back().hi = piece.hi;
            continue;
          }
        }
        out.push_back(piece);
      }
    }
  }
  return PiecewiseMobius<double>(f.k(), std::move(rays));
}

inline PiecewiseMobius<double> compute(const StepFunction<Rational>& f) { return compute(to_double(f)); }

/// ||M f||_p / ||f||_p.
template <Scalar S>
double operator_ratio(const StepFunction<S>& f, double p) {
  if (!(p > 1)) throw std::invalid_argument("operator_ratio: p must exceed 1");
  const auto fd = to_double(f);
  double denom = lp_norm(fd, p);
  if (!(denom > 0)) throw std::invalid_argument("operator_ratio: f vanishes almost everywhere");
  return lp_norm(compute(fd), p) / denom;
}

}  // namespace spider::maxop
