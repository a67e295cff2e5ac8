// Acceptance suite: one PASS/FAIL line per criterion, then a summary.
// Exit status is non-zero when a criterion fails that is not listed in
// known_gaps (see README).

#include "spider/spider.hpp"
#include "spider/random.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace spider;
using Q = Rational;

namespace {

const std::set<int> known_gaps{8};

struct Result {
  bool pass = true;
  std::string detail;
};

struct Row {
  int id;
  std::string name;
  double budget_s;
  Result res;
  double seconds;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Calls fn(i) for i in [0, n) on all cores.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) fn(i);
    });
  for (auto& th : pool) th.join();
}

gen::Rng seeded(std::uint64_t criterion, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(criterion), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return gen::Rng(seq);
}

Result constants_values() {
  Result r;
  const double expect[] = {2.0, 1 + std::sqrt(2.0), 1 + std::sqrt(3.0)};
  double worst_value = 0, worst_residual = 0;
  for (int k = 1; k <= 3; ++k) worst_value = std::max(worst_value, std::fabs(constants::solve_cpk(2, k).value - expect[k - 1]));
  for (double p : {1.1, 1.5, 2.0, 3.0, 10.0})
    for (int k = 1; k <= 6; ++k) {
      double c = constants::solve_cpk(p, k).value;
      worst_residual = std::max(worst_residual, std::fabs(constants::cpk_equation(c, p, k)));
    }
  r.pass = worst_value <= 1e-12 && worst_residual <= 1e-12;
  r.detail = fmt("max |C - closed form| = %.2e, max residual = %.2e (tol 1e-12)", worst_value, worst_residual);
  return r;
}

Result limit_claim() {
  Result r;
  auto rep = constants::convergence_report(2.0, 3, {0.40, 0.45, 0.49, 0.499});
  double boundary = std::fabs(constants::solve_lambda(0.5, 3).value - rep.cpk);
  r.pass = rep.gaps_decreasing && boundary <= 1e-10;
  std::ostringstream os;
  os << "gaps";
  for (const auto& row : rep.rows) os << fmt(" %.3g:%.4e", row.r, row.gap);
  os << (rep.gaps_decreasing ? " decreasing" : " NOT decreasing") << fmt(", |lambda_{0.5,3} - C| = %.2e", boundary);
  r.detail = os.str();
  return r;
}

Result upper_bound() {
  Result r;
  const std::vector<double> ps{1.5, 2.0, 3.0};
  const std::size_t per = 1000;
  std::vector<double> worst(5 * ps.size() * per, 0);
  parallel_for(worst.size(), [&](std::size_t i) {
    const int k = static_cast<int>(i / (ps.size() * per)) + 1;
    const double p = ps[(i / per) % ps.size()];
    auto rng = seeded(3, i);
    StepFunction<Q> f = gen::random_step<Q>(rng, k, 6);
    while (integrate(f.abs()) == 0) f = gen::random_step<Q>(rng, k, 6);
    worst[i] = maxop::operator_ratio(f, p) - constants::solve_cpk(p, k).value;
  });
  double m = *std::max_element(worst.begin(), worst.end());
  r.pass = m <= 1e-9;
  r.detail = fmt("%zu functions, max(ratio - C_{p,k}) = %.4f (tol 1e-9)", worst.size(), m);
  return r;
}

Result lower_bound() {
  Result r;
  auto rows = verify::sharpness_sweep(2.0, 3, {0.40, 0.45, 0.49});
  bool mono = true;
  for (std::size_t i = 1; i < rows.size(); ++i) mono = mono && rows[i].ratio > rows[i - 1].ratio;
  const double target = 0.95 * rows.back().cpk;
  r.pass = mono && rows.back().ratio >= target;
  std::ostringstream os;
  os << "ratios";
  for (const auto& row : rows) os << fmt(" r=%.2f:%.5f", row.r, row.ratio);
  os << fmt(", target 0.95*C = %.5f, %s", target, mono ? "monotone" : "NOT monotone");
  r.detail = os.str();
  return r;
}

Result lemma_identity() {
  Result r;
  std::atomic<std::size_t> bad{0}, checked{0};
  parallel_for(200, [&](std::size_t i) {
    auto rng = seeded(5, i);
    const int k = static_cast<int>(gen::uniform_int(rng, 1, 5));
    auto f = gen::random_radial<Q>(rng, k, static_cast<std::size_t>(gen::uniform_int(rng, 2, 8)));
    // Hypotheses hold for s between min Mf = Mf(end of a ray) and max f.
    const Q low = maxop::eval_at(f, {0, Q(1)});
    const Q width = f.max_value() - low;
    int levels = 0;
    for (int attempt = 0; levels < 10 && attempt < 1000; ++attempt) {
      auto rep = verify::lemma_aux_check(f, Q(low + width * ratio<Q>(gen::uniform_int(rng, 1, 1023), 1024)));
      if (!rep.applicable) continue;
      ++levels;
      ++checked;
      if (!rep.ok || rep.slack != 0) ++bad;
    }
  });
  r.pass = bad == 0 && checked == 2000;
  r.detail = fmt("%zu exact identities, %zu with non-zero slack", checked.load(), bad.load());
  return r;
}

Result weak_type() {
  Result r;
  std::atomic<std::size_t> bad{0};
  parallel_for(1000, [&](std::size_t i) {
    auto rng = seeded(6, i);
    const int k = static_cast<int>(gen::uniform_int(rng, 1, 5));
    auto f = gen::random_step<Q>(rng, k, 6);
    auto rep = verify::weak_type_check(f, ratio<Q>(gen::uniform_int(rng, 1, 10 * 16), 16));
    if (!rep.ok) ++bad;
  });
  r.pass = bad == 0;
  r.detail = fmt("1000 exact checks, %zu violations", bad.load());
  return r;
}

// Criterion 7 instances: every union of k <= 3 chains of length <= 2 on
// n <= 4 atoms, each paired with 50 draws of (probabilities in tenths,
// integer values).
struct Shape {
  std::size_t n;
  FiltrationUnion g;
};

std::vector<Shape> tail_shapes() {
  std::vector<Shape> out;
  for (std::size_t n = 1; n <= 4; ++n)
    for (int k = 1; k <= 3; ++k) lab::for_each_union(n, k, 2, [&](FiltrationUnion g) { out.push_back({n, std::move(g)}); });
  return out;
}

std::vector<std::vector<std::pair<FiniteProbSpace<Q>, Rv<Q>>>> tail_pools() {
  std::vector<std::vector<std::pair<FiniteProbSpace<Q>, Rv<Q>>>> pools(5);
  for (std::size_t n = 1; n <= 4; ++n) {
    auto rng = seeded(7, n);
    for (int d = 0; d < 50; ++d) {
      auto space = gen::random_space<Q>(rng, n, 10);
      Rv<Q> xi = gen::random_values<Q>(rng, n);
      while (std::all_of(xi.begin(), xi.end(), [](const Q& v) { return v == 0; })) xi = gen::random_values<Q>(rng, n);
      pools[n].emplace_back(std::move(space), std::move(xi));
    }
  }
  return pools;
}

Result tail_inequality(const std::vector<Shape>& shapes, const std::vector<std::vector<std::pair<FiniteProbSpace<Q>, Rv<Q>>>>& pools) {
  Result r;
  std::atomic<std::size_t> bad{0}, checked{0};
  parallel_for(shapes.size(), [&](std::size_t i) {
    for (const auto& [space, xi] : pools[shapes[i].n]) {
      if (!lab::verify_tail(space, xi, shapes[i].g).ok) ++bad;
      ++checked;
    }
  });
  r.pass = bad == 0;
  r.detail = fmt("%zu union shapes, %zu exact instances, %zu failures", shapes.size(), checked.load(), bad.load());
  return r;
}

Result doob_bound(const std::vector<Shape>& shapes, const std::vector<std::vector<std::pair<FiniteProbSpace<Q>, Rv<Q>>>>& pools) {
  Result r;
  const double p = 2.0;
  double cpk[4];
  for (int k = 1; k <= 3; ++k) cpk[k] = constants::solve_cpk(p, k).value;
  std::mutex mu;
  double worst_excess = -INFINITY;
  std::atomic<std::size_t> bad{0};
  parallel_for(shapes.size(), [&](std::size_t i) {
    double local = -INFINITY;
    for (const auto& [space, xi] : pools[shapes[i].n]) {
      double excess = lab::doob_ratio(space, xi, shapes[i].g, p) - cpk[shapes[i].g.k()];
      local = std::max(local, excess);
      if (excess > 1e-9) ++bad;
    }
    std::lock_guard lock(mu);
    worst_excess = std::max(worst_excess, local);
  });

  // Extremal construction for r = 0.49, k = 3, N = 40, over a range of eps
  // (each eps fixes delta); the best ratio is reported.
  const double c3 = cpk[3];
  double best = 0, best_delta = 0, best_eps = 0;
  std::size_t extremal_bad = 0;
  for (double eps : {0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0, 1.5}) {
    const double delta = verify::delta_for_epsilon(0.49, 3, eps);
    auto m = verify::build_extremal(0.49, 3, delta, 40, std::pow(delta, 41));
    double ratio = lab::doob_ratio(m.space, m.xi, m.union_, p);
    if (ratio > c3 + 1e-9) ++extremal_bad;
    if (ratio > best) {
      best = ratio;
      best_delta = delta;
      best_eps = eps;
    }
  }
  const bool bound_ok = bad == 0 && extremal_bad == 0;
  const bool sharp_ok = best >= 0.95 * c3;
  r.pass = bound_ok && sharp_ok;
  r.detail = fmt("upper bound %s (max ratio - C = %.4f); extremal N=40 best ratio %.5f at eps=%.2f delta=%.5f, "
                 "target 0.95*C = %.5f %s",
                 bound_ok ? "holds" : "VIOLATED", worst_excess, best, best_eps, best_delta, 0.95 * c3,
                 sharp_ok ? "met" : "not met");
  return r;
}

Result covering() {
  Result r;
  std::atomic<std::size_t> bad{0}, removals{0};
  parallel_for(1000, [&](std::size_t i) {
    auto rng = seeded(9, i);
    const int k = static_cast<int>(gen::uniform_int(rng, 2, 4));
    auto fam = cover::containment_filter(gen::random_family<Q>(rng, k, 30), k);
    auto res = cover::select(fam, k);
    bool ok = union_traces(res.selected, k) == union_traces(fam, k) &&
              cover::multiplicity_audit(res.selected, k).max <= static_cast<std::size_t>(k) &&
              cover::parity_disjoint(fam, res);
    if (!ok) ++bad;
    removals += res.removed.size();
  });
  r.pass = bad == 0;
  r.detail = fmt("1000 families, %zu failures, %zu hub balls removed", bad.load(), removals.load());
  return r;
}

template <class Fn>
Row run(int id, std::string name, double budget_s, Fn fn) {
  auto t0 = std::chrono::steady_clock::now();
  Result res = fn();
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (s > budget_s) {
    res.pass = false;
    res.detail += fmt(" [over time budget %.0f s]", budget_s);
  }
  Row row{id, std::move(name), budget_s, std::move(res), s};
  std::printf("%s criterion %d (%s): %s (%.2f s)\n", row.res.pass ? "PASS" : "FAIL", row.id, row.name.c_str(),
              row.res.detail.c_str(), row.seconds);
  std::fflush(stdout);
  return row;
}

}  // namespace

int main() {
  std::vector<Row> rows;
  rows.push_back(run(1, "constants", 1, constants_values));
  rows.push_back(run(2, "limit of lambda_{r,k}", 1, limit_claim));
  rows.push_back(run(3, "maximal operator upper bound", 120, upper_bound));
  rows.push_back(run(4, "maximal operator lower bound", 60, lower_bound));
  rows.push_back(run(5, "auxiliary identity", 60, lemma_identity));
  rows.push_back(run(6, "weak type", 120, weak_type));
  const auto shapes = tail_shapes();
  const auto pools = tail_pools();
  rows.push_back(run(7, "tail inequality", 300, [&] { return tail_inequality(shapes, pools); }));
  rows.push_back(run(8, "Doob inequality for unions", 120, [&] { return doob_bound(shapes, pools); }));
  rows.push_back(run(9, "covering selection", 30, covering));

  std::size_t passed = 0;
  std::vector<int> unexpected, known;
  for (const auto& row : rows) {
    if (row.res.pass) ++passed;
    else (known_gaps.count(row.id) ? known : unexpected).push_back(row.id);
  }
  std::printf("SUMMARY: %zu/%zu criteria passed", passed, rows.size());
  for (int id : known) std::printf("; criterion %d FAILED (known gap)", id);
  for (int id : unexpected) std::printf("; criterion %d FAILED", id);
  std::printf("\n");
  return unexpected.empty() ? 0 : 1;
}
