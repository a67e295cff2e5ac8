// Command-line front end: constants, maximal operator, rearrangement,
// verification suites, sharpness sweeps and covering selection.
//
// Exit codes: 0 ok, 1 verification failure, 2 usage or input error.

#include "spider/io.hpp"
#include "spider/random.hpp"
#include "spider/spider.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using spider::Rational;
using spider::io::json;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SPIDER_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("SPIDER_SEED must be a non-negative integer");
    }
  }
  return 1;
}

/// Generator for instance `index`: independent of how work is split.
spider::gen::Rng instance_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return spider::gen::Rng(seq);
}

/// Runs fn(i) for i in [0, n) on `jobs` threads; results keep index order.
template <class Fn>
auto parallel_map(std::size_t n, unsigned jobs, Fn fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(n);
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(jobs);
  for (unsigned t = 0; t < jobs; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += jobs) out[i] = fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

void print(const json& j) { std::cout << j.dump() << '\n'; }

// ---------------------------------------------------------------------------

struct ConstantsOpts {
  std::optional<double> p, r;
  int k = 1;
  double tol = 1e-12;
};

int run_constants(const ConstantsOpts& o) {
  if (o.p.has_value() == o.r.has_value()) throw UsageError("constants: give exactly one of --p or --r");
  spider::constants::SharpConstant c;
  json out;
  if (o.p) {
    c = spider::constants::solve_cpk(*o.p, o.k, o.tol);
    out = {{"kind", "C_pk"}, {"p", *o.p}};
  } else {
    c = spider::constants::solve_lambda(*o.r, o.k, o.tol);
    out = {{"kind", "lambda_rk"}, {"r", *o.r}};
  }
  out["k"] = o.k;
  out["value"] = c.value;
  out["residual"] = c.residual;
  out["bracket"] = {c.lo, c.hi};
  out["tol"] = c.tol;
  out["iterations"] = c.iterations;
  print(out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct MaxopOpts {
  std::string file;
  std::string backend = "exact";
  std::optional<int> ray;
  std::optional<std::string> pos;
  bool full = false;
  double p = 2;
};

template <spider::Scalar S>
int run_maxop_with(const MaxopOpts& o) {
  auto f = spider::io::step_from_json<S>(spider::io::read_json_file(o.file));
  if (o.full) {
    auto g = spider::maxop::compute(spider::to_double(f));
    json out = spider::io::to_json(g);
    out["operator_ratio"] = spider::lp_norm(g, o.p) / spider::lp_norm(spider::to_double(f), o.p);
    out["p"] = o.p;
    out["continuity_defect"] = g.continuity_defect();
    print(out);
    return kOk;
  }
  if (!o.ray || !o.pos) throw UsageError("maxop: give --ray and --pos, or --full");
  if (*o.ray < 0 || *o.ray >= f.k()) throw UsageError("maxop: --ray must lie in 0..k-1");
  S pos = spider::parse_scalar<S>(*o.pos);
  if (pos < 0 || pos > 1) throw UsageError("maxop: --pos must lie in [0,1]");
  S v = spider::maxop::eval_at(f, spider::SpiderPoint<S>{*o.ray, pos});
  print({{"ray", *o.ray}, {"pos", spider::io::scalar_to_json(pos)}, {"value", spider::io::scalar_to_json(v)},
         {"backend", std::string(spider::scalar_traits<S>::name)}});
  return kOk;
}

int run_maxop(const MaxopOpts& o) {
  return o.backend == "exact" ? run_maxop_with<Rational>(o) : run_maxop_with<double>(o);
}

// ---------------------------------------------------------------------------

struct RearrangeOpts {
  std::string file;
  int k = 1;
  std::string backend = "exact";
};

template <spider::Scalar S>
int run_rearrange_with(const RearrangeOpts& o) {
  auto j = spider::io::read_json_file(o.file);
  if (j.contains("rays")) {
    print(spider::io::to_json(spider::rearr::rearrange_step(spider::io::step_from_json<S>(j))));
  } else {
    auto inst = spider::io::instance_from_json<S>(j);
    print(spider::io::to_json(spider::rearr::rearrange(inst.space, inst.values, o.k)));
  }
  return kOk;
}

int run_rearrange(const RearrangeOpts& o) {
  return o.backend == "exact" ? run_rearrange_with<Rational>(o) : run_rearrange_with<double>(o);
}

// ---------------------------------------------------------------------------

struct VerifyOpts {
  std::string suite;
  std::optional<std::uint64_t> seed;
  std::size_t count = 100;
  std::string backend = "exact";
  std::size_t atoms = 4;
  std::optional<int> k;
  std::size_t max_len = 2;
  bool exhaustive = false;
  unsigned jobs = 1;
  double p = 2;
  bool verbose = false;
};

struct Outcome {
  bool ok = true;
  bool applicable = true;
  json line;
};

template <spider::Scalar S>
Outcome lemma_instance(spider::gen::Rng& rng, int k) {
  auto pieces = static_cast<std::size_t>(spider::gen::uniform_int(rng, 1, 8));
  auto f = spider::gen::random_radial<S>(rng, k, pieces);
  S s = spider::ratio<S>(spider::gen::uniform_int(rng, 1, 40 * 64 - 1), 64);
  auto rep = spider::verify::lemma_aux_check(f, s);
  return {rep.ok, rep.applicable, spider::io::to_json(rep)};
}

template <spider::Scalar S>
Outcome weaktype_instance(spider::gen::Rng& rng, int k) {
  auto f = spider::gen::random_step<S>(rng, k, 4);
  S s = spider::ratio<S>(spider::gen::uniform_int(rng, 1, 10 * 16), 16);
  auto rep = spider::verify::weak_type_check(f, s);
  return {rep.ok, true, spider::io::to_json(rep)};
}

template <spider::Scalar S>
Outcome tail_or_doob(const VerifyOpts& o, const spider::FiniteProbSpace<S>& space, const spider::Rv<S>& xi,
                     const spider::FiltrationUnion& g) {
  if (o.suite == "tail") {
    auto rep = spider::lab::verify_tail(space, xi, g, S(o.backend == "exact" ? 0 : 1e-9));
    return {rep.ok, true,
            {{"name", "tail"}, {"ok", rep.ok}, {"worst_s", spider::io::scalar_to_json(rep.worst_level)},
             {"slack", spider::io::scalar_to_json(rep.slack)}, {"levels", rep.levels}}};
  }
  bool nonzero = false;
  for (const auto& v : xi) nonzero = nonzero || v != 0;
  if (!nonzero) return {true, false, {{"name", "doob"}, {"applicable", false}}};
  double cpk = spider::constants::solve_cpk(o.p, g.k()).value;
  double ratio = spider::lab::doob_ratio(space, xi, g, o.p);
  bool ok = ratio <= cpk + 1e-9;
  return {ok, true, {{"name", "doob"}, {"ok", ok}, {"ratio", ratio}, {"C_pk", cpk}, {"p", o.p}}};
}

template <spider::Scalar S>
Outcome covering_instance(spider::gen::Rng& rng, int k) {
  auto fam = spider::cover::containment_filter(spider::gen::random_family<S>(rng, k, 30), k);
  auto res = spider::cover::select(fam, k);
  bool union_ok = spider::union_traces(res.selected, k) == spider::union_traces(fam, k);
  auto mult = spider::cover::multiplicity_audit(res.selected, k).max;
  std::size_t bound = k == 1 ? 2 : static_cast<std::size_t>(k);
  bool parity = spider::cover::parity_disjoint(fam, res);
  bool ok = union_ok && mult <= bound && parity;
  return {ok, true,
          {{"name", "covering"}, {"ok", ok}, {"balls", fam.size()}, {"selected", res.selected.size()},
           {"removed", res.removed.size()}, {"multiplicity", mult}, {"union_preserved", union_ok},
           {"parity_disjoint", parity}}};
}

template <spider::Scalar S>
std::vector<Outcome> run_suite(const VerifyOpts& o, std::uint64_t seed) {
  auto pick_k = [&](spider::gen::Rng& rng, int lo, int hi) {
    return o.k ? *o.k : static_cast<int>(spider::gen::uniform_int(rng, lo, hi));
  };
  if ((o.suite == "tail" || o.suite == "doob") && o.exhaustive) {
    // Every union shape over `atoms` atoms, each paired with a fixed pool of
    // `count` random (probabilities in tenths, integer values) draws.
    const int k = o.k.value_or(3);
    std::vector<std::pair<spider::FiniteProbSpace<S>, spider::Rv<S>>> pool;
    for (std::size_t i = 0; i < o.count; ++i) {
      auto rng = instance_rng(seed, i);
      auto space = spider::gen::random_space<S>(rng, o.atoms, 10);
      pool.emplace_back(std::move(space), spider::gen::random_values<S>(rng, o.atoms));
    }
    auto unions = spider::lab::enumerate_unions(o.atoms, k, o.max_len);
    auto per_union = parallel_map(unions.size(), o.jobs, [&](std::size_t u) {
      Outcome agg;
      std::size_t checked = 0;
      for (const auto& [space, xi] : pool) {
        auto r = tail_or_doob<S>(o, space, xi, unions[u]);
        if (!r.applicable) continue;
        ++checked;
        if (!r.ok && agg.ok) {
          agg.ok = false;
          agg.line = r.line;
        }
      }
      if (agg.ok) agg.line = {{"name", o.suite}, {"ok", true}, {"union", u}, {"checked", checked}};
      else agg.line["union"] = u;
      return agg;
    });
    return per_union;
  }
  return parallel_map(o.count, o.jobs, [&](std::size_t i) {
    auto rng = instance_rng(seed, i);
    Outcome out;
    if (o.suite == "lemma") {
      out = lemma_instance<S>(rng, pick_k(rng, 1, 5));
    } else if (o.suite == "weaktype") {
      out = weaktype_instance<S>(rng, pick_k(rng, 1, 5));
    } else if (o.suite == "covering") {
      out = covering_instance<S>(rng, pick_k(rng, 2, 4));
    } else {
      const int k = pick_k(rng, 1, 3);
      auto space = spider::gen::random_space<S>(rng, o.atoms, 10);
      auto xi = spider::gen::random_values<S>(rng, o.atoms);
      std::vector<spider::PartitionChain> chains;
      for (int j = 0; j < k; ++j)
        chains.push_back(spider::gen::random_chain(rng, o.atoms, static_cast<std::size_t>(spider::gen::uniform_int(rng, 1, static_cast<long>(o.max_len)))));
      out = tail_or_doob<S>(o, space, xi, spider::FiltrationUnion(std::move(chains)));
    }
    out.line["index"] = i;
    return out;
  });
}

int run_verify(const VerifyOpts& o) {
  const std::uint64_t seed = resolve_seed(o.seed);
  if (o.atoms < 1 || o.atoms > spider::lab::max_enumeration_atoms)
    throw UsageError("verify: --atoms must lie in 1..6");
  if (o.max_len < 1) throw UsageError("verify: --max-len must be >= 1");
  if (o.k && *o.k < 1) throw UsageError("verify: --k must be >= 1");
  if (o.exhaustive && o.suite != "tail" && o.suite != "doob")
    throw UsageError("verify: --exhaustive applies to the tail and doob suites");
  auto results = o.backend == "exact" ? run_suite<Rational>(o, seed) : run_suite<double>(o, seed);
  std::size_t failures = 0, skipped = 0;
  for (const auto& r : results) {
    if (!r.applicable) ++skipped;
    if (!r.ok) ++failures;
    if (o.verbose || !r.ok) print(r.line);
  }
  print({{"suite", o.suite}, {"seed", seed}, {"backend", o.backend}, {"instances", results.size()},
         {"not_applicable", skipped}, {"failures", failures}, {"exhaustive", o.exhaustive}, {"ok", failures == 0}});
  return failures == 0 ? kOk : kFailed;
}

// ---------------------------------------------------------------------------

struct SharpnessOpts {
  double p = 2;
  int k = 3;
  std::vector<double> r_list{0.40, 0.45, 0.49};
  std::size_t points = spider::verify::default_sweep_points;
  double lowest = spider::verify::default_sweep_lowest;
};

int run_sharpness(const SharpnessOpts& o) {
  auto rows = spider::verify::sharpness_sweep(o.p, o.k, o.r_list, o.points, o.lowest);
  std::cout << "r,lambda,ratio,C_pk,gap\n";
  for (const auto& row : rows)
    std::cout << spider::format_double(row.r) << ',' << spider::format_double(row.lambda) << ','
              << spider::format_double(row.ratio) << ',' << spider::format_double(row.cpk) << ','
              << spider::format_double(row.gap) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

struct CoveringOpts {
  std::string file;
  std::string backend = "exact";
  bool filter = false;
};

template <spider::Scalar S>
int run_covering_with(const CoveringOpts& o) {
  auto fam = spider::io::balls_from_json<S>(spider::io::read_json_file(o.file));
  auto balls = o.filter ? spider::cover::containment_filter(fam.balls, fam.k) : fam.balls;
  auto res = spider::cover::select(balls, fam.k);
  auto before = spider::cover::multiplicity_audit(balls, fam.k);
  auto after = spider::cover::multiplicity_audit(res.selected, fam.k);
  bool union_ok = spider::union_traces(res.selected, fam.k) == spider::union_traces(balls, fam.k);
  json selected = json::array(), removed = json::array();
  for (const auto& b : res.selected) selected.push_back(spider::io::to_json(b));
  for (const auto& b : res.removed) removed.push_back(spider::io::to_json(b));
  auto witness = [](const spider::cover::Multiplicity<S>& m) {
    return json{{"ray", m.witness.ray}, {"pos", spider::io::scalar_to_json(m.witness.pos)}};
  };
  print({{"k", fam.k},
         {"selected", selected},
         {"selected_index", res.selected_index},
         {"per_ray_sequences", res.per_ray_sequences},
         {"starts_at_hub", res.starts_at_hub},
         {"removed", removed},
         {"multiplicity_before", before.max},
         {"witness_before", witness(before)},
         {"multiplicity_after", after.max},
         {"witness_after", witness(after)},
         {"union_preserved", union_ok},
         {"parity_disjoint", spider::cover::parity_disjoint(balls, res)}});
  return union_ok ? kOk : kFailed;
}

int run_covering(const CoveringOpts& o) {
  return o.backend == "exact" ? run_covering_with<Rational>(o) : run_covering_with<double>(o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximal operators on the k-ray spider and Doob inequalities for unions of filtrations"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  const std::vector<std::string> backends{"exact", "float"};

  ConstantsOpts co;
  auto* c = app.add_subcommand("constants", "Solve for C_{p,k} (--p) or lambda_{r,k} (--r)");
  c->add_option("--p", co.p, "Exponent p > 1");
  c->add_option("--r", co.r, "Parameter r in (0,1)");
  c->add_option("--k", co.k, "Number of rays")->check(CLI::PositiveNumber);
  c->add_option("--tol", co.tol, "Root tolerance")->check(CLI::PositiveNumber);

  MaxopOpts mo;
  auto* m = app.add_subcommand("maxop", "Evaluate the maximal operator of a step function");
  m->add_option("--file", mo.file, "Step function JSON")->required()->check(CLI::ExistingFile);
  m->add_option("--backend", mo.backend, "exact (GMP rationals) or float")->check(CLI::IsMember(backends));
  m->add_option("--ray", mo.ray, "Ray index, 0-based");
  m->add_option("--pos", mo.pos, "Distance from the hub (decimal or p/q)");
  m->add_flag("--full", mo.full, "Emit the full piecewise-Mobius function");
  m->add_option("--p", mo.p, "Exponent for the reported operator ratio");

  RearrangeOpts ro;
  auto* r = app.add_subcommand("rearrange", "k-decreasing rearrangement of an instance or step function");
  r->add_option("--file", ro.file, "Instance or step function JSON")->required()->check(CLI::ExistingFile);
  r->add_option("--k", ro.k, "Number of rays (instances only)")->check(CLI::PositiveNumber);
  r->add_option("--backend", ro.backend, "exact (GMP rationals) or float")->check(CLI::IsMember(backends));

  VerifyOpts vo;
  auto* v = app.add_subcommand("verify", "Run a verification suite");
  v->add_option("--suite", vo.suite, "Which check to run")->required()->check(CLI::IsMember({"lemma", "weaktype", "tail", "doob", "covering"}));
  v->add_option("--seed", vo.seed, "Seed (default: $SPIDER_SEED, else 1)");
  v->add_option("--count", vo.count, "Random instances (draws per union shape with --exhaustive)");
  v->add_option("--backend", vo.backend, "exact (GMP rationals) or float")->check(CLI::IsMember(backends));
  v->add_option("--atoms", vo.atoms, "Atoms for tail/doob");
  v->add_option("--k", vo.k, "Number of rays / chains");
  v->add_option("--max-len", vo.max_len, "Longest chain for tail/doob");
  v->add_flag("--exhaustive", vo.exhaustive, "Enumerate every union shape");
  v->add_option("--jobs", vo.jobs, "Worker threads")->check(CLI::PositiveNumber);
  v->add_option("--p", vo.p, "Exponent for the doob suite");
  v->add_flag("--verbose", vo.verbose, "Emit a line for every instance");

  SharpnessOpts so;
  auto* s = app.add_subcommand("sharpness", "Operator ratios of discretized power functions (CSV)");
  s->add_option("--p", so.p, "Exponent p > 1");
  s->add_option("--k", so.k, "Number of rays")->check(CLI::PositiveNumber);
  s->add_option("--r", so.r_list, "Values of r below 1/p")->delimiter(',');
  s->add_option("--points", so.points, "Geometric grid size");
  s->add_option("--lowest", so.lowest, "Smallest grid point");

  CoveringOpts cvo;
  auto* cv = app.add_subcommand("covering", "Select a bounded-overlap subfamily of balls");
  cv->add_option("--file", cvo.file, "Ball family JSON")->required()->check(CLI::ExistingFile);
  cv->add_option("--backend", cvo.backend, "exact (GMP rationals) or float")->check(CLI::IsMember(backends));
  cv->add_flag("--filter", cvo.filter, "Drop nested balls first");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (c->parsed()) return run_constants(co);
    if (m->parsed()) return run_maxop(mo);
    if (r->parsed()) return run_rearrange(ro);
    if (v->parsed()) return run_verify(vo);
    if (s->parsed()) return run_sharpness(so);
    if (cv->parsed()) return run_covering(cvo);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
