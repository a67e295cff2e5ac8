#pragma once

// JSON encodings of step functions, Mobius pieces, balls, probability
// instances and reports.

#include "spider/covering.hpp"
#include "spider/domain.hpp"
#include "spider/filtration.hpp"
#include "spider/mobius.hpp"
#include "spider/probability.hpp"
#include "spider/scalar.hpp"
#include "spider/step_function.hpp"
#include "spider/verifier.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace spider::io {

using json = nlohmann::json;

template <Scalar S>
json scalar_to_json(const S& x) {
  if constexpr (scalar_traits<S>::exact) return format_scalar(x);
  else return x;
}

/// Accepts numbers and "p/q" or decimal strings in both backends. Numbers
/// go through their shortest textual form, so 0.1 reads as 1/10 exactly.
template <Scalar S>
S scalar_from_json(const json& j) {
  if (j.is_string()) return parse_scalar<S>(j.get<std::string>());
  if (j.is_number_integer()) return S(j.get<long>());
  if (j.is_number()) {
    if constexpr (scalar_traits<S>::exact) return parse_scalar<S>(j.dump());
    else return j.get<double>();
  }
  throw std::invalid_argument("expected a number or a \"p/q\" string, got " + j.dump());
}

template <Scalar S>
std::vector<S> scalars_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected an array of numbers");
  std::vector<S> out;
  for (const auto& v : j) out.push_back(scalar_from_json<S>(v));
  return out;
}

template <Scalar S>
json to_json(const StepFunction<S>& f) {
  json rays = json::array();
  for (const auto& r : f.rays()) {
    json br = json::array(), vals = json::array();
    for (const auto& b : r.breaks) br.push_back(scalar_to_json(b));
    for (const auto& v : r.values) vals.push_back(scalar_to_json(v));
    rays.push_back(json::array({br, vals}));
  }
  return {{"k", f.k()}, {"rays", rays}};
}

template <Scalar S>
StepFunction<S> step_from_json(const json& j) {
  const int k = j.at("k").get<int>();
  std::vector<RayPieces<S>> rays;
  for (const auto& r : j.at("rays")) {
    if (!r.is_array() || r.size() != 2) throw std::invalid_argument("each ray must be [breakpoints, values]");
    rays.push_back({scalars_from_json<S>(r[0]), scalars_from_json<S>(r[1])});
  }
  return StepFunction<S>(k, std::move(rays));
}

template <Scalar S>
json to_json(const PiecewiseMobius<S>& g) {
  json rays = json::array();
  for (int j = 0; j < g.k(); ++j) {
    json pieces = json::array();
    for (const auto& p : g.ray(j))
      pieces.push_back({{"lo", scalar_to_json(p.lo)},
                        {"hi", scalar_to_json(p.hi)},
                        {"num", json::array({scalar_to_json(p.g.a), scalar_to_json(p.g.b)})},
                        {"den", json::array({scalar_to_json(p.g.c), scalar_to_json(p.g.d)})}});
    rays.push_back(pieces);
  }
  return {{"k", g.k()}, {"rays", rays}};
}

template <Scalar S>
json to_json(const Ball<S>& b) {
  if (b.is_star())
    return {{"type", "star"}, {"ray", b.star().ray}, {"b", scalar_to_json(b.star().b)}, {"t", scalar_to_json(b.star().t)}};
  return {{"type", "interval"}, {"ray", b.interval().ray}, {"a", scalar_to_json(b.interval().a)},
          {"b", scalar_to_json(b.interval().b)}};
}

template <Scalar S>
Ball<S> ball_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  const int ray = j.at("ray").get<int>();
  if (type == "star") return Ball<S>(StarBall<S>{ray, scalar_from_json<S>(j.at("b")), scalar_from_json<S>(j.at("t"))});
  if (type == "interval")
    return Ball<S>(IntervalBall<S>{ray, scalar_from_json<S>(j.at("a")), scalar_from_json<S>(j.at("b"))});
  throw std::invalid_argument("unknown ball type '" + type + "'");
}

template <Scalar S>
struct BallFamily {
  int k = 1;
  std::vector<Ball<S>> balls;
};

template <Scalar S>
json to_json(const BallFamily<S>& fam) {
  json arr = json::array();
  for (const auto& b : fam.balls) arr.push_back(to_json(b));
  return {{"k", fam.k}, {"balls", arr}};
}

template <Scalar S>
BallFamily<S> balls_from_json(const json& j) {
  BallFamily<S> fam;
  fam.k = j.at("k").get<int>();
  for (const auto& b : j.at("balls")) fam.balls.push_back(ball_from_json<S>(b));
  return fam;
}

/// A finite space, a random variable on it and (optionally) a union of
/// filtrations. Blocks list atom indices from 0.
template <Scalar S>
struct Instance {
  FiniteProbSpace<S> space;
  Rv<S> values;
  std::vector<PartitionChain> chains;
};

inline json to_json(const Partition& p) { return p.blocks(); }

inline json to_json(const PartitionChain& c) {
  json out = json::array();
  for (const auto& p : c.levels()) out.push_back(to_json(p));
  return out;
}

template <Scalar S>
json to_json(const Instance<S>& inst) {
  json probs = json::array(), vals = json::array(), chains = json::array();
  for (const auto& p : inst.space.probs()) probs.push_back(scalar_to_json(p));
  for (const auto& v : inst.values) vals.push_back(scalar_to_json(v));
  for (const auto& c : inst.chains) chains.push_back(to_json(c));
  return {{"probs", probs}, {"values", vals}, {"chains", chains}};
}

template <Scalar S>
Instance<S> instance_from_json(const json& j) {
  FiniteProbSpace<S> space(scalars_from_json<S>(j.at("probs")));
  auto values = scalars_from_json<S>(j.at("values"));
  if (values.size() != space.size()) throw std::invalid_argument("instance: values and probs differ in length");
  std::vector<PartitionChain> chains;
  if (j.contains("chains")) {
    for (const auto& c : j.at("chains")) {
      std::vector<Partition> levels;
      for (const auto& p : c) levels.emplace_back(space.size(), p.get<std::vector<std::vector<int>>>());
      chains.emplace_back(std::move(levels));
    }
  }
  return {std::move(space), std::move(values), std::move(chains)};
}

inline json to_json(const verify::InequalityReport& r) {
  json out = {{"name", r.name}, {"ok", r.ok}, {"applicable", r.applicable}, {"lhs", r.lhs}, {"rhs", r.rhs},
              {"slack", r.slack}, {"backend", r.backend}, {"tolerance", r.tolerance}};
  if (!r.instance.empty()) out["instance"] = r.instance;
  if (!r.lhs_exact.empty()) out["lhs_exact"] = r.lhs_exact;
  if (!r.rhs_exact.empty()) out["rhs_exact"] = r.rhs_exact;
  if (r.identity) out["identity"] = true;
  return out;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return json::parse(in);
}

}  // namespace spider::io
