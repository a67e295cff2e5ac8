#include "spider/random.hpp"
#include "spider/rearrangement.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace spider;
using Q = Rational;

namespace {

Q q(long n, long d) { return ratio<Q>(n, d); }

Q tail_prob(const FiniteProbSpace<Q>& space, const Rv<Q>& xi, const Q& s) {
  Q acc(0);
  for (std::size_t a = 0; a < xi.size(); ++a)
    if (abs(xi[a]) > s) acc += space.prob(a);
  return acc;
}

}  // namespace

TEST(DistributionFunction, TwoAtomExample) {
  FiniteProbSpace<Q> space({q(1, 4), q(3, 4)});
  Rv<Q> xi{Q(2), Q(-1)};
  auto d = rearr::distribution_function(space, xi);
  EXPECT_EQ(d(Q(0)), Q(1));
  EXPECT_EQ(d(Q(1)), q(1, 4));
  EXPECT_EQ(d(q(3, 2)), q(1, 4));
  EXPECT_EQ(d(Q(2)), Q(0));
}

TEST(Rearrange, TwoAtomExampleK2) {
  FiniteProbSpace<Q> space({q(1, 4), q(3, 4)});
  auto star = rearr::rearrange(space, {Q(2), Q(-1)}, 2);
  for (int j = 0; j < 2; ++j) {
    EXPECT_EQ(star.ray(j).breaks, (std::vector<Q>{0, q(1, 4), 1}));
    EXPECT_EQ(star.ray(j).values, (std::vector<Q>{2, 1}));
  }
}

TEST(Rearrange, ConstantVariable) {
  auto star = rearr::rearrange(FiniteProbSpace<Q>::uniform(3), {Q(-5), Q(5), Q(5)}, 4);
  for (int j = 0; j < 4; ++j) EXPECT_EQ(star.ray(j).values, (std::vector<Q>{5}));
}

TEST(Rearrange, RejectsBadInput) {
  auto space = FiniteProbSpace<Q>::uniform(2);
  EXPECT_THROW(rearr::rearrange(space, {Q(1)}, 2), std::invalid_argument);
  EXPECT_THROW(rearr::rearrange(space, {Q(1), Q(2)}, 0), std::invalid_argument);
}

TEST(Rearrange, EquimeasurableAndRadiallyDecreasing) {
  gen::Rng rng(21);
  for (int it = 0; it < 300; ++it) {
    auto n = static_cast<std::size_t>(gen::uniform_int(rng, 1, 6));
    int k = static_cast<int>(gen::uniform_int(rng, 1, 5));
    auto space = gen::random_space<Q>(rng, n, 12);
    auto xi = gen::random_values<Q>(rng, n);
    auto star = rearr::rearrange(space, xi, k);
    EXPECT_TRUE(star.is_radially_decreasing());
    for (long s = -1; s <= 10; ++s)
      for (Q level : {Q(s), q(2 * s + 1, 2)}) {
        if (level < 0) continue;
        EXPECT_EQ(level_measure(star, level), tail_prob(space, xi, level));
      }
  }
}

TEST(Rearrange, PreservesPowerIntegrals) {
  gen::Rng rng(22);
  for (int it = 0; it < 100; ++it) {
    auto n = static_cast<std::size_t>(gen::uniform_int(rng, 1, 6));
    int k = static_cast<int>(gen::uniform_int(rng, 1, 4));
    auto space = gen::random_space<Q>(rng, n, 12);
    auto xi = gen::random_values<Q>(rng, n);
    auto star = rearr::rearrange(space, xi, k);
    for (unsigned p : {1u, 2u, 3u}) {
      Q expect(0);
      for (std::size_t a = 0; a < n; ++a) {
        Q term = space.prob(a);
        for (unsigned e = 0; e < p; ++e) term *= abs(xi[a]);
        expect += term;
      }
      EXPECT_EQ(power_integral_exact(star, p), expect);
    }
  }
}

TEST(RearrangeStep, ExampleAndIdempotence) {
  // k = 2: value 3 on [0, 1/2) of ray 0, 1 elsewhere. Mass of 3 is 1/4.
  StepFunction<Q> f(2, {{{0, q(1, 2), 1}, {Q(3), Q(1)}}, {{0, 1}, {Q(1)}}});
  auto r = rearr::rearrange_step(f);
  EXPECT_EQ(r.ray(1).breaks, (std::vector<Q>{0, q(1, 4), 1}));
  EXPECT_EQ(r.ray(1).values, (std::vector<Q>{3, 1}));
  auto rr = rearr::rearrange_step(r);
  EXPECT_TRUE(rr == r);
}

TEST(RearrangeStep, EquimeasurableWithSource) {
  gen::Rng rng(23);
  for (int it = 0; it < 200; ++it) {
    int k = static_cast<int>(gen::uniform_int(rng, 1, 4));
    auto f = gen::random_step<Q>(rng, k, 5);
    auto r = rearr::rearrange_step(f);
    EXPECT_TRUE(r.is_radially_decreasing());
    for (long s = 0; s <= 9; ++s) EXPECT_EQ(level_measure(r, Q(s)), level_measure(f.abs(), Q(s)));
    EXPECT_EQ(integrate(r), integrate(f.abs()));
  }
}
