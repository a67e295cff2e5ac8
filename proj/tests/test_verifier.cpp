#include "spider/random.hpp"
#include "spider/verifier.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace spider;
using Q = Rational;

namespace {

Q q(long n, long d) { return ratio<Q>(n, d); }

}  // namespace

TEST(AuxIdentity, BallIndicatorIdentity) {
  auto f = StepFunction<Q>::ball_indicator(3, q(1, 10));
  auto rep = verify::lemma_aux_check(f, q(1, 2));
  EXPECT_TRUE(rep.applicable);
  EXPECT_TRUE(rep.ok);
  EXPECT_EQ(rep.lhs_exact, "3/10");
  EXPECT_EQ(rep.rhs_exact, "3/10");
  EXPECT_EQ(rep.slack, 0.0);
}

TEST(AuxIdentity, NotApplicableAtOrAboveTheMaximum) {
  auto f = StepFunction<Q>::ball_indicator(3, q(1, 10));
  EXPECT_FALSE(verify::lemma_aux_check(f, Q(1)).applicable);
  EXPECT_FALSE(verify::lemma_aux_check(StepFunction<Q>::constant(2, Q(2)), Q(1)).applicable);
  StepFunction<Q> bumpy(1, {{{0, q(1, 2), 1}, {Q(1), Q(2)}}});
  EXPECT_THROW(verify::lemma_aux_check(bumpy, Q(1)), std::invalid_argument);
}

TEST(AuxIdentity, IdentityOnRandomRadialFunctions) {
  gen::Rng rng(51);
  std::size_t applicable = 0;
  for (int it = 0; it < 40; ++it) {
    int k = static_cast<int>(gen::uniform_int(rng, 1, 4));
    auto f = gen::random_radial<Q>(rng, k, 8);
    const long top = f.max_value().get_num().get_si();
    for (int l = 0; l < 20; ++l) {
      auto rep = verify::lemma_aux_check(f, q(gen::uniform_int(rng, 1, 8 * top - 1), 8));
      if (!rep.applicable) continue;
      ++applicable;
      EXPECT_TRUE(rep.ok) << rep.lhs_exact << " vs " << rep.rhs_exact;
    }
  }
  EXPECT_GT(applicable, 200u);
}

TEST(AuxIdentity, FloatBackendWithinTolerance) {
  gen::Rng rng(52);
  for (int it = 0; it < 20; ++it) {
    auto f = to_double(gen::random_radial<Q>(rng, 3, 6));
    for (double s : {0.5, 3.5, 10.5, 20.5}) {
      auto rep = verify::lemma_aux_check(f, s);
      if (rep.applicable) EXPECT_LE(rep.slack, 1e-9);
    }
  }
}

TEST(WeakType, Examples) {
  auto c = verify::weak_type_check(StepFunction<Q>::constant(3, Q(2)), Q(2));
  EXPECT_TRUE(c.ok);
  EXPECT_EQ(c.lhs, 0.0);
  EXPECT_EQ(c.rhs, 0.0);
  auto ind = verify::weak_type_check(StepFunction<Q>::ball_indicator(3, q(1, 10)), q(1, 2));
  EXPECT_TRUE(ind.ok);
  EXPECT_EQ(ind.lhs_exact, "3/10");
  EXPECT_EQ(ind.rhs_exact, "3/10");
  EXPECT_THROW(verify::weak_type_check(StepFunction<Q>::constant(1, Q(1)), Q(0)), std::invalid_argument);
}

TEST(WeakType, HoldsOnRandomStepFunctions) {
  gen::Rng rng(53);
  for (int it = 0; it < 60; ++it) {
    int k = static_cast<int>(gen::uniform_int(rng, 1, 4));
    auto f = gen::random_step<Q>(rng, k, 6);
    for (int l = 1; l <= 10; ++l) {
      auto rep = verify::weak_type_check(f, Q(q(l, 1) - q(1, 3)));
      EXPECT_TRUE(rep.ok) << rep.lhs_exact << " > " << rep.rhs_exact;
    }
  }
}

TEST(LpChain, ConstantAndNearExtremal) {
  auto c = verify::lp_chain_check(StepFunction<Q>::constant(3, Q(1)), 2.0);
  EXPECT_NEAR(c.lhs, -3.0, 1e-12);  // (p-1) - p - (k-1) at ratio 1
  EXPECT_TRUE(c.ok);
  auto f = verify::discretized_power(0.49, 3, verify::default_sweep_points, verify::default_sweep_lowest);
  auto rep = verify::lp_chain_check(f, 2.0);
  EXPECT_TRUE(rep.ok);
  EXPECT_LE(rep.lhs, 0.0);
}

TEST(ReversedMonotonicity, Examples) {
  auto f = StepFunction<Q>::ball_indicator(2, q(1, 4));
  auto rep = verify::reversed_monotonicity_check(f, q(1, 2));
  EXPECT_TRUE(rep.ok);
  gen::Rng rng(54);
  for (int it = 0; it < 60; ++it) {
    int k = static_cast<int>(gen::uniform_int(rng, 1, 3));
    auto g = gen::random_radial<Q>(rng, k, 3);
    auto r = verify::reversed_monotonicity_check(g, q(2 * gen::uniform_int(rng, 0, 40) + 1, 2));
    EXPECT_TRUE(r.ok) << r.lhs_exact << " vs " << r.rhs_exact;
  }
}

TEST(Extremal, DeltaClosedForm) {
  for (double r : {0.2, 0.45, 0.49})
    for (int k : {1, 3})
      for (double eps : {0.02, 0.1, 0.4}) {
        double lambda = constants::solve_lambda(r, k).value;
        EXPECT_NEAR(verify::delta_for_epsilon(r, k, eps), std::pow((lambda - eps) / lambda, 1 / r), 1e-12);
      }
  EXPECT_NEAR(verify::delta_for_epsilon(0.49, 3, 0.02), 0.984693, 1e-6);
  EXPECT_THROW(verify::delta_for_epsilon(0.49, 3, 5.0), std::invalid_argument);
}

TEST(Extremal, BallAverageAtTheExtentIsLambda) {
  for (double r : {0.1, 0.3, 0.49})
    for (int k : {1, 2, 3, 7}) {
      double lambda = constants::solve_lambda(r, k).value;
      EXPECT_NEAR(verify::power_ball_average(r, k, verify::extremal_extent(r, k)), lambda, 1e-10 * lambda);
    }
}

TEST(Extremal, ExtremalBallIsARailwayBall) {
  // Centre (1 - rho)/2 on the home ray, radius (1 + rho)/2.
  double rho = verify::extremal_extent(0.49, 3);
  auto b = Ball<double>::from_center({0, (1 - rho) / 2}, (1 + rho) / 2);
  ASSERT_TRUE(b.is_star());
  EXPECT_NEAR(b.star().b, 1.0, 1e-15);
  EXPECT_NEAR(b.star().t, rho, 1e-15);
}

TEST(Extremal, SingleRayOneLevelIsTheMean) {
  auto m = verify::build_extremal(0.3, 1, 0.5, 1, 1e-3);
  auto e = lab::cond_expectation(m.space, m.xi, m.union_.chain(0)[0]);
  for (double v : e) EXPECT_NEAR(v, 1 / 0.7, 1e-12);
  EXPECT_THROW(verify::build_extremal(0.3, 1, 0.5, 1, 0.6), std::invalid_argument);
}

TEST(Extremal, TraceOfEachBallOnOtherRaysHasLengthRho) {
  const int k = 3;
  auto m = verify::build_extremal(0.45, k, 0.8, 4, std::pow(0.8, 5));
  for (int j = 0; j < k; ++j) {
    const auto& first = m.union_.chain(j)[0];
    // The block holding the core is B_j at the top scale.
    int core_block = first.block_of(0);
    std::vector<double> len(k, 0.0);
    for (std::size_t a = 0; a < m.atoms.size(); ++a) {
      if (first.block_of(a) != core_block || m.atoms[a].ray < 0) continue;
      len[m.atoms[a].ray] += m.atoms[a].hi - m.atoms[a].lo;
    }
    for (int i = 0; i < k; ++i) {
      double expect = (i == j ? 1.0 : m.rho) - m.eta;
      EXPECT_NEAR(len[i], expect, 1e-12) << "j=" << j << " i=" << i;
    }
  }
}

TEST(Extremal, GainAndDoobRatio) {
  const double r = 0.49, eps = 0.02;
  const int k = 3;
  double delta = verify::delta_for_epsilon(r, k, eps);
  auto m = verify::build_extremal(r, k, delta, 40, std::pow(delta, 41));
  EXPECT_GE(verify::extremal_min_gain(m), m.lambda - eps - 1e-9);
  double ratio = lab::doob_ratio(m.space, m.xi, m.union_, 2.0);
  EXPECT_LE(ratio, constants::solve_cpk(2.0, k).value);
  EXPECT_GT(ratio, 1.0);
}

TEST(Discretization, PreservesTheIntegral) {
  for (double r : {0.2, 0.49}) {
    auto f = verify::discretized_power(r, 2, 500, 1e-100);
    EXPECT_NEAR(integrate(f), 1 / (1 - r), 1e-10);
    EXPECT_TRUE(f.is_radially_decreasing());
  }
}

TEST(Sweep, SingleRayApproachesPOverPMinusOne) {
  auto rows = verify::sharpness_sweep(2.0, 1, {0.45});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_GE(rows[0].ratio, 1 / 0.55 - 0.01);
  EXPECT_LE(rows[0].ratio, 2.0);
}

TEST(Sweep, IncreasingAndBelowCpk) {
  auto rows = verify::sharpness_sweep(2.0, 3, {0.05, 0.2, 0.4, 0.45, 0.49});
  EXPECT_LT(rows.front().ratio, 1.1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_LE(rows[i].ratio, rows[i].cpk);
    EXPECT_GE(rows[i].ratio, rows[i].lambda - 0.01);
    if (i > 0) EXPECT_GT(rows[i].ratio, rows[i - 1].ratio);
  }
  EXPECT_THROW(verify::sharpness_sweep(2.0, 3, {0.5}), std::invalid_argument);
}
