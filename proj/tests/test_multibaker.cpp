#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "bakerfr/multibaker.hpp"
#include "oracles.hpp"

using namespace bakerfr;
using oracle::q;

TEST(Current, ClosedForms) {
  EXPECT_EQ(analytic_current(q(1, 8)), q(1, 3));
  EXPECT_EQ(analytic_current(q(1, 4)), 0);
  for (const Rational& l : {q(1, 5), q(1, 9), q(3, 13), q(1, 100)}) EXPECT_EQ(analytic_current(l), oracle::current(l));
  EXPECT_THROW(analytic_current(q(1, 3)), ConstructionError);
}

TEST(Current, BiasRoundTrip) {
  for (const Rational& b : {q(1, 100), q(1, 20), q(1, 2), q(99, 100)}) {
    EXPECT_EQ(bias_of(l_of_bias(b)), b);
    EXPECT_EQ(analytic_current(l_of_bias(b)), psi_of_bias(b));
  }
  EXPECT_EQ(bias_of(q(1, 8)), q(2, 3));
}

TEST(Lift, CellShiftsFollowRegions) {
  const auto m = build_generalized_baker(q(1, 8));
  const ChainState<Rational> s0{0, {q(1, 3), q(1, 5)}};
  const auto s1 = lift_step(m, s0);
  EXPECT_EQ(s1.cell, 1);
  EXPECT_EQ(s1.local, m.apply(s0.local));
  EXPECT_EQ(lift_step(m, ChainState<Rational>{4, {q(5, 8), q(1, 2)}}).cell, 3);
  EXPECT_EQ(lift_step(m, ChainState<Rational>{4, {q(7, 8), q(1, 2)}}).cell, 4);
  EXPECT_EQ(lift_step(m, ChainState<Rational>{-2, {q(1, 16), q(1, 2)}}).cell, -2);
}

TEST(Simulation, MatchesAnalyticCurrent) {
  const auto est = simulate_current(q(1, 8), 4000, 400, 17);
  EXPECT_EQ(est.particles, 4000U);
  EXPECT_NEAR(est.psi_hat, 1.0 / 3.0, 4 * est.std_error);
  EXPECT_NEAR(est.lambda_hat, std::log(1.5) / 3.0, 4 * est.lambda_std_error);
}

TEST(Simulation, EquilibriumHasNoCurrent) {
  const auto est = simulate_current(q(1, 4), 4000, 200, 3);
  EXPECT_NEAR(est.psi_hat, 0.0, 4 * est.std_error);
  EXPECT_EQ(est.lambda_hat, 0.0);
}

TEST(Simulation, ReproducibleAcrossThreads) {
  const auto a = simulate_current(q(1, 8), 3000, 50, 5, 100, 1);
  const auto b = simulate_current(q(1, 8), 3000, 50, 5, 100, 3);
  EXPECT_EQ(a.psi_hat, b.psi_hat);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(Simulation, RejectsZeroSteps) { EXPECT_THROW(simulate_current(q(1, 8), 10, 0, 1), ConstructionError); }

TEST(Response, SmallBiasSweep) {
  const auto rows = linear_response_sweep({q(1, 10), q(1, 5)}, 4000, 400, 9);
  ASSERT_EQ(rows.size(), 2U);
  for (const auto& r : rows) {
    EXPECT_EQ(r.psi_analytic, psi_of_bias(r.b));
    EXPECT_TRUE(r.consistent());
    // Psi/b -> 1/4 and <Lambda>/b^2 -> 1/8 as b -> 0.
    EXPECT_NEAR(to_double(r.psi_analytic / r.b), 0.25, 0.1);
    EXPECT_NEAR(r.lambda_analytic.value() / to_double(r.b * r.b), 0.125, 0.05);
  }
  EXPECT_THROW(linear_response_sweep({q(0)}, 10, 10, 1), ConstructionError);
  EXPECT_THROW(linear_response_sweep({q(3, 2)}, 10, 10, 1), ConstructionError);
}

TEST(Response, CsvHeader) {
  std::ostringstream os;
  write_sweep_csv(os, linear_response_sweep({q(1, 2)}, 200, 20, 1));
  EXPECT_EQ(os.str().rfind("b,l,psi_analytic,psi_hat,stderr,lambda_analytic,lambda_hat\n", 0), 0U);
}
