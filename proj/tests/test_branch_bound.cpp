#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bigm/branch_bound.hpp"

using namespace bigm;

namespace {
Rational R(long long p, long long q = 1) { return Rational(Integer(p), Integer(q)); }
}

TEST_CASE("pure lp passes through") {
  MilpProblem m;
  m.lp = LpProblem::with_vars(1);
  m.lp.c = {R(-1)};
  m.lp.lb[0] = R(0);
  m.lp.ub[0] = R(5, 2);
  auto o = solve_milp(m);
  REQUIRE(o.status == MilpStatus::Optimal);
  CHECK(o.primal[0] == R(5, 2));
  CHECK(o.nodes == 1);
}

TEST_CASE("knapsack-style milp") {
  // max 5a + 4b + 3c s.t. 2a + 3b + c <= 5, binaries.
  MilpProblem m;
  m.lp = LpProblem::with_vars(3);
  m.lp.c = {R(-5), R(-4), R(-3)};
  m.lp.add_ineq({R(2), R(3), R(1)}, R(5));
  for (int i = 0; i < 3; ++i) m.mark_binary(i);
  auto o = solve_milp(m);
  REQUIRE(o.status == MilpStatus::Optimal);
  CHECK(o.objective == R(-9));  // a = 1, b = 1 fills the budget exactly
  CHECK(o.primal == Vec{R(1), R(1), R(0)});
}

TEST_CASE("infeasible milp") {
  MilpProblem m;
  m.lp = LpProblem::with_vars(2);
  m.lp.add_ineq({R(1), R(1)}, R(-1));
  m.mark_binary(0);
  m.mark_binary(1);
  auto o = solve_milp(m);
  CHECK(o.status == MilpStatus::Infeasible);
}

TEST_CASE("integer-infeasible but lp-feasible") {
  // x + y = 1/2 with both binary has a fractional relaxation only.
  MilpProblem m;
  m.lp = LpProblem::with_vars(2);
  m.lp.add_eq({R(1), R(1)}, R(1, 2));
  m.mark_binary(0);
  m.mark_binary(1);
  auto o = solve_milp(m);
  CHECK(o.status == MilpStatus::Infeasible);
}

TEST_CASE("mixed continuous and binary") {
  // min -t s.t. t <= 1 + z, t <= 3 - 2z, z binary: best t = 2 at z = 1? No:
  // z=0 gives t<=1; z=1 gives t<=2 and t<=1, so t=1... pick data that spreads.
  MilpProblem m;
  m.lp = LpProblem::with_vars(2);  // t, z
  m.lp.c = {R(-1), R(0)};
  m.lp.add_ineq({R(1), R(-1)}, R(1));   // t - z <= 1
  m.lp.add_ineq({R(1), R(2)}, R(4));    // t + 2z <= 4
  m.lp.lb[0] = R(0);
  m.mark_binary(1);
  auto o = solve_milp(m);
  REQUIRE(o.status == MilpStatus::Optimal);
  CHECK(o.objective == R(-2));  // z = 1, t = 2
  CHECK(o.primal == Vec{R(2), R(1)});
}

TEST_CASE("unbounded relaxation is rejected") {
  MilpProblem m;
  m.lp = LpProblem::with_vars(2);
  m.lp.c = {R(0), R(-1)};  // y unbounded above
  m.mark_binary(0);
  CHECK_THROWS_AS(solve_milp(m), ValidationError);
}

TEST_CASE("branch and bound agrees with exhaustive enumeration") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> coeff(-3, 3), rhs(0, 6);
  for (int trial = 0; trial < 40; ++trial) {
    int nb = 2 + static_cast<int>(rng() % 3);   // binaries
    int nc = 1 + static_cast<int>(rng() % 2);   // continuous in [0, 2]
    int n = nb + nc;
    MilpProblem m;
    m.lp = LpProblem::with_vars(n);
    for (int j = 0; j < n; ++j) m.lp.c[j] = R(coeff(rng));
    for (int j = nb; j < n; ++j) {
      m.lp.lb[j] = R(0);
      m.lp.ub[j] = R(2);
    }
    for (int i = 0; i < nb; ++i) m.mark_binary(i);
    int rows = 1 + static_cast<int>(rng() % 3);
    for (int r = 0; r < rows; ++r) {
      Vec row(n);
      for (int j = 0; j < n; ++j) row[j] = R(coeff(rng));
      m.lp.add_ineq(std::move(row), R(rhs(rng)));
    }
    auto bb = solve_milp(m);
    auto exhaustive = enumerate_binary_optima(m);
    if (bb.status == MilpStatus::Infeasible) {
      CHECK_FALSE(exhaustive.has_value());
      continue;
    }
    REQUIRE(exhaustive.has_value());
    CHECK(bb.objective == exhaustive->objective);
    // The b&b witness must be among feasible points with the same value.
    CHECK(dot(m.lp.c, bb.primal) == bb.objective);
    for (int r = 0; r < m.lp.num_ineq(); ++r)
      CHECK(dot(m.lp.A[r], bb.primal) <= m.lp.b[r]);
    for (int v : m.binary) CHECK(is_integral(bb.primal[v]));
  }
}

TEST_CASE("binary enumeration cap") {
  MilpProblem m;
  m.lp = LpProblem::with_vars(25);
  for (int i = 0; i < 25; ++i) m.mark_binary(i);
  CHECK_THROWS_AS(enumerate_binary_optima(m, 20), CapExceededError);
}
