#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>

#include "bigm/model.hpp"

using namespace bigm;

TEST_CASE("rational parsing canonicalizes") {
  CHECK(parse_rational("2/4") == Rational(1, 2));
  CHECK(parse_rational("-3/6") == Rational(-1, 2));
  CHECK(parse_rational("3/-6") == Rational(-1, 2));
  CHECK(parse_rational("7") == Rational(7));
  CHECK(to_string(parse_rational("10/5")) == "2");
  CHECK_THROWS_AS(parse_rational(""), ParseError);
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("abc"), ParseError);
  CHECK_THROWS_AS(parse_rational("1.5"), ParseError);
}

TEST_CASE("lp validation catches shape errors") {
  LpProblem p = LpProblem::with_vars(2);
  p.add_ineq({Rational(1), Rational(1)}, Rational(3));
  CHECK_NOTHROW(p.validate());
  p.A.push_back({Rational(1)});  // wrong width
  p.b.push_back(Rational(0));
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("milp binary marks force unit bounds") {
  MilpProblem m;
  m.lp = LpProblem::with_vars(3);
  m.mark_binary(1);
  CHECK(m.lp.lb[1] == Rational(0));
  CHECK(m.lp.ub[1] == Rational(1));
  m.mark_binary(1);  // idempotent
  CHECK(m.binary == std::vector<int>{1});
  CHECK_NOTHROW(m.validate());
}

TEST_CASE("instance validation") {
  BlpInstance inst;
  inst.n_l = 1;
  inst.n_f = 1;
  inst.m_l = 1;
  inst.m_f = 1;
  inst.a = {Rational(1)};
  inst.d = {Rational(0)};
  inst.g = {Rational(-1)};
  inst.H = {{Rational(1)}};
  inst.G = {{Rational(0)}};
  inst.h = {Rational(1)};
  inst.L = {{Rational(0)}};
  inst.F = {{Rational(1)}};
  inst.f = {Rational(1)};
  CHECK_NOTHROW(inst.validate());
  CHECK_FALSE(inst.has_coupling());

  SUBCASE("coupling detected") {
    inst.G[0][0] = Rational(1);
    CHECK(inst.has_coupling());
  }
  SUBCASE("min-max needs zero coupling and d = -g") {
    inst.min_max = true;
    CHECK_THROWS_AS(inst.validate(), ValidationError);
    inst.d = {Rational(1)};
    CHECK_NOTHROW(inst.validate());
  }
  SUBCASE("dimension mismatch") {
    inst.f.push_back(Rational(0));
    CHECK_THROWS_AS(inst.validate(), ValidationError);
  }
}

namespace {

BlpInstance random_instance(std::mt19937& rng) {
  std::uniform_int_distribution<int> dim(1, 3), num(-4, 4), den(1, 3);
  auto r = [&] { return Rational(num(rng), den(rng)); };
  BlpInstance inst;
  inst.n_l = dim(rng);
  inst.n_f = dim(rng);
  inst.m_l = dim(rng);
  inst.m_f = dim(rng);
  auto vec = [&](int n) {
    Vec v;
    for (int i = 0; i < n; ++i) v.push_back(r());
    return v;
  };
  auto mat = [&](int rows, int cols) {
    Mat m;
    for (int i = 0; i < rows; ++i) m.push_back(vec(cols));
    return m;
  };
  inst.a = vec(inst.n_l);
  inst.d = vec(inst.n_f);
  inst.g = vec(inst.n_f);
  inst.H = mat(inst.m_l, inst.n_l);
  inst.G = mat(inst.m_l, inst.n_f);
  inst.h = vec(inst.m_l);
  inst.L = mat(inst.m_f, inst.n_l);
  inst.F = mat(inst.m_f, inst.n_f);
  inst.f = vec(inst.m_f);
  inst.leader_binary = rng() % 2 == 0;
  return inst;
}

bool same_instance(const BlpInstance& a, const BlpInstance& b) {
  return a.n_l == b.n_l && a.n_f == b.n_f && a.m_l == b.m_l &&
         a.m_f == b.m_f && a.a == b.a && a.d == b.d && a.g == b.g &&
         a.H == b.H && a.G == b.G && a.h == b.h && a.L == b.L && a.F == b.F &&
         a.f == b.f && a.leader_binary == b.leader_binary &&
         a.min_max == b.min_max;
}

}  // namespace

TEST_CASE("instance json round-trip over random data") {
  std::mt19937 rng(20260823);
  for (int trial = 0; trial < 50; ++trial) {
    BlpInstance inst = random_instance(rng);
    BlpInstance back = instance_from_json(instance_to_json(inst));
    CHECK(same_instance(inst, back));
  }
}

TEST_CASE("instance file round-trip") {
  std::mt19937 rng(7);
  BlpInstance inst = random_instance(rng);
  std::string path = "round_trip_instance.json";
  save_instance(inst, path);
  BlpInstance back = load_instance(path);
  CHECK(same_instance(inst, back));
  std::remove(path.c_str());
}

TEST_CASE("lp and milp json round-trip") {
  LpProblem p = LpProblem::with_vars(2);
  p.c = {Rational(1, 3), Rational(-2)};
  p.add_ineq({Rational(1), Rational(2)}, Rational(5, 2));
  p.add_eq({Rational(1), Rational(-1)}, Rational(0));
  p.lb[0] = Rational(0);
  LpProblem back = lp_from_json(lp_to_json(p));
  CHECK(back.c == p.c);
  CHECK(back.A == p.A);
  CHECK(back.E == p.E);
  CHECK(back.lb[0] == p.lb[0]);
  CHECK_FALSE(back.ub[0].has_value());

  MilpProblem m;
  m.lp = p;
  m.lp.num_vars = 2;
  m.mark_binary(0);
  MilpProblem mb = milp_from_json(milp_to_json(m));
  CHECK(mb.binary == m.binary);
  CHECK(mb.lp.ub[0] == Rational(1));
}

TEST_CASE("point json round-trip keeps optional blocks") {
  BilevelPoint pt;
  pt.x = {Rational(1, 2)};
  pt.y = {Rational(3)};
  pt.lambda = Vec{Rational(0), Rational(2)};
  BilevelPoint back = point_from_json(point_to_json(pt));
  CHECK(back.x == pt.x);
  CHECK(back.y == pt.y);
  REQUIRE(back.lambda.has_value());
  CHECK(*back.lambda == *pt.lambda);
  CHECK_FALSE(back.u.has_value());
}

TEST_CASE("high-point polytope stacks leader and follower rows") {
  BlpInstance inst;
  inst.n_l = 1;
  inst.n_f = 1;
  inst.m_l = 1;
  inst.m_f = 2;
  inst.a = {Rational(1)};
  inst.d = {Rational(0)};
  inst.g = {Rational(-1)};
  inst.H = {{Rational(1)}};
  inst.G = {{Rational(1)}};
  inst.h = {Rational(2)};
  inst.L = {{Rational(-1)}, {Rational(0)}};
  inst.F = {{Rational(1)}, {Rational(-1)}};
  inst.f = {Rational(0), Rational(0)};
  LpProblem hp = high_point_polytope(inst);
  CHECK(hp.num_vars == 2);
  CHECK(hp.num_ineq() == 3);
  CHECK(hp.A[0] == Vec{Rational(1), Rational(1)});
  CHECK(hp.b[0] == Rational(2));
  CHECK(hp.A[1] == Vec{Rational(-1), Rational(1)});
  CHECK(hp.A[2] == Vec{Rational(0), Rational(-1)});
}

TEST_CASE("lp-format export scales fractional rows to integers") {
  MilpProblem m;
  m.lp = LpProblem::with_vars(2);
  m.lp.c = {Rational(1, 2), Rational(1)};
  m.lp.add_ineq({Rational(1, 3), Rational(1, 6)}, Rational(1, 2));
  m.lp.lb[0] = Rational(0);
  m.lp.ub[0] = Rational(1);
  m.mark_binary(1);
  std::string text = to_lp_format(m, "demo");
  CHECK(text.find("2 x0 + x1 <= 3") != std::string::npos);
  CHECK(text.find("Binaries") != std::string::npos);
  CHECK(text.find("/") == std::string::npos);  // no raw fractions leak out
}
