#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "bigm/branch_bound.hpp"
#include "bigm/gadgets.hpp"
#include "bigm/reformulate.hpp"
#include "bigm/simplex.hpp"
#include "util.hpp"

using namespace bigm;

namespace {

Rational R(long long p, long long q = 1) { return Rational(Integer(p), Integer(q)); }

IlpInstance small_ilp() {  // min -x0 - 2x1 s.t. x0 + x1 ≤ 1: optimum -2
  IlpInstance ilp;
  ilp.c = {R(-1), R(-2)};
  ilp.A = {{R(1), R(1)}};
  ilp.b = {R(1)};
  ilp.validate();
  return ilp;
}

void expect_replays(const GadgetBundle& b) {
  auto failures = replay_bundle(b);
  for (const auto& f : failures) MESSAGE(f);
  CHECK(failures.empty());
}

}  // namespace

TEST_CASE("input structure validation") {
  IlpInstance bad;
  bad.c = {R(1, 2)};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad.c = {R(1)};
  bad.A = {{R(1)}};
  bad.b = {R(-1)};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK(small_ilp().brute_force_min() == -2);

  PartitionInstance p = PartitionInstance::from({R(2), R(3), R(5)});
  CHECK(p.K == R(14, 5));  // 3 - 1/5
  REQUIRE(p.sign_certificate.has_value());
  CHECK(dot(p.a, *p.sign_certificate) == 0);
  CHECK_THROWS_AS(PartitionInstance::from({R(0)}), ValidationError);

  Digraph g;
  g.num_vertices = 2;
  g.s = 0;
  g.t = 1;
  g.arcs = {{0, 1}};
  CHECK_THROWS_AS(g.validate(), ValidationError);  // too small
  g.num_vertices = 3;
  g.arcs = {{0, 2}};
  CHECK_THROWS_AS(g.validate(), ValidationError);  // no (s,t) arc
  g.arcs = {{0, 1}, {0, 2}, {2, 1}};
  g.validate();
  CHECK(g.has_hamiltonian_st_path());
  g.arcs = {{0, 1}, {2, 1}};
  CHECK_FALSE(g.has_hamiltonian_st_path());
}

TEST_CASE("integrality gadget: unit bounds hide the optimum, doubled bounds recover it") {
  IlpInstance ilp = small_ilp();
  GadgetBundle unit = gadget_ilp_kkt(ilp, BigMConfig{R(1), R(1), std::nullopt});
  CHECK(unit.family == "ilp-kkt");
  CHECK(unit.milps.count("kkt") == 1);
  CHECK(unit.milps.count("collapsed") == 1);
  CHECK(unit.milps.at("kkt").binary.size() == 4);  // 2n tightness binaries
  expect_replays(unit);

  GadgetBundle doubled = gadget_ilp_kkt(ilp, BigMConfig{R(2), R(2), std::nullopt});
  expect_replays(doubled);
  CHECK(solve_milp(doubled.milps.at("collapsed")).objective == -2);

  // The two formulations agree at any bound scale, not just the endpoints.
  std::mt19937 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    IlpInstance r = testutil::random_ilp(rng, 3);
    for (const auto& m : {R(1), R(2), R(3)}) {
      GadgetBundle b = gadget_ilp_kkt(r, BigMConfig{m, m, std::nullopt});
      MilpOutcome a = solve_milp(b.milps.at("kkt"));
      MilpOutcome c = solve_milp(b.milps.at("collapsed"));
      REQUIRE(a.status == MilpStatus::Optimal);
      REQUIRE(c.status == MilpStatus::Optimal);
      CHECK(a.objective == c.objective);
    }
  }
}

TEST_CASE("epigraph gadget distinguishes zero-optimal ILPs") {
  expect_replays(gadget_epigraph(small_ilp()));
  IlpInstance zero;
  zero.c = {R(1)};
  GadgetBundle b = gadget_epigraph(zero);
  CHECK(b.cfg.Md == 2);  // n·max|c| + 1
  expect_replays(b);
}

TEST_CASE("strong-duality gadget at both bound scales") {
  IlpInstance ilp = small_ilp();
  GadgetBundle unit = gadget_sd(ilp, R(1));
  CHECK(unit.instance->leader_binary);
  expect_replays(unit);
  expect_replays(gadget_sd(ilp, R(2)));
}

TEST_CASE("penalty gadget: collapsed LP and unit-bound MILP agree at zero") {
  IlpInstance ilp = small_ilp();
  Rational eta = 2 * l1_norm(ilp.c) + 1;
  GadgetBundle b = gadget_nocoupling(ilp, eta);
  expect_replays(b);

  // The collapsed LP's optimum is the unique point of its optimal face.
  LpProblem face = b.lps.at("collapsed");
  Vec obj = face.c;
  face.add_eq(std::move(obj), R(0));
  PolyhedronVertices V = enumerate_vertices(face, 24, false);
  REQUIRE(V.vertices.size() == 1);
  for (const auto& comp : V.vertices[0]) CHECK(comp == 0);

  expect_replays(gadget_nocoupling(ilp, eta, true));
  CHECK_THROWS_AS(gadget_nocoupling(ilp, R(1)), ValidationError);
}

TEST_CASE("min-max gadget via the follower dual") {
  IlpInstance ilp = small_ilp();
  Rational eta = 2 * l1_norm(ilp.c) + 1;
  GadgetBundle low = gadget_minmax(ilp, eta, R(1));
  CHECK(low.instance->min_max);
  expect_replays(low);
  expect_replays(gadget_minmax(ilp, eta, R(2)));
  CHECK_THROWS_AS(gadget_minmax(ilp, R(1), R(1)), ValidationError);
}

TEST_CASE("path and partition gadgets replay their verdicts") {
  Digraph g;
  g.num_vertices = 4;
  g.s = 0;
  g.t = 3;
  g.arcs = {{0, 3}, {0, 1}, {1, 2}, {2, 3}};
  expect_replays(gadget_hampath(g));  // 0→1→2→3 is Hamiltonian
  g.arcs = {{0, 3}, {0, 1}, {2, 1}, {2, 3}};
  expect_replays(gadget_hampath(g));  // vertex 2 is unreachable

  expect_replays(gadget_partition(PartitionInstance::from({R(1), R(1)})));
  expect_replays(gadget_partition(PartitionInstance::from({R(1), R(2)})));
  expect_replays(gadget_partition(PartitionInstance::from({R(3), R(1), R(2)})));
}

TEST_CASE("bundle serialization round trip") {
  GadgetBundle b = gadget_ilp_kkt(small_ilp(), BigMConfig{R(1), R(1), std::nullopt});
  nlohmann::json j = b.to_json();
  CHECK(j["family"] == "ilp-kkt");
  CHECK(j["milps"].contains("kkt"));
  CHECK(j["facts"].is_array());
  BlpInstance inst = instance_from_json(j["instance"]);
  CHECK(inst.m_f == b.instance->m_f);

  std::string dir = std::filesystem::temp_directory_path() / "bigm_bundle_test";
  std::filesystem::remove_all(dir);
  save_bundle(b, dir);
  CHECK(std::filesystem::exists(dir + "/instance.json"));
  CHECK(std::filesystem::exists(dir + "/config.json"));
  CHECK(std::filesystem::exists(dir + "/facts.json"));
  CHECK(std::filesystem::exists(dir + "/kkt.milp.json"));
  CHECK(std::filesystem::exists(dir + "/kkt.milp.lp"));
  MilpProblem reread = milp_from_json(nlohmann::json::parse(read_text_file(dir + "/kkt.milp.json")));
  CHECK(reread.binary == b.milps.at("kkt").binary);
  CHECK(read_text_file(dir + "/kkt.milp.lp").find("Binaries") != std::string::npos);
  std::filesystem::remove_all(dir);
}
