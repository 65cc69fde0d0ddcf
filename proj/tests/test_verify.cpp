#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bigm/gadgets.hpp"
#include "bigm/oracle.hpp"
#include "bigm/verify.hpp"
#include "util.hpp"

using namespace bigm;

namespace {

Rational R(long long p, long long q = 1) { return Rational(Integer(p), Integer(q)); }

BlpInstance embedding_for(const Vec& c) {
  IlpInstance ilp;
  ilp.c = c;
  return *gadget_ilp_kkt(ilp, BigMConfig{R(1), R(1), std::nullopt}).instance;
}

BilevelPoint point(Vec x, Vec y) {
  BilevelPoint p;
  p.x = std::move(x);
  p.y = std::move(y);
  return p;
}

Digraph three_cycle_free() {  // only 0→1 and 2→1: no Hamiltonian 0-1 path
  Digraph g;
  g.num_vertices = 3;
  g.s = 0;
  g.t = 1;
  g.arcs = {{0, 1}, {2, 1}};
  return g;
}

Digraph three_with_detour() {  // 0→2→1 is Hamiltonian
  Digraph g;
  g.num_vertices = 3;
  g.s = 0;
  g.t = 1;
  g.arcs = {{0, 1}, {0, 2}, {2, 1}};
  return g;
}

}  // namespace

TEST_CASE("exact optimality verification with certificates") {
  BlpInstance inst = embedding_for({R(-1)});

  VerificationReport yes = verify_bilevel_optimality(inst, point({R(1)}, {R(0)}));
  CHECK(yes.verdict == Verdict::Yes);
  CHECK(*yes.candidate_value == -1);
  CHECK(*yes.z_star == -1);

  VerificationReport no = verify_bilevel_optimality(inst, point({R(0)}, {R(0)}));
  CHECK(no.verdict == Verdict::No);
  REQUIRE(no.better_point.has_value());
  CHECK(inst.leader_objective(no.better_point->x, no.better_point->y) == -1);
  // The certificate itself re-verifies as bilevel-feasible.
  CHECK(follower_check(inst, no.better_point->x, no.better_point->y).ok);

  VerificationReport bad = verify_bilevel_optimality(inst, point({R(1, 2)}, {R(1, 4)}));
  CHECK(bad.verdict == Verdict::No);
  CHECK(bad.reason.find("coupling") != std::string::npos);

  VerificationReport sub = verify_bilevel_optimality(inst, point({R(1)}, {R(-1)}));
  CHECK(sub.verdict == Verdict::No);
  CHECK(sub.reason.find("gap") != std::string::npos);

  nlohmann::json j = no.to_json();
  CHECK(j["verdict"] == "No");
  CHECK(j.contains("better_point"));
}

TEST_CASE("relative-gap verification") {
  BlpInstance inst = embedding_for({R(-1)});
  // Range is [-1, 0]; the zero point sits at relative gap 1.
  ApproxQuery loose{R(1, 2)};
  CHECK(verify_eps_optimality(inst, point({R(0)}, {R(0)}), loose).verdict ==
        Verdict::No);
  CHECK(verify_eps_optimality(inst, point({R(1)}, {R(0)}), loose).verdict ==
        Verdict::Yes);
  CHECK_THROWS_AS(ApproxQuery{R(1)}.validate(), ValidationError);
  CHECK_THROWS_AS(ApproxQuery{R(0)}.validate(), ValidationError);

  // Degenerate range: only exact optimality passes.
  BlpInstance flat = embedding_for({R(0)});
  CHECK(verify_eps_optimality(flat, point({R(0)}, {R(0)}), loose).verdict ==
        Verdict::Yes);
}

TEST_CASE("dual-vertex bound check on path polytopes") {
  BlpInstance no_ham = *gadget_hampath(three_cycle_free()).instance;
  int tau = no_ham.m_f - 1;
  VerificationReport yes = gvp_d(no_ham, tau, R(1));
  CHECK(yes.verdict == Verdict::Yes);
  CHECK(*yes.dual_vertex_max == 1);  // the direct arc 0→1

  BlpInstance ham = *gadget_hampath(three_with_detour()).instance;
  tau = ham.m_f - 1;
  VerificationReport no = gvp_d(ham, tau, R(1));
  CHECK(no.verdict == Verdict::No);
  REQUIRE(no.violating_vertex.has_value());
  CHECK((*no.violating_vertex)[tau] == 2);  // the 0→2→1 path vertex
  // Monotone in the bound.
  CHECK(gvp_d(ham, tau, R(2)).verdict == Verdict::Yes);

  CHECK_THROWS_AS(gvp_d(ham, ham.m_f, R(1)), ValidationError);
}

TEST_CASE("optimal-dual-vertex bound check on the balanced-slice gadget") {
  PartitionInstance balanced = PartitionInstance::from({R(1), R(1)});
  REQUIRE(balanced.sign_certificate.has_value());
  BlpInstance inst = *gadget_partition(balanced).instance;
  VerificationReport no = gvp_d_prime(inst, R(1));
  CHECK(no.verdict == Verdict::No);
  REQUIRE(no.leader_witness.has_value());
  REQUIRE(no.violating_vertex.has_value());
  // At the witness, the oversized vertex beats the only bounded one, so
  // ‖x‖₁ must exceed K on the slice there.
  CHECK(l1_norm(*no.leader_witness) > balanced.K);

  PartitionInstance lopsided = PartitionInstance::from({R(1), R(2)});
  CHECK_FALSE(lopsided.sign_certificate.has_value());
  VerificationReport yes = gvp_d_prime(*gadget_partition(lopsided).instance, R(1));
  CHECK(yes.verdict == Verdict::Yes);

  // A generous bound accepts every vertex outright.
  CHECK(gvp_d_prime(inst, R(2)).verdict == Verdict::Yes);

  // Parallel evaluation is identical.
  VerificationReport par = gvp_d_prime(inst, R(1), 24, 2);
  CHECK(par.verdict == Verdict::No);
  CHECK(*par.leader_witness == *no.leader_witness);
}

TEST_CASE("big-M audit computes dominating bounds or says why not") {
  // Box-bounded toy: leader x in [0,2], follower y in [0,1] with y ≤ x.
  BlpInstance inst;
  inst.n_l = 1;
  inst.n_f = 1;
  inst.m_l = 2;
  inst.m_f = 3;
  inst.a = {R(1)};
  inst.d = {R(1)};
  inst.g = {R(-1)};
  inst.H = {{R(1)}, {R(-1)}};
  inst.G = {{R(0)}, {R(0)}};
  inst.h = {R(2), R(0)};
  inst.L = {{R(0)}, {R(0)}, {R(-1)}};
  inst.F = {{R(1)}, {R(-1)}, {R(1)}};
  inst.f = {R(1), R(0), R(0)};
  inst.validate();

  VerificationReport ok = bigm_audit(inst, BigMConfig{R(1), R(2), std::nullopt});
  CHECK(ok.verdict == Verdict::Yes);
  CHECK(*ok.dual_vertex_max == 1);
  CHECK(*ok.slack_max == Vec{R(1), R(1), R(2)});

  VerificationReport small = bigm_audit(inst, BigMConfig{R(1), R(1), std::nullopt});
  CHECK(small.verdict == Verdict::No);

  // Unbounded slack rows are reported, and the oversized dual vertex too.
  PartitionInstance balanced = PartitionInstance::from({R(1), R(1)});
  BlpInstance part = *gadget_partition(balanced).instance;
  VerificationReport bad = bigm_audit(part, BigMConfig{R(1), R(2), std::nullopt});
  CHECK(bad.verdict == Verdict::No);
  CHECK(*bad.dual_vertex_max == 2);
  CHECK_FALSE(bad.rows_without_finite_bound.empty());
}
