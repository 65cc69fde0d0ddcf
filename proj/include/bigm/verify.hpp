#pragma once

#include <optional>
#include <string>

#include "bigm/model.hpp"

namespace bigm {

enum class ProblemKind { BlpD, BlpDEps, GvpD, GvpDPrime, Audit };
enum class Verdict { Yes, No };

struct VerificationReport {
  ProblemKind problem_kind;
  Verdict verdict = Verdict::Yes;
  bool vacuous = false;  // empty dual polyhedron / empty leader region
  std::string reason;

  // Certificates: exactly one is set on a No verdict.
  std::optional<BilevelPoint> better_point;   // strictly better bilevel point
  std::optional<Vec> violating_vertex;        // dual vertex with v_j > Md
  std::optional<Vec> leader_witness;          // x̂ where only oversized duals win

  // Exact bookkeeping (gaps, bounds, per-row audit results).
  std::optional<Rational> candidate_value;
  std::optional<Rational> z_star;
  std::optional<Rational> z_max;
  std::optional<Rational> dual_vertex_max;    // audit: max_j max_v v_j
  std::optional<Vec> slack_max;               // audit: per-row slack maxima
  std::vector<int> rows_without_finite_bound; // audit: unbounded slack rows

  nlohmann::json to_json() const;
};

struct ApproxQuery {
  Rational epsilon;
  void validate() const;  // 0 < ε < 1
};

/// Is the candidate optimal for the bilevel problem? Checks coupling rows,
/// follower optimality, and equality with the oracle optimum; a No verdict
/// carries either the violated-feasibility reason or a strictly better point.
VerificationReport verify_bilevel_optimality(const BlpInstance& inst,
                                             const BilevelPoint& cand,
                                             int cap = 20);

/// Relative-gap test: objective(cand) - z_star ≤ ε (z_max - z_star). When the
/// range degenerates (z_max = z_star), the candidate must hit z_star exactly.
VerificationReport verify_eps_optimality(const BlpInstance& inst,
                                         const BilevelPoint& cand,
                                         const ApproxQuery& q, int cap = 20);

/// Do all vertices of the follower's dual polyhedron {λ ≥ 0 : Fᵀλ + g = 0}
/// keep component j at or below Md? Empty polyhedron answers Yes-vacuous.
VerificationReport gvp_d(const BlpInstance& inst, int j, const Rational& Md,
                         int cap = 24);

/// Is there, for every leader point, an optimal dual vertex with all
/// components at or below Md? Decided exactly with one margin-maximization LP
/// per oversized vertex; a No verdict carries the leader point where only
/// oversized vertices attain the dual optimum. Improving extreme rays of the
/// dual polyhedron violate the standing assumption and raise A1ViolationError.
VerificationReport gvp_d_prime(const BlpInstance& inst, const Rational& Md,
                               int cap = 24, int jobs = 1);

/// Computes a valid dual bound (max vertex component of the dual polyhedron)
/// and per-follower-row slack maxima over the joint feasible region, then
/// flags whether the configured bounds dominate them.
VerificationReport bigm_audit(const BlpInstance& inst, const BigMConfig& cfg,
                              int cap = 24);

}  // namespace bigm
