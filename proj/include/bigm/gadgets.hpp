#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bigm/model.hpp"

namespace bigm {

/// 0-1 ILP min cᵀx s.t. Ax ≤ b, x binary, with integral data and the zero
/// point feasible (b ≥ 0). The hardness constructions all start here.
struct IlpInstance {
  Vec c;
  Mat A;
  Vec b;

  int n() const { return static_cast<int>(c.size()); }
  void validate() const;
  /// Exact optimum by brute force over {0,1}^n (n capped).
  Rational brute_force_min(int cap = 20) const;
};

struct PartitionInstance {
  Vec a;        // positive integers
  Rational K;   // n - 1/‖a‖∞
  std::optional<Vec> sign_certificate;  // σ ∈ {-1,1}^n with aᵀσ = 0, if any

  static PartitionInstance from(Vec a, int cap = 20);
  void validate() const;
};

struct Digraph {
  int num_vertices = 0;
  int s = 0;
  int t = 0;
  std::vector<std::pair<int, int>> arcs;

  void validate() const;  // |V| ≥ 3, s ≠ t, arc (s,t) present, simple
  bool has_hamiltonian_st_path() const;
};

/// A machine-checkable expected fact about one of the bundle's problems.
/// kind ∈ {milp_objective, lp_objective, milp_primal_at,
///         unique_binary_optimum, oracle_z, gvp_d, gvp_d_prime,
///         audit_md_dominates}; data carries the kind-specific payload plus a
/// "source" field recording whether the value is asserted by the
/// construction, derived by an oracle here, or trivial.
struct ExpectedFact {
  std::string kind;
  std::string label;  // problem label, or "instance" for instance-level facts
  nlohmann::json data;
};

struct GadgetBundle {
  std::string family;
  std::optional<BlpInstance> instance;
  std::map<std::string, MilpProblem> milps;
  std::map<std::string, LpProblem> lps;
  BigMConfig cfg;
  std::vector<ExpectedFact> facts;

  nlohmann::json to_json() const;
};

/// Re-checks every expected fact with the solver/oracle/verifier stack.
/// Returns human-readable failure messages; empty means everything replayed.
std::vector<std::string> replay_bundle(const GadgetBundle& bundle);

/// Writes the bundle as a directory: instance JSON, per-label MILP/LP JSONs
/// and LP-format exports, the big-M config, and the expected-facts record.
void save_bundle(const GadgetBundle& bundle, const std::string& dir);

/// ILP embedded as a bilevel problem whose follower enforces integrality;
/// bundles the KKT MILP and its collapsed form. At Md = Mp = 1 the collapsed
/// MILP has the unique solution x = 0, λ = 1, u = 1 whatever the ILP optimum.
GadgetBundle gadget_ilp_kkt(const IlpInstance& ilp, const BigMConfig& cfg);

/// Epigraph trick: optimum 0 iff the zero point is ILP-optimal, else -1,
/// with M = n‖c‖∞ + 1.
GadgetBundle gadget_epigraph(const IlpInstance& ilp);

/// Strong-duality counterpart: the full linearized MILP and its reduced form;
/// at M = 1 the reduced MILP's unique solution is x = 0, λ = 1.
GadgetBundle gadget_sd(const IlpInstance& ilp, const Rational& M);

/// Coupling-free embedding via exact penalty: the penalized BLP, its big-M
/// MILP at Md = Mp = 1, and the collapsed LP over the box. Requires
/// eta > 2‖c‖₁. minmax_variant also charges the leader the (opposite)
/// follower objective.
GadgetBundle gadget_nocoupling(const IlpInstance& ilp, const Rational& eta,
                               bool minmax_variant = false);

/// Min-max embedding solved through the follower's dual: at M = 1 the dual
/// MILP optimum is 0 at x = 0; at M ≥ 2 it equals the ILP optimum.
GadgetBundle gadget_minmax(const IlpInstance& ilp, const Rational& eta,
                           const Rational& M);

/// Flow-balance path polyhedron, lifted by a path-length coordinate τ, and a
/// bilevel embedding whose dual polyhedron is the lifted one. The bound
/// |V| - 2 on τ holds at every vertex iff no Hamiltonian s-t path exists.
GadgetBundle gadget_hampath(const Digraph& g);

/// Number-partition embedding: leader on the slice of the cube with aᵀx = 0,
/// follower charging the l1-overshoot beyond K = n - 1/‖a‖∞. At Md = 1,
/// Mp = n, the optimal-dual-vertex check says Yes iff no balanced signing of
/// a exists.
GadgetBundle gadget_partition(const PartitionInstance& p);

}  // namespace bigm
