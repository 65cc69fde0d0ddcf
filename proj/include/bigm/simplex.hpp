#pragma once

#include <optional>
#include <vector>

#include "bigm/model.hpp"
#include "bigm/rational.hpp"

namespace bigm {

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// Infeasibility witness: multipliers over the problem's rows, nonnegative on
/// ≤ rows and bound rows, free on = rows, combining to 0ᵀx ≤ negative.
struct FarkasCertificate {
  Vec ineq;  // per A-row, ≥ 0
  Vec eq;    // per E-row, free
  Vec lo;    // per variable with finite lower bound, ≥ 0 (on -x ≤ -lb)
  Vec hi;    // per variable with finite upper bound, ≥ 0 (on x ≤ ub)
};

/// Result of an exact LP solve.
///
/// Sign convention at optimality:
///   c + Aᵀ·dual_ineq + Eᵀ·dual_eq - reduced_lo + reduced_hi = 0
/// with dual_ineq, reduced_lo, reduced_hi ≥ 0 and
///   objective = -bᵀ·dual_ineq - eᵀ·dual_eq + lbᵀ·reduced_lo - ubᵀ·reduced_hi.
struct LpOutcome {
  LpStatus status = LpStatus::Optimal;
  Vec primal;
  Vec dual_ineq;
  Vec dual_eq;
  Vec reduced_lo;
  Vec reduced_hi;
  Rational objective;
  std::optional<FarkasCertificate> farkas;  // when Infeasible
  std::optional<Vec> ray;                   // improving direction when Unbounded
};

/// Exact two-phase primal simplex with Bland's rule. Deterministic.
LpOutcome solve_lp(const LpProblem& p);

/// Complete vertex/ray description of a (pointed directions handled via the
/// recession cone) polyhedron given as an LpProblem's feasible set.
/// basis_map holds, per vertex, one defining active set of constraint indices
/// in the order [A rows, E rows, lower-bound rows, upper-bound rows].
struct PolyhedronVertices {
  std::vector<Vec> vertices;  // lexicographically sorted
  std::vector<Vec> rays;      // extreme-ray directions, deduplicated
  std::vector<std::vector<int>> basis_map;
};

PolyhedronVertices enumerate_vertices(const LpProblem& p, int var_cap = 24,
                                      bool want_rays = true, int jobs = 1);

}  // namespace bigm
