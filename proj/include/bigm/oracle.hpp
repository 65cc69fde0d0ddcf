#pragma once

#include <optional>

#include "bigm/model.hpp"

namespace bigm {

struct FollowerCheck {
  bool ok = false;
  std::optional<Rational> gap;  // gᵀy - v(x) when y is feasible; empty otherwise
};

/// True iff y is feasible for the follower at x and attains the follower's
/// LP optimum. An infeasible y gets ok = false with no gap (the "infinite
/// gap" marker). A follower unbounded at x violates the standing assumption
/// and raises A1ViolationError.
FollowerCheck follower_check(const BlpInstance& inst, const Vec& x,
                             const Vec& y);

struct OracleResult {
  Rational z_star;
  Rational z_max;               // meaningless when z_max_unbounded
  bool z_max_unbounded = false; // leader objective unbounded above over the
                                // bilevel-feasible set; witness_max is empty
  BilevelPoint witness_min;
  BilevelPoint witness_max;
  long long patterns_solved = 0;
};

/// Exact optimistic bilevel solve by enumerating complementarity patterns of
/// the follower's KKT system: for each u in {0,1}^{m_f}, an LP over (x, y, λ)
/// with coupling, follower rows, stationarity, λ_j = 0 where u_j = 0 and row
/// j tight where u_j = 1, minimized and maximized in the leader objective.
/// Checks the standing assumption first (nonempty bounded-x high-point set,
/// nonempty dual polyhedron) and throws A1ViolationError when it fails.
/// witness_min/witness_max are canonicalized by per-coordinate lexicographic
/// refinement inside the first pattern attaining the optimum.
OracleResult bilevel_solve(const BlpInstance& inst, int cap = 20);

/// Optimistic follower response: minimizes dᵀy over follower-optimal y that
/// also satisfy the coupling rows at x. Empty optional when no follower-
/// optimal response is coupling-compatible. Throws if x is outside H_x.
std::optional<Vec> optimistic_response(const BlpInstance& inst, const Vec& x);

}  // namespace bigm
