#pragma once

#include <vector>

#include "bigm/model.hpp"

namespace bigm {

/// Offsets of the variable blocks inside a reformulated MILP. Blocks are laid
/// out contiguously in the fixed order x, y, λ, s, u (then any auxiliaries),
/// so offset + block length gives the next offset.
struct KktVarMap {
  int x = 0;
  int y = 0;
  int lambda = 0;
  int s = 0;
  int u = 0;
};

/// Row indices of each constraint group; inequality and equality rows are
/// separate index spaces (matching LpProblem's A/E split).
struct KktRowMap {
  std::vector<int> coupling;      // ineq: Hx + Gy ≤ h
  std::vector<int> dual_bound;    // ineq: λ_j ≤ M^d u_j
  std::vector<int> slack_bound;   // ineq: s_j ≤ M^p (1 - u_j)
  std::vector<int> slack_def;     // eq:   Lx + Fy + s = f
  std::vector<int> stationarity;  // eq:   g + Fᵀλ = 0
};

struct KktArtifacts {
  MilpProblem milp;
  KktVarMap var_map;
  KktRowMap row_map;
};

/// Single-level MILP from the follower's KKT conditions, with complementarity
/// encoded by binaries u and the bounds λ ≤ M^d u, s ≤ M^p (1-u). Primal
/// feasibility is carried by the slack definition rows plus s ≥ 0.
/// cfg.per_row_M, when present, overrides M^d row-by-row.
KktArtifacts kkt_milp(const BlpInstance& inst, const BigMConfig& cfg);

struct StrongDualityVarMap {
  int x = 0;
  int y = 0;
  int lambda = 0;
  int u = 0;  // n_l × m_f block, row-major: u[i][j] at u + i*m_f + j
};

struct StrongDualityArtifacts {
  MilpProblem milp;
  StrongDualityVarMap var_map;
  Vec M_j;                // per-follower-row dual bounds used
  int strong_duality_row = -1;  // index into the equality block
};

/// Single-level MILP with one strong-duality equality; the bilinear products
/// x_i λ_j are replaced by variables u_ij tied down with the standard big-M
/// triple. Requires a binary leader.
StrongDualityArtifacts strong_duality_milp(const BlpInstance& inst,
                                           const Vec& M);

struct PenaltyConfig {
  Rational eta;
  Rational eta1 = Rational(0);  // threshold the caller wants enforced, if > 0
  bool eta0_known = false;

  void validate() const;
};

/// Moves the coupling block into the follower via an exact penalty. Supported
/// coupling rows are exactly "y_j ≤ 0" (zero H-part, unit G-part, zero rhs);
/// they are replaced by a follower variable w with rows y_j ≤ w, a row
/// -4w ≤ 0, and the penalty term η·w in the leader objective. Anything else
/// is rejected rather than silently mishandled. A coupling-free instance is
/// returned unchanged.
BlpInstance penalize_coupling(const BlpInstance& inst,
                              const PenaltyConfig& cfg);

/// For a min-max instance with binary leader: replaces the inner maximization
/// by its LP dual and linearizes the x·λ products, giving
///   min aᵀx + fᵀλ - Σ_{i,j} L_{j,i} u_{ij}
/// over Hx ≤ h, Fᵀλ + g = 0, λ ≥ 0, x binary, with a u_ij triple emitted for
/// every nonzero L_{j,i}. Variable order: x, λ, u (in (i,j) order of
/// emission). eta must match the scaling baked into the instance rows; it is
/// validated positive and recorded nowhere else.
MilpProblem minmax_dual_milp(const BlpInstance& inst, const Vec& M,
                             const Rational& eta);

}  // namespace bigm
