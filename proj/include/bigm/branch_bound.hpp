#pragma once

#include <optional>
#include <vector>

#include "bigm/model.hpp"
#include "bigm/simplex.hpp"

namespace bigm {

enum class MilpStatus { Optimal, Infeasible };

struct MilpOutcome {
  MilpStatus status = MilpStatus::Optimal;
  Vec primal;
  Rational objective;
  long long nodes = 0;
};

/// Depth-first branch and bound over the binary variables. Branches on the
/// lowest-index fractional binary, explores the 0 branch first, and keeps the
/// first optimum it proves; with exact arithmetic this is deterministic.
/// Throws ValidationError if any relaxation is unbounded (a correctly built
/// reformulation is always box-bounded in its binary block).
MilpOutcome solve_milp(const MilpProblem& p);

/// All optimal 0/1 assignments of the binary block, each completed to a full
/// primal vector by re-solving the fixed LP. Enumerates every assignment, so
/// the binary count is capped.
struct BinaryOptima {
  Rational objective;
  std::vector<Vec> points;  // lexicographically sorted, deduplicated
};
std::optional<BinaryOptima> enumerate_binary_optima(const MilpProblem& p,
                                                    int cap = 20);

}  // namespace bigm
