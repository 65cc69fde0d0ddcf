#include "bigm/branch_bound.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace bigm {

namespace {

struct SearchState {
  const MilpProblem* problem;
  std::optional<Rational> incumbent_value;
  Vec incumbent;
  long long nodes = 0;
};

int first_fractional(const MilpProblem& p, const Vec& x) {
  for (int v : p.binary)
    if (!is_integral(x[v])) return v;
  return -1;
}

void dfs(SearchState& st, LpProblem relax) {
  ++st.nodes;
  LpOutcome o = solve_lp(relax);
  if (o.status == LpStatus::Infeasible) return;
  if (o.status == LpStatus::Unbounded)
    throw ValidationError("relaxation is unbounded; binary block must be boxed");
  if (st.incumbent_value && o.objective >= *st.incumbent_value) return;
  int branch = first_fractional(*st.problem, o.primal);
  if (branch < 0) {
    st.incumbent_value = o.objective;
    st.incumbent = o.primal;
    return;
  }
  for (int side = 0; side < 2; ++side) {
    LpProblem child = relax;
    child.lb[branch] = Rational(side);
    child.ub[branch] = Rational(side);
    dfs(st, std::move(child));
  }
}

}  // namespace

MilpOutcome solve_milp(const MilpProblem& p) {
  p.validate();
  SearchState st{&p};
  dfs(st, p.lp);
  MilpOutcome out;
  out.nodes = st.nodes;
  if (!st.incumbent_value) {
    out.status = MilpStatus::Infeasible;
    return out;
  }
  out.status = MilpStatus::Optimal;
  out.objective = *st.incumbent_value;
  out.primal = std::move(st.incumbent);
  return out;
}

std::optional<BinaryOptima> enumerate_binary_optima(const MilpProblem& p,
                                                    int cap) {
  p.validate();
  const int k = static_cast<int>(p.binary.size());
  if (k > cap)
    throw CapExceededError("enumerate_binary_optima: " + std::to_string(k) +
                           " binaries exceed cap " + std::to_string(cap));
  std::optional<Rational> best;
  std::set<Vec, bool (*)(const Vec&, const Vec&)> points(lex_less);
  for (long long mask = 0; mask < (1LL << k); ++mask) {
    LpProblem fixed = p.lp;
    for (int i = 0; i < k; ++i) {
      Rational bit((mask >> i) & 1);
      fixed.lb[p.binary[i]] = bit;
      fixed.ub[p.binary[i]] = bit;
    }
    LpOutcome o = solve_lp(fixed);
    if (o.status == LpStatus::Unbounded)
      throw ValidationError("relaxation is unbounded; binary block must be boxed");
    if (o.status != LpStatus::Optimal) continue;
    if (!best || o.objective < *best) {
      best = o.objective;
      points.clear();
    }
    if (o.objective == *best) points.insert(o.primal);
  }
  if (!best) return std::nullopt;
  BinaryOptima out;
  out.objective = *best;
  out.points.assign(points.begin(), points.end());
  return out;
}

}  // namespace bigm
