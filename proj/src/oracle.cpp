#include "bigm/oracle.hpp"

#include "bigm/branch_bound.hpp"
#include "bigm/simplex.hpp"

namespace bigm {

namespace {

void set_block(Vec& row, int offset, const Vec& coeffs) {
  for (std::size_t i = 0; i < coeffs.size(); ++i) row[offset + i] = coeffs[i];
}

// Follower LP at fixed x: min gᵀy s.t. Fy ≤ f - Lx.
LpProblem follower_lp(const BlpInstance& inst, const Vec& x) {
  LpProblem p = LpProblem::with_vars(inst.n_f);
  p.c = inst.g;
  for (int r = 0; r < inst.m_f; ++r)
    p.add_ineq(inst.F[r], inst.f[r] - dot(inst.L[r], x));
  return p;
}

// The KKT system with a fixed complementarity pattern, over (x, y, λ):
// coupling, follower primal rows, stationarity, λ_j = 0 or row j tight.
MilpProblem pattern_problem(const BlpInstance& inst, long long pattern) {
  const int x_off = 0, y_off = inst.n_l, lam_off = y_off + inst.n_f;
  const int n = lam_off + inst.m_f;
  MilpProblem m;
  m.lp = LpProblem::with_vars(n);
  set_block(m.lp.c, x_off, inst.a);
  set_block(m.lp.c, y_off, inst.d);
  for (int r = 0; r < inst.m_l; ++r) {
    Vec row = zeros(n);
    set_block(row, x_off, inst.H[r]);
    set_block(row, y_off, inst.G[r]);
    m.lp.add_ineq(std::move(row), inst.h[r]);
  }
  for (int r = 0; r < inst.m_f; ++r) {
    Vec row = zeros(n);
    set_block(row, x_off, inst.L[r]);
    set_block(row, y_off, inst.F[r]);
    if ((pattern >> r) & 1) {
      m.lp.add_eq(std::move(row), inst.f[r]);  // tight
    } else {
      m.lp.add_ineq(std::move(row), inst.f[r]);
    }
  }
  for (int i = 0; i < inst.n_f; ++i) {
    Vec row = zeros(n);
    for (int j = 0; j < inst.m_f; ++j) row[lam_off + j] = inst.F[j][i];
    m.lp.add_eq(std::move(row), -inst.g[i]);
  }
  for (int j = 0; j < inst.m_f; ++j) {
    m.lp.lb[lam_off + j] = Rational(0);
    if (!((pattern >> j) & 1)) m.lp.ub[lam_off + j] = Rational(0);
  }
  if (inst.leader_binary)
    for (int i = 0; i < inst.n_l; ++i) m.mark_binary(x_off + i);
  return m;
}

void check_standing_assumption(const BlpInstance& inst) {
  // Nonempty joint feasible set.
  LpProblem hp = high_point_polytope(inst);
  LpOutcome feas = solve_lp(hp);
  if (feas.status == LpStatus::Infeasible)
    throw A1ViolationError("joint feasible region is empty");
  // Leader variables bounded over it.
  for (int i = 0; i < inst.n_l; ++i) {
    for (int sgn = -1; sgn <= 1; sgn += 2) {
      LpProblem dir = hp;
      dir.c = zeros(hp.num_vars);
      dir.c[i] = Rational(sgn);
      if (solve_lp(dir).status == LpStatus::Unbounded)
        throw A1ViolationError("leader variable x" + std::to_string(i) +
                               " is unbounded over the joint region");
    }
  }
  // Follower bounded below for every x: the dual polyhedron must be nonempty.
  if (inst.m_f == 0) {
    for (const auto& gi : inst.g)
      if (gi != 0)
        throw A1ViolationError("unconstrained follower with nonzero objective");
    return;
  }
  LpProblem dual = LpProblem::with_vars(inst.m_f);
  for (int i = 0; i < inst.n_f; ++i) {
    Vec row(inst.m_f);
    for (int j = 0; j < inst.m_f; ++j) row[j] = inst.F[j][i];
    dual.add_eq(std::move(row), -inst.g[i]);
  }
  for (int j = 0; j < inst.m_f; ++j) dual.lb[j] = Rational(0);
  if (solve_lp(dual).status == LpStatus::Infeasible)
    throw A1ViolationError(
        "dual polyhedron is empty: follower is unbounded somewhere");
}

}  // namespace

FollowerCheck follower_check(const BlpInstance& inst, const Vec& x,
                             const Vec& y) {
  inst.validate();
  if (static_cast<int>(x.size()) != inst.n_l ||
      static_cast<int>(y.size()) != inst.n_f)
    throw ValidationError("point dimensions do not match the instance");
  FollowerCheck out;
  for (int r = 0; r < inst.m_f; ++r)
    if (dot(inst.L[r], x) + dot(inst.F[r], y) > inst.f[r]) return out;
  LpOutcome o = solve_lp(follower_lp(inst, x));
  if (o.status == LpStatus::Unbounded)
    throw A1ViolationError("follower is unbounded at the given leader point");
  // y itself is feasible, so the LP cannot be infeasible.
  out.gap = dot(inst.g, y) - o.objective;
  out.ok = (*out.gap == 0);
  return out;
}

OracleResult bilevel_solve(const BlpInstance& inst, int cap) {
  inst.validate();
  if (inst.m_f > cap)
    throw CapExceededError("bilevel_solve: " + std::to_string(inst.m_f) +
                           " follower rows exceed cap " + std::to_string(cap));
  if (inst.leader_binary && inst.n_l > 62)
    throw CapExceededError("binary leader too large");
  check_standing_assumption(inst);

  OracleResult res;
  bool any = false;
  long long best_min_pattern = -1, best_max_pattern = -1;
  for (long long pattern = 0; pattern < (1LL << inst.m_f); ++pattern) {
    MilpProblem m = pattern_problem(inst, pattern);
    MilpOutcome lo = solve_milp(m);
    ++res.patterns_solved;
    if (lo.status != MilpStatus::Optimal) continue;
    if (!any || lo.objective < res.z_star) {
      res.z_star = lo.objective;
      best_min_pattern = pattern;
    }
    MilpProblem neg = m;
    for (auto& cj : neg.lp.c) cj = -cj;
    try {
      MilpOutcome hi = solve_milp(neg);
      Rational hi_val = -hi.objective;
      if (best_max_pattern < 0 || hi_val > res.z_max) {
        res.z_max = hi_val;
        best_max_pattern = pattern;
      }
    } catch (const ValidationError&) {
      // leader objective unbounded above inside this pattern
      res.z_max_unbounded = true;
    }
    any = true;
  }
  if (!any)
    throw ValidationError("no bilevel-feasible point exists for this instance");

  // Canonical witnesses: inside the chosen pattern, pin the objective and
  // then minimize each coordinate in turn.
  auto refine = [&](long long pattern, const Rational& value) {
    MilpProblem m = pattern_problem(inst, pattern);
    Vec obj_row = m.lp.c;
    m.lp.add_eq(std::move(obj_row), value);
    const int fixed = inst.n_l + inst.n_f;
    Vec point;
    for (int kvar = 0; kvar < fixed; ++kvar) {
      MilpProblem stage = m;
      stage.lp.c = zeros(m.lp.num_vars);
      stage.lp.c[kvar] = 1;
      MilpOutcome o = solve_milp(stage);
      if (o.status != MilpStatus::Optimal)
        throw ValidationError("witness refinement lost feasibility");
      Vec pin = zeros(m.lp.num_vars);
      pin[kvar] = 1;
      m.lp.add_eq(std::move(pin), o.primal[kvar]);
      point = o.primal;
    }
    BilevelPoint pt;
    pt.x.assign(point.begin(), point.begin() + inst.n_l);
    pt.y.assign(point.begin() + inst.n_l, point.begin() + fixed);
    pt.lambda = Vec(point.begin() + fixed, point.end());
    Vec u(inst.m_f, Rational(0)), s(inst.m_f, Rational(0));
    for (int j = 0; j < inst.m_f; ++j) {
      u[j] = Rational((pattern >> j) & 1);
      s[j] = inst.f[j] - dot(inst.L[j], pt.x) - dot(inst.F[j], pt.y);
    }
    pt.u = std::move(u);
    pt.s = std::move(s);
    return pt;
  };
  res.witness_min = refine(best_min_pattern, res.z_star);
  if (!res.z_max_unbounded) res.witness_max = refine(best_max_pattern, res.z_max);
  return res;
}

std::optional<Vec> optimistic_response(const BlpInstance& inst, const Vec& x) {
  inst.validate();
  if (static_cast<int>(x.size()) != inst.n_l)
    throw ValidationError("leader point dimension mismatch");
  // Membership in the induced region: some y satisfies all joint rows.
  {
    LpProblem joint = LpProblem::with_vars(inst.n_f);
    for (int r = 0; r < inst.m_l; ++r)
      joint.add_ineq(inst.G[r], inst.h[r] - dot(inst.H[r], x));
    for (int r = 0; r < inst.m_f; ++r)
      joint.add_ineq(inst.F[r], inst.f[r] - dot(inst.L[r], x));
    if (solve_lp(joint).status == LpStatus::Infeasible)
      throw ValidationError("leader point lies outside the induced region");
  }
  LpProblem fol = follower_lp(inst, x);
  LpOutcome first = solve_lp(fol);
  if (first.status == LpStatus::Unbounded)
    throw A1ViolationError("follower is unbounded at the given leader point");
  if (first.status == LpStatus::Infeasible)
    throw ValidationError("follower is infeasible at the given leader point");
  // Second stage: among follower optima, minimize the leader's y-term while
  // also meeting the coupling rows.
  LpProblem second = fol;
  second.c = inst.d;
  second.add_eq(inst.g, first.objective);
  for (int r = 0; r < inst.m_l; ++r)
    second.add_ineq(inst.G[r], inst.h[r] - dot(inst.H[r], x));
  LpOutcome o = solve_lp(second);
  if (o.status == LpStatus::Infeasible) return std::nullopt;
  if (o.status == LpStatus::Unbounded)
    throw A1ViolationError("leader objective unbounded over follower optima");
  return o.primal;
}

}  // namespace bigm
