#include "bigm/verify.hpp"

#include <algorithm>

#include "bigm/oracle.hpp"
#include "bigm/parallel.hpp"
#include "bigm/simplex.hpp"

namespace bigm {

namespace {

using nlohmann::json;

const char* kind_name(ProblemKind k) {
  switch (k) {
    case ProblemKind::BlpD: return "optimality";
    case ProblemKind::BlpDEps: return "eps-optimality";
    case ProblemKind::GvpD: return "dual-vertex-bound";
    case ProblemKind::GvpDPrime: return "optimal-dual-vertex-bound";
    case ProblemKind::Audit: return "bigm-audit";
  }
  return "?";
}

// Dual polyhedron of the follower: {λ ≥ 0 : Fᵀλ + g = 0}.
LpProblem dual_polyhedron(const BlpInstance& inst) {
  LpProblem p = LpProblem::with_vars(inst.m_f);
  for (int i = 0; i < inst.n_f; ++i) {
    Vec row(inst.m_f);
    for (int j = 0; j < inst.m_f; ++j) row[j] = inst.F[j][i];
    p.add_eq(std::move(row), -inst.g[i]);
  }
  for (int j = 0; j < inst.m_f; ++j) p.lb[j] = Rational(0);
  return p;
}

// Shared feasibility screen for the candidate point; fills the report and
// returns false when the point is not bilevel-feasible.
bool screen_candidate(const BlpInstance& inst, const BilevelPoint& cand,
                      VerificationReport& rep) {
  if (static_cast<int>(cand.x.size()) != inst.n_l ||
      static_cast<int>(cand.y.size()) != inst.n_f)
    throw ValidationError("candidate dimensions do not match the instance");
  if (inst.leader_binary) {
    for (int i = 0; i < inst.n_l; ++i) {
      if (cand.x[i] != 0 && cand.x[i] != 1) {
        rep.verdict = Verdict::No;
        rep.reason = "leader variable x" + std::to_string(i) + " is not binary";
        return false;
      }
    }
  }
  for (int r = 0; r < inst.m_l; ++r) {
    if (dot(inst.H[r], cand.x) + dot(inst.G[r], cand.y) > inst.h[r]) {
      rep.verdict = Verdict::No;
      rep.reason = "coupling row " + std::to_string(r) + " violated";
      return false;
    }
  }
  FollowerCheck fc = follower_check(inst, cand.x, cand.y);
  if (!fc.ok) {
    rep.verdict = Verdict::No;
    rep.reason = fc.gap ? "follower-suboptimal response, gap " + to_string(*fc.gap)
                        : "follower rows violated";
    return false;
  }
  return true;
}

}  // namespace

void ApproxQuery::validate() const {
  if (epsilon <= 0 || epsilon >= 1)
    throw ValidationError("relative tolerance must lie strictly between 0 and 1");
}

VerificationReport verify_bilevel_optimality(const BlpInstance& inst,
                                             const BilevelPoint& cand,
                                             int cap) {
  inst.validate();
  VerificationReport rep;
  rep.problem_kind = ProblemKind::BlpD;
  if (!screen_candidate(inst, cand, rep)) return rep;
  rep.candidate_value = inst.leader_objective(cand.x, cand.y);
  OracleResult oracle = bilevel_solve(inst, cap);
  rep.z_star = oracle.z_star;
  if (!oracle.z_max_unbounded) rep.z_max = oracle.z_max;
  if (*rep.candidate_value == oracle.z_star) {
    rep.verdict = Verdict::Yes;
    return rep;
  }
  rep.verdict = Verdict::No;
  rep.reason = "a strictly better bilevel-feasible point exists";
  rep.better_point = oracle.witness_min;
  return rep;
}

VerificationReport verify_eps_optimality(const BlpInstance& inst,
                                         const BilevelPoint& cand,
                                         const ApproxQuery& q, int cap) {
  inst.validate();
  q.validate();
  VerificationReport rep;
  rep.problem_kind = ProblemKind::BlpDEps;
  if (!screen_candidate(inst, cand, rep)) return rep;
  rep.candidate_value = inst.leader_objective(cand.x, cand.y);
  OracleResult oracle = bilevel_solve(inst, cap);
  rep.z_star = oracle.z_star;
  if (!oracle.z_max_unbounded) rep.z_max = oracle.z_max;
  const Rational gap = *rep.candidate_value - oracle.z_star;
  const Rational range = oracle.z_max - oracle.z_star;
  // An unbounded range makes every feasible point relatively near-optimal.
  const bool ok = oracle.z_max_unbounded ||
                  ((range == 0) ? (gap == 0) : (gap <= q.epsilon * range));
  rep.verdict = ok ? Verdict::Yes : Verdict::No;
  if (!ok) {
    rep.reason = "relative gap " + to_string(gap) + " exceeds " +
                 to_string(q.epsilon) + " of range " + to_string(range);
    rep.better_point = oracle.witness_min;
  }
  return rep;
}

VerificationReport gvp_d(const BlpInstance& inst, int j, const Rational& Md,
                         int cap) {
  inst.validate();
  if (j < 0 || j >= inst.m_f)
    throw ValidationError("dual component index out of range");
  VerificationReport rep;
  rep.problem_kind = ProblemKind::GvpD;
  PolyhedronVertices P = enumerate_vertices(dual_polyhedron(inst), cap, false);
  if (P.vertices.empty()) {
    rep.verdict = Verdict::Yes;
    rep.vacuous = true;
    rep.reason = "dual polyhedron is empty";
    return rep;
  }
  Rational worst(0);
  for (const auto& v : P.vertices) {
    if (v[j] > worst) worst = v[j];
    if (v[j] > Md) {
      rep.verdict = Verdict::No;
      rep.reason = "dual vertex exceeds the bound at component " + std::to_string(j);
      rep.violating_vertex = v;
      return rep;
    }
  }
  rep.verdict = Verdict::Yes;
  rep.dual_vertex_max = worst;
  return rep;
}

VerificationReport gvp_d_prime(const BlpInstance& inst, const Rational& Md,
                               int cap, int jobs) {
  inst.validate();
  VerificationReport rep;
  rep.problem_kind = ProblemKind::GvpDPrime;
  PolyhedronVertices P = enumerate_vertices(dual_polyhedron(inst), cap, true);
  if (P.vertices.empty()) {
    rep.verdict = Verdict::Yes;
    rep.vacuous = true;
    rep.reason = "dual polyhedron is empty";
    return rep;
  }
  LpProblem hp = high_point_polytope(inst);
  // An extreme ray that improves the dual objective λᵀ(Lx - f) for some
  // feasible leader point means the dual optimum is attained only in the
  // limit there; that breaks the problem's standing assumption.
  for (const auto& ray : P.rays) {
    LpProblem probe = hp;
    probe.c = zeros(hp.num_vars);
    for (int i = 0; i < inst.n_l; ++i)
      for (int j = 0; j < inst.m_f; ++j) probe.c[i] -= ray[j] * inst.L[j][i];
    LpOutcome o = solve_lp(probe);
    if (o.status == LpStatus::Infeasible) break;  // empty H_x, handled below
    if (o.status == LpStatus::Unbounded || -o.objective > dot(ray, inst.f))
      throw A1ViolationError(
          "dual polyhedron has an improving extreme ray over the leader region");
  }

  std::vector<const Vec*> bounded, violating;
  for (const auto& v : P.vertices) {
    bool in_box = true;
    for (const auto& comp : v)
      if (comp > Md) { in_box = false; break; }
    (in_box ? bounded : violating).push_back(&v);
  }
  if (violating.empty()) {
    rep.verdict = Verdict::Yes;
    rep.reason = "every dual vertex is within the bound";
    return rep;
  }
  if (bounded.empty()) {
    LpOutcome feas = solve_lp(hp);
    if (feas.status == LpStatus::Infeasible) {
      rep.verdict = Verdict::Yes;
      rep.vacuous = true;
      rep.reason = "leader region is empty";
      return rep;
    }
    rep.verdict = Verdict::No;
    rep.reason = "no dual vertex fits the bound";
    rep.leader_witness = Vec(feas.primal.begin(), feas.primal.begin() + inst.n_l);
    return rep;
  }

  // Per oversized vertex v: find a leader point where v attains the dual
  // optimum and strictly beats every bounded vertex by the margin t.
  const int nv = static_cast<int>(violating.size());
  std::vector<std::optional<Vec>> hits(nv);
  parallel_for(nv, resolve_jobs(jobs), [&](int idx) {
    const Vec& v = *violating[idx];
    LpProblem lp = LpProblem::with_vars(hp.num_vars + 1);  // (x, y, t)
    const int t = hp.num_vars;
    for (int r = 0; r < hp.num_ineq(); ++r) {
      Vec row = hp.A[r];
      row.push_back(Rational(0));
      lp.add_ineq(std::move(row), hp.b[r]);
    }
    auto diff_row = [&](const Vec& w, bool with_t) {
      // (w - v)ᵀ L x [+ t] ≤ (w - v)ᵀ f
      Vec row = zeros(hp.num_vars + 1);
      for (int i = 0; i < inst.n_l; ++i)
        for (int j = 0; j < inst.m_f; ++j)
          row[i] += (w[j] - v[j]) * inst.L[j][i];
      if (with_t) row[t] = 1;
      Rational rhs(0);
      for (int j = 0; j < inst.m_f; ++j) rhs += (w[j] - v[j]) * inst.f[j];
      lp.add_ineq(std::move(row), rhs);
    };
    for (const auto& w : P.vertices) diff_row(w, false);
    for (const Vec* w : bounded) diff_row(*w, true);
    lp.c = zeros(hp.num_vars + 1);
    lp.c[t] = -1;  // maximize the margin
    LpOutcome o = solve_lp(lp);
    if (o.status == LpStatus::Unbounded) {
      // Margin grows without limit; cap it to pull out a witness point.
      lp.ub[t] = Rational(1);
      o = solve_lp(lp);
    }
    if (o.status == LpStatus::Optimal && -o.objective > 0)
      hits[idx] = Vec(o.primal.begin(), o.primal.begin() + inst.n_l);
  });
  for (int idx = 0; idx < nv; ++idx) {
    if (hits[idx]) {
      rep.verdict = Verdict::No;
      rep.reason = "at this leader point only oversized dual vertices are optimal";
      rep.leader_witness = *hits[idx];
      rep.violating_vertex = *violating[idx];
      return rep;
    }
  }
  rep.verdict = Verdict::Yes;
  return rep;
}

VerificationReport bigm_audit(const BlpInstance& inst, const BigMConfig& cfg,
                              int cap) {
  inst.validate();
  cfg.validate();
  VerificationReport rep;
  rep.problem_kind = ProblemKind::Audit;
  if (inst.m_f == 0) {
    rep.verdict = Verdict::Yes;
    rep.vacuous = true;
    rep.reason = "no follower rows to bound";
    return rep;
  }
  PolyhedronVertices P = enumerate_vertices(dual_polyhedron(inst), cap, false);
  if (P.vertices.empty())
    throw A1ViolationError(
        "dual polyhedron is empty: follower is unbounded somewhere");
  Vec comp_max(inst.m_f, Rational(0));
  for (const auto& v : P.vertices)
    for (int j = 0; j < inst.m_f; ++j)
      if (v[j] > comp_max[j]) comp_max[j] = v[j];
  rep.dual_vertex_max = *std::max_element(comp_max.begin(), comp_max.end());

  LpProblem hp = high_point_polytope(inst);
  Vec slack_max(inst.m_f, Rational(0));
  bool dominates = true;
  for (int j = 0; j < inst.m_f; ++j) {
    LpProblem probe = hp;
    probe.c = zeros(hp.num_vars);
    for (int i = 0; i < inst.n_l; ++i) probe.c[i] = inst.L[j][i];
    for (int i = 0; i < inst.n_f; ++i) probe.c[inst.n_l + i] = inst.F[j][i];
    LpOutcome o = solve_lp(probe);  // min row value = max slack
    if (o.status == LpStatus::Infeasible) {
      rep.verdict = Verdict::Yes;
      rep.vacuous = true;
      rep.reason = "joint feasible region is empty";
      return rep;
    }
    if (o.status == LpStatus::Unbounded) {
      rep.rows_without_finite_bound.push_back(j);
      dominates = false;
      continue;
    }
    slack_max[j] = inst.f[j] - o.objective;
    if (slack_max[j] > cfg.Mp) dominates = false;
  }
  rep.slack_max = slack_max;
  for (int j = 0; j < inst.m_f; ++j) {
    const Rational& md = cfg.per_row_M ? (*cfg.per_row_M)[j] : cfg.Md;
    if (comp_max[j] > md) dominates = false;
  }
  rep.verdict = dominates ? Verdict::Yes : Verdict::No;
  if (!dominates)
    rep.reason = rep.rows_without_finite_bound.empty()
                     ? "configured bounds do not dominate the audit values"
                     : "some follower rows have no finite slack bound";
  return rep;
}

nlohmann::json VerificationReport::to_json() const {
  json j;
  j["problem_kind"] = kind_name(problem_kind);
  j["verdict"] = verdict == Verdict::Yes ? "Yes" : "No";
  j["vacuous"] = vacuous;
  if (!reason.empty()) j["reason"] = reason;
  if (better_point) j["better_point"] = point_to_json(*better_point);
  if (violating_vertex) j["violating_vertex"] = vec_to_json(*violating_vertex);
  if (leader_witness) j["leader_witness"] = vec_to_json(*leader_witness);
  if (candidate_value) j["candidate_value"] = rational_to_json(*candidate_value);
  if (z_star) j["z_star"] = rational_to_json(*z_star);
  if (z_max) j["z_max"] = rational_to_json(*z_max);
  if (dual_vertex_max) j["dual_vertex_max"] = rational_to_json(*dual_vertex_max);
  if (slack_max) j["slack_max"] = vec_to_json(*slack_max);
  if (!rows_without_finite_bound.empty())
    j["rows_without_finite_bound"] = rows_without_finite_bound;
  return j;
}

}  // namespace bigm
