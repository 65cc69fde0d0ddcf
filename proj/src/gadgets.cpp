#include "bigm/gadgets.hpp"

#include <filesystem>
#include <utility>

#include "bigm/branch_bound.hpp"
#include "bigm/oracle.hpp"
#include "bigm/reformulate.hpp"
#include "bigm/simplex.hpp"
#include "bigm/verify.hpp"

namespace bigm {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Input structures

void IlpInstance::validate() const {
  int nn = n();
  if (nn <= 0) throw ValidationError("ILP needs at least one variable");
  for (const auto& ci : c)
    if (!is_integral(ci)) throw ValidationError("ILP objective must be integral");
  if (A.size() != b.size()) throw ValidationError("ILP row/rhs count mismatch");
  for (const auto& row : A) {
    if (static_cast<int>(row.size()) != nn)
      throw ValidationError("ILP row width mismatch");
    for (const auto& v : row)
      if (!is_integral(v)) throw ValidationError("ILP matrix must be integral");
  }
  for (const auto& bi : b) {
    if (!is_integral(bi)) throw ValidationError("ILP rhs must be integral");
    if (bi < 0) throw ValidationError("ILP rhs must be nonnegative (zero point feasible)");
  }
}

namespace {

// Exact min and max of cᵀx over the feasible 0/1 points.
std::pair<Rational, Rational> brute_force_range(const IlpInstance& ilp, int cap) {
  int n = ilp.n();
  if (n > cap) throw CapExceededError("ILP brute force capped at " + std::to_string(cap) + " variables");
  bool seen = false;
  Rational lo, hi;
  for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
    Vec x = zeros(n);
    for (int i = 0; i < n; ++i)
      if (mask & (1UL << i)) x[i] = 1;
    bool feas = true;
    for (size_t r = 0; r < ilp.A.size() && feas; ++r)
      if (dot(ilp.A[r], x) > ilp.b[r]) feas = false;
    if (!feas) continue;
    Rational v = dot(ilp.c, x);
    if (!seen || v < lo) lo = v;
    if (!seen || v > hi) hi = v;
    seen = true;
  }
  if (!seen) throw ValidationError("ILP has no feasible binary point");
  return {lo, hi};
}

}  // namespace

Rational IlpInstance::brute_force_min(int cap) const {
  return brute_force_range(*this, cap).first;
}

PartitionInstance PartitionInstance::from(Vec a, int cap) {
  PartitionInstance p;
  p.a = std::move(a);
  int n = static_cast<int>(p.a.size());
  if (n <= 0) throw ValidationError("partition instance needs entries");
  for (const auto& ai : p.a)
    if (!is_integral(ai) || ai <= 0)
      throw ValidationError("partition entries must be positive integers");
  Rational k = Rational(n) - Rational(1) / linf_norm(p.a);
  p.K = k;
  if (n > cap) throw CapExceededError("partition sign search capped at " + std::to_string(cap));
  for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
    Vec sigma(n);
    for (int i = 0; i < n; ++i) sigma[i] = (mask & (1UL << i)) ? Rational(1) : Rational(-1);
    if (dot(p.a, sigma) == 0) {
      p.sign_certificate = sigma;
      break;
    }
  }
  return p;
}

void PartitionInstance::validate() const {
  int n = static_cast<int>(a.size());
  if (n <= 0) throw ValidationError("partition instance needs entries");
  for (const auto& ai : a)
    if (!is_integral(ai) || ai <= 0)
      throw ValidationError("partition entries must be positive integers");
  Rational k = Rational(n) - Rational(1) / linf_norm(a);
  if (K != k) throw ValidationError("partition threshold K is inconsistent");
  if (sign_certificate) {
    if (sign_certificate->size() != a.size())
      throw ValidationError("sign certificate length mismatch");
    for (const auto& s : *sign_certificate)
      if (s != 1 && s != -1) throw ValidationError("sign certificate must be +/-1");
    if (dot(a, *sign_certificate) != 0)
      throw ValidationError("sign certificate does not balance");
  }
}

void Digraph::validate() const {
  if (num_vertices < 3) throw ValidationError("digraph needs at least 3 vertices");
  if (s == t || s < 0 || t < 0 || s >= num_vertices || t >= num_vertices)
    throw ValidationError("bad source/sink");
  bool has_st = false;
  std::vector<std::vector<bool>> seen(num_vertices,
                                      std::vector<bool>(num_vertices, false));
  for (const auto& [u, v] : arcs) {
    if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices)
      throw ValidationError("arc endpoint out of range");
    if (u == v) throw ValidationError("self-loops are not allowed");
    if (seen[u][v]) throw ValidationError("duplicate arc");
    seen[u][v] = true;
    if (u == s && v == t) has_st = true;
  }
  if (!has_st) throw ValidationError("arc (s,t) must be present");
}

bool Digraph::has_hamiltonian_st_path() const {
  std::vector<std::vector<int>> adj(num_vertices);
  for (const auto& [u, v] : arcs) adj[u].push_back(v);
  unsigned full = (1U << num_vertices) - 1;
  // DFS with a visited mask; a simple s-t path covering V ends at t.
  std::vector<std::pair<int, unsigned>> stack{{s, 1U << s}};
  while (!stack.empty()) {
    auto [v, mask] = stack.back();
    stack.pop_back();
    if (mask == full && v == t) return true;
    for (int w : adj[v])
      if (!(mask & (1U << w))) stack.push_back({w, mask | (1U << w)});
  }
  return false;
}

// ---------------------------------------------------------------------------
// Shared builders

namespace {

void name_block(std::vector<std::string>& names, const std::string& stem, int count) {
  for (int i = 0; i < count; ++i) names.push_back(stem + std::to_string(i));
}

ExpectedFact fact(std::string kind, std::string label, json data) {
  return ExpectedFact{std::move(kind), std::move(label), std::move(data)};
}

// The integrality-enforcing embedding: leader min cᵀx over Ax ≤ b, 0 ≤ x ≤ 1,
// coupling caps the follower response at zero. The follower's optimal
// response is min(x_i/2, 1-x_i) ≥ 0, so the cap holds exactly at 0/1 leader
// points (and one-sided coupling rows keep the exact-penalty path available).
BlpInstance ilp_embedding(const IlpInstance& ilp, bool leader_binary) {
  ilp.validate();
  int n = ilp.n();
  int mA = static_cast<int>(ilp.A.size());
  BlpInstance inst;
  inst.n_l = n;
  inst.n_f = n;
  inst.m_l = mA + 3 * n;
  inst.m_f = 2 * n;
  inst.a = ilp.c;
  inst.d = zeros(n);
  inst.g = Vec(n, Rational(-2));
  inst.H.assign(inst.m_l, zeros(n));
  inst.G.assign(inst.m_l, zeros(n));
  inst.h = zeros(inst.m_l);
  for (int r = 0; r < mA; ++r) {
    inst.H[r] = ilp.A[r];
    inst.h[r] = ilp.b[r];
  }
  for (int i = 0; i < n; ++i) {
    inst.H[mA + i][i] = 1;              // x_i ≤ 1
    inst.h[mA + i] = 1;
    inst.H[mA + n + i][i] = -1;         // -x_i ≤ 0
    inst.G[mA + 2 * n + i][i] = 1;      // y_i ≤ 0
  }
  inst.L.assign(inst.m_f, zeros(n));
  inst.F.assign(inst.m_f, zeros(n));
  inst.f = zeros(inst.m_f);
  for (int i = 0; i < n; ++i) {
    inst.L[i][i] = -1;                  // 2y_i ≤ x_i
    inst.F[i][i] = 2;
    inst.L[n + i][i] = 1;               // y_i ≤ 1 - x_i
    inst.F[n + i][i] = 1;
    inst.f[n + i] = 1;
  }
  inst.leader_binary = leader_binary;
  inst.validate();
  return inst;
}

// Collapsed two-sided form of the embedding's KKT MILP: both x and λ live in
// [0,1] and u ties them to opposite corners.
MilpProblem collapsed_kkt_milp(const IlpInstance& ilp, const BigMConfig& cfg) {
  int n = ilp.n();
  Rational md = cfg.Md, mp = cfg.Mp;
  Rational half_md = md / 2;
  MilpProblem m;
  m.lp = LpProblem::with_vars(3 * n);
  m.lp.var_names.clear();
  name_block(m.lp.var_names, "x", n);
  name_block(m.lp.var_names, "lam", n);
  name_block(m.lp.var_names, "u", n);
  for (int i = 0; i < 3 * n; ++i) {
    m.lp.lb[i] = Rational(0);
    m.lp.ub[i] = Rational(1);
  }
  for (int i = 0; i < n; ++i) m.lp.c[i] = ilp.c[i];
  for (size_t r = 0; r < ilp.A.size(); ++r) {
    Vec row = zeros(3 * n);
    for (int i = 0; i < n; ++i) row[i] = ilp.A[r][i];
    m.lp.add_ineq(row, ilp.b[r]);
  }
  for (int i = 0; i < n; ++i) {
    Vec r1 = zeros(3 * n);  // λ_i ≤ Md u_i
    r1[n + i] = 1;
    r1[2 * n + i] = -md;
    m.lp.add_ineq(r1, Rational(0));
    Vec r2 = zeros(3 * n);  // x_i ≤ Mp (1 - u_i)
    r2[i] = 1;
    r2[2 * n + i] = mp;
    m.lp.add_ineq(r2, mp);
    Vec r3 = zeros(3 * n);  // 1 - λ_i ≤ (Md/2)(1 - u_i)
    r3[n + i] = -1;
    r3[2 * n + i] = half_md;
    m.lp.add_ineq(r3, half_md - 1);
    Vec r4 = zeros(3 * n);  // 1 - x_i ≤ Mp u_i
    r4[i] = -1;
    r4[2 * n + i] = -mp;
    m.lp.add_ineq(r4, Rational(-1));
  }
  for (int i = 0; i < n; ++i) m.mark_binary(2 * n + i);
  m.validate();
  return m;
}

json zero_point_values(const std::string& stem, int n, const Rational& val) {
  json vals = json::object();
  for (int i = 0; i < n; ++i) vals[stem + std::to_string(i)] = rational_to_json(val);
  return vals;
}

}  // namespace

// ---------------------------------------------------------------------------
// Generators

GadgetBundle gadget_ilp_kkt(const IlpInstance& ilp, const BigMConfig& cfg) {
  cfg.validate();
  if (cfg.per_row_M)
    throw ValidationError("per-row bounds are not part of this construction");
  int n = ilp.n();
  GadgetBundle b;
  b.family = "ilp-kkt";
  b.cfg = cfg;
  b.instance = ilp_embedding(ilp, false);
  b.milps["kkt"] = kkt_milp(*b.instance, cfg).milp;
  b.milps["collapsed"] = collapsed_kkt_milp(ilp, cfg);
  if (cfg.Md == 1 && cfg.Mp == 1) {
    json obj;
    obj["value"] = rational_to_json(Rational(0));
    obj["source"] = "asserted";
    b.facts.push_back(fact("milp_objective", "collapsed", obj));
    b.facts.push_back(fact("milp_objective", "kkt", obj));
    json uniq;
    uniq["value"] = rational_to_json(Rational(0));
    json vals = zero_point_values("x", n, Rational(0));
    vals.update(zero_point_values("lam", n, Rational(1)));
    vals.update(zero_point_values("u", n, Rational(1)));
    uniq["values"] = vals;
    uniq["source"] = "asserted";
    b.facts.push_back(fact("unique_binary_optimum", "collapsed", uniq));
  } else if (cfg.Md >= 2 && cfg.Mp >= 2) {
    json obj;
    obj["value"] = rational_to_json(ilp.brute_force_min());
    obj["source"] = "derived";
    b.facts.push_back(fact("milp_objective", "collapsed", obj));
    b.facts.push_back(fact("milp_objective", "kkt", obj));
  }
  if (2 * n <= 8) {
    auto [lo, hi] = brute_force_range(ilp, 20);
    json oz;
    oz["z_star"] = rational_to_json(lo);
    oz["z_max"] = rational_to_json(hi);
    oz["source"] = "derived";
    b.facts.push_back(fact("oracle_z", "instance", oz));
  }
  return b;
}

GadgetBundle gadget_epigraph(const IlpInstance& ilp) {
  ilp.validate();
  int n = ilp.n();
  Rational M = Rational(n) * linf_norm(ilp.c) + 1;
  GadgetBundle b;
  b.family = "epigraph";
  b.cfg = BigMConfig{M, M, std::nullopt};
  MilpProblem m;
  m.lp = LpProblem::with_vars(n + 1);
  m.lp.var_names.clear();
  name_block(m.lp.var_names, "x", n);
  m.lp.var_names.push_back("z");
  for (int i = 0; i <= n; ++i) {
    m.lp.lb[i] = Rational(0);
    m.lp.ub[i] = Rational(1);
  }
  m.lp.c[n] = -1;  // max z
  for (size_t r = 0; r < ilp.A.size(); ++r) {
    Vec row = zeros(n + 1);
    for (int i = 0; i < n; ++i) row[i] = ilp.A[r][i];
    m.lp.add_ineq(row, ilp.b[r]);
  }
  Vec gate = zeros(n + 1);  // cᵀx + M z ≤ M - 1: z = 1 needs cᵀx ≤ -1
  for (int i = 0; i < n; ++i) gate[i] = ilp.c[i];
  gate[n] = M;
  m.lp.add_ineq(gate, M - 1);
  for (int i = 0; i <= n; ++i) m.mark_binary(i);
  m.validate();
  b.milps["epigraph"] = m;
  Rational ilp_min = ilp.brute_force_min();
  json obj;
  obj["value"] = rational_to_json(ilp_min == 0 ? Rational(0) : Rational(-1));
  obj["source"] = "derived";
  b.facts.push_back(fact("milp_objective", "epigraph", obj));
  return b;
}

GadgetBundle gadget_sd(const IlpInstance& ilp, const Rational& M) {
  ilp.validate();
  if (M <= 0) throw ValidationError("the product bound must be positive");
  int n = ilp.n();
  GadgetBundle b;
  b.family = "strong-duality";
  b.cfg = BigMConfig{M, M, std::nullopt};
  b.instance = ilp_embedding(ilp, true);

  // Full linearized form: duals (λ, ν), products (u, v) = x·(λ, ν), one
  // strong-duality equality tying the dual objective to the pinned primal.
  MilpProblem sd;
  sd.lp = LpProblem::with_vars(5 * n);
  sd.lp.var_names.clear();
  name_block(sd.lp.var_names, "x", n);
  name_block(sd.lp.var_names, "lam", n);
  name_block(sd.lp.var_names, "nu", n);
  name_block(sd.lp.var_names, "u", n);
  name_block(sd.lp.var_names, "v", n);
  for (int i = 0; i < 5 * n; ++i) sd.lp.lb[i] = Rational(0);
  for (int i = 0; i < n; ++i) {
    sd.lp.ub[i] = Rational(1);
    sd.lp.c[i] = ilp.c[i];
  }
  for (size_t r = 0; r < ilp.A.size(); ++r) {
    Vec row = zeros(5 * n);
    for (int i = 0; i < n; ++i) row[i] = ilp.A[r][i];
    sd.lp.add_ineq(row, ilp.b[r]);
  }
  for (int i = 0; i < n; ++i) {
    int xl = i, la = n + i, nu = 2 * n + i, uu = 3 * n + i, vv = 4 * n + i;
    Vec r1 = zeros(5 * n);  // u_i ≤ λ_i
    r1[uu] = 1;
    r1[la] = -1;
    sd.lp.add_ineq(r1, Rational(0));
    Vec r2 = zeros(5 * n);  // v_i ≤ ν_i
    r2[vv] = 1;
    r2[nu] = -1;
    sd.lp.add_ineq(r2, Rational(0));
    Vec r3 = zeros(5 * n);  // u_i ≤ M x_i
    r3[uu] = 1;
    r3[xl] = -M;
    sd.lp.add_ineq(r3, Rational(0));
    Vec r4 = zeros(5 * n);  // v_i ≤ M x_i
    r4[vv] = 1;
    r4[xl] = -M;
    sd.lp.add_ineq(r4, Rational(0));
    Vec r5 = zeros(5 * n);  // u_i ≥ λ_i + M (x_i - 1)
    r5[la] = 1;
    r5[xl] = M;
    r5[uu] = -1;
    sd.lp.add_ineq(r5, M);
    Vec r6 = zeros(5 * n);  // v_i ≥ ν_i + M (x_i - 1)
    r6[nu] = 1;
    r6[xl] = M;
    r6[vv] = -1;
    sd.lp.add_ineq(r6, M);
    Vec e1 = zeros(5 * n);  // dual feasibility 2λ_i + ν_i = 2
    e1[la] = 2;
    e1[nu] = 1;
    sd.lp.add_eq(e1, Rational(2));
  }
  Vec sdrow = zeros(5 * n);  // dual objective Σ(u_i + ν_i - v_i) pinned at 0
  for (int i = 0; i < n; ++i) {
    sdrow[3 * n + i] = -1;
    sdrow[2 * n + i] = -1;
    sdrow[4 * n + i] = 1;
  }
  sd.lp.add_eq(sdrow, Rational(0));
  for (int i = 0; i < n; ++i) sd.mark_binary(i);
  sd.validate();
  b.milps["sd"] = sd;

  // Reduced form after eliminating ν, u, v.
  MilpProblem red;
  red.lp = LpProblem::with_vars(2 * n);
  red.lp.var_names.clear();
  name_block(red.lp.var_names, "x", n);
  name_block(red.lp.var_names, "lam", n);
  for (int i = 0; i < 2 * n; ++i) {
    red.lp.lb[i] = Rational(0);
    red.lp.ub[i] = Rational(1);
  }
  for (int i = 0; i < n; ++i) red.lp.c[i] = ilp.c[i];
  for (size_t r = 0; r < ilp.A.size(); ++r) {
    Vec row = zeros(2 * n);
    for (int i = 0; i < n; ++i) row[i] = ilp.A[r][i];
    red.lp.add_ineq(row, ilp.b[r]);
  }
  Rational half_m = M / 2;
  for (int i = 0; i < n; ++i) {
    Vec r1 = zeros(2 * n);  // 1 - λ_i ≤ (M/2) x_i
    r1[n + i] = -1;
    r1[i] = -half_m;
    red.lp.add_ineq(r1, Rational(-1));
    Vec r2 = zeros(2 * n);  // λ_i + M (x_i - 1) ≤ 0
    r2[n + i] = 1;
    r2[i] = M;
    red.lp.add_ineq(r2, M);
  }
  for (int i = 0; i < n; ++i) red.mark_binary(i);
  red.validate();
  b.milps["reduced"] = red;

  if (M == 1) {
    json obj;
    obj["value"] = rational_to_json(Rational(0));
    obj["source"] = "asserted";
    b.facts.push_back(fact("milp_objective", "sd", obj));
    json uniq;
    uniq["value"] = rational_to_json(Rational(0));
    json vals = zero_point_values("x", n, Rational(0));
    vals.update(zero_point_values("lam", n, Rational(1)));
    uniq["values"] = vals;
    uniq["source"] = "asserted";
    b.facts.push_back(fact("unique_binary_optimum", "reduced", uniq));
  } else if (M >= 2) {
    json obj;
    obj["value"] = rational_to_json(ilp.brute_force_min());
    obj["source"] = "derived";
    b.facts.push_back(fact("milp_objective", "sd", obj));
    b.facts.push_back(fact("milp_objective", "reduced", obj));
  }
  if (2 * n <= 8) {
    auto [lo, hi] = brute_force_range(ilp, 20);
    json oz;
    oz["z_star"] = rational_to_json(lo);
    oz["z_max"] = rational_to_json(hi);
    oz["source"] = "derived";
    b.facts.push_back(fact("oracle_z", "instance", oz));
  }
  return b;
}

GadgetBundle gadget_nocoupling(const IlpInstance& ilp, const Rational& eta,
                               bool minmax_variant) {
  ilp.validate();
  if (eta <= 2 * l1_norm(ilp.c))
    throw ValidationError("the penalty weight must exceed twice the l1 norm of c");
  int n = ilp.n();
  int mA = static_cast<int>(ilp.A.size());
  GadgetBundle b;
  b.family = minmax_variant ? "nocoupling-minmax" : "nocoupling";
  b.cfg = BigMConfig{Rational(1), Rational(1), std::nullopt};

  // Penalized embedding: the coupling of the integrality gadget is replaced
  // by a follower overshoot variable w charged η in the leader objective.
  BlpInstance inst;
  inst.n_l = n;
  inst.n_f = n + 1;
  inst.m_l = mA + 2 * n;
  inst.m_f = 3 * n + 1;
  inst.a = ilp.c;
  inst.d = zeros(n + 1);
  inst.g = zeros(n + 1);
  for (int i = 0; i < n; ++i) inst.g[i] = -2;
  inst.d[n] = eta;
  if (minmax_variant) {
    for (int i = 0; i < n; ++i) inst.d[i] = 2;
    inst.g[n] = -eta;
  }
  inst.H.assign(inst.m_l, zeros(n));
  inst.G.assign(inst.m_l, zeros(n + 1));
  inst.h = zeros(inst.m_l);
  for (int r = 0; r < mA; ++r) {
    inst.H[r] = ilp.A[r];
    inst.h[r] = ilp.b[r];
  }
  for (int i = 0; i < n; ++i) {
    inst.H[mA + i][i] = 1;
    inst.h[mA + i] = 1;
    inst.H[mA + n + i][i] = -1;
  }
  inst.L.assign(inst.m_f, zeros(n));
  inst.F.assign(inst.m_f, zeros(n + 1));
  inst.f = zeros(inst.m_f);
  for (int i = 0; i < n; ++i) {
    inst.L[i][i] = -1;  // 2y_i ≤ x_i
    inst.F[i][i] = 2;
    inst.L[n + i][i] = 1;  // y_i ≤ 1 - x_i
    inst.F[n + i][i] = 1;
    inst.f[n + i] = 1;
    inst.F[2 * n + i][i] = 1;  // y_i ≤ w
    inst.F[2 * n + i][n] = -1;
  }
  inst.F[3 * n][n] = -4;  // -4w ≤ 0
  inst.min_max = minmax_variant;
  inst.validate();
  b.instance = inst;

  // Complementarity MILP at unit bounds. Duals beyond (λ, ν) vanish by
  // stationarity, so their rows only carry the tightness binaries s, q.
  {
    int nv = 2 * n + 1 + 2 * n + 3 * n + 1;  // x, y, w, λ, ν, u, v, s, q
    int ox = 0, oy = n, ow = 2 * n, ol = 2 * n + 1, on = 3 * n + 1,
        ou = 4 * n + 1, ov = 5 * n + 1, os = 6 * n + 1, oq = 7 * n + 1;
    MilpProblem m;
    m.lp = LpProblem::with_vars(nv);
    m.lp.var_names.clear();
    name_block(m.lp.var_names, "x", n);
    name_block(m.lp.var_names, "y", n);
    m.lp.var_names.push_back("w");
    name_block(m.lp.var_names, "lam", n);
    name_block(m.lp.var_names, "nu", n);
    name_block(m.lp.var_names, "u", n);
    name_block(m.lp.var_names, "v", n);
    name_block(m.lp.var_names, "s", n);
    m.lp.var_names.push_back("q");
    for (int i = 0; i < n; ++i) {
      m.lp.lb[ox + i] = Rational(0);
      m.lp.ub[ox + i] = Rational(1);
      m.lp.lb[ol + i] = Rational(0);
      m.lp.lb[on + i] = Rational(0);
      m.lp.c[ox + i] = ilp.c[i];
      if (minmax_variant) m.lp.c[oy + i] = 2;
    }
    m.lp.lb[ow] = Rational(0);
    m.lp.c[ow] = eta;
    for (int r = 0; r < mA; ++r) {
      Vec row = zeros(nv);
      for (int i = 0; i < n; ++i) row[ox + i] = ilp.A[r][i];
      m.lp.add_ineq(row, ilp.b[r]);
    }
    for (int i = 0; i < n; ++i) {
      Vec e1 = zeros(nv);  // 2λ_i + ν_i = 2
      e1[ol + i] = 2;
      e1[on + i] = 1;
      m.lp.add_eq(e1, Rational(2));
      Vec r1 = zeros(nv);  // λ_i ≤ u_i
      r1[ol + i] = 1;
      r1[ou + i] = -1;
      m.lp.add_ineq(r1, Rational(0));
      Vec r2 = zeros(nv);  // 2y_i ≤ x_i
      r2[oy + i] = 2;
      r2[ox + i] = -1;
      m.lp.add_ineq(r2, Rational(0));
      Vec r3 = zeros(nv);  // x_i - 2y_i ≤ 1 - u_i
      r3[ox + i] = 1;
      r3[oy + i] = -2;
      r3[ou + i] = 1;
      m.lp.add_ineq(r3, Rational(1));
      Vec r4 = zeros(nv);  // ν_i ≤ v_i
      r4[on + i] = 1;
      r4[ov + i] = -1;
      m.lp.add_ineq(r4, Rational(0));
      Vec r5 = zeros(nv);  // x_i + y_i ≤ 1
      r5[ox + i] = 1;
      r5[oy + i] = 1;
      m.lp.add_ineq(r5, Rational(1));
      Vec r6 = zeros(nv);  // 1 - x_i - y_i ≤ 1 - v_i
      r6[ox + i] = -1;
      r6[oy + i] = -1;
      r6[ov + i] = 1;
      m.lp.add_ineq(r6, Rational(0));
      Vec r7 = zeros(nv);  // y_i ≤ w
      r7[oy + i] = 1;
      r7[ow] = -1;
      m.lp.add_ineq(r7, Rational(0));
      Vec r8 = zeros(nv);  // w - y_i ≤ s_i
      r8[ow] = 1;
      r8[oy + i] = -1;
      r8[os + i] = -1;
      m.lp.add_ineq(r8, Rational(0));
    }
    Vec rq = zeros(nv);  // w ≤ q/4
    rq[ow] = 1;
    rq[oq] = Rational(-1, 4);
    m.lp.add_ineq(rq, Rational(0));
    for (int i = 0; i < n; ++i) {
      m.mark_binary(ou + i);
      m.mark_binary(ov + i);
      m.mark_binary(os + i);
    }
    m.mark_binary(oq);
    m.validate();
    b.milps["bigm"] = m;
  }

  // Collapsed LP: the unit-bound MILP projects onto the half-cube with the
  // max coordinate charged η/2.
  {
    LpProblem lp = LpProblem::with_vars(n + 1);
    lp.var_names.clear();
    name_block(lp.var_names, "x", n);
    lp.var_names.push_back("t");
    for (int i = 0; i < n; ++i) {
      lp.lb[i] = Rational(0);
      lp.ub[i] = Rational(1, 2);
      lp.c[i] = minmax_variant ? ilp.c[i] + 1 : ilp.c[i];
    }
    lp.lb[n] = Rational(0);
    lp.c[n] = eta / 2;
    for (int r = 0; r < mA; ++r) {
      Vec row = zeros(n + 1);
      for (int i = 0; i < n; ++i) row[i] = ilp.A[r][i];
      lp.add_ineq(row, ilp.b[r]);
    }
    for (int i = 0; i < n; ++i) {
      Vec row = zeros(n + 1);
      row[i] = 1;
      row[n] = -1;
      lp.add_ineq(row, Rational(0));
    }
    lp.validate();
    b.lps["collapsed"] = lp;
  }

  json obj;
  obj["value"] = rational_to_json(Rational(0));
  obj["source"] = "asserted";
  b.facts.push_back(fact("lp_objective", "collapsed", obj));
  b.facts.push_back(fact("milp_objective", "bigm", obj));
  return b;
}

GadgetBundle gadget_minmax(const IlpInstance& ilp, const Rational& eta,
                           const Rational& M) {
  ilp.validate();
  // Below this threshold the unit-bound dual MILP may dip under 0 and the
  // construction's value claims no longer hold.
  if (eta <= 2 * l1_norm(ilp.c))
    throw ValidationError("the follower scale must exceed twice the l1 norm of c");
  if (M <= 0) throw ValidationError("the product bound must be positive");
  int n = ilp.n();
  int mA = static_cast<int>(ilp.A.size());
  GadgetBundle b;
  b.family = "minmax";
  b.cfg = BigMConfig{M, M, std::nullopt};

  BlpInstance inst;
  inst.n_l = n;
  inst.n_f = n;
  inst.m_l = mA + 2 * n;
  inst.m_f = 2 * n;
  inst.a = ilp.c;
  inst.d = Vec(n, Rational(2));
  inst.g = Vec(n, Rational(-2));
  inst.H.assign(inst.m_l, zeros(n));
  inst.G.assign(inst.m_l, zeros(n));
  inst.h = zeros(inst.m_l);
  for (int r = 0; r < mA; ++r) {
    inst.H[r] = ilp.A[r];
    inst.h[r] = ilp.b[r];
  }
  for (int i = 0; i < n; ++i) {
    inst.H[mA + i][i] = 1;
    inst.h[mA + i] = 1;
    inst.H[mA + n + i][i] = -1;
  }
  inst.L.assign(inst.m_f, zeros(n));
  inst.F.assign(inst.m_f, zeros(n));
  inst.f = zeros(inst.m_f);
  for (int i = 0; i < n; ++i) {
    inst.L[i][i] = -eta;  // 2y_i ≤ η x_i
    inst.F[i][i] = 2;
    inst.L[n + i][i] = eta;  // y_i ≤ η (1 - x_i)
    inst.F[n + i][i] = 1;
    inst.f[n + i] = eta;
  }
  inst.leader_binary = true;
  inst.min_max = true;
  inst.validate();
  b.instance = inst;

  b.milps["dual"] = minmax_dual_milp(inst, Vec(2 * n, M), eta);

  if (M == 1) {
    json obj;
    obj["value"] = rational_to_json(Rational(0));
    obj["source"] = "asserted";
    b.facts.push_back(fact("milp_objective", "dual", obj));
    json at;
    at["values"] = zero_point_values("x", n, Rational(0));
    at["source"] = "asserted";
    b.facts.push_back(fact("milp_primal_at", "dual", at));
  } else if (M >= 2) {
    json obj;
    obj["value"] = rational_to_json(ilp.brute_force_min());
    obj["source"] = "derived";
    b.facts.push_back(fact("milp_objective", "dual", obj));
  }
  if (2 * n <= 6) {
    auto [lo, hi] = brute_force_range(ilp, 20);
    json oz;
    oz["z_star"] = rational_to_json(lo);
    oz["z_max"] = rational_to_json(hi);
    oz["source"] = "derived";
    b.facts.push_back(fact("oracle_z", "instance", oz));
  }
  return b;
}

GadgetBundle gadget_hampath(const Digraph& g) {
  g.validate();
  int V = g.num_vertices;
  int A = static_cast<int>(g.arcs.size());
  GadgetBundle b;
  b.family = "hampath";
  b.cfg = BigMConfig{Rational(V - 2), Rational(1), std::nullopt};

  // The dual polyhedron is the s-t unit-flow polytope lifted by the path
  // length τ: λ = (x, τ) ≥ 0 with flow balance and τ = Σ x. Its vertices are
  // the simple s-t paths, so τ stays below V-2 at every vertex exactly when
  // no Hamiltonian s-t path exists.
  BlpInstance inst;
  inst.n_l = 1;
  inst.n_f = V + 1;
  inst.m_l = 2;
  inst.m_f = A + 1;
  inst.a = {Rational(0)};
  inst.d = zeros(V + 1);
  inst.g = zeros(V + 1);
  inst.g[g.s] = -1;
  inst.g[g.t] = 1;
  inst.H = {{Rational(1)}, {Rational(-1)}};
  inst.G.assign(2, zeros(V + 1));
  inst.h = zeros(2);
  inst.L.assign(inst.m_f, zeros(1));
  inst.F.assign(inst.m_f, zeros(V + 1));
  inst.f = zeros(inst.m_f);
  for (int a = 0; a < A; ++a) {
    auto [u, v] = g.arcs[a];
    inst.F[a][u] = 1;
    inst.F[a][v] = -1;
    inst.F[a][V] = -1;  // the lifting row τ - Σ x = 0, transposed
  }
  inst.F[A][V] = 1;
  inst.validate();
  b.instance = inst;

  json gd;
  gd["index"] = A;  // the τ component
  gd["md"] = rational_to_json(Rational(V - 2));
  gd["verdict"] = g.has_hamiltonian_st_path() ? "No" : "Yes";
  gd["source"] = "derived";
  b.facts.push_back(fact("gvp_d", "instance", gd));
  return b;
}

GadgetBundle gadget_partition(const PartitionInstance& p) {
  p.validate();
  int n = static_cast<int>(p.a.size());
  GadgetBundle b;
  b.family = "partition";
  b.cfg = BigMConfig{Rational(1), Rational(n), std::nullopt};

  // Leader on the balanced slice of the cube; the follower charges the
  // l1-overshoot of x beyond K through z. The dual polyhedron forces
  // λ_i + ν_i = θ with θ + 2ψ = 2, and its oversized vertices (θ = 2) win
  // exactly above the balanced sign vectors.
  BlpInstance inst;
  inst.n_l = n;
  inst.n_f = n + 1;
  inst.m_l = 2 * n + 2;
  inst.m_f = 2 * n + 2;
  inst.a = zeros(n);
  inst.d = zeros(n + 1);
  inst.g = zeros(n + 1);
  inst.g[n] = 2;
  inst.H.assign(inst.m_l, zeros(n));
  inst.G.assign(inst.m_l, zeros(n + 1));
  inst.h = zeros(inst.m_l);
  for (int i = 0; i < n; ++i) {
    inst.H[i][i] = 1;  // x_i ≤ 1
    inst.h[i] = 1;
    inst.H[n + i][i] = -1;  // -x_i ≤ 1
    inst.h[n + i] = 1;
  }
  inst.H[2 * n] = p.a;  // aᵀx = 0, split
  for (int i = 0; i < n; ++i) inst.H[2 * n + 1][i] = -p.a[i];
  inst.L.assign(inst.m_f, zeros(n));
  inst.F.assign(inst.m_f, zeros(n + 1));
  inst.f = zeros(inst.m_f);
  for (int i = 0; i < n; ++i) {
    inst.L[i][i] = 1;  // x_i - y_i ≤ 0
    inst.F[i][i] = -1;
    inst.L[n + i][i] = -1;  // -x_i - y_i ≤ 0
    inst.F[n + i][i] = -1;
  }
  for (int i = 0; i < n; ++i) inst.F[2 * n][i] = 1;  // Σ y_i - z ≤ K
  inst.F[2 * n][n] = -1;
  inst.f[2 * n] = p.K;
  inst.F[2 * n + 1][n] = -2;  // -2z ≤ 0
  inst.validate();
  b.instance = inst;

  b.milps["kkt"] = kkt_milp(inst, b.cfg).milp;

  LpProblem dual = LpProblem::with_vars(2 * n + 2);
  dual.var_names.clear();
  name_block(dual.var_names, "lam", n);
  name_block(dual.var_names, "nu", n);
  dual.var_names.push_back("theta");
  dual.var_names.push_back("psi");
  for (int i = 0; i < 2 * n + 2; ++i) dual.lb[i] = Rational(0);
  for (int i = 0; i < n; ++i) {
    Vec row = zeros(2 * n + 2);
    row[i] = 1;
    row[n + i] = 1;
    row[2 * n] = -1;
    dual.add_eq(row, Rational(0));
  }
  Vec last = zeros(2 * n + 2);
  last[2 * n] = 1;
  last[2 * n + 1] = 2;
  dual.add_eq(last, Rational(2));
  dual.validate();
  b.lps["dual"] = dual;

  json gp;
  gp["md"] = rational_to_json(Rational(1));
  gp["verdict"] = p.sign_certificate ? "No" : "Yes";
  gp["source"] = "derived";
  b.facts.push_back(fact("gvp_d_prime", "instance", gp));

  json au;
  au["verdict"] = "No";  // slack rows are unbounded and the vertex max is 2
  au["dual_vertex_max"] = rational_to_json(Rational(2));
  au["source"] = "derived";
  b.facts.push_back(fact("audit_md_dominates", "instance", au));
  return b;
}

// ---------------------------------------------------------------------------
// Replay and serialization

namespace {

int var_index_by_name(const LpProblem& lp, const std::string& name) {
  for (int i = 0; i < lp.num_vars; ++i)
    if (lp.name_of(i) == name) return i;
  throw ValidationError("no variable named " + name);
}

std::string verdict_name(Verdict v) { return v == Verdict::Yes ? "Yes" : "No"; }

void check_named_values(const LpProblem& lp, const Vec& point, const json& vals,
                        const std::string& where,
                        std::vector<std::string>& failures) {
  for (auto it = vals.begin(); it != vals.end(); ++it) {
    int idx = var_index_by_name(lp, it.key());
    Rational want = rational_from_json(it.value());
    if (point[idx] != want)
      failures.push_back(where + ": " + it.key() + " = " + to_string(point[idx]) +
                         ", expected " + to_string(want));
  }
}

void replay_fact(const GadgetBundle& bundle, const ExpectedFact& f,
                 std::vector<std::string>& failures) {
  std::string where = bundle.family + "/" + f.label + "/" + f.kind;
  if (f.kind == "milp_objective") {
    const MilpProblem& m = bundle.milps.at(f.label);
    MilpOutcome o = solve_milp(m);
    Rational want = rational_from_json(f.data.at("value"));
    if (o.status != MilpStatus::Optimal)
      failures.push_back(where + ": expected an optimum, got infeasible");
    else if (o.objective != want)
      failures.push_back(where + ": objective " + to_string(o.objective) +
                         ", expected " + to_string(want));
  } else if (f.kind == "lp_objective") {
    const LpProblem& lp = bundle.lps.at(f.label);
    LpOutcome o = solve_lp(lp);
    Rational want = rational_from_json(f.data.at("value"));
    if (o.status != LpStatus::Optimal)
      failures.push_back(where + ": expected an optimum");
    else if (o.objective != want)
      failures.push_back(where + ": objective " + to_string(o.objective) +
                         ", expected " + to_string(want));
  } else if (f.kind == "milp_primal_at") {
    const MilpProblem& m = bundle.milps.at(f.label);
    MilpOutcome o = solve_milp(m);
    if (o.status != MilpStatus::Optimal) {
      failures.push_back(where + ": expected an optimum, got infeasible");
      return;
    }
    check_named_values(m.lp, o.primal, f.data.at("values"), where, failures);
  } else if (f.kind == "unique_binary_optimum") {
    const MilpProblem& m = bundle.milps.at(f.label);
    auto r = enumerate_binary_optima(m);
    if (!r) {
      failures.push_back(where + ": expected an optimum, got infeasible");
      return;
    }
    if (r->points.size() != 1) {
      failures.push_back(where + ": " + std::to_string(r->points.size()) +
                         " optimal points, expected a unique one");
      return;
    }
    if (f.data.contains("value")) {
      Rational want = rational_from_json(f.data.at("value"));
      if (r->objective != want)
        failures.push_back(where + ": objective " + to_string(r->objective) +
                           ", expected " + to_string(want));
    }
    check_named_values(m.lp, r->points[0], f.data.at("values"), where, failures);
  } else if (f.kind == "oracle_z") {
    OracleResult res = bilevel_solve(*bundle.instance);
    if (f.data.contains("z_star")) {
      Rational want = rational_from_json(f.data.at("z_star"));
      if (res.z_star != want)
        failures.push_back(where + ": z_star " + to_string(res.z_star) +
                           ", expected " + to_string(want));
    }
    if (f.data.contains("z_max")) {
      Rational want = rational_from_json(f.data.at("z_max"));
      if (res.z_max != want)
        failures.push_back(where + ": z_max " + to_string(res.z_max) +
                           ", expected " + to_string(want));
    }
  } else if (f.kind == "gvp_d") {
    VerificationReport rep = gvp_d(*bundle.instance, f.data.at("index").get<int>(),
                                   rational_from_json(f.data.at("md")));
    std::string want = f.data.at("verdict").get<std::string>();
    if (verdict_name(rep.verdict) != want)
      failures.push_back(where + ": verdict " + verdict_name(rep.verdict) +
                         ", expected " + want);
  } else if (f.kind == "gvp_d_prime") {
    VerificationReport rep =
        gvp_d_prime(*bundle.instance, rational_from_json(f.data.at("md")));
    std::string want = f.data.at("verdict").get<std::string>();
    if (verdict_name(rep.verdict) != want)
      failures.push_back(where + ": verdict " + verdict_name(rep.verdict) +
                         ", expected " + want);
  } else if (f.kind == "audit_md_dominates") {
    VerificationReport rep = bigm_audit(*bundle.instance, bundle.cfg);
    std::string want = f.data.at("verdict").get<std::string>();
    if (verdict_name(rep.verdict) != want)
      failures.push_back(where + ": verdict " + verdict_name(rep.verdict) +
                         ", expected " + want);
    if (f.data.contains("dual_vertex_max")) {
      Rational wantv = rational_from_json(f.data.at("dual_vertex_max"));
      if (!rep.dual_vertex_max)
        failures.push_back(where + ": no dual vertex maximum reported");
      else if (*rep.dual_vertex_max != wantv)
        failures.push_back(where + ": dual vertex max " +
                           to_string(*rep.dual_vertex_max) + ", expected " +
                           to_string(wantv));
    }
  } else {
    failures.push_back(where + ": unknown fact kind");
  }
}

}  // namespace

std::vector<std::string> replay_bundle(const GadgetBundle& bundle) {
  std::vector<std::string> failures;
  for (const auto& f : bundle.facts) {
    try {
      replay_fact(bundle, f, failures);
    } catch (const std::exception& ex) {
      failures.push_back(bundle.family + "/" + f.label + "/" + f.kind + ": " +
                         ex.what());
    }
  }
  return failures;
}

json GadgetBundle::to_json() const {
  json j;
  j["family"] = family;
  if (instance) j["instance"] = instance_to_json(*instance);
  json jm = json::object();
  for (const auto& [label, m] : milps) jm[label] = milp_to_json(m);
  j["milps"] = jm;
  json jl = json::object();
  for (const auto& [label, lp] : lps) jl[label] = lp_to_json(lp);
  j["lps"] = jl;
  j["config"] = bigm_config_to_json(cfg);
  json jf = json::array();
  for (const auto& f : facts)
    jf.push_back(json{{"kind", f.kind}, {"label", f.label}, {"data", f.data}});
  j["facts"] = jf;
  return j;
}

void save_bundle(const GadgetBundle& bundle, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto path = [&dir](const std::string& file) { return dir + "/" + file; };
  if (bundle.instance)
    write_text_file(path("instance.json"),
                    instance_to_json(*bundle.instance).dump(2) + "\n");
  write_text_file(path("config.json"),
                  bigm_config_to_json(bundle.cfg).dump(2) + "\n");
  json jf = json::array();
  for (const auto& f : bundle.facts)
    jf.push_back(json{{"kind", f.kind}, {"label", f.label}, {"data", f.data}});
  json meta;
  meta["family"] = bundle.family;
  meta["facts"] = jf;
  write_text_file(path("facts.json"), meta.dump(2) + "\n");
  for (const auto& [label, m] : bundle.milps) {
    write_text_file(path(label + ".milp.json"), milp_to_json(m).dump(2) + "\n");
    write_text_file(path(label + ".milp.lp"), to_lp_format(m, label));
  }
  for (const auto& [label, lp] : bundle.lps) {
    write_text_file(path(label + ".lp.json"), lp_to_json(lp).dump(2) + "\n");
    write_text_file(path(label + ".lp.lp"), to_lp_format(lp, label));
  }
}

}  // namespace bigm
