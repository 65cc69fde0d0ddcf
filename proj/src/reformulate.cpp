#include "bigm/reformulate.hpp"

namespace bigm {

namespace {

void set_block(Vec& row, int offset, const Vec& coeffs) {
  for (std::size_t i = 0; i < coeffs.size(); ++i) row[offset + i] = coeffs[i];
}

}  // namespace

KktArtifacts kkt_milp(const BlpInstance& inst, const BigMConfig& cfg) {
  inst.validate();
  cfg.validate();
  if (cfg.per_row_M && static_cast<int>(cfg.per_row_M->size()) != inst.m_f)
    throw ValidationError("per-row dual bounds must have one entry per follower row");

  KktArtifacts art;
  KktVarMap& vm = art.var_map;
  vm.x = 0;
  vm.y = vm.x + inst.n_l;
  vm.lambda = vm.y + inst.n_f;
  vm.s = vm.lambda + inst.m_f;
  vm.u = vm.s + inst.m_f;
  const int n = vm.u + inst.m_f;

  MilpProblem& m = art.milp;
  m.lp = LpProblem::with_vars(n);
  for (int i = 0; i < inst.n_l; ++i) m.lp.var_names.push_back("x" + std::to_string(i));
  for (int i = 0; i < inst.n_f; ++i) m.lp.var_names.push_back("y" + std::to_string(i));
  for (int j = 0; j < inst.m_f; ++j) m.lp.var_names.push_back("lam" + std::to_string(j));
  for (int j = 0; j < inst.m_f; ++j) m.lp.var_names.push_back("s" + std::to_string(j));
  for (int j = 0; j < inst.m_f; ++j) m.lp.var_names.push_back("u" + std::to_string(j));

  set_block(m.lp.c, vm.x, inst.a);
  set_block(m.lp.c, vm.y, inst.d);

  for (int j = 0; j < inst.m_f; ++j) {
    m.lp.lb[vm.lambda + j] = Rational(0);
    m.lp.lb[vm.s + j] = Rational(0);
    m.mark_binary(vm.u + j);
  }
  if (inst.leader_binary)
    for (int i = 0; i < inst.n_l; ++i) m.mark_binary(vm.x + i);

  // Coupling Hx + Gy ≤ h.
  for (int r = 0; r < inst.m_l; ++r) {
    Vec row = zeros(n);
    set_block(row, vm.x, inst.H[r]);
    set_block(row, vm.y, inst.G[r]);
    art.row_map.coupling.push_back(m.lp.num_ineq());
    m.lp.add_ineq(std::move(row), inst.h[r]);
  }
  // λ_j ≤ M^d_j u_j.
  for (int j = 0; j < inst.m_f; ++j) {
    const Rational& Md = cfg.per_row_M ? (*cfg.per_row_M)[j] : cfg.Md;
    Vec row = zeros(n);
    row[vm.lambda + j] = 1;
    row[vm.u + j] = -Md;
    art.row_map.dual_bound.push_back(m.lp.num_ineq());
    m.lp.add_ineq(std::move(row), Rational(0));
  }
  // s_j ≤ M^p (1 - u_j).
  for (int j = 0; j < inst.m_f; ++j) {
    Vec row = zeros(n);
    row[vm.s + j] = 1;
    row[vm.u + j] = cfg.Mp;
    art.row_map.slack_bound.push_back(m.lp.num_ineq());
    m.lp.add_ineq(std::move(row), cfg.Mp);
  }
  // Slack definition Lx + Fy + s = f; primal feasibility is s ≥ 0.
  for (int r = 0; r < inst.m_f; ++r) {
    Vec row = zeros(n);
    set_block(row, vm.x, inst.L[r]);
    set_block(row, vm.y, inst.F[r]);
    row[vm.s + r] = 1;
    art.row_map.slack_def.push_back(m.lp.num_eq());
    m.lp.add_eq(std::move(row), inst.f[r]);
  }
  // Stationarity g + Fᵀλ = 0.
  for (int i = 0; i < inst.n_f; ++i) {
    Vec row = zeros(n);
    for (int j = 0; j < inst.m_f; ++j) row[vm.lambda + j] = inst.F[j][i];
    art.row_map.stationarity.push_back(m.lp.num_eq());
    m.lp.add_eq(std::move(row), -inst.g[i]);
  }
  m.validate();
  return art;
}

StrongDualityArtifacts strong_duality_milp(const BlpInstance& inst,
                                           const Vec& M) {
  inst.validate();
  if (!inst.leader_binary)
    throw ValidationError("strong-duality reformulation needs a binary leader");
  if (static_cast<int>(M.size()) != inst.m_f)
    throw ValidationError("need one dual bound per follower row");
  for (const auto& mj : M)
    if (mj <= 0) throw ValidationError("dual bounds must be positive");

  StrongDualityArtifacts art;
  StrongDualityVarMap& vm = art.var_map;
  vm.x = 0;
  vm.y = vm.x + inst.n_l;
  vm.lambda = vm.y + inst.n_f;
  vm.u = vm.lambda + inst.m_f;
  const int n = vm.u + inst.n_l * inst.m_f;
  art.M_j = M;

  MilpProblem& m = art.milp;
  m.lp = LpProblem::with_vars(n);
  for (int i = 0; i < inst.n_l; ++i) m.lp.var_names.push_back("x" + std::to_string(i));
  for (int i = 0; i < inst.n_f; ++i) m.lp.var_names.push_back("y" + std::to_string(i));
  for (int j = 0; j < inst.m_f; ++j) m.lp.var_names.push_back("lam" + std::to_string(j));
  for (int i = 0; i < inst.n_l; ++i)
    for (int j = 0; j < inst.m_f; ++j)
      m.lp.var_names.push_back("u" + std::to_string(i) + "_" + std::to_string(j));

  set_block(m.lp.c, vm.x, inst.a);
  set_block(m.lp.c, vm.y, inst.d);
  for (int i = 0; i < inst.n_l; ++i) m.mark_binary(vm.x + i);
  for (int j = 0; j < inst.m_f; ++j) m.lp.lb[vm.lambda + j] = Rational(0);

  auto uvar = [&](int i, int j) { return vm.u + i * inst.m_f + j; };

  // Leader rows.
  for (int r = 0; r < inst.m_l; ++r) {
    Vec row = zeros(n);
    set_block(row, vm.x, inst.H[r]);
    set_block(row, vm.y, inst.G[r]);
    m.lp.add_ineq(std::move(row), inst.h[r]);
  }
  // Follower primal rows.
  for (int r = 0; r < inst.m_f; ++r) {
    Vec row = zeros(n);
    set_block(row, vm.x, inst.L[r]);
    set_block(row, vm.y, inst.F[r]);
    m.lp.add_ineq(std::move(row), inst.f[r]);
  }
  // Dual feasibility.
  for (int i = 0; i < inst.n_f; ++i) {
    Vec row = zeros(n);
    for (int j = 0; j < inst.m_f; ++j) row[vm.lambda + j] = inst.F[j][i];
    m.lp.add_eq(std::move(row), -inst.g[i]);
  }
  // u_ij = x_i λ_j via the standard triple; u_ij ≥ 0 as a bound.
  for (int i = 0; i < inst.n_l; ++i) {
    for (int j = 0; j < inst.m_f; ++j) {
      m.lp.lb[uvar(i, j)] = Rational(0);
      Vec r1 = zeros(n);  // u ≤ λ
      r1[uvar(i, j)] = 1;
      r1[vm.lambda + j] = -1;
      m.lp.add_ineq(std::move(r1), Rational(0));
      Vec r2 = zeros(n);  // u ≤ M_j x
      r2[uvar(i, j)] = 1;
      r2[vm.x + i] = -M[j];
      m.lp.add_ineq(std::move(r2), Rational(0));
      Vec r3 = zeros(n);  // u ≥ λ + M_j (x - 1)
      r3[vm.lambda + j] = 1;
      r3[vm.x + i] = M[j];
      r3[uvar(i, j)] = -1;
      m.lp.add_ineq(std::move(r3), M[j]);
    }
  }
  // Strong duality: gᵀy = Σ_ij L_{j,i} u_ij - fᵀλ.
  {
    Vec row = zeros(n);
    set_block(row, vm.y, inst.g);
    for (int j = 0; j < inst.m_f; ++j) row[vm.lambda + j] = inst.f[j];
    for (int i = 0; i < inst.n_l; ++i)
      for (int j = 0; j < inst.m_f; ++j) row[uvar(i, j)] = -inst.L[j][i];
    art.strong_duality_row = m.lp.num_eq();
    m.lp.add_eq(std::move(row), Rational(0));
  }
  m.validate();
  return art;
}

void PenaltyConfig::validate() const {
  if (eta <= 0) throw ValidationError("penalty parameter must be positive");
  if (eta1 > 0 && eta <= eta1)
    throw ValidationError("penalty parameter must exceed the threshold " +
                          to_string(eta1));
}

BlpInstance penalize_coupling(const BlpInstance& inst,
                              const PenaltyConfig& cfg) {
  inst.validate();
  cfg.validate();
  if (!inst.has_coupling()) return inst;

  // Classify leader rows: rows with zero G-part stay; rows of the exact form
  // y_j ≤ 0 move into the follower; anything else is unsupported.
  std::vector<int> kept, coupled_index;
  for (int r = 0; r < inst.m_l; ++r) {
    bool g_zero = true;
    for (const auto& v : inst.G[r])
      if (v != 0) g_zero = false;
    if (g_zero) {
      kept.push_back(r);
      continue;
    }
    int unit = -1;
    bool ok = inst.h[r] == 0;
    for (const auto& v : inst.H[r])
      if (v != 0) ok = false;
    for (int j = 0; j < inst.n_f && ok; ++j) {
      if (inst.G[r][j] == 0) continue;
      if (inst.G[r][j] != 1 || unit >= 0) ok = false;
      unit = j;
    }
    if (!ok)
      throw ValidationError(
          "coupling row " + std::to_string(r) +
          " is not of the supported form y_j <= 0; general exact penalization "
          "is out of scope");
    coupled_index.push_back(unit);
  }

  BlpInstance out;
  out.n_l = inst.n_l;
  out.n_f = inst.n_f + 1;  // appended w
  out.m_l = static_cast<int>(kept.size());
  out.m_f = inst.m_f + static_cast<int>(coupled_index.size()) + 1;
  out.a = inst.a;
  out.d = inst.d;
  out.d.push_back(cfg.eta);
  out.g = inst.g;
  out.g.push_back(Rational(0));
  for (int r : kept) {
    out.H.push_back(inst.H[r]);
    out.G.push_back(zeros(out.n_f));
    out.h.push_back(inst.h[r]);
  }
  for (int r = 0; r < inst.m_f; ++r) {
    out.L.push_back(inst.L[r]);
    Vec row = inst.F[r];
    row.push_back(Rational(0));
    out.F.push_back(std::move(row));
    out.f.push_back(inst.f[r]);
  }
  for (int j : coupled_index) {  // y_j ≤ w
    out.L.push_back(zeros(inst.n_l));
    Vec row = zeros(out.n_f);
    row[j] = 1;
    row[out.n_f - 1] = -1;
    out.F.push_back(std::move(row));
    out.f.push_back(Rational(0));
  }
  {  // 4w ≥ 0, with the printed coefficient
    out.L.push_back(zeros(inst.n_l));
    Vec row = zeros(out.n_f);
    row[out.n_f - 1] = -4;
    out.F.push_back(std::move(row));
    out.f.push_back(Rational(0));
  }
  out.leader_binary = inst.leader_binary;
  out.min_max = false;  // penalty breaks the d = -g symmetry
  out.validate();
  return out;
}

MilpProblem minmax_dual_milp(const BlpInstance& inst, const Vec& M,
                             const Rational& eta) {
  inst.validate();
  if (!inst.min_max)
    throw ValidationError("dual-side reformulation needs a min-max instance");
  if (!inst.leader_binary)
    throw ValidationError("dual-side reformulation needs a binary leader");
  if (static_cast<int>(M.size()) != inst.m_f)
    throw ValidationError("need one dual bound per follower row");
  if (eta <= 0) throw ValidationError("penalty parameter must be positive");

  // Pairs (i, j) with L_{j,i} != 0 get a linearization variable.
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < inst.n_l; ++i)
    for (int j = 0; j < inst.m_f; ++j)
      if (inst.L[j][i] != 0) pairs.emplace_back(i, j);

  const int x_off = 0, lam_off = inst.n_l, u_off = lam_off + inst.m_f;
  const int n = u_off + static_cast<int>(pairs.size());
  MilpProblem m;
  m.lp = LpProblem::with_vars(n);
  for (int i = 0; i < inst.n_l; ++i) m.lp.var_names.push_back("x" + std::to_string(i));
  for (int j = 0; j < inst.m_f; ++j) m.lp.var_names.push_back("lam" + std::to_string(j));
  for (const auto& [i, j] : pairs)
    m.lp.var_names.push_back("u" + std::to_string(i) + "_" + std::to_string(j));

  set_block(m.lp.c, x_off, inst.a);
  for (int j = 0; j < inst.m_f; ++j) m.lp.c[lam_off + j] = inst.f[j];
  for (std::size_t k = 0; k < pairs.size(); ++k)
    m.lp.c[u_off + k] = -inst.L[pairs[k].second][pairs[k].first];

  for (int i = 0; i < inst.n_l; ++i) m.mark_binary(x_off + i);
  for (int j = 0; j < inst.m_f; ++j) m.lp.lb[lam_off + j] = Rational(0);

  for (int r = 0; r < inst.m_l; ++r) {
    Vec row = zeros(n);
    set_block(row, x_off, inst.H[r]);
    m.lp.add_ineq(std::move(row), inst.h[r]);
  }
  for (int i = 0; i < inst.n_f; ++i) {  // Fᵀλ + g = 0
    Vec row = zeros(n);
    for (int j = 0; j < inst.m_f; ++j) row[lam_off + j] = inst.F[j][i];
    m.lp.add_eq(std::move(row), -inst.g[i]);
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    const int u = u_off + static_cast<int>(k);
    m.lp.lb[u] = Rational(0);
    Vec r1 = zeros(n);  // u ≤ λ
    r1[u] = 1;
    r1[lam_off + j] = -1;
    m.lp.add_ineq(std::move(r1), Rational(0));
    Vec r2 = zeros(n);  // u ≤ M_j x
    r2[u] = 1;
    r2[x_off + i] = -M[j];
    m.lp.add_ineq(std::move(r2), Rational(0));
    Vec r3 = zeros(n);  // u ≥ λ + M_j (x - 1)
    r3[lam_off + j] = 1;
    r3[x_off + i] = M[j];
    r3[u] = -1;
    m.lp.add_ineq(std::move(r3), M[j]);
  }
  m.validate();
  return m;
}

}  // namespace bigm
