#include "bigm/simplex.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <thread>

namespace bigm {

namespace {

enum RowOrigin { kIneq = 0, kEq = 1, kLo = 2, kHi = 3 };

struct InternalRow {
  Vec coeffs;  // over original variables
  Rational rhs;
  bool is_eq = false;
  RowOrigin origin;
  int origin_index;  // A/E row index, or variable index for bound rows
};

std::vector<InternalRow> build_rows(const LpProblem& p) {
  std::vector<InternalRow> rows;
  for (int r = 0; r < p.num_ineq(); ++r)
    rows.push_back({p.A[r], p.b[r], false, kIneq, r});
  for (int r = 0; r < p.num_eq(); ++r)
    rows.push_back({p.E[r], p.e[r], true, kEq, r});
  for (int i = 0; i < p.num_vars; ++i) {
    if (p.lb[i]) {
      Vec row = zeros(p.num_vars);
      row[i] = -1;
      rows.push_back({std::move(row), -*p.lb[i], false, kLo, i});
    }
  }
  for (int i = 0; i < p.num_vars; ++i) {
    if (p.ub[i]) {
      Vec row = zeros(p.num_vars);
      row[i] = 1;
      rows.push_back({std::move(row), *p.ub[i], false, kHi, i});
    }
  }
  return rows;
}

// Dense-tableau two-phase simplex over split variables x = p - m. The last
// m columns are a passively updated identity block (never enterable) that
// exposes the basis inverse for dual and Farkas extraction.
class Tableau {
 public:
  Tableau(const LpProblem& p, const std::vector<InternalRow>& rows)
      : n_(p.num_vars), m_(static_cast<int>(rows.size())) {
    n_le_ = 0;
    for (const auto& r : rows)
      if (!r.is_eq) ++n_le_;
    split_end_ = 2 * n_;
    slack_end_ = split_end_ + n_le_;
    cols_ = slack_end_ + m_;  // + virtual identity block
    T_.assign(m_, Vec(cols_ + 1, Rational(0)));
    flipped_.assign(m_, false);
    basis_.assign(m_, -1);

    int slack = split_end_;
    for (int i = 0; i < m_; ++i) {
      const auto& r = rows[i];
      bool flip = r.rhs < 0;
      flipped_[i] = flip;
      Rational sgn = flip ? -1 : 1;
      for (int j = 0; j < n_; ++j) {
        T_[i][2 * j] = sgn * r.coeffs[j];
        T_[i][2 * j + 1] = -sgn * r.coeffs[j];
      }
      T_[i][cols_] = sgn * r.rhs;
      if (!r.is_eq) {
        T_[i][slack] = sgn;  // -1 on flipped rows: slack cannot start basic
        slack_col_.push_back(slack);
        ++slack;
      } else {
        slack_col_.push_back(-1);
      }
      T_[i][slack_end_ + i] = 1;  // virtual / artificial column
      if (!r.is_eq && !flip) {
        basis_[i] = slack_col_.back();
      } else {
        basis_[i] = slack_end_ + i;
        artificial_rows_.push_back(i);
      }
    }
  }

  // Returns phase-1 optimum (total infeasibility).
  Rational phase1() {
    cost_.assign(cols_, Rational(0));
    for (int i : artificial_rows_) cost_[slack_end_ + i] = 1;
    init_cost_row();
    run();
    Rational infeas(0);
    for (int i = 0; i < m_; ++i)
      if (cost_[basis_[i]] != 0) infeas += T_[i][cols_];
    phase1_duals_ = extract_duals();
    return infeas;
  }

  // Pivots zero-valued artificials out of the basis where possible and
  // optimizes the real objective. Returns false on unboundedness.
  bool phase2(const Vec& c) {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < slack_end_) continue;
      for (int j = 0; j < slack_end_; ++j) {
        if (T_[i][j] != 0) {
          pivot(i, j);
          break;
        }
      }
    }
    cost_.assign(cols_, Rational(0));
    for (int j = 0; j < n_; ++j) {
      cost_[2 * j] = c[j];
      cost_[2 * j + 1] = -c[j];
    }
    init_cost_row();
    return run();
  }

  Vec primal(int n) const {
    Vec x = zeros(n);
    for (int i = 0; i < m_; ++i) {
      int b = basis_[i];
      if (b < split_end_) {
        int var = b / 2;
        x[var] += (b % 2 == 0) ? T_[i][cols_] : -T_[i][cols_];
      }
    }
    return x;
  }

  // Internal-row duals for the current cost vector, in original row
  // orientation (flips undone).
  Vec extract_duals() const {
    Vec y(m_, Rational(0));
    for (int i = 0; i < m_; ++i) {
      const Rational& cb = cost_[basis_[i]];
      if (cb == 0) continue;
      for (int r = 0; r < m_; ++r) y[r] += cb * T_[i][slack_end_ + r];
    }
    for (int r = 0; r < m_; ++r)
      if (flipped_[r]) y[r] = -y[r];
    return y;
  }

  const Vec& phase1_duals() const { return phase1_duals_; }

  // Improving direction in original variable space after an unbounded run.
  Vec ray(int n) const {
    Vec d_split(cols_, Rational(0));
    d_split[unbounded_col_] = 1;
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < cols_) d_split[basis_[i]] = -T_[i][unbounded_col_];
    Vec d = zeros(n);
    for (int j = 0; j < n; ++j) d[j] = d_split[2 * j] - d_split[2 * j + 1];
    // Slack components of the direction are implied by the rows.
    return d;
  }

 private:
  void init_cost_row() {
    cost_row_ = cost_;
    cost_row_.push_back(Rational(0));
    for (int i = 0; i < m_; ++i) {
      const Rational& cb = cost_[basis_[i]];
      if (cb == 0) continue;
      for (int j = 0; j <= cols_; ++j) cost_row_[j] -= cb * T_[i][j];
    }
  }

  // Bland's rule: enter the lowest-index improving column, leave by the
  // lowest-index basic variable among ratio ties. Guarantees termination.
  bool run() {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < slack_end_; ++j) {
        if (cost_row_[j] < 0) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      Rational best;
      for (int i = 0; i < m_; ++i) {
        if (T_[i][enter] <= 0) continue;
        Rational ratio = T_[i][cols_] / T_[i][enter];
        if (leave < 0 || ratio < best ||
            (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) {
        unbounded_col_ = enter;
        return false;
      }
      pivot(leave, enter);
    }
  }

  void pivot(int row, int col) {
    Rational piv = T_[row][col];
    for (int j = 0; j <= cols_; ++j) T_[row][j] /= piv;
    for (int i = 0; i < m_; ++i) {
      if (i == row || T_[i][col] == 0) continue;
      Rational factor = T_[i][col];
      for (int j = 0; j <= cols_; ++j) T_[i][j] -= factor * T_[row][j];
    }
    if (cost_row_[col] != 0) {
      Rational factor = cost_row_[col];
      for (int j = 0; j <= cols_; ++j) cost_row_[j] -= factor * T_[row][j];
    }
    basis_[row] = col;
  }

  int n_, m_, n_le_ = 0, split_end_ = 0, slack_end_ = 0, cols_ = 0;
  Mat T_;
  Vec cost_, cost_row_, phase1_duals_;
  std::vector<int> basis_, slack_col_, artificial_rows_;
  std::vector<bool> flipped_;
  int unbounded_col_ = -1;
};

}  // namespace

LpOutcome solve_lp(const LpProblem& p) {
  p.validate();
  LpOutcome out;
  out.dual_ineq = zeros(p.num_ineq());
  out.dual_eq = zeros(p.num_eq());
  out.reduced_lo = zeros(p.num_vars);
  out.reduced_hi = zeros(p.num_vars);

  const auto rows = build_rows(p);
  if (rows.empty()) {
    // Unconstrained: optimal iff c = 0.
    out.primal = zeros(p.num_vars);
    for (int j = 0; j < p.num_vars; ++j) {
      if (p.c[j] != 0) {
        out.status = LpStatus::Unbounded;
        Vec d = zeros(p.num_vars);
        d[j] = p.c[j] > 0 ? -1 : 1;
        out.ray = d;
        return out;
      }
    }
    out.status = LpStatus::Optimal;
    out.objective = 0;
    return out;
  }

  Tableau tab(p, rows);
  if (tab.phase1() > 0) {
    out.status = LpStatus::Infeasible;
    const Vec& y = tab.phase1_duals();
    FarkasCertificate cert;
    cert.ineq = zeros(p.num_ineq());
    cert.eq = zeros(p.num_eq());
    cert.lo = zeros(p.num_vars);
    cert.hi = zeros(p.num_vars);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      Rational mu = -y[r];
      switch (rows[r].origin) {
        case kIneq: cert.ineq[rows[r].origin_index] = mu; break;
        case kEq: cert.eq[rows[r].origin_index] = mu; break;
        case kLo: cert.lo[rows[r].origin_index] = mu; break;
        case kHi: cert.hi[rows[r].origin_index] = mu; break;
      }
    }
    out.farkas = std::move(cert);
    return out;
  }

  if (!tab.phase2(p.c)) {
    out.status = LpStatus::Unbounded;
    out.primal = tab.primal(p.num_vars);
    out.ray = tab.ray(p.num_vars);
    return out;
  }

  out.status = LpStatus::Optimal;
  out.primal = tab.primal(p.num_vars);
  out.objective = dot(p.c, out.primal);
  const Vec y = tab.extract_duals();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Rational mu = -y[r];
    switch (rows[r].origin) {
      case kIneq: out.dual_ineq[rows[r].origin_index] = mu; break;
      case kEq: out.dual_eq[rows[r].origin_index] = mu; break;
      case kLo: out.reduced_lo[rows[r].origin_index] = mu; break;
      case kHi: out.reduced_hi[rows[r].origin_index] = mu; break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vertex enumeration by basis enumeration.

namespace {

struct Constraint {
  Vec coeffs;
  Rational rhs;
  bool is_eq;
  int index;  // position in the combined [A, E, lo, hi] ordering
};

std::vector<Constraint> gather_constraints(const LpProblem& p) {
  std::vector<Constraint> cons;
  int idx = 0;
  for (int r = 0; r < p.num_ineq(); ++r)
    cons.push_back({p.A[r], p.b[r], false, idx++});
  for (int r = 0; r < p.num_eq(); ++r)
    cons.push_back({p.E[r], p.e[r], true, idx++});
  for (int i = 0; i < p.num_vars; ++i) {
    if (p.lb[i]) {
      Vec row = zeros(p.num_vars);
      row[i] = -1;
      cons.push_back({std::move(row), -*p.lb[i], false, idx++});
    }
  }
  for (int i = 0; i < p.num_vars; ++i) {
    if (p.ub[i]) {
      Vec row = zeros(p.num_vars);
      row[i] = 1;
      cons.push_back({std::move(row), *p.ub[i], false, idx++});
    }
  }
  return cons;
}

// Reduced system after eliminating the equality rows: pivot variables are
// affine functions of the free variables, x_P = t - S·x_free.
struct EqElimination {
  bool infeasible = false;
  std::vector<int> pivot_var;       // per eliminated equality, the pivot column
  std::vector<int> free_vars;       // remaining columns
  Mat pivot_expr;                   // per pivot: coefficients over free vars
  Vec pivot_const;                  // per pivot: constant term
};

EqElimination eliminate_equalities(int n, const std::vector<Constraint>& cons) {
  Mat rows;
  Vec rhs;
  for (const auto& c : cons) {
    if (!c.is_eq) continue;
    rows.push_back(c.coeffs);
    rhs.push_back(c.rhs);
  }
  EqElimination out;
  std::vector<bool> used(n, false);
  std::vector<int> pivots;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    // Reduce by prior pivots.
    for (std::size_t k = 0; k < pivots.size(); ++k) {
      int pc = pivots[k];
      if (rows[r][pc] == 0) continue;
      Rational factor = rows[r][pc];
      for (int j = 0; j < n; ++j) rows[r][j] -= factor * rows[k][j];
      rhs[r] -= factor * rhs[k];
      // rows[k] is normalized with rows[k][pc] = 1; note rows are compacted
      // below so index k matches pivot k.
    }
    int pc = -1;
    for (int j = 0; j < n; ++j)
      if (rows[r][j] != 0) { pc = j; break; }
    if (pc < 0) {
      if (rhs[r] != 0) { out.infeasible = true; return out; }
      continue;  // redundant equality
    }
    Rational piv = rows[r][pc];
    for (int j = 0; j < n; ++j) rows[r][j] /= piv;
    rhs[r] /= piv;
    // Compact: move this row next to the previous pivot rows.
    std::size_t slot = pivots.size();
    if (slot != r) { rows[slot] = rows[r]; rhs[slot] = rhs[r]; }
    pivots.push_back(pc);
    used[pc] = true;
  }
  rows.resize(pivots.size());
  rhs.resize(pivots.size());
  // Back-substitute so each pivot row mentions only free variables.
  for (int k = static_cast<int>(pivots.size()) - 1; k >= 0; --k) {
    for (int up = 0; up < k; ++up) {
      Rational factor = rows[up][pivots[k]];
      if (factor == 0) continue;
      for (int j = 0; j < n; ++j) rows[up][j] -= factor * rows[k][j];
      rhs[up] -= factor * rhs[k];
    }
  }
  for (int j = 0; j < n; ++j)
    if (!used[j]) out.free_vars.push_back(j);
  out.pivot_var = pivots;
  for (std::size_t k = 0; k < pivots.size(); ++k) {
    Vec expr;
    expr.reserve(out.free_vars.size());
    for (int j : out.free_vars) expr.push_back(rows[k][j]);
    out.pivot_expr.push_back(std::move(expr));
    out.pivot_const.push_back(rhs[k]);
  }
  return out;
}

struct ReducedIneq {
  Vec w;          // over free variables
  Rational rhs;
  int index;      // combined constraint index
};

// DFS over subsets of reduced inequalities with incremental elimination.
// Each accepted row is normalized on its pivot column and reduced by all
// previously chosen rows, so a full-depth chain is triangular.
class BasisSearch {
 public:
  BasisSearch(const std::vector<ReducedIneq>& rows, int k, int nf)
      : rows_(rows), k_(k), nf_(nf) {}

  // Calls sink(free_values, chosen_indices) for every full-rank active set.
  // When forced_first >= 0, only chains beginning with that row are explored
  // (used to partition the search across workers).
  template <typename Sink>
  void search(Sink&& sink, int forced_first = -1) {
    if (k_ == 0) {
      Vec vals(nf_, Rational(0));
      std::vector<int> chosen;
      sink(vals, chosen);
      return;
    }
    chain_.clear();
    if (forced_first < 0) {
      dfs(0, std::forward<Sink>(sink));
    } else {
      if (!push_row(forced_first)) return;
      if (k_ == 1)
        emit(sink);
      else
        dfs(forced_first + 1, sink);
      chain_.pop_back();
    }
  }

 private:
  struct ChainRow {
    Vec w;
    Rational rhs;
    int pivot;
    int row_index;
  };

  // Reduces row r by the current chain; returns false if it is dependent.
  bool push_row(int r) {
    Vec w = rows_[r].w;
    Rational rhs = rows_[r].rhs;
    for (const auto& cr : chain_) {
      const Rational factor = w[cr.pivot];
      if (factor == 0) continue;
      for (int j = 0; j < nf_; ++j) w[j] -= factor * cr.w[j];
      rhs -= factor * cr.rhs;
    }
    int pc = -1;
    for (int j = 0; j < nf_; ++j)
      if (w[j] != 0) { pc = j; break; }
    if (pc < 0) return false;
    Rational piv = w[pc];
    if (piv != 1) {
      for (int j = 0; j < nf_; ++j) w[j] /= piv;
      rhs /= piv;
    }
    chain_.push_back({std::move(w), std::move(rhs), pc, rows_[r].index});
    return true;
  }

  template <typename Sink>
  void dfs(int start, Sink&& sink) {
    int depth = static_cast<int>(chain_.size());
    int remaining = k_ - depth;
    for (int r = start; r + remaining <= static_cast<int>(rows_.size()); ++r) {
      if (!push_row(r)) continue;  // dependent on the chain
      if (depth + 1 == k_) {
        emit(sink);
      } else {
        dfs(r + 1, sink);
      }
      chain_.pop_back();
    }
  }

  template <typename Sink>
  void emit(Sink&& sink) {
    Vec vals(nf_, Rational(0));
    for (int k = k_ - 1; k >= 0; --k) {
      const auto& cr = chain_[k];
      Rational v = cr.rhs;
      for (int j = k + 1; j < k_; ++j) {
        const Rational& coef = cr.w[chain_[j].pivot];
        if (coef != 0) v -= coef * vals[chain_[j].pivot];
      }
      vals[cr.pivot] = v;
    }
    std::vector<int> chosen;
    chosen.reserve(k_);
    for (const auto& cr : chain_) chosen.push_back(cr.row_index);
    sink(vals, chosen);
  }

  const std::vector<ReducedIneq>& rows_;
  int k_;
  int nf_;
  std::vector<ChainRow> chain_;
};

// Extreme rays of the recession cone, found as nonzero vertices of the cone
// truncated to [-1,1]^n whose active cone rows have rank n-1.
std::vector<Vec> recession_rays(const LpProblem& p, int var_cap) {
  LpProblem cone = LpProblem::with_vars(p.num_vars);
  for (int r = 0; r < p.num_ineq(); ++r) cone.add_ineq(p.A[r], Rational(0));
  for (int r = 0; r < p.num_eq(); ++r) cone.add_eq(p.E[r], Rational(0));
  // Sign restrictions inherited from finite bounds of p: a recession
  // direction needs d_i >= 0 when lb_i is finite and d_i <= 0 when ub_i is.
  // Added as explicit rows so the rank test below can see them as active
  // cone rows; the [-1,1] box is what makes the truncation bounded.
  for (int i = 0; i < p.num_vars; ++i) {
    cone.lb[i] = Rational(-1);
    cone.ub[i] = Rational(1);
    if (p.lb[i]) {
      Vec row = zeros(p.num_vars);
      row[i] = -1;
      cone.add_ineq(std::move(row), Rational(0));
    }
    if (p.ub[i]) {
      Vec row = zeros(p.num_vars);
      row[i] = 1;
      cone.add_ineq(std::move(row), Rational(0));
    }
  }
  PolyhedronVertices trunc = enumerate_vertices(cone, var_cap, false);
  std::set<Vec, bool (*)(const Vec&, const Vec&)> dirs(lex_less);
  for (const auto& v : trunc.vertices) {
    bool zero = true;
    for (const auto& x : v)
      if (x != 0) { zero = false; break; }
    if (zero) continue;
    // Rank of active homogeneous cone rows (A rows, E rows, sign rows) must
    // be n-1 for an extreme ray.
    Mat m;
    for (int r = 0; r < cone.num_ineq(); ++r)
      if (dot(cone.A[r], v) == 0) m.push_back(cone.A[r]);
    for (int r = 0; r < cone.num_eq(); ++r) m.push_back(cone.E[r]);
    int n = p.num_vars;
    std::vector<int> pivots;
    for (std::size_t r = 0; r < m.size(); ++r) {
      for (std::size_t k = 0; k < pivots.size(); ++k) {
        Rational factor = m[r][pivots[k]];
        if (factor == 0) continue;
        for (int j = 0; j < n; ++j) m[r][j] -= factor * m[k][j];
      }
      int pc = -1;
      for (int j = 0; j < n; ++j)
        if (m[r][j] != 0) { pc = j; break; }
      if (pc < 0) continue;
      Rational piv = m[r][pc];
      for (int j = 0; j < n; ++j) m[r][j] /= piv;
      std::size_t slot = pivots.size();
      if (slot != r) m[slot] = m[r];
      pivots.push_back(pc);
    }
    if (static_cast<int>(pivots.size()) != p.num_vars - 1) continue;
    // Canonical direction: first nonzero component scaled to ±1.
    Vec dir = v;
    Rational scale;
    for (const auto& x : dir)
      if (x != 0) { scale = abs(x); break; }
    for (auto& x : dir) x /= scale;
    dirs.insert(dir);
  }
  return {dirs.begin(), dirs.end()};
}

}  // namespace

PolyhedronVertices enumerate_vertices(const LpProblem& p, int var_cap,
                                      bool want_rays, int jobs) {
  p.validate();
  if (p.num_vars > var_cap)
    throw CapExceededError("enumerate_vertices: " + std::to_string(p.num_vars) +
                           " variables exceed cap " + std::to_string(var_cap));
  PolyhedronVertices out;
  if (p.num_vars == 0) return out;

  const auto cons = gather_constraints(p);
  const auto elim = eliminate_equalities(p.num_vars, cons);
  if (elim.infeasible) return out;
  const int nf = static_cast<int>(elim.free_vars.size());
  const int k = nf;  // active inequalities needed on top of the equalities

  // Reduce every inequality onto the free variables.
  std::vector<ReducedIneq> reduced;
  std::vector<int> eq_indices;
  for (const auto& c : cons) {
    if (c.is_eq) {
      eq_indices.push_back(c.index);
      continue;
    }
    Vec w(nf, Rational(0));
    Rational rhs = c.rhs;
    for (int j = 0; j < nf; ++j) w[j] = c.coeffs[elim.free_vars[j]];
    for (std::size_t t = 0; t < elim.pivot_var.size(); ++t) {
      const Rational& coef = c.coeffs[elim.pivot_var[t]];
      if (coef == 0) continue;
      // x_pivot = const - expr·x_free
      rhs -= coef * elim.pivot_const[t];
      for (int j = 0; j < nf; ++j) w[j] -= coef * elim.pivot_expr[t][j];
    }
    bool all_zero = true;
    for (const auto& x : w)
      if (x != 0) { all_zero = false; break; }
    if (all_zero) {
      if (rhs < 0) return out;  // constant infeasible row: empty polyhedron
      continue;
    }
    reduced.push_back({std::move(w), std::move(rhs), c.index});
  }

  std::map<Vec, std::vector<int>, bool (*)(const Vec&, const Vec&)> found(lex_less);
  auto consider = [&](const Vec& free_vals, const std::vector<int>& chosen) {
    // Feasibility against every reduced inequality.
    for (const auto& ri : reduced) {
      if (dot(ri.w, free_vals) > ri.rhs) return;
    }
    Vec x = zeros(p.num_vars);
    for (int j = 0; j < nf; ++j) x[elim.free_vars[j]] = free_vals[j];
    for (std::size_t t = 0; t < elim.pivot_var.size(); ++t) {
      Rational v = elim.pivot_const[t] - dot(elim.pivot_expr[t], free_vals);
      x[elim.pivot_var[t]] = v;
    }
    if (found.count(x)) return;
    std::vector<int> active = eq_indices;
    active.insert(active.end(), chosen.begin(), chosen.end());
    std::sort(active.begin(), active.end());
    found.emplace(std::move(x), std::move(active));
  };

  if (jobs <= 1 || k == 0 || reduced.empty()) {
    BasisSearch(reduced, k, nf).search(consider);
  } else {
    // Partition on the first chosen row; merge deterministically in order.
    int first_max = static_cast<int>(reduced.size()) - k + 1;
    using PartMap = std::map<Vec, std::vector<int>, bool (*)(const Vec&, const Vec&)>;
    std::vector<PartMap> parts;
    parts.reserve(first_max);
    for (int i = 0; i < first_max; ++i) parts.emplace_back(lex_less);
    std::vector<std::thread> workers;
    int stride = std::max(1, (first_max + jobs - 1) / jobs);
    for (int w = 0; w < jobs; ++w) {
      int lo = w * stride, hi = std::min(first_max, lo + stride);
      if (lo >= hi) break;
      workers.emplace_back([&, lo, hi] {
        BasisSearch search(reduced, k, nf);
        for (int first = lo; first < hi; ++first) {
          search.search(
              [&](const Vec& vals, const std::vector<int>& chosen) {
                for (const auto& ri : reduced)
                  if (dot(ri.w, vals) > ri.rhs) return;
                Vec x = zeros(p.num_vars);
                for (int j = 0; j < nf; ++j) x[elim.free_vars[j]] = vals[j];
                for (std::size_t t = 0; t < elim.pivot_var.size(); ++t)
                  x[elim.pivot_var[t]] =
                      elim.pivot_const[t] - dot(elim.pivot_expr[t], vals);
                std::vector<int> active = eq_indices;
                active.insert(active.end(), chosen.begin(), chosen.end());
                std::sort(active.begin(), active.end());
                parts[first].emplace(std::move(x), std::move(active));
              },
              first);
        }
      });
    }
    for (auto& t : workers) t.join();
    for (auto& part : parts)
      for (auto& kv : part)
        found.emplace(kv.first, kv.second);
  }

  for (auto& kv : found) {
    out.vertices.push_back(kv.first);
    out.basis_map.push_back(kv.second);
  }
  if (want_rays && !out.vertices.empty())
    out.rays = recession_rays(p, var_cap);
  return out;
}

}  // namespace bigm
