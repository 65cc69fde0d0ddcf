#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bigm/rational.hpp"

namespace bigm {

using OptRational = std::optional<Rational>;

/// Continuous LP in inequality/equality form:
///   min cᵀx  s.t.  A x ≤ b,  E x = e,  lb ≤ x ≤ ub (either side optional).
struct LpProblem {
  int num_vars = 0;
  Vec c;
  Mat A;
  Vec b;
  Mat E;
  Vec e;
  std::vector<OptRational> lb;
  std::vector<OptRational> ub;
  std::vector<std::string> var_names;  // optional; defaults to x<i>

  static LpProblem with_vars(int n);

  int num_ineq() const { return static_cast<int>(A.size()); }
  int num_eq() const { return static_cast<int>(E.size()); }
  std::string name_of(int var) const;

  void add_ineq(Vec row, Rational rhs);
  void add_eq(Vec row, Rational rhs);
  void validate() const;
};

/// LpProblem plus binary marks. Binary variables carry bounds [0,1].
struct MilpProblem {
  LpProblem lp;
  std::vector<int> binary;  // sorted, unique variable indices

  void mark_binary(int var);
  void validate() const;
};

/// Global dual bound M^d, global primal slack bound M^p, and optional
/// per-follower-row dual bounds for the strong-duality path.
struct BigMConfig {
  Rational Md;
  Rational Mp;
  std::optional<Vec> per_row_M;

  void validate() const;
};

/// The nine-block bilevel data: leader min aᵀx + dᵀy* over Hx + Gy* ≤ h with
/// y* an optimistic follower response of min gᵀy s.t. Lx + Fy ≤ f.
struct BlpInstance {
  int n_l = 0, n_f = 0, m_l = 0, m_f = 0;
  Vec a, d, g;
  Mat H, G;
  Vec h;
  Mat L, F;
  Vec f;
  bool leader_binary = false;
  bool min_max = false;

  void validate() const;
  bool has_coupling() const;
  Rational leader_objective(const Vec& x, const Vec& y) const {
    return dot(a, x) + dot(d, y);
  }
};

struct BilevelPoint {
  Vec x, y;
  std::optional<Vec> lambda;
  std::optional<Vec> u;
  std::optional<Vec> s;
};

// JSON instance schema (rationals as "p/q" strings, integers allowed):
// {"n_l","n_f","m_l","m_f","a","d","g","H","G","h","L","F","f",
//  "leader_binary","min_max"}.
BlpInstance load_instance(const std::string& path);
BlpInstance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const BlpInstance& inst);
void save_instance(const BlpInstance& inst, const std::string& path);

// The joint (x,y) feasibility system Hx + Gy ≤ h, Lx + Fy ≤ f. Membership of
// x in the induced region is decided by fixing x and testing feasibility.
LpProblem high_point_polytope(const BlpInstance& inst);

// JSON round-trip for LP/MILP problems and solution points.
nlohmann::json rational_to_json(const Rational& r);
Rational rational_from_json(const nlohmann::json& j);
nlohmann::json vec_to_json(const Vec& v);
Vec vec_from_json(const nlohmann::json& j);
nlohmann::json lp_to_json(const LpProblem& p);
LpProblem lp_from_json(const nlohmann::json& j);
nlohmann::json milp_to_json(const MilpProblem& p);
MilpProblem milp_from_json(const nlohmann::json& j);
nlohmann::json point_to_json(const BilevelPoint& p);
BilevelPoint point_from_json(const nlohmann::json& j);
nlohmann::json bigm_config_to_json(const BigMConfig& cfg);
BigMConfig bigm_config_from_json(const nlohmann::json& j);

// Plain-text LP-format export with deterministic row ordering. Rows whose
// coefficients are non-integral are scaled to integers; a non-terminating
// objective is scaled too, with the factor noted in a comment line.
std::string to_lp_format(const MilpProblem& p, const std::string& name = "problem");
std::string to_lp_format(const LpProblem& p, const std::string& name = "problem");

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace bigm
