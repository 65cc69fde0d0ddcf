#include "bigm/model.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>


namespace bigm {

using nlohmann::json;

LpProblem LpProblem::with_vars(int n) {
  LpProblem p;
  p.num_vars = n;
  p.c = zeros(n);
  p.lb.assign(n, std::nullopt);
  p.ub.assign(n, std::nullopt);
  return p;
}

std::string LpProblem::name_of(int var) const {
  if (var < static_cast<int>(var_names.size()) && !var_names[var].empty())
    return var_names[var];
  return "x" + std::to_string(var);
}

void LpProblem::add_ineq(Vec row, Rational rhs) {
  A.push_back(std::move(row));
  b.push_back(std::move(rhs));
}

void LpProblem::add_eq(Vec row, Rational rhs) {
  E.push_back(std::move(row));
  e.push_back(std::move(rhs));
}

void LpProblem::validate() const {
  if (num_vars < 0) throw ValidationError("negative variable count");
  auto check_block = [&](const Mat& M, const Vec& r, const char* what) {
    if (M.size() != r.size())
      throw ValidationError(std::string(what) + ": row/rhs count mismatch");
    for (const auto& row : M)
      if (static_cast<int>(row.size()) != num_vars)
        throw ValidationError(std::string(what) + ": row width mismatch");
  };
  check_block(A, b, "inequalities");
  check_block(E, e, "equalities");
  if (static_cast<int>(c.size()) != num_vars)
    throw ValidationError("objective width mismatch");
  if (static_cast<int>(lb.size()) != num_vars || static_cast<int>(ub.size()) != num_vars)
    throw ValidationError("bound vector width mismatch");
  for (int i = 0; i < num_vars; ++i)
    if (lb[i] && ub[i] && *lb[i] > *ub[i])
      throw ValidationError("variable " + name_of(i) + " has lower bound above upper bound");
}

void MilpProblem::mark_binary(int var) {
  auto it = std::lower_bound(binary.begin(), binary.end(), var);
  if (it == binary.end() || *it != var) binary.insert(it, var);
  lp.lb[var] = Rational(0);
  lp.ub[var] = Rational(1);
}

void MilpProblem::validate() const {
  lp.validate();
  for (std::size_t k = 0; k < binary.size(); ++k) {
    int v = binary[k];
    if (v < 0 || v >= lp.num_vars) throw ValidationError("binary index out of range");
    if (k > 0 && binary[k] <= binary[k - 1])
      throw ValidationError("binary indices must be sorted and unique");
    if (!lp.lb[v] || !lp.ub[v] || *lp.lb[v] < 0 || *lp.ub[v] > 1)
      throw ValidationError("binary variable " + lp.name_of(v) + " must carry bounds within [0,1]");
  }
}

void BigMConfig::validate() const {
  if (Md <= 0 || Mp <= 0) throw ValidationError("big-M bounds must be strictly positive");
  if (per_row_M)
    for (const auto& m : *per_row_M)
      if (m <= 0) throw ValidationError("per-row big-M bounds must be strictly positive");
}

bool BlpInstance::has_coupling() const {
  for (const auto& row : G)
    for (const auto& v : row)
      if (v != 0) return true;
  return false;
}

void BlpInstance::validate() const {
  auto dim = [&](const Vec& v, int n, const char* what) {
    if (static_cast<int>(v.size()) != n)
      throw ValidationError(std::string("dimension mismatch: ") + what);
  };
  auto dims = [&](const Mat& M, int rows, int cols, const char* what) {
    if (static_cast<int>(M.size()) != rows)
      throw ValidationError(std::string("dimension mismatch: ") + what + " row count");
    for (const auto& row : M)
      if (static_cast<int>(row.size()) != cols)
        throw ValidationError(std::string("dimension mismatch: ") + what + " row width");
  };
  if (n_l < 0 || n_f < 0 || m_l < 0 || m_f < 0)
    throw ValidationError("negative dimension");
  dim(a, n_l, "a");
  dim(d, n_f, "d");
  dim(g, n_f, "g");
  dims(H, m_l, n_l, "H");
  dims(G, m_l, n_f, "G");
  dim(h, m_l, "h");
  dims(L, m_f, n_l, "L");
  dims(F, m_f, n_f, "F");
  dim(f, m_f, "f");
  if (min_max) {
    if (has_coupling())
      throw ValidationError("min_max instance requires G = 0");
    for (int i = 0; i < n_f; ++i)
      if (d[i] != -g[i])
        throw ValidationError("min_max instance requires d = -g");
  }
}

LpProblem high_point_polytope(const BlpInstance& inst) {
  LpProblem p = LpProblem::with_vars(inst.n_l + inst.n_f);
  for (int i = 0; i < inst.n_l; ++i) p.var_names.push_back("x" + std::to_string(i));
  for (int i = 0; i < inst.n_f; ++i) p.var_names.push_back("y" + std::to_string(i));
  for (int r = 0; r < inst.m_l; ++r) {
    Vec row = zeros(p.num_vars);
    for (int i = 0; i < inst.n_l; ++i) row[i] = inst.H[r][i];
    for (int i = 0; i < inst.n_f; ++i) row[inst.n_l + i] = inst.G[r][i];
    p.add_ineq(std::move(row), inst.h[r]);
  }
  for (int r = 0; r < inst.m_f; ++r) {
    Vec row = zeros(p.num_vars);
    for (int i = 0; i < inst.n_l; ++i) row[i] = inst.L[r][i];
    for (int i = 0; i < inst.n_f; ++i) row[inst.n_l + i] = inst.F[r][i];
    p.add_ineq(std::move(row), inst.f[r]);
  }
  return p;
}

// ---------------------------------------------------------------------------
// JSON

json rational_to_json(const Rational& r) { return json(r.str()); }

Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number_unsigned()) return Rational(j.get<unsigned long long>());
  throw ParseError("expected rational as \"p/q\" string or integer, got " + j.dump());
}

json vec_to_json(const Vec& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(rational_to_json(x));
  return out;
}

Vec vec_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("expected array of rationals");
  Vec out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(rational_from_json(x));
  return out;
}

static json mat_to_json(const Mat& m) {
  json out = json::array();
  for (const auto& row : m) out.push_back(vec_to_json(row));
  return out;
}

static Mat mat_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("expected matrix as array of arrays");
  Mat out;
  out.reserve(j.size());
  for (const auto& row : j) out.push_back(vec_from_json(row));
  return out;
}

BlpInstance instance_from_json(const json& j) {
  BlpInstance inst;
  try {
    inst.n_l = j.at("n_l").get<int>();
    inst.n_f = j.at("n_f").get<int>();
    inst.m_l = j.at("m_l").get<int>();
    inst.m_f = j.at("m_f").get<int>();
    inst.a = vec_from_json(j.at("a"));
    inst.d = vec_from_json(j.at("d"));
    inst.g = vec_from_json(j.at("g"));
    inst.H = mat_from_json(j.at("H"));
    inst.G = mat_from_json(j.at("G"));
    inst.h = vec_from_json(j.at("h"));
    inst.L = mat_from_json(j.at("L"));
    inst.F = mat_from_json(j.at("F"));
    inst.f = vec_from_json(j.at("f"));
    inst.leader_binary = j.at("leader_binary").get<bool>();
    inst.min_max = j.at("min_max").get<bool>();
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed instance: ") + ex.what());
  }
  inst.validate();
  return inst;
}

json instance_to_json(const BlpInstance& inst) {
  json j;
  j["n_l"] = inst.n_l;
  j["n_f"] = inst.n_f;
  j["m_l"] = inst.m_l;
  j["m_f"] = inst.m_f;
  j["a"] = vec_to_json(inst.a);
  j["d"] = vec_to_json(inst.d);
  j["g"] = vec_to_json(inst.g);
  j["H"] = mat_to_json(inst.H);
  j["G"] = mat_to_json(inst.G);
  j["h"] = vec_to_json(inst.h);
  j["L"] = mat_to_json(inst.L);
  j["F"] = mat_to_json(inst.F);
  j["f"] = vec_to_json(inst.f);
  j["leader_binary"] = inst.leader_binary;
  j["min_max"] = inst.min_max;
  return j;
}

BlpInstance load_instance(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& ex) {
    throw ParseError(path + ": " + ex.what());
  }
  return instance_from_json(j);
}

void save_instance(const BlpInstance& inst, const std::string& path) {
  write_text_file(path, instance_to_json(inst).dump(2) + "\n");
}

static json opt_vec_to_json(const std::vector<OptRational>& v) {
  json out = json::array();
  for (const auto& x : v)
    out.push_back(x ? rational_to_json(*x) : json(nullptr));
  return out;
}

static std::vector<OptRational> opt_vec_from_json(const json& j) {
  std::vector<OptRational> out;
  for (const auto& x : j)
    out.push_back(x.is_null() ? OptRational{} : OptRational(rational_from_json(x)));
  return out;
}

json lp_to_json(const LpProblem& p) {
  json j;
  j["num_vars"] = p.num_vars;
  j["c"] = vec_to_json(p.c);
  j["A"] = mat_to_json(p.A);
  j["b"] = vec_to_json(p.b);
  j["E"] = mat_to_json(p.E);
  j["e"] = vec_to_json(p.e);
  j["lb"] = opt_vec_to_json(p.lb);
  j["ub"] = opt_vec_to_json(p.ub);
  j["var_names"] = p.var_names;
  return j;
}

LpProblem lp_from_json(const json& j) {
  LpProblem p;
  try {
    p.num_vars = j.at("num_vars").get<int>();
    p.c = vec_from_json(j.at("c"));
    p.A = mat_from_json(j.at("A"));
    p.b = vec_from_json(j.at("b"));
    p.E = mat_from_json(j.at("E"));
    p.e = vec_from_json(j.at("e"));
    p.lb = opt_vec_from_json(j.at("lb"));
    p.ub = opt_vec_from_json(j.at("ub"));
    if (j.contains("var_names")) p.var_names = j.at("var_names").get<std::vector<std::string>>();
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed LP: ") + ex.what());
  }
  p.validate();
  return p;
}

json milp_to_json(const MilpProblem& p) {
  json j = lp_to_json(p.lp);
  j["binary"] = p.binary;
  return j;
}

MilpProblem milp_from_json(const json& j) {
  MilpProblem p;
  p.lp = lp_from_json(j);
  try {
    if (j.contains("binary")) p.binary = j.at("binary").get<std::vector<int>>();
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed MILP: ") + ex.what());
  }
  p.validate();
  return p;
}

json point_to_json(const BilevelPoint& p) {
  json j;
  j["x"] = vec_to_json(p.x);
  j["y"] = vec_to_json(p.y);
  if (p.lambda) j["lambda"] = vec_to_json(*p.lambda);
  if (p.u) j["u"] = vec_to_json(*p.u);
  if (p.s) j["s"] = vec_to_json(*p.s);
  return j;
}

BilevelPoint point_from_json(const json& j) {
  BilevelPoint p;
  try {
    p.x = vec_from_json(j.at("x"));
    p.y = vec_from_json(j.at("y"));
    if (j.contains("lambda")) p.lambda = vec_from_json(j.at("lambda"));
    if (j.contains("u")) p.u = vec_from_json(j.at("u"));
    if (j.contains("s")) p.s = vec_from_json(j.at("s"));
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed solution point: ") + ex.what());
  }
  return p;
}

json bigm_config_to_json(const BigMConfig& cfg) {
  json j;
  j["md"] = rational_to_json(cfg.Md);
  j["mp"] = rational_to_json(cfg.Mp);
  if (cfg.per_row_M) j["per_row_m"] = vec_to_json(*cfg.per_row_M);
  return j;
}

BigMConfig bigm_config_from_json(const json& j) {
  BigMConfig cfg;
  try {
    cfg.Md = rational_from_json(j.at("md"));
    cfg.Mp = rational_from_json(j.at("mp"));
    if (j.contains("per_row_m")) cfg.per_row_M = vec_from_json(j.at("per_row_m"));
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed big-M config: ") + ex.what());
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// LP-format export

namespace {

Integer lcm(const Integer& a, const Integer& b) {
  return a / gcd(a, b) * b;
}

// True when p/q has a terminating decimal expansion; writes it into out.
bool terminating_decimal(const Rational& r, std::string& out) {
  Integer den = denominator(r);
  Integer num = numerator(r);
  int twos = 0, fives = 0;
  while (den % 2 == 0) { den /= 2; ++twos; }
  while (den % 5 == 0) { den /= 5; ++fives; }
  if (den != 1) return false;
  int digits = std::max(twos, fives);
  Integer scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  Integer scaled = num * scale / denominator(r);
  std::string s = scaled.str();
  bool neg = !s.empty() && s[0] == '-';
  if (neg) s = s.substr(1);
  while (static_cast<int>(s.size()) <= digits) s = "0" + s;
  if (digits > 0) s.insert(s.size() - digits, ".");
  out = (neg ? "-" : "") + s;
  return true;
}

void append_terms(std::ostringstream& os, const LpProblem& p, const Vec& row) {
  // Rows are pre-scaled to integer coefficients by the caller.
  bool first = true;
  for (int i = 0; i < p.num_vars; ++i) {
    if (row[i] == 0) continue;
    const Rational& v = row[i];
    if (first) {
      if (v < 0) os << "- ";
      first = false;
    } else {
      os << (v < 0 ? " - " : " + ");
    }
    Rational av = abs(v);
    if (av != 1) os << av.str() << " ";
    os << p.name_of(i);
  }
  if (first) os << "0";
}

Vec scaled_row(const Vec& row, const Rational& rhs, Rational& rhs_out) {
  Integer mult = 1;
  for (const auto& v : row) mult = lcm(mult, denominator(v));
  mult = lcm(mult, denominator(rhs));
  Vec out;
  out.reserve(row.size());
  for (const auto& v : row) out.push_back(v * mult);
  rhs_out = rhs * mult;
  return out;
}

}  // namespace

std::string to_lp_format(const MilpProblem& p, const std::string& name) {
  std::ostringstream os;
  os << "\\ " << name << "\n";
  Integer obj_mult = 1;
  for (const auto& v : p.lp.c) obj_mult = lcm(obj_mult, denominator(v));
  bool scale_obj = false;
  for (const auto& v : p.lp.c) {
    std::string dec;
    if (!terminating_decimal(v, dec)) scale_obj = true;
  }
  if (scale_obj && obj_mult != 1)
    os << "\\ objective scaled by " << obj_mult.str() << "\n";
  os << "Minimize\n obj: ";
  {
    Vec row = p.lp.c;
    if (scale_obj)
      for (auto& v : row) v *= obj_mult;
    // Non-scaled path may still hold fractions with terminating decimals.
    bool first = true;
    for (int i = 0; i < p.lp.num_vars; ++i) {
      if (row[i] == 0) continue;
      if (first) {
        if (row[i] < 0) os << "- ";
        first = false;
      } else {
        os << (row[i] < 0 ? " - " : " + ");
      }
      Rational av = abs(row[i]);
      if (av != 1) {
        std::string dec;
        terminating_decimal(av, dec);
        os << dec << " ";
      }
      os << p.lp.name_of(i);
    }
    if (first) os << "0";
  }
  os << "\nSubject To\n";
  for (int r = 0; r < p.lp.num_ineq(); ++r) {
    Rational rhs;
    Vec row = scaled_row(p.lp.A[r], p.lp.b[r], rhs);
    os << " r" << r << ": ";
    append_terms(os, p.lp, row);
    os << " <= " << rhs.str() << "\n";
  }
  for (int r = 0; r < p.lp.num_eq(); ++r) {
    Rational rhs;
    Vec row = scaled_row(p.lp.E[r], p.lp.e[r], rhs);
    os << " e" << r << ": ";
    append_terms(os, p.lp, row);
    os << " = " << rhs.str() << "\n";
  }
  os << "Bounds\n";
  for (int i = 0; i < p.lp.num_vars; ++i) {
    const auto& lo = p.lp.lb[i];
    const auto& hi = p.lp.ub[i];
    std::string dec;
    if (!lo && !hi) {
      os << " " << p.lp.name_of(i) << " free\n";
    } else {
      os << " ";
      if (lo) {
        terminating_decimal(*lo, dec) ? os << dec : os << lo->str();
        os << " <= ";
      } else {
        os << "-inf <= ";
      }
      os << p.lp.name_of(i);
      if (hi) {
        os << " <= ";
        terminating_decimal(*hi, dec) ? os << dec : os << hi->str();
      }
      os << "\n";
    }
  }
  if (!p.binary.empty()) {
    os << "Binaries\n";
    for (int v : p.binary) os << " " << p.lp.name_of(v);
    os << "\n";
  }
  os << "End\n";
  return os.str();
}

std::string to_lp_format(const LpProblem& p, const std::string& name) {
  MilpProblem m;
  m.lp = p;
  return to_lp_format(m, name);
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bigm
