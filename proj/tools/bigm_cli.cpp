#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "bigm/branch_bound.hpp"
#include "bigm/gadgets.hpp"
#include "bigm/model.hpp"
#include "bigm/oracle.hpp"
#include "bigm/parallel.hpp"
#include "bigm/reformulate.hpp"
#include "bigm/simplex.hpp"
#include "bigm/verify.hpp"

using namespace bigm;
using nlohmann::json;

namespace {

// Exit-code contract: 0 = Yes/success, 1 = No-with-certificate (or
// infeasible), 2 = error with a machine-readable JSON on stdout.
constexpr int kYes = 0, kNo = 1, kError = 2;

struct Ctx {
  std::vector<std::string> args;      // original argv, for the manifest
  std::string out;                    // output directory
  std::vector<std::string> written;   // files recorded in the manifest
  json config;                        // big-M / cap echo for the manifest

  void emit(const std::string& name, const std::string& content) {
    std::filesystem::create_directories(out);
    std::string path = out + "/" + name;
    write_text_file(path, content);
    written.push_back(path);
  }
  void emit_json(const std::string& name, const json& j) {
    emit(name, j.dump(2) + "\n");
  }
  void manifest(const std::string& command, int exit_status,
                const std::vector<std::string>& inputs) {
    json m;
    m["command"] = command;
    m["args"] = args;
    m["inputs"] = inputs;
    m["config"] = config;
    m["outputs"] = written;
    m["exit_status"] = exit_status;
    emit("manifest.json", m.dump(2) + "\n");
  }
};

Vec parse_vec(const std::string& s) {
  Vec v;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    std::string tok = s.substr(pos, comma - pos);
    if (!tok.empty()) v.push_back(parse_rational(tok));
    pos = comma + 1;
  }
  if (v.empty()) throw ParseError("empty rational list");
  return v;
}

json point_json_of(const VerificationReport& rep) { return rep.to_json(); }

int run(std::vector<std::string> args);

// ---------------------------------------------------------------------------

struct CommonFlags {
  std::string instance_path, solution_path, out = ".", config_path;
  std::string md_s, mp_s, per_row_s, eta_s, epsilon_s;
  int cap_follower = 20, cap_vertices = 24, jobs = 0, index = -1;

  void attach(CLI::App* cmd, bool with_instance = true) {
    if (with_instance)
      cmd->add_option("--instance", instance_path, "bilevel instance JSON");
    cmd->add_option("--config", config_path, "JSON config file (flags win)");
    cmd->add_option("--md", md_s, "dual bound M^d");
    cmd->add_option("--mp", mp_s, "primal slack bound M^p");
    cmd->add_option("--per-row-m", per_row_s, "comma list of per-row dual bounds");
    cmd->add_option("--eta", eta_s, "penalty / follower-scale parameter");
    cmd->add_option("--epsilon", epsilon_s, "relative tolerance in (0,1)");
    cmd->add_option("--cap-follower", cap_follower, "max follower rows for pattern enumeration");
    cmd->add_option("--cap-vertices", cap_vertices, "max variables for vertex enumeration");
    cmd->add_option("--jobs", jobs, "worker threads (0 = BIGM_WORKBENCH_JOBS or hardware)");
    cmd->add_option("--out", out, "output directory");
  }

  // Config-file fallback: any flag the user did not pass on the command line
  // is taken from the JSON config when present there.
  void merge_config(CLI::App* cmd) {
    if (config_path.empty()) return;
    json cfg = json::parse(read_text_file(config_path));
    auto fill_s = [&](const char* flag, const char* key, std::string& slot) {
      if (cmd->get_option(flag)->count() == 0 && cfg.contains(key))
        slot = cfg.at(key).is_string() ? cfg.at(key).get<std::string>()
                                       : cfg.at(key).dump();
    };
    auto fill_i = [&](const char* flag, const char* key, int& slot) {
      if (cmd->get_option(flag)->count() == 0 && cfg.contains(key))
        slot = cfg.at(key).get<int>();
    };
    fill_s("--md", "md", md_s);
    fill_s("--mp", "mp", mp_s);
    fill_s("--per-row-m", "per-row-m", per_row_s);
    fill_s("--eta", "eta", eta_s);
    fill_s("--epsilon", "epsilon", epsilon_s);
    fill_i("--cap-follower", "cap-follower", cap_follower);
    fill_i("--cap-vertices", "cap-vertices", cap_vertices);
    fill_i("--jobs", "jobs", jobs);
    if (cmd->get_option("--out")->count() == 0 && cfg.contains("out"))
      out = cfg.at("out").get<std::string>();
  }

  BigMConfig bigm_config(bool need_mp = true) const {
    if (md_s.empty()) throw ValidationError("--md is required here");
    BigMConfig cfg;
    cfg.Md = parse_rational(md_s);
    cfg.Mp = need_mp ? (mp_s.empty() ? throw ValidationError("--mp is required here")
                                     : parse_rational(mp_s))
                     : Rational(1);
    if (!per_row_s.empty()) cfg.per_row_M = parse_vec(per_row_s);
    cfg.validate();
    return cfg;
  }

  Vec per_row_or_md(int m_f) const {
    if (!per_row_s.empty()) return parse_vec(per_row_s);
    if (md_s.empty()) throw ValidationError("--md or --per-row-m is required here");
    return Vec(m_f, parse_rational(md_s));
  }
};

int cmd_reformulate(Ctx& ctx, const CommonFlags& fl, const std::string& method) {
  BlpInstance inst = load_instance(fl.instance_path);
  json var_map;
  MilpProblem milp;
  if (method == "kkt") {
    BigMConfig cfg = fl.bigm_config();
    ctx.config = bigm_config_to_json(cfg);
    KktArtifacts art = kkt_milp(inst, cfg);
    milp = art.milp;
    var_map["x"] = art.var_map.x;
    var_map["y"] = art.var_map.y;
    var_map["lambda"] = art.var_map.lambda;
    var_map["s"] = art.var_map.s;
    var_map["u"] = art.var_map.u;
    var_map["rows"] = {{"coupling", art.row_map.coupling},
                       {"dual_bound", art.row_map.dual_bound},
                       {"slack_bound", art.row_map.slack_bound},
                       {"slack_def", art.row_map.slack_def},
                       {"stationarity", art.row_map.stationarity}};
  } else if (method == "sd") {
    StrongDualityArtifacts art = strong_duality_milp(inst, fl.per_row_or_md(inst.m_f));
    milp = art.milp;
    var_map["x"] = art.var_map.x;
    var_map["y"] = art.var_map.y;
    var_map["lambda"] = art.var_map.lambda;
    var_map["u"] = art.var_map.u;
    var_map["M"] = vec_to_json(art.M_j);
    var_map["strong_duality_row"] = art.strong_duality_row;
  } else if (method == "minmax-dual") {
    if (fl.eta_s.empty()) throw ValidationError("--eta is required here");
    milp = minmax_dual_milp(inst, fl.per_row_or_md(inst.m_f),
                            parse_rational(fl.eta_s));
    var_map["x"] = 0;
    var_map["lambda"] = inst.n_l;
  } else {
    throw ValidationError("unknown method " + method);
  }
  ctx.emit_json("milp.json", milp_to_json(milp));
  ctx.emit("milp.lp", to_lp_format(milp, method));
  ctx.emit_json("var_map.json", var_map);
  return kYes;
}

int cmd_solve(Ctx& ctx, const std::string& milp_path) {
  MilpProblem m = milp_from_json(json::parse(read_text_file(milp_path)));
  MilpOutcome o = solve_milp(m);
  json j;
  j["status"] = o.status == MilpStatus::Optimal ? "optimal" : "infeasible";
  j["nodes"] = o.nodes;
  if (o.status == MilpStatus::Optimal) {
    j["objective"] = rational_to_json(o.objective);
    j["primal"] = vec_to_json(o.primal);
  }
  ctx.emit_json("solution.json", j);
  return o.status == MilpStatus::Optimal ? kYes : kNo;
}

int cmd_oracle(Ctx& ctx, const CommonFlags& fl) {
  BlpInstance inst = load_instance(fl.instance_path);
  OracleResult res = bilevel_solve(inst, fl.cap_follower);
  json j;
  j["z_star"] = rational_to_json(res.z_star);
  j["z_max_unbounded"] = res.z_max_unbounded;
  j["witness_min"] = point_to_json(res.witness_min);
  if (!res.z_max_unbounded) {
    j["z_max"] = rational_to_json(res.z_max);
    j["witness_max"] = point_to_json(res.witness_max);
  }
  j["patterns_solved"] = res.patterns_solved;
  ctx.emit_json("oracle.json", j);
  return kYes;
}

int cmd_verify(Ctx& ctx, const CommonFlags& fl, const std::string& check) {
  BlpInstance inst = load_instance(fl.instance_path);
  VerificationReport rep;
  if (check == "optimality" || check == "eps") {
    if (fl.solution_path.empty())
      throw ValidationError("--solution is required here");
    BilevelPoint cand =
        point_from_json(json::parse(read_text_file(fl.solution_path)));
    if (check == "optimality") {
      rep = verify_bilevel_optimality(inst, cand, fl.cap_follower);
    } else {
      if (fl.epsilon_s.empty()) throw ValidationError("--epsilon is required here");
      rep = verify_eps_optimality(inst, cand, ApproxQuery{parse_rational(fl.epsilon_s)},
                                  fl.cap_follower);
    }
  } else if (check == "gvp-d") {
    if (fl.index < 0) throw ValidationError("--index is required here");
    if (fl.md_s.empty()) throw ValidationError("--md is required here");
    rep = gvp_d(inst, fl.index, parse_rational(fl.md_s), fl.cap_vertices);
  } else if (check == "gvp-d-prime") {
    if (fl.md_s.empty()) throw ValidationError("--md is required here");
    rep = gvp_d_prime(inst, parse_rational(fl.md_s), fl.cap_vertices,
                      resolve_jobs(fl.jobs));
  } else if (check == "audit") {
    BigMConfig cfg = fl.bigm_config();
    ctx.config = bigm_config_to_json(cfg);
    rep = bigm_audit(inst, cfg, fl.cap_vertices);
  } else {
    throw ValidationError("unknown check " + check);
  }
  ctx.emit_json("report.json", point_json_of(rep));
  return rep.verdict == Verdict::Yes ? kYes : kNo;
}

IlpInstance load_ilp(const std::string& ilp_path, const std::string& c_list) {
  IlpInstance ilp;
  if (!ilp_path.empty()) {
    json j = json::parse(read_text_file(ilp_path));
    ilp.c = vec_from_json(j.at("c"));
    if (j.contains("A"))
      for (const auto& row : j.at("A")) ilp.A.push_back(vec_from_json(row));
    if (j.contains("b")) ilp.b = vec_from_json(j.at("b"));
  } else if (!c_list.empty()) {
    ilp.c = parse_vec(c_list);
  } else {
    throw ValidationError("provide --ilp or --c");
  }
  ilp.validate();
  return ilp;
}

struct GadgetFlags {
  std::string family, ilp_path, c_list, a_list, arcs, m_s;
  int vertices = 0, source = 0, sink = -1;
};

int cmd_gadget(Ctx& ctx, const CommonFlags& fl, const GadgetFlags& gf) {
  GadgetBundle bundle;
  if (gf.family == "ilp-kkt") {
    IlpInstance ilp = load_ilp(gf.ilp_path, gf.c_list);
    Rational md = fl.md_s.empty() ? Rational(1) : parse_rational(fl.md_s);
    Rational mp = fl.mp_s.empty() ? Rational(1) : parse_rational(fl.mp_s);
    bundle = gadget_ilp_kkt(ilp, BigMConfig{md, mp, std::nullopt});
  } else if (gf.family == "epigraph") {
    bundle = gadget_epigraph(load_ilp(gf.ilp_path, gf.c_list));
  } else if (gf.family == "sd") {
    Rational m = gf.m_s.empty() ? Rational(1) : parse_rational(gf.m_s);
    bundle = gadget_sd(load_ilp(gf.ilp_path, gf.c_list), m);
  } else if (gf.family == "nocoupling" || gf.family == "nocoupling-minmax") {
    IlpInstance ilp = load_ilp(gf.ilp_path, gf.c_list);
    Rational eta = fl.eta_s.empty() ? 2 * l1_norm(ilp.c) + 1
                                    : parse_rational(fl.eta_s);
    bundle = gadget_nocoupling(ilp, eta, gf.family == "nocoupling-minmax");
  } else if (gf.family == "minmax") {
    IlpInstance ilp = load_ilp(gf.ilp_path, gf.c_list);
    Rational eta = fl.eta_s.empty() ? 2 * l1_norm(ilp.c) + 1
                                    : parse_rational(fl.eta_s);
    Rational m = gf.m_s.empty() ? Rational(1) : parse_rational(gf.m_s);
    bundle = gadget_minmax(ilp, eta, m);
  } else if (gf.family == "hampath") {
    Digraph g;
    g.num_vertices = gf.vertices;
    g.s = gf.source;
    g.t = gf.sink < 0 ? gf.vertices - 1 : gf.sink;
    std::size_t pos = 0;
    while (pos < gf.arcs.size()) {
      std::size_t comma = gf.arcs.find(',', pos);
      if (comma == std::string::npos) comma = gf.arcs.size();
      std::string tok = gf.arcs.substr(pos, comma - pos);
      std::size_t dash = tok.find('-');
      if (dash == std::string::npos) throw ParseError("arc must look like u-v");
      g.arcs.emplace_back(std::stoi(tok.substr(0, dash)),
                          std::stoi(tok.substr(dash + 1)));
      pos = comma + 1;
    }
    bundle = gadget_hampath(g);
  } else if (gf.family == "partition") {
    if (gf.a_list.empty()) throw ValidationError("--a is required here");
    bundle = gadget_partition(PartitionInstance::from(parse_vec(gf.a_list)));
  } else {
    throw ValidationError("unknown gadget family " + gf.family);
  }
  ctx.config = bigm_config_to_json(bundle.cfg);
  std::filesystem::create_directories(ctx.out);
  save_bundle(bundle, ctx.out);
  for (const auto& entry : std::filesystem::directory_iterator(ctx.out))
    if (entry.path().filename() != "manifest.json")
      ctx.written.push_back(entry.path().string());
  std::sort(ctx.written.begin(), ctx.written.end());
  return kYes;
}

int cmd_replay(const std::string& manifest_path) {
  json m = json::parse(read_text_file(manifest_path));
  std::vector<std::string> args = m.at("args").get<std::vector<std::string>>();
  return run(std::move(args));
}

// ---------------------------------------------------------------------------

int run(std::vector<std::string> args) {
  CLI::App app{"exact big-M workbench for optimistic bilevel linear programs"};
  app.require_subcommand(1);

  CommonFlags fl;
  std::string method = "kkt", check = "optimality", milp_path, manifest_path;
  GadgetFlags gf;

  CLI::App* c_ref = app.add_subcommand("reformulate", "emit a single-level MILP");
  fl.attach(c_ref);
  c_ref->add_option("--method", method, "kkt | sd | minmax-dual");

  CLI::App* c_solve = app.add_subcommand("solve", "solve a MILP exactly");
  c_solve->add_option("--milp", milp_path, "MILP JSON")->required();
  c_solve->add_option("--out", fl.out, "output directory");

  CLI::App* c_verify = app.add_subcommand("verify", "run an exact verification");
  fl.attach(c_verify);
  c_verify->add_option("--check", check,
                       "optimality | eps | gvp-d | gvp-d-prime | audit");
  c_verify->add_option("--solution", fl.solution_path, "candidate point JSON");
  c_verify->add_option("--index", fl.index, "dual component (gvp-d)");

  CLI::App* c_audit = app.add_subcommand("audit", "audit the configured bounds");
  fl.attach(c_audit);

  CLI::App* c_gadget = app.add_subcommand("gadget", "emit a hardness gadget bundle");
  fl.attach(c_gadget, false);
  c_gadget->add_option("--family", gf.family)->required();
  c_gadget->add_option("--ilp", gf.ilp_path, "ILP JSON {c, A, b}");
  c_gadget->add_option("--c", gf.c_list, "ILP objective, comma list");
  c_gadget->add_option("--a", gf.a_list, "partition entries, comma list");
  c_gadget->add_option("--m", gf.m_s, "product bound for sd/minmax");
  c_gadget->add_option("--vertices", gf.vertices, "hampath vertex count");
  c_gadget->add_option("--source", gf.source, "hampath source");
  c_gadget->add_option("--sink", gf.sink, "hampath sink (default last)");
  c_gadget->add_option("--arcs", gf.arcs, "hampath arcs, e.g. 0-1,0-2,2-1");

  CLI::App* c_oracle = app.add_subcommand("oracle", "exact bilevel optimum");
  fl.attach(c_oracle);

  CLI::App* c_replay = app.add_subcommand("replay", "re-run a recorded manifest");
  c_replay->add_option("--manifest", manifest_path)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    json err;
    err["error"] = e.what();
    err["kind"] = "usage";
    std::cout << err.dump() << std::endl;
    return kError;
  }

  Ctx ctx;
  ctx.args = args;
  try {
    CLI::App* sub = app.get_subcommands().front();
    if (sub == c_replay) return cmd_replay(manifest_path);
    fl.merge_config(sub);
    ctx.out = fl.out;
    int code = kError;
    std::vector<std::string> inputs;
    if (sub == c_ref) {
      inputs = {fl.instance_path};
      code = cmd_reformulate(ctx, fl, method);
    } else if (sub == c_solve) {
      inputs = {milp_path};
      code = cmd_solve(ctx, milp_path);
    } else if (sub == c_verify || sub == c_audit) {
      inputs = {fl.instance_path};
      if (!fl.solution_path.empty()) inputs.push_back(fl.solution_path);
      code = cmd_verify(ctx, fl, sub == c_audit ? "audit" : check);
    } else if (sub == c_gadget) {
      if (!gf.ilp_path.empty()) inputs.push_back(gf.ilp_path);
      code = cmd_gadget(ctx, fl, gf);
    } else if (sub == c_oracle) {
      inputs = {fl.instance_path};
      code = cmd_oracle(ctx, fl);
    }
    ctx.manifest(sub->get_name(), code, inputs);
    return code;
  } catch (const std::exception& ex) {
    json err;
    err["error"] = ex.what();
    err["kind"] = "error";
    std::cout << err.dump() << std::endl;
    return kError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args));
}
