// Exercises the command-line front end as a child process: exit-code
// contract for every subcommand, config-file fallback, and manifest replay.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "bigm/gadgets.hpp"
#include "bigm/model.hpp"

using namespace bigm;
namespace fs = std::filesystem;

namespace {

const std::string kCli = BIGM_CLI_PATH;

int run(const std::string& args) {
  int status = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / "bigm_cli_test") {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("gadget, reformulate, solve, oracle: success paths and outputs") {
  TempDir tmp;
  CHECK(run("gadget --family ilp-kkt --c -1 --out " + tmp / "g") == 0);
  CHECK(fs::exists(tmp / "g/instance.json"));
  CHECK(fs::exists(tmp / "g/kkt.milp.lp"));
  CHECK(fs::exists(tmp / "g/manifest.json"));

  CHECK(run("reformulate --instance " + tmp / "g/instance.json" +
            " --method kkt --md 2 --mp 2 --out " + tmp / "r") == 0);
  CHECK(fs::exists(tmp / "r/milp.json"));
  CHECK(fs::exists(tmp / "r/milp.lp"));
  CHECK(fs::exists(tmp / "r/var_map.json"));

  CHECK(run("solve --milp " + tmp / "r/milp.json" + " --out " + tmp / "s") == 0);
  nlohmann::json sol = nlohmann::json::parse(read_text_file(tmp / "s/solution.json"));
  CHECK(sol.at("status") == "optimal");
  CHECK(rational_from_json(sol.at("objective")) == -1);

  CHECK(run("oracle --instance " + tmp / "g/instance.json" + " --out " + tmp / "o") == 0);
  nlohmann::json orc = nlohmann::json::parse(read_text_file(tmp / "o/oracle.json"));
  CHECK(rational_from_json(orc.at("z_star")) == -1);
}

TEST_CASE("verify and audit: Yes is 0, No is 1, report always written") {
  TempDir tmp;
  REQUIRE(run("gadget --family partition --a 1,1 --out " + tmp / "g") == 0);
  std::string inst = tmp / "g/instance.json";

  // (1,1) admits the balanced signing (+1,-1), so the unit bound fails.
  CHECK(run("verify --instance " + inst + " --check gvp-d-prime --md 1 --out " +
            tmp / "no") == 1);
  nlohmann::json rep = nlohmann::json::parse(read_text_file(tmp / "no/report.json"));
  CHECK(rep.at("verdict") == "No");

  CHECK(run("verify --instance " + inst + " --check gvp-d --index 0 --md 2 --out " +
            tmp / "yes") == 0);
  CHECK(nlohmann::json::parse(read_text_file(tmp / "yes/report.json")).at("verdict") == "Yes");

  CHECK(run("audit --instance " + inst + " --md 1 --mp 2 --out " + tmp / "a") == 1);
  CHECK(fs::exists(tmp / "a/report.json"));
}

TEST_CASE("errors exit with status 2") {
  TempDir tmp;
  // Too few vertices for the path gadget.
  CHECK(run("gadget --family hampath --vertices 2 --source 0 --sink 1 "
            "--arcs 0-1 --out " + tmp / "g") == 2);
  // Missing required bound.
  REQUIRE(run("gadget --family ilp-kkt --c -1 --out " + tmp / "ok") == 0);
  CHECK(run("reformulate --instance " + tmp / "ok/instance.json" +
            " --method kkt --out " + tmp / "r") == 2);
  // Unknown flag and unknown subcommand.
  CHECK(run("solve --no-such-flag 1") == 2);
  CHECK(run("frobnicate") == 2);
  // Unreadable input.
  CHECK(run("oracle --instance " + tmp / "missing.json" + " --out " + tmp / "o") == 2);
}

TEST_CASE("config file supplies flag defaults; explicit flags win") {
  TempDir tmp;
  REQUIRE(run("gadget --family ilp-kkt --c -1 --out " + tmp / "g") == 0);
  write_text_file(tmp / "cfg.json", R"({"md": "2", "mp": "2"})");

  CHECK(run("reformulate --instance " + tmp / "g/instance.json" +
            " --method kkt --config " + tmp / "cfg.json" + " --out " + tmp / "c1") == 0);
  REQUIRE(run("solve --milp " + tmp / "c1/milp.json" + " --out " + tmp / "s1") == 0);
  nlohmann::json sol = nlohmann::json::parse(read_text_file(tmp / "s1/solution.json"));
  CHECK(rational_from_json(sol.at("objective")) == -1);  // bounds 2/2 from the file

  // The command line overrides the file: unit bounds hide the optimum.
  CHECK(run("reformulate --instance " + tmp / "g/instance.json" +
            " --method kkt --config " + tmp / "cfg.json" +
            " --md 1 --mp 1 --out " + tmp / "c2") == 0);
  REQUIRE(run("solve --milp " + tmp / "c2/milp.json" + " --out " + tmp / "s2") == 0);
  sol = nlohmann::json::parse(read_text_file(tmp / "s2/solution.json"));
  CHECK(rational_from_json(sol.at("objective")) == 0);
}

TEST_CASE("manifest replay reproduces byte-identical reports") {
  TempDir tmp;
  REQUIRE(run("gadget --family partition --a 1,2 --out " + tmp / "g") == 0);
  REQUIRE(run("verify --instance " + tmp / "g/instance.json" +
              " --check gvp-d-prime --md 1 --out " + tmp / "v") == 0);
  std::string report = read_text_file(tmp / "v/report.json");
  std::string manifest = read_text_file(tmp / "v/manifest.json");
  fs::remove(tmp / "v/report.json");

  CHECK(run("replay --manifest " + tmp / "v/manifest.json") == 0);
  CHECK(read_text_file(tmp / "v/report.json") == report);
  CHECK(read_text_file(tmp / "v/manifest.json") == manifest);
}
