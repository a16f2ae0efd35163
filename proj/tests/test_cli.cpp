// End-to-end tests of the command-line tool: spawns the real binary, checks
// exit codes, file formats, and that emitted numbers round-trip exactly
// against an in-process solve.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "json.hpp"
#include "pucci/bvp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pucci;

namespace {

const fs::path kWork = fs::temp_directory_path() / "pucci_cli_test";

struct WorkDir {
  WorkDir() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
};
const WorkDir kInit;

int run_cli(const std::string& args, const std::string& stdout_to = "",
            const std::string& stderr_to = "", const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + PUCCI_CLI_BIN + " " + args;
  cmd += stdout_to.empty() ? " > /dev/null" : " > " + stdout_to;
  cmd += stderr_to.empty() ? " 2> /dev/null" : " 2> " + stderr_to;
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

std::vector<std::array<double, 3>> load_csv(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line == "r,u,du");
  std::vector<std::array<double, 3>> rows;
  while (std::getline(in, line)) {
    std::array<double, 3> row{};
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &row[0], &row[1],
                        &row[2]) == 3);
    rows.push_back(row);
  }
  return rows;
}

const std::string kBase =
    "--op pucci+ --lambda 1 --Lambda 2 --n 3 --p 3 --a 1 --b 2";

}  // namespace

TEST_CASE("exponents subcommand prints the closed-form thresholds") {
  const fs::path out = kWork / "exponents.json";
  CHECK(run_cli("exponents --lambda 1 --Lambda 2 --n 3", out.string()) == 0);
  const json j = load_json(out);
  CHECK(j.at("n_tilde_plus").get<double>() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(j.at("n_tilde_minus").get<double>() == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(j.at("p_plus").is_string());
  CHECK(j.at("p_plus").get<std::string>() == "inf");
  CHECK(j.at("p_minus").get<double>() ==
        doctest::Approx(5.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("solve-annulus writes a summary that matches an in-process solve") {
  const fs::path dir = kWork / "annulus";
  CHECK(run_cli("solve-annulus " + kBase + " --sign + --out " + dir.string()) ==
        0);

  const json s = load_json(dir / "summary.json");
  CHECK(s.at("spec").at("operator") == "pucci+");
  CHECK(s.at("spec").at("b").get<double>() == 2.0);
  CHECK(std::abs(s.at("boundary_defect").get<double>()) <= 1e-8);
  CHECK(s.at("residual").get<double>() <= 1e-6);
  CHECK(s.at("classification") == "finite");
  const auto radii = s.at("nodal_radii").get<std::vector<double>>();
  REQUIRE(radii.size() == 2);
  CHECK(radii[0] == 1.0);
  CHECK(radii[1] == 2.0);
  for (const auto& c : s.at("checks")) CHECK(c.at("pass").get<bool>());

  // the CSV must round-trip exactly against the library's own solution
  ProblemSpec spec;
  spec.kind = OperatorKind::pucci_plus();
  spec.params = {1.0, 2.0, 3};
  spec.p = 3.0;
  spec.domain = AnnulusDomain{1.0, 2.0};
  spec.sign = SignChoice::Positive;
  const NodalSolution sol = solve_dirichlet_annulus(spec, SolverControls{});
  CHECK(s.at("alpha").get<double>() == sol.shot_parameter);

  const auto rows = load_csv(dir / "profile.csv");
  REQUIRE(rows.size() == 1001);
  CHECK(rows.front()[0] == 1.0);
  CHECK(rows.front()[1] == 0.0);
  CHECK(rows.back()[0] == 2.0);
  for (std::size_t i = 0; i < rows.size(); i += 97) {
    const auto [u, du] = sol.profile.eval(rows[i][0]);
    CHECK(rows[i][1] == u);
    CHECK(rows[i][2] == du);
  }
}

TEST_CASE("reruns are byte-identical") {
  const fs::path d1 = kWork / "rerun_a", d2 = kWork / "rerun_b";
  CHECK(run_cli("solve-annulus " + kBase + " --out " + d1.string()) == 0);
  CHECK(run_cli("solve-annulus " + kBase + " --out " + d2.string()) == 0);
  CHECK(slurp(d1 / "summary.json") == slurp(d2 / "summary.json"));
  CHECK(slurp(d1 / "profile.csv") == slurp(d2 / "profile.csv"));
}

TEST_CASE("config file supplies values and flags override it") {
  const fs::path cfg = kWork / "cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({"operator":"pucci+","lambda":1,"Lambda":2,"n":3,"p":3,)"
        << R"("a":1,"b":2,"sign":"+","out":")" << (kWork / "cfg_run").string()
        << R"("})";
  }
  CHECK(run_cli("solve-annulus --config " + cfg.string()) == 0);
  CHECK(slurp(kWork / "cfg_run" / "summary.json") ==
        slurp(kWork / "rerun_a" / "summary.json"));

  // flag wins over the config's out directory
  CHECK(run_cli("solve-annulus --config " + cfg.string() + " --out " +
                (kWork / "cfg_run2").string()) == 0);
  CHECK(slurp(kWork / "cfg_run2" / "profile.csv") ==
        slurp(kWork / "rerun_a" / "profile.csv"));
}

TEST_CASE("unknown config keys are rejected with exit 3") {
  const fs::path cfg = kWork / "bad_cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({"lambda":1,"Lambda":2,"n":3,"p":3,"a":1,"b":2,"typo_key":1})";
  }
  const fs::path err = kWork / "bad_cfg_err.json";
  CHECK(run_cli("solve-annulus --config " + cfg.string(), "", err.string()) ==
        3);
  const json e = load_json(err);
  CHECK(e.at("error").at("type") == "invalid-config");
  CHECK(e.at("error").at("message").get<std::string>().find("typo_key") !=
        std::string::npos);
}

TEST_CASE("inverted radii exit with code 3 and a JSON diagnostic") {
  const fs::path err = kWork / "inverted_err.json";
  CHECK(run_cli("solve-annulus --op pucci+ --lambda 1 --Lambda 2 --n 3 --p 3 "
                "--a 2 --b 1 --out " +
                    (kWork / "inverted").string(),
                "", err.string()) == 3);
  CHECK(load_json(err).at("error").at("type") == "invalid-config");
}

TEST_CASE("shots that neither vanish nor decay exit with code 4") {
  const fs::path dir = kWork / "undet";
  CHECK(run_cli("shoot --op pucci- --lambda 1 --Lambda 2 --n 3 --p 7 --a 1 "
                "--alpha 1 --r-max 50 --out " +
                    dir.string()) == 4);
  const json s = load_json(dir / "summary.json");
  CHECK(s.at("classification") == "undetermined");
  CHECK(s.at("zeros").empty());
}

TEST_CASE("unreachable targets exit with code 2") {
  const fs::path err = kWork / "noroot_err.json";
  CHECK(run_cli("solve-ball --op pucci- --lambda 1 --Lambda 2 --n 3 --p 7 "
                "--R 1 --r-max 50 --out " +
                    (kWork / "noroot").string(),
                "", err.string()) == 2);
  const json e = load_json(err);
  const std::string type = e.at("error").at("type").get<std::string>();
  CHECK((type == "no-root" || type == "no-bracket"));
}

TEST_CASE("sweep output is ordered by parameter and thread-count independent") {
  const fs::path d1 = kWork / "sweep_a", d2 = kWork / "sweep_b";
  const std::string args =
      "sweep --op pucci+ --lambda 1 --Lambda 2 --n 3 --p 3 --a 1 "
      "--values 100,1,1000,10 --out ";
  CHECK(run_cli(args + d1.string()) == 0);
  CHECK(run_cli(args + d2.string(), "", "", "PUCCI_RADIAL_THREADS=1") == 0);

  std::ifstream in(d1 / "sweep.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "alpha,tau,rho,u_tau,classification");
  std::vector<double> alphas, taus;
  while (std::getline(in, line)) {
    double a_val = 0, tau = 0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf", &a_val, &tau) == 2);
    alphas.push_back(a_val);
    taus.push_back(tau);
  }
  // rows come out sorted by parameter regardless of the order given
  REQUIRE(alphas.size() == 4);
  CHECK(alphas == std::vector<double>{1.0, 10.0, 100.0, 1000.0});
  CHECK(slurp(d1 / "sweep.csv") == slurp(d2 / "sweep.csv"));
  // the arch maximum moves inward as the launch slope grows
  CHECK(taus[0] > taus[1]);
  CHECK(taus[1] > taus[2]);
  CHECK(taus[2] > taus[3]);
}

TEST_CASE("verify accepts a fresh solve and rejects a tampered record") {
  const fs::path dir = kWork / "verify_me";
  CHECK(run_cli("solve-annulus-nodal " + kBase + " --k 2 --out " +
                dir.string()) == 0);
  const fs::path report = kWork / "verify_report.json";
  CHECK(run_cli("verify --summary " + (dir / "summary.json").string(),
                report.string()) == 0);
  const json v = load_json(report);
  CHECK(v.at("all_pass").get<bool>());
  for (const auto& c : v.at("checks")) CHECK(c.at("pass").get<bool>());

  // corrupt the recorded slope parameter; the re-solve refits the true one
  // and the record-consistency comparison must notice
  json tampered = load_json(dir / "summary.json");
  tampered["alpha"] = tampered["alpha"].get<double>() * 1.05;
  const fs::path bad = kWork / "tampered.json";
  {
    std::ofstream out(bad);
    out << tampered.dump(2) << "\n";
  }
  CHECK(run_cli("verify --summary " + bad.string()) == 1);
}

TEST_CASE("verify confirms a shoot record even when a diagnostic failed") {
  // a loose-tolerance free shot carries enough interpolation error that the
  // residual check may honestly fail; the record still plays back exactly,
  // which is what verification certifies
  const fs::path dir = kWork / "verify_shoot";
  CHECK(run_cli("shoot --op pucci+ --lambda 1 --Lambda 2 --n 3 --p 3 --a 1 "
                "--alpha 1 --r-max 50 --out " + dir.string()) == 0);
  const fs::path report = kWork / "verify_shoot_report.json";
  CHECK(run_cli("verify --summary " + (dir / "summary.json").string(),
                report.string()) == 0);
  const json v = load_json(report);
  CHECK(v.at("verified").get<bool>());
  for (const auto& c : v.at("checks"))
    if (c.at("name") == "record-consistency" || c.at("name") == "checks-reproduce")
      CHECK(c.at("measured").get<double>() == 0.0);

  // the verdict must not hinge on every diagnostic being green: the recorded
  // and re-run check outcomes agree, and that is what is being certified
  const json s = load_json(dir / "summary.json");
  auto flags = [](const json& arr) {
    std::map<std::string, bool> m;
    for (const auto& c : arr)
      m[c.at("name").get<std::string>()] = c.at("pass").get<bool>();
    return m;
  };
  const auto rec = flags(s.at("checks"));
  for (const auto& [name, pass] : flags(v.at("checks")))
    if (rec.count(name)) CHECK(rec.at(name) == pass);
}

TEST_CASE("missing required values exit with code 3") {
  CHECK(run_cli("solve-annulus --op pucci+ --lambda 1 --Lambda 2 --n 3 "
                "--p 3 --a 1") == 3);  // no --b
  CHECK(run_cli("exponents --lambda 1 --n 3") == 3);  // no --Lambda
}
