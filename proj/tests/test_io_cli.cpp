#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "satrep/commands.hpp"
#include "satrep/error.hpp"
#include "satrep/io.hpp"
#include "satrep/preorder.hpp"

using namespace satrep;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fixture(const std::string& name) { return std::string(SATREP_FIXTURES) + "/" + name; }

std::vector<fs::path> problem_fixtures() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(SATREP_FIXTURES))
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string parse_error_of(const std::string& text) {
  try {
    io::parse_problem_text(text, "doc.json");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    return e.what();
  }
  FAIL("expected a parse error");
  return {};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("every fixture parses and round-trips") {
  const auto files = problem_fixtures();
  CHECK(files.size() >= 10);
  for (const auto& f : files) {
    CAPTURE(f.string());
    const auto p = io::load_problem(f.string());
    const json once = io::serialize(p);
    CHECK(once["version"] == 1);
    const json twice = io::serialize(io::parse_problem(once, "roundtrip"));
    CHECK(once == twice);
  }
}

TEST_CASE("serialization writes complex scalars as pairs") {
  const auto p = io::parse_problem_text(R"({"version": 1, "effect": [[0.3, 0], [0, 0.7]]})");
  const json j = io::serialize(p);
  CHECK(j["effect"][0][0] == json::array({0.3, 0.0}));
  const auto back = io::parse_problem(j);
  CHECK(back.luders_effect()->matrix() == p.luders_effect()->matrix());
}

TEST_CASE("parse errors carry positions") {
  CHECK(contains(parse_error_of(R"({"version": 1, "effect": [[0.3, 0], [0, "x"]]})"), "doc.json:/effect/1/1"));
  CHECK(contains(parse_error_of(R"({"version": 2, "effect": [[1]]})"), "doc.json:/version"));
  CHECK(contains(parse_error_of(R"({"effect": [[1]]})"), "missing \"version\""));
  CHECK(contains(parse_error_of(R"({"version": 1, "builder": "ladder", "d": 1})"), "doc.json:/d"));
  CHECK(contains(parse_error_of(R"({"version": 1, "builder": "nope"})"), "doc.json:/builder"));
  CHECK(contains(parse_error_of(R"({"version": 1, "effect": [[1.5, 0], [0, 0]]})"), "doc.json:/effect"));
  CHECK(contains(parse_error_of(R"({"version": 1, "effect": [[0.5, 1], [0, 0.5]]})"), "doc.json:/effect"));
  CHECK(contains(parse_error_of(R"({"version": 1, "effect": [[0.5]], "tolerances": {"bogus": 1}})"),
                 "doc.json:/tolerances"));
  CHECK(contains(parse_error_of(R"({"version": 1, "effect": [[0.5]], "state": {"vector": [1, 1]}})"),
                 "doc.json:/state"));
  CHECK(contains(parse_error_of(R"({"version": 1, "instrument": {"outcomes": [{"label": 0, "kraus": [[[0.5]]]}]}})"),
                 "doc.json:/instrument"));
  CHECK(contains(parse_error_of(R"({"version": 1, "povm": {"outcomes": [{"label": 0, "effect": [[0.5]]}]}})"),
                 "doc.json:/povm"));
  CHECK(contains(parse_error_of(R"({"version": 1, "effect": [[0.5]], "povm": {}})"), "exactly one"));
  CHECK(contains(parse_error_of(R"({"version": 1, )"), "doc.json"));
}

TEST_CASE("labels parse by JSON type") {
  CHECK(io::label_from_json(json(3), "x").is_int());
  CHECK(io::label_from_json(json(0.3), "x").is_real());
  CHECK(io::label_from_json(json("up"), "x").is_string());
  const auto s = io::label_from_json(json::array({1, 0}), "x");
  REQUIRE(s.is_sequence());
  CHECK(s.as_sequence().size() == 2);
  CHECK(io::to_json(s) == json::array({1, 0}));
}

TEST_CASE("tolerance overrides") {
  const auto t = io::tolerances_from_json(json{{"feas_tol", 1e-8}, {"enumeration_cap", 128}}, Tolerances{}, "t");
  CHECK(t.feas_tol == 1e-8);
  CHECK(t.enumeration_cap == 128);
  CHECK(t.psd_tol == Tolerances{}.psd_tol);
  CHECK_THROWS_AS(io::tolerances_from_json(json{{"feas_tol", "x"}}, Tolerances{}, "t"), Error);

  const auto p = io::load_problem(fixture("luders_rotated.json"));
  CHECK(io::effective_tolerances(p, Tolerances{}).feas_tol == 1e-8);
  const auto report = cli::cmd_saturation(p, cli::RunConfig{});
  CHECK(report.report["config"]["tolerances"]["feas_tol"] == 1e-8);
}

TEST_CASE("saturation command") {
  cli::RunConfig config;
  const auto ladder4 = cli::cmd_saturation(io::load_problem(fixture("ladder_4.json")), config);
  CHECK(ladder4.exit_code == cli::kExitOk);
  CHECK(ladder4.report["result"]["verdict"] == "Finite");
  CHECK(ladder4.report["result"]["step"] == 3);
  CHECK(ladder4.report["version"] == 1);
  CHECK(ladder4.report["command"] == "saturation");
  CHECK(ladder4.report["timing_ms"].is_number());

  const auto proj = cli::cmd_saturation(io::load_problem(fixture("luders_projection.json")), config);
  CHECK(proj.report["result"]["step"] == 1);

  config.n_max = 6;
  const auto unsharp = cli::cmd_saturation(io::load_problem(fixture("luders_diag.json")), config);
  CHECK(unsharp.exit_code == cli::kExitNegative);
  CHECK(unsharp.report["result"]["verdict"] == "ExceededCap");
  CHECK(unsharp.report["result"]["step"] == 6);
  CHECK(unsharp.report["result"]["chain"].size() == 6);

  CHECK_THROWS_AS(cli::cmd_saturation(io::load_problem(fixture("povm_fine.json")), config), Error);
}

TEST_CASE("preorder command") {
  const cli::RunConfig config;
  const auto binary = io::load_problem(fixture("binary_effect.json"));
  const auto spectral = io::load_problem(fixture("spectral_effect.json"));

  const auto holds = cli::cmd_preorder(binary, spectral, config);
  CHECK(holds.exit_code == cli::kExitOk);
  const auto& cert = holds.report["result"]["certificate"];
  CHECK(cert["holds"] == true);
  // Columns are the sources 0.3 and 0.7, rows the targets 0 and 1: (1−λ, λ).
  const auto& m = cert["kernel"]["matrix"];
  CHECK(m[0][0].get<double>() == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(m[1][0].get<double>() == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(m[0][1].get<double>() == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(m[1][1].get<double>() == doctest::Approx(0.7).epsilon(1e-9));

  const auto self = cli::cmd_preorder(binary, binary, config);
  CHECK(self.report["result"]["certificate"]["kernel"]["matrix"] == json::array({{1.0, 0.0}, {0.0, 1.0}}));

  const auto fails = cli::cmd_preorder(spectral, binary, config);
  CHECK(fails.exit_code == cli::kExitNegative);
  CHECK(fails.report["result"]["certificate"]["holds"] == false);
  CHECK(fails.report["result"]["certificate"]["kernel"].is_null());
  CHECK(fails.report["result"]["certificate"]["gap"].get<double>() >= 0.01);
}

TEST_CASE("simulate command") {
  cli::RunConfig config;
  config.seed = 2024;
  config.n_traj = 2000;
  const auto eig = cli::cmd_simulate(io::load_problem(fixture("luders_eigenstate.json")), config);
  const auto& mode = eig.report["result"]["mode_bin"];
  CHECK(mode[0].get<double>() <= 0.7 + 1e-12);
  CHECK(mode[1].get<double>() >= 0.7 - 1e-12);
  REQUIRE(eig.csv);
  CHECK(std::count(eig.csv->begin(), eig.csv->end(), '\n') == 2001);

  const auto sup = cli::cmd_simulate(io::load_problem(fixture("luders_diag.json")), config);
  const auto& masses = sup.report["result"]["histogram"]["masses"];
  const auto& edges = sup.report["result"]["histogram"]["edges"];
  double low = 0.0, high = 0.0, middle = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const double centre = 0.5 * (edges[i].get<double>() + edges[i + 1].get<double>());
    const double m = masses[i].get<double>();
    if (std::abs(centre - 0.3) < 0.1) low += m;
    else if (std::abs(centre - 0.7) < 0.1) high += m;
    else middle += m;
  }
  CHECK(low > 0.4);
  CHECK(high > 0.4);
  CHECK(middle < 0.05);

  config.n_traj = 0;
  const auto empty = cli::cmd_simulate(io::load_problem(fixture("luders_diag.json")), config);
  CHECK(empty.exit_code == cli::kExitOk);
  CHECK(*empty.csv == "trajectory,frequency\n");
  CHECK(empty.report["result"]["mean_frequency"].is_null());

  cli::RunConfig no_seed;
  CHECK_THROWS_AS(cli::cmd_simulate(io::load_problem(fixture("luders_diag.json")), no_seed), Error);
  CHECK_THROWS_AS(cli::cmd_simulate(io::load_problem(fixture("ladder_3.json")), config), Error);
}

TEST_CASE("hellinger command") {
  cli::RunConfig config;
  config.n_max = 6;
  const auto r = cli::cmd_hellinger(io::load_problem(fixture("luders_diag.json")), config);
  const auto& rows = r.report["result"]["rows"];
  REQUIRE(rows.size() == 6);
  CHECK(r.report["result"]["strictly_increasing"] == true);
  CHECK(r.report["result"]["all_below_one"] == true);
  CHECK(std::abs(rows[1]["h2_enumerated"].get<double>() - 0.16) <= 1e-12);
  for (const auto& row : rows)
    CHECK(std::abs(row["h2_enumerated"].get<double>() - row["h2_closed_form"].get<double>()) <= 1e-9);

  config.n_list = {1, 3, 5};
  const auto same = cli::cmd_hellinger(io::load_problem(fixture("luders_equal_states.json")), config);
  for (const auto& row : same.report["result"]["rows"]) CHECK(row["h2_enumerated"].get<double>() == doctest::Approx(0.0));
  CHECK(same.report["result"]["rows"].size() == 3);
}

TEST_CASE("reports reproduce their runs from the echoed config") {
  cli::RunConfig config;
  config.seed = 77;
  config.n_traj = 300;
  config.n_steps = 40;
  config.bins = 20;
  config.threads = 3;
  const auto problem = io::load_problem(fixture("luders_diag.json"));
  const auto first = cli::cmd_simulate(problem, config);

  const auto& echo = first.report["config"];
  cli::RunConfig replay;
  replay.tol = io::tolerances_from_json(echo["tolerances"], Tolerances{}, "echo");
  replay.seed = echo["seed"].get<std::uint64_t>();
  replay.n_traj = echo["n_traj"];
  replay.n_steps = echo["n_steps"];
  replay.bins = echo["bins"];
  replay.n_max = echo["n_max"];
  const auto second = cli::cmd_simulate(problem, replay);
  CHECK(first.report["result"] == second.report["result"]);
  CHECK(*first.csv == *second.csv);
}

#ifdef SATREP_CLI
namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SATREP_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("command-line exit codes and outputs") {
  const auto tmp = fs::temp_directory_path() / "satrep_cli_test";
  fs::create_directories(tmp);
  CHECK(run_cli("saturation " + fixture("ladder_3.json")) == 0);
  CHECK(run_cli("saturation " + fixture("luders_diag.json") + " --n-max 3") == 2);
  CHECK(run_cli("preorder " + fixture("binary_effect.json") + " " + fixture("spectral_effect.json")) == 0);
  CHECK(run_cli("preorder " + fixture("spectral_effect.json") + " " + fixture("binary_effect.json")) == 2);
  CHECK(run_cli("saturation /nonexistent.json") == 1);
  CHECK(run_cli("simulate " + fixture("luders_diag.json")) == 1);  // --seed missing
  CHECK(run_cli("frobnicate") == 1);

  const auto out = (tmp / "report.json").string();
  const auto csv = (tmp / "freq.csv").string();
  CHECK(run_cli("simulate " + fixture("luders_diag.json") + " --seed 3 --n-traj 20 --n-steps 10 --bins 5 --out " +
                out + " --csv " + csv) == 0);
  const json report = io::read_json_file(out);
  CHECK(report["config"]["bins"] == 5);
  CHECK(report["result"]["histogram"]["masses"].size() == 5);
  std::ifstream in(csv);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string lines = ss.str();
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 21);

  CHECK(run_cli("saturation " + fixture("ladder_3.json") + " --tol-file " + fixture("tolerances/tight_tolerances.json") +
                " --out " + out) == 0);
  CHECK(io::read_json_file(out)["config"]["tolerances"]["enumeration_cap"] == 2048);
  CHECK(run_cli("hellinger " + fixture("luders_diag.json") + " --n-list 1,2,8 --out " + out) == 0);
  CHECK(io::read_json_file(out)["result"]["rows"].size() == 3);
  fs::remove_all(tmp);
}
#endif
