// satrep: saturation, preorder, simulation and Hellinger reports for
// repeated-measurement instruments. Reports are JSON (version 1).
//
// Exit codes: 0 success / Finite / preorder holds, 2 ExceededCap / preorder
// fails, 1 any error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "satrep/commands.hpp"
#include "satrep/error.hpp"
#include "satrep/io.hpp"

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw satrep::Error(satrep::ErrorCode::ParseError, path + ": cannot open for writing");
  out << text;
}

std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const int n = std::stoi(item, &used);
    if (used != item.size() || n < 1) throw satrep::Error(satrep::ErrorCode::ParseError, "--n-list: bad entry \"" + item + "\"");
    out.push_back(n);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saturation of repeated quantum measurements"};
  app.require_subcommand(1);

  satrep::cli::RunConfig config;
  std::string tol_file, out_file, csv_file, n_list;
  std::uint64_t seed = 0;
  std::vector<std::string> files;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--tol-file", tol_file, "JSON file of tolerance overrides")->check(CLI::ExistingFile);
    sub->add_option("--out", out_file, "write the JSON report here instead of stdout");
  };

  auto* sat = app.add_subcommand("saturation", "saturation step of an instrument");
  sat->add_option("file", files, "problem file")->required()->expected(1);
  sat->add_option("--n-max", config.n_max, "largest level n tested (A_{n+1} vs A_n)")->check(CLI::PositiveNumber);
  add_common(sat);

  auto* pre = app.add_subcommand("preorder", "decide A ≼ B for two POVM problem files");
  pre->add_option("files", files, "problem files A and B")->required()->expected(2);
  add_common(pre);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo trajectories of a binary instrument");
  sim->add_option("file", files, "problem file with a \"state\"")->required()->expected(1);
  sim->add_option("--seed", seed, "RNG seed")->required();
  sim->add_option("--n-steps", config.n_steps, "measurements per trajectory");
  sim->add_option("--n-traj", config.n_traj, "number of trajectories");
  sim->add_option("--bins", config.bins, "histogram bins on [0, 1]")->check(CLI::PositiveNumber);
  sim->add_option("--threads", config.threads, "worker threads (output is identical for any count)");
  sim->add_option("--csv", csv_file, "write per-trajectory final frequencies here");
  add_common(sim);

  auto* hel = app.add_subcommand("hellinger", "H² between repeated-measurement outcome laws of two states");
  hel->add_option("file", files, "problem file")->required()->expected(1);
  hel->add_option("--n-max", config.n_max, "tabulate n = 1..N")->check(CLI::PositiveNumber);
  hel->add_option("--n-list", n_list, "comma-separated n values (overrides --n-max)");
  add_common(hel);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? satrep::cli::kExitOk : satrep::cli::kExitError;
  }

  try {
    if (!tol_file.empty())
      config.tol = satrep::io::tolerances_from_json(satrep::io::read_json_file(tol_file), config.tol, tol_file);
    if (!n_list.empty()) config.n_list = parse_n_list(n_list);

    satrep::cli::CommandResult result;
    if (sat->parsed()) {
      result = satrep::cli::cmd_saturation(satrep::io::load_problem(files[0], config.tol), config);
    } else if (pre->parsed()) {
      result = satrep::cli::cmd_preorder(satrep::io::load_problem(files[0], config.tol),
                                         satrep::io::load_problem(files[1], config.tol), config);
    } else if (sim->parsed()) {
      config.seed = seed;
      result = satrep::cli::cmd_simulate(satrep::io::load_problem(files[0], config.tol), config);
    } else {
      result = satrep::cli::cmd_hellinger(satrep::io::load_problem(files[0], config.tol), config);
    }

    if (result.report["result"].value("underflow_events", 0) > 0)
      std::cerr << "warning: " << result.report["result"]["underflow_events"]
                << " steps renormalized a post-measurement state with trace < 1e-12\n";
    const std::string text = result.report.dump(2) + "\n";
    if (out_file.empty())
      std::cout << text;
    else
      write_text(out_file, text);
    if (result.csv && !csv_file.empty()) write_text(csv_file, *result.csv);
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return satrep::cli::kExitError;
  }
}
