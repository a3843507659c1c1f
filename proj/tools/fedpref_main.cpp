#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fedpref/cli/commands.hpp"

int main(int argc, char** argv) {
  namespace cli = fedpref::cli;
  cli::configure_logging();

  CLI::App app{"Federated learning simulator for preference-heterogeneous clients"};
  app.require_subcommand(1);

  cli::RunOptions run;
  std::uint64_t seed = 0;
  std::string algo;
  auto* run_cmd = app.add_subcommand("run", "Execute a run or campaign from a config file");
  run_cmd->add_option("--config", run.config, "Experiment config (JSON)")->required();
  run_cmd->add_option("--out", run.out, "Output directory")->required();
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Override federation.seed");
  auto* algo_opt = run_cmd->add_option("--algo", algo, "Override federation.algorithm");
  run_cmd->add_option("--threads", run.threads, "Worker threads for local training")
      ->check(CLI::PositiveNumber);

  std::vector<std::filesystem::path> dirs;
  std::filesystem::path summary_json;
  auto* sum_cmd = app.add_subcommand("summarize", "Mean and std-dev of run metrics per algorithm");
  sum_cmd->add_option("dirs", dirs, "Run or campaign directories")->required();
  auto* json_opt = sum_cmd->add_option("--json", summary_json, "Also write the table as JSON");

  std::filesystem::path solutions;
  std::filesystem::path ref_front;
  std::vector<double> ref_point;
  auto* met_cmd = app.add_subcommand("metrics", "Multi-objective metrics of a solutions CSV");
  met_cmd->add_option("--solutions", solutions, "Solutions CSV")->required();
  met_cmd->add_option("--ref-point", ref_point, "Hypervolume reference point, comma separated")
      ->required()
      ->delimiter(',');
  auto* front_opt = met_cmd->add_option("--ref-front", ref_front, "Reference front CSV for IGD");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitConfig;
  }

  if (*run_cmd) {
    if (*seed_opt) run.seed = seed;
    if (*algo_opt) run.algorithm = algo;
    return cli::run(run, std::cerr);
  }
  if (*sum_cmd) {
    std::optional<std::filesystem::path> out;
    if (*json_opt) out = summary_json;
    return cli::summarize(dirs, out, std::cout, std::cerr);
  }
  std::optional<std::filesystem::path> front;
  if (*front_opt) front = ref_front;
  return cli::metrics(solutions, ref_point, front, std::cout, std::cerr);
}
