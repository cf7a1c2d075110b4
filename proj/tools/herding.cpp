#include "herding/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <iostream>
#include <map>

int main(int argc, char** argv) {
  using namespace herding;

  CLI::App app{"Multi-robot herding simulator with backstepping barrier-function safety filters"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log debug events (clamps, relaxations)");

  cli::RunOptions run;
  std::string mode, format = "both";
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write trajectory and metrics files");
  run_cmd->add_option("--config", run.config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--mode", mode, "Override the control mode")
      ->check(CLI::IsMember({"centralized", "decentralized"}));
  run_cmd->add_option("--seed", run.seed, "Override the perturbation seed");
  run_cmd->add_option("--dt", run.dt, "Override the integration step [s]");
  run_cmd->add_option("--t-max", run.t_max, "Override the horizon [s]");
  run_cmd->add_option("--out-dir", run.out_dir, "Output directory");
  run_cmd->add_option("--format", format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));

  cli::VerifyOptions verify;
  std::string checks = "all", jacobian_mode = "exact_per_herder";
  auto* verify_cmd = app.add_subcommand("verify", "Run the numerical verification suites");
  verify_cmd->add_option("--checks", checks, "Comma list of jacobian,sontag,qp,invariance or all");
  verify_cmd->add_option("--trials", verify.trials, "Trials per check (default: per-check)");
  verify_cmd->add_option("--seed", verify.seed, "Random seed");
  verify_cmd->add_option("--jacobian-mode", jacobian_mode, "exact_per_herder or paper_literal")
      ->check(CLI::IsMember({"exact_per_herder", "paper_literal"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cli::kExitError;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);

  if (*run_cmd) {
    if (!mode.empty()) run.mode = mode == "centralized" ? ControlMode::Centralized : ControlMode::Decentralized;
    static const std::map<std::string, cli::OutputFormat> formats{
        {"csv", cli::OutputFormat::Csv}, {"json", cli::OutputFormat::Json}, {"both", cli::OutputFormat::Both}};
    run.format = formats.at(format);
    return cli::cmd_run(run, std::cout, std::cerr);
  }

  verify.checks.clear();
  std::string::size_type start = 0;
  while (start <= checks.size()) {
    const auto end = checks.find(',', start);
    verify.checks.push_back(checks.substr(start, end == std::string::npos ? std::string::npos : end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  verify.jacobian_mode =
      jacobian_mode == "paper_literal" ? JacobianMode::PaperLiteral : JacobianMode::ExactPerHerder;
  return cli::cmd_verify(verify, std::cout, std::cerr);
}
