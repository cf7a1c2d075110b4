#include "herding/cli.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace herding;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("herding_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

cli::RunOptions short_run(const fs::path& out_dir) {
  cli::RunOptions o;
  o.config = HERDING_DEFAULT_CONFIG;
  o.t_max = 2.0;
  o.out_dir = out_dir;
  return o;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string("\"") + HERDING_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("run: default config herds and writes every artifact") {
  const auto dir = scratch("success");
  auto opts = short_run(dir);
  opts.t_max.reset();
  std::ostringstream out, err;
  CHECK(cli::cmd_run(opts, out, err) == cli::kExitSuccess);
  CHECK(fs::exists(dir / cli::kTrajectoryFile));
  CHECK(fs::exists(dir / cli::kMetricsFile));
  CHECK(fs::exists(dir / cli::kConfigEchoFile));
  CHECK(out.str().find("herded") == 0);
  fs::remove_all(dir);
}

TEST_CASE("run: exit codes") {
  const auto dir = scratch("codes");
  std::ostringstream out, err;

  auto zero = short_run(dir);
  zero.t_max = 0.0;
  CHECK(cli::cmd_run(zero, out, err) == cli::kExitNotHerded);

  CHECK(cli::cmd_run(short_run(dir), out, err) == cli::kExitNotHerded);

  const auto bad = dir / "bad.json";
  write_file(bad, R"({"gains": {"gamma_x": 0.5}})");
  auto bad_opts = short_run(dir);
  bad_opts.config = bad;
  std::ostringstream bad_err;
  CHECK(cli::cmd_run(bad_opts, out, bad_err) == cli::kExitError);
  CHECK(bad_err.str().find("gamma_x") != std::string::npos);

  auto missing = short_run(dir);
  missing.config = dir / "missing.json";
  CHECK(cli::cmd_run(missing, out, err) == cli::kExitError);

  auto bad_dt = short_run(dir);
  bad_dt.dt = 0.5;
  CHECK(cli::cmd_run(bad_dt, out, err) == cli::kExitError);
  fs::remove_all(dir);
}

TEST_CASE("run: format selection") {
  const auto dir = scratch("format");
  auto opts = short_run(dir);
  opts.format = cli::OutputFormat::Csv;
  std::ostringstream out, err;
  cli::cmd_run(opts, out, err);
  CHECK(fs::exists(dir / cli::kTrajectoryFile));
  CHECK_FALSE(fs::exists(dir / cli::kMetricsFile));
  fs::remove_all(dir);
}

TEST_CASE("run: identical invocations give byte-identical CSV, and the echo reproduces it") {
  const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  std::ostringstream out, err;
  auto opts = short_run(a);
  opts.mode = ControlMode::Centralized;
  opts.seed = 99;
  cli::cmd_run(opts, out, err);
  opts.out_dir = b;
  cli::cmd_run(opts, out, err);
  const auto first = read_file(a / cli::kTrajectoryFile);
  CHECK_FALSE(first.empty());
  CHECK(first == read_file(b / cli::kTrajectoryFile));

  cli::RunOptions echo;
  echo.config = a / cli::kConfigEchoFile;
  echo.out_dir = c;
  cli::cmd_run(echo, out, err);
  CHECK(first == read_file(c / cli::kTrajectoryFile));
  CHECK(read_file(a / cli::kConfigEchoFile) == read_file(c / cli::kConfigEchoFile));
  for (const auto& d : {a, b, c}) fs::remove_all(d);
}

TEST_CASE("verify") {
  std::ostringstream out, err;
  cli::VerifyOptions opts;
  opts.checks = {"jacobian", "sontag"};
  CHECK(cli::cmd_verify(opts, out, err) == cli::kExitSuccess);
  CHECK(out.str().find("[PASS] jacobian") != std::string::npos);
  CHECK(out.str().find("[PASS] sontag") != std::string::npos);

  std::ostringstream vac_out, vac_err;
  opts.checks = {"all"};
  opts.trials = 0;
  CHECK(cli::cmd_verify(opts, vac_out, vac_err) == cli::kExitSuccess);
  CHECK(vac_err.str().find("warning") != std::string::npos);

  std::ostringstream lit_out, lit_err;
  cli::VerifyOptions literal;
  literal.checks = {"jacobian"};
  literal.jacobian_mode = JacobianMode::PaperLiteral;
  CHECK(cli::cmd_verify(literal, lit_out, lit_err) == cli::kExitSuccess);
  CHECK(lit_out.str().find("paper_literal") != std::string::npos);

  std::ostringstream bad_out, bad_err;
  cli::VerifyOptions bad;
  bad.checks = {"speed"};
  CHECK(cli::cmd_verify(bad, bad_out, bad_err) == cli::kExitError);
}

TEST_CASE("binary exit codes") {
  const auto dir = scratch("binary");
  const std::string cfg = std::string("--config \"") + HERDING_DEFAULT_CONFIG + "\" --out-dir \"" + dir.string() + "\"";
  CHECK(run_binary("run " + cfg + " --t-max 0") == cli::kExitNotHerded);
  CHECK(run_binary("run " + cfg + " --t-max 40 --mode centralized --format json") == cli::kExitSuccess);
  CHECK(run_binary("run " + cfg + " --mode swarm") != cli::kExitSuccess);
  CHECK(run_binary("run --out-dir \"" + dir.string() + "\"") != cli::kExitSuccess);
  CHECK(run_binary("verify --checks sontag --trials 50") == cli::kExitSuccess);
  CHECK(run_binary("verify --checks bogus") == cli::kExitError);
  fs::remove_all(dir);
}
