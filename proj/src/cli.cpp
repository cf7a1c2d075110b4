#include "herding/cli.hpp"

#include "herding/error.hpp"
#include "herding/io.hpp"
#include "herding/sim.hpp"
#include "herding/verify.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <functional>

namespace herding::cli {

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    ScenarioConfig cfg = io::load_config(options.config);
    if (options.mode) cfg.mode = *options.mode;
    if (options.seed) cfg.seed = *options.seed;
    if (options.dt) cfg.dt = *options.dt;
    if (options.t_max) cfg.t_max = *options.t_max;
    cfg.validate();

    const auto log = sim::run(cfg);

    std::filesystem::create_directories(options.out_dir);
    io::write_atomic(options.out_dir / kConfigEchoFile, io::config_to_json(cfg));
    if (options.format != OutputFormat::Json) {
      io::write_atomic(options.out_dir / kTrajectoryFile, io::trajectory_csv(log));
    }
    if (options.format != OutputFormat::Csv) {
      io::write_atomic(options.out_dir / kMetricsFile, io::metrics_json(log, cfg.hold_time));
    }

    const auto& s = log.summary;
    if (s.error) {
      err << "error: " << *s.error << "\n";
      return kExitError;
    }
    out << fmt::format("{} after {} steps (t = {:.2f} s), min h2_pos = {:.4g}, relaxations = {}\n",
                       s.success ? "herded" : "not herded", s.steps, s.t_end, s.min_h2_pos, s.relax_count);
    return s.success ? kExitSuccess : kExitNotHerded;
  } catch (const HerdingError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: IoError: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
  struct Check {
    const char* name;
    std::size_t default_trials;
    std::function<verify::CheckResult(std::size_t)> run;
  };
  const std::vector<Check> checks{
      {"jacobian", verify::kJacobianTrials,
       [&](std::size_t n) { return verify::check_jacobian(n, options.seed, options.jacobian_mode); }},
      {"sontag", verify::kSontagTrials, [&](std::size_t n) { return verify::check_sontag(n, options.seed); }},
      {"qp", verify::kQpTrials, [&](std::size_t n) { return verify::check_qp(n, options.seed); }},
      {"invariance", verify::kInvarianceTrials,
       [&](std::size_t n) { return verify::check_invariance(n, options.seed); }},
  };

  auto selected = [&](const std::string& name) {
    return std::any_of(options.checks.begin(), options.checks.end(),
                       [&](const std::string& c) { return c == "all" || c == name; });
  };
  for (const auto& c : options.checks) {
    const bool known = c == "all" || std::any_of(checks.begin(), checks.end(), [&](const Check& k) { return c == k.name; });
    if (!known) {
      err << "error: unknown check \"" << c << "\"\n";
      return kExitError;
    }
  }
  if (options.trials && *options.trials == 0) err << "warning: --trials 0 makes every check vacuous\n";

  bool all_passed = true;
  for (const auto& c : checks) {
    if (!selected(c.name)) continue;
    const auto res = c.run(options.trials.value_or(c.default_trials));
    all_passed = all_passed && res.passed;
    out << fmt::format("[{}] {:<10} trials={:<5} worst={:.3e} threshold={:.1e}\n", res.passed ? "PASS" : "FAIL",
                       res.name, res.trials, res.worst, res.threshold);
    for (const auto& note : res.notes) out << "       " << note << "\n";
  }
  return all_passed ? kExitSuccess : kExitCheckFailed;
}

}  // namespace herding::cli
