// unicurrent: batch CLI for uni-directional current experiments.
//
// Subcommands mirror the experiment kinds in the config schema; every run is
// driven by a JSON config, with flags taking precedence over config fields
// (flags > config > defaults). Exit codes: 0 success, 2 config parse error,
// 3 validation error, 4 numerical failure.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "unicurrent/config.hpp"
#include "unicurrent/errors.hpp"
#include "unicurrent/runner.hpp"
#include "unicurrent/version.hpp"

namespace {

using unicurrent::config::ExperimentConfig;
using unicurrent::config::ExperimentKind;

struct CliState {
  std::string config_path;
  std::string out_dir;
  std::string expected_kind;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  int threads = 1;
  bool validate_only = false;
};

int emit_error(const std::string& type, const std::string& message, int code) {
  nlohmann::json err{{"error", {{"type", type}, {"message", message}, {"exit_code", code}}}};
  std::cout << err.dump() << std::endl;
  return code;
}

int execute(const CliState& state) {
  ExperimentConfig cfg;
  try {
    cfg = unicurrent::config::parse_config_file(state.config_path);
  } catch (const nlohmann::json::parse_error& e) {
    return emit_error("parse", e.what(), 2);
  } catch (const unicurrent::ValidationError& e) {
    return emit_error("validation", e.what(), 3);
  } catch (const std::exception& e) {
    return emit_error("parse", e.what(), 2);
  }

  if (!state.expected_kind.empty() &&
      unicurrent::config::to_string(cfg.kind) != state.expected_kind) {
    return emit_error("validation",
                      "config declares experiment '" + unicurrent::config::to_string(cfg.kind) +
                          "' but subcommand is '" + state.expected_kind + "'",
                      3);
  }
  if (state.validate_only) {
    std::cout << "ok config_hash=" << cfg.config_hash << std::endl;
    return 0;
  }

  unicurrent::runner::RunOptions options;
  if (!state.out_dir.empty()) {
    options.out_dir = state.out_dir;
  } else if (const char* env = std::getenv("UNICURRENT_OUT_DIR"); env && *env) {
    options.out_dir = env;
  }
  options.seed_override = state.seed;
  options.tol_override = state.tol;
  options.threads = state.threads;

  try {
    const unicurrent::runner::RunOutcome outcome = unicurrent::runner::run(cfg, options);
    std::cout << outcome.summary_line << std::endl;
    for (const std::string& path : outcome.artifacts)
      std::cout << "wrote " << path << std::endl;
    return 0;
  } catch (const unicurrent::ValidationError& e) {
    return emit_error("validation", e.what(), 3);
  } catch (const std::invalid_argument& e) {
    return emit_error("validation", e.what(), 3);
  } catch (const unicurrent::ConvergenceFailure& e) {
    return emit_error("numerical", e.what(), 4);
  } catch (const std::exception& e) {
    return emit_error("numerical", e.what(), 4);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uni-directional current toolkit"};
  app.set_version_flag("--version", std::string(unicurrent::kVersion));
  app.require_subcommand(1);

  CliState state;
  const std::vector<std::string> kinds = {
      "propagate",        "sweep-dt", "mass-beyond", "current", "diffusion-flux",
      "simulate-absorbing", "zeno",     "moments"};

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", state.config_path, "JSON experiment config")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out-dir", state.out_dir,
                    "output directory (default: $UNICURRENT_OUT_DIR or cwd)");
    sub->add_option("--seed", state.seed, "override the config seed");
    sub->add_option("--tol", state.tol, "override the config tolerance");
    sub->add_option("--threads", state.threads, "worker thread cap")
        ->check(CLI::PositiveNumber);
  };

  for (const std::string& kind : kinds) {
    CLI::App* sub = app.add_subcommand(kind, "run a '" + kind + "' experiment");
    add_common(sub);
    sub->callback([&state, kind]() { state.expected_kind = kind; });
  }
  {
    CLI::App* sub = app.add_subcommand("validate-config", "parse and validate a config");
    add_common(sub);
    sub->callback([&state]() { state.validate_only = true; });
  }

  CLI11_PARSE(app, argc, argv);
  return execute(state);
}
