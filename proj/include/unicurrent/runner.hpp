#pragma once

// Drives one experiment from a validated config: evaluates the observable
// across the control range, persists CSV/JSON artifacts, and returns a
// one-line summary. Sweep points are pruned by the initial data's validity
// bound (dt <= scale/100); any failure mid-sweep persists the partial
// results flagged as aborted, then rethrows.

#include <optional>
#include <string>
#include <vector>

#include "unicurrent/config.hpp"
#include "unicurrent/scaling.hpp"

namespace unicurrent::runner {

struct RunOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  std::optional<double> tol_override;
  int threads = 1;
};

struct RunOutcome {
  std::string summary_line;
  std::vector<std::string> artifacts;
  std::optional<scaling::SweepResult> sweep;  // set for sweep-style experiments
};

RunOutcome run(const config::ExperimentConfig& cfg, const RunOptions& options);

// The sweep driver on its own (sweep-dt / mass-beyond / unidirectional
// current). Returns the fitted result; artifact paths are appended when a
// sink is given.
scaling::SweepResult run_sweep(const config::ExperimentConfig& cfg,
                               const RunOptions& options,
                               std::vector<std::string>* artifact_sink = nullptr);

}  // namespace unicurrent::runner
