#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "pvi/config.hpp"
#include "pvi/parallel.hpp"
#include "pvi/sim.hpp"
#include "pvi/simopt.hpp"
#include "pvi/vi.hpp"

namespace pvi {

struct RunnerOptions {
  std::filesystem::path output_dir = ".";
  bool resume = false;
  int threads = hardware_threads();
};

struct SolveOutcome {
  std::uint64_t states = 0;
  std::uint64_t iterations = 0;
  bool converged = false;
  double wall_seconds = 0.0;  // includes writing checkpoints and outputs
  std::filesystem::path policy_csv;
  std::filesystem::path checkpoint;
  std::filesystem::path report;
};

struct SimoptOutcome {
  std::vector<int> best;
  double best_mean = 0.0;
  double best_sd = 0.0;
  int generations = 0;
  double wall_seconds = 0.0;
  std::filesystem::path best_params;
  std::filesystem::path search_log;
  std::filesystem::path report;
};

struct EvaluateOutcome {
  std::optional<Evaluation> vi;
  std::optional<Evaluation> heuristic;
  std::optional<double> optimality_gap_pct;
  std::filesystem::path kpi_csv;
};

// Solves the configured experiment with value iteration and writes the
// policy CSV (plus fingerprint sidecar), the final checkpoint and a run
// report. With options.resume, continues from the checkpoint in the output
// directory.
SolveOutcome cmd_solve(const ExperimentConfig& config, const RunnerOptions& options);

// Fits the scenario's heuristic policy by grid search or GA and writes the
// best parameters and the full search log.
SimoptOutcome cmd_simopt(const ExperimentConfig& config, const RunnerOptions& options);

// Evaluates a solved policy CSV and/or a fitted heuristic-parameter file on
// simulated rollouts and writes a KPI table; when both are given the
// heuristic row carries the optimality gap (positive when the heuristic
// underperforms).
EvaluateOutcome cmd_evaluate(const ExperimentConfig& config, const RunnerOptions& options,
                             const std::optional<std::filesystem::path>& vi_policy,
                             const std::optional<std::filesystem::path>& heuristic_params);

// Exit codes used by the command-line front end.
enum ExitCode : int {
  kExitSuccess = 0,
  kExitFailure = 1,
  kExitConfigError = 2,
  kExitCapacityError = 3,
  kExitNumericDivergence = 4,
  kExitIoError = 5,
};

int exit_code_for_current_exception();

}  // namespace pvi
