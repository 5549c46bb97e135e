#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "pvi/io.hpp"
#include "pvi/presets.hpp"
#include "pvi/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string preset;
  std::string output_dir = "pvi-out";
  int threads = pvi::hardware_threads();
  std::string precision;
  std::uint64_t max_batch_size = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Experiment config file (key = value lines)");
  cmd->add_option("--preset", args.preset,
                  "Bundled experiment preset, e.g. a/m2/exp1 (see --list-presets)");
  cmd->add_option("--output", args.output_dir, "Output directory");
  cmd->add_option("--threads", args.threads, "Worker thread cap");
  cmd->add_option("--precision", args.precision, "Value precision: f32 or f64")
      ->check(CLI::IsMember({"f32", "f64"}));
  cmd->add_option("--max-batch-size", args.max_batch_size, "States per parallel batch");
  cmd->add_option("--seed", args.seed, "Base seed for simulated rollouts")
      ->each([&args](const std::string&) { args.seed_set = true; });
}

pvi::ExperimentConfig build_config(const CommonArgs& args) {
  pvi::ExperimentConfig config;
  bool have = false;
  if (!args.preset.empty()) {
    config = pvi::make_preset(args.preset);
    have = true;
  }
  if (!args.config_path.empty()) {
    if (have) {
      pvi::apply_config_text(config, pvi::read_text_file(args.config_path));
      pvi::finalize_config(config);
    } else {
      config = pvi::load_config_file(args.config_path);
    }
    have = true;
  }
  if (!have) throw pvi::ConfigError("either --preset or --config is required");
  if (!args.precision.empty())
    config.vi.precision = args.precision == "f32" ? pvi::Precision::f32 : pvi::Precision::f64;
  if (args.max_batch_size > 0) config.vi.max_batch_size = args.max_batch_size;
  if (args.seed_set) config.eval.base_seed = args.seed;
  return config;
}

pvi::RunnerOptions build_options(const CommonArgs& args, bool resume) {
  pvi::RunnerOptions options;
  options.output_dir = args.output_dir;
  options.threads = args.threads;
  options.resume = resume;
  return options;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Value iteration and simulation optimization for perishable inventory MDPs"};
  app.require_subcommand(0, 1);

  bool list_presets = false;
  app.add_flag("--list-presets", list_presets, "Print bundled preset names and exit");

  CommonArgs solve_args, simopt_args, eval_args;
  bool resume = false;

  auto* solve = app.add_subcommand("solve", "Run value iteration and export the policy");
  add_common(solve, solve_args);
  solve->add_flag("--resume", resume, "Continue from the checkpoint in the output directory");

  auto* simopt = app.add_subcommand("simopt", "Fit the heuristic policy by simulation search");
  add_common(simopt, simopt_args);

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate policies on simulated rollouts");
  add_common(evaluate, eval_args);
  std::string vi_policy_path, heuristic_path;
  evaluate->add_option("--vi-policy", vi_policy_path, "Policy CSV produced by solve");
  evaluate->add_option("--heuristic", heuristic_path,
                       "Heuristic parameter file produced by simopt");

  CLI11_PARSE(app, argc, argv);

  if (list_presets) {
    for (const auto& name : pvi::preset_names()) std::cout << name << "\n";
    return pvi::kExitSuccess;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return pvi::kExitSuccess;
  }

  try {
    if (solve->parsed()) {
      const auto outcome = pvi::cmd_solve(build_config(solve_args), build_options(solve_args, resume));
      std::cout << "solved " << outcome.states << " states in " << outcome.iterations
                << " iterations (" << (outcome.converged ? "converged" : "iteration cap")
                << ") in " << outcome.wall_seconds << " s\n"
                << "policy: " << outcome.policy_csv.string() << "\n";
    } else if (simopt->parsed()) {
      const auto outcome = pvi::cmd_simopt(build_config(simopt_args), build_options(simopt_args, false));
      std::cout << "best parameters:";
      for (int v : outcome.best) std::cout << " " << v;
      std::cout << "  (mean return " << outcome.best_mean << " over " << outcome.generations
                << " generations, " << outcome.wall_seconds << " s)\n"
                << "parameters: " << outcome.best_params.string() << "\n";
    } else if (evaluate->parsed()) {
      std::optional<std::filesystem::path> vi_path, heur_path;
      if (!vi_policy_path.empty()) vi_path = vi_policy_path;
      if (!heuristic_path.empty()) heur_path = heuristic_path;
      const auto outcome =
          pvi::cmd_evaluate(build_config(eval_args), build_options(eval_args, false), vi_path, heur_path);
      if (outcome.vi)
        std::cout << "value iteration: " << outcome.vi->ret.mean << " +/- " << outcome.vi->ret.sd
                  << "\n";
      if (outcome.heuristic)
        std::cout << "heuristic: " << outcome.heuristic->ret.mean << " +/- "
                  << outcome.heuristic->ret.sd << "\n";
      if (outcome.optimality_gap_pct)
        std::cout << "optimality gap: " << *outcome.optimality_gap_pct << "%\n";
      std::cout << "kpis: " << outcome.kpi_csv.string() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pvi::exit_code_for_current_exception();
  }
  return pvi::kExitSuccess;
}
