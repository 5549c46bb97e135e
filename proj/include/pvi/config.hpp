#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "pvi/model.hpp"
#include "pvi/scenario_a.hpp"
#include "pvi/scenario_b.hpp"
#include "pvi/scenario_c.hpp"
#include "pvi/vi.hpp"

namespace pvi {

struct ViSettings {
  double epsilon = 1e-4;
  std::uint64_t max_batch_size = 0;
  std::uint64_t max_iterations = 10'000;
  std::uint64_t fixed_iterations = 0;
  std::uint64_t checkpoint_every = 0;  // 0: scenario default (a: 100, b/c: 1)
  Precision precision = Precision::f64;
  std::optional<ConvergenceTest> convergence_test;
  std::uint64_t max_states = 200'000'000;
};

struct SimoptSettings {
  std::string sampler = "auto";  // auto | grid | ga
  int population = 50;
  int max_generations = 100;
  int patience = 5;
  int rollouts_per_candidate = 4'000;
  double crossover_rate = 0.9;
  double mutation_rate = 0.0;  // 0: one over the parameter-space dimension
  std::uint64_t seed = 1;
};

struct EvalSettings {
  int n_rollouts = 10'000;
  int horizon = 365;
  int warmup = 100;
  std::uint64_t base_seed = 42;
};

// One experiment: a scenario instance plus solver, search and evaluation
// settings. Parsed from flat `key = value` text with dotted sections;
// unknown keys are rejected.
struct ExperimentConfig {
  char scenario = 'a';
  ScenarioAParams a;
  ScenarioBParams b;
  ScenarioCParams c;  // life coefficients resolved from c_uncertainty if empty
  std::string c_uncertainty = "exogenous";
  ViSettings vi;
  SimoptSettings simopt;
  EvalSettings eval;
  std::string name = "custom";
};

void apply_config_text(ExperimentConfig& config, const std::string& text);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::filesystem::path& path);

// Materialises scenario C's shelf-life coefficients from the uncertainty
// selector when they were not given explicitly.
void finalize_config(ExperimentConfig& config);

}  // namespace pvi
