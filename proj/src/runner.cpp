#include "pvi/runner.hpp"

#include <json.hpp>

#include <chrono>
#include <map>
#include <sstream>

#include "pvi/io.hpp"
#include "pvi/policies.hpp"

namespace pvi {

namespace {

using nlohmann::json;

template <typename F>
auto with_model(const ExperimentConfig& config, F&& f) {
  switch (config.scenario) {
    case 'a': {
      ScenarioA model(config.a);
      return f(model);
    }
    case 'b': {
      ScenarioB model(config.b);
      return f(model);
    }
    case 'c': {
      ScenarioC model(config.c);
      return f(model);
    }
    default:
      throw ConfigError("unknown scenario");
  }
}

std::vector<std::string> state_column_names(const ScenarioA& model) {
  std::vector<std::string> names;
  for (int k = model.params().lead_time - 1; k >= 1; --k)
    names.push_back("transit_" + std::to_string(k));
  for (int j = model.params().useful_life; j >= 1; --j)
    names.push_back("stock_" + std::to_string(j));
  return names;
}
std::vector<std::string> state_column_names(const ScenarioB& model) {
  std::vector<std::string> names;
  for (int j = model.params().useful_life; j >= 1; --j)
    names.push_back("a_stock_" + std::to_string(j));
  for (int j = model.params().useful_life; j >= 1; --j)
    names.push_back("b_stock_" + std::to_string(j));
  return names;
}
std::vector<std::string> state_column_names(const ScenarioC& model) {
  std::vector<std::string> names{"weekday"};
  for (int j = model.params().useful_life - 1; j >= 1; --j)
    names.push_back("stock_" + std::to_string(j));
  return names;
}

std::vector<std::string> action_column_names(const ScenarioA&) { return {"order"}; }
std::vector<std::string> action_column_names(const ScenarioB&) { return {"order_a", "order_b"}; }
std::vector<std::string> action_column_names(const ScenarioC&) { return {"order"}; }

void append_action_fields(const ScenarioA&, std::uint32_t action,
                          std::vector<std::string>& fields) {
  fields.push_back(std::to_string(action));
}
void append_action_fields(const ScenarioB& model, std::uint32_t action,
                          std::vector<std::string>& fields) {
  const auto [a, b] = model.action_pair(action);
  fields.push_back(std::to_string(a));
  fields.push_back(std::to_string(b));
}
void append_action_fields(const ScenarioC&, std::uint32_t action,
                          std::vector<std::string>& fields) {
  fields.push_back(std::to_string(action));
}

std::uint32_t action_from_fields(const ScenarioA&, std::span<const int> fields) {
  return static_cast<std::uint32_t>(fields[0]);
}
std::uint32_t action_from_fields(const ScenarioB& model, std::span<const int> fields) {
  return static_cast<std::uint32_t>(fields[0] * (model.max_order_b() + 1) + fields[1]);
}
std::uint32_t action_from_fields(const ScenarioC&, std::span<const int> fields) {
  return static_cast<std::uint32_t>(fields[0]);
}

template <typename M>
std::string policy_to_csv(const M& model, const Policy& policy) {
  std::string out;
  auto header = state_column_names(model);
  for (const auto& name : action_column_names(model)) header.push_back(name);
  out += csv_row(header);

  std::vector<int> tuple(model.state_space().arity());
  for (std::uint64_t s = 0; s < model.state_count(); ++s) {
    model.state_space().decode(s, tuple);
    std::vector<std::string> fields;
    fields.reserve(tuple.size() + 2);
    for (int c : tuple) fields.push_back(std::to_string(c));
    append_action_fields(model, policy.actions[s], fields);
    out += csv_row(fields);
  }
  return out;
}

template <typename M>
Policy policy_from_csv(const M& model, const std::filesystem::path& csv_path) {
  if (!std::filesystem::exists(csv_path))
    throw IoError("cannot open policy CSV: " + csv_path.string());
  const auto meta_path = std::filesystem::path(csv_path.string() + ".meta.json");
  const Fingerprint fp = sha256_fingerprint(model.fingerprint_material());
  json meta;
  try {
    meta = json::parse(read_text_file(meta_path));
  } catch (const json::exception& e) {
    throw FormatError("cannot parse policy metadata " + meta_path.string() + ": " + e.what());
  }
  const std::string stored = meta.value("fingerprint", "");
  if (stored != fingerprint_hex(fp))
    throw FingerprintMismatch("policy fingerprint " + stored +
                              " does not match the configured scenario's " +
                              fingerprint_hex(fp));

  const auto rows = parse_csv(read_text_file(csv_path));
  const std::size_t arity = model.state_space().arity();
  const std::size_t n_action_cols = action_column_names(model).size();
  if (rows.size() != model.state_count() + 1)
    throw FormatError("policy CSV has " + std::to_string(rows.size()) + " rows, expected " +
                      std::to_string(model.state_count() + 1));

  Policy policy;
  policy.actions.assign(model.state_count(), 0);
  std::vector<int> tuple(arity);
  std::vector<int> action_fields(n_action_cols);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != arity + n_action_cols)
      throw FormatError("policy CSV row " + std::to_string(r) + " has " +
                        std::to_string(row.size()) + " fields");
    try {
      for (std::size_t i = 0; i < arity; ++i) tuple[i] = std::stoi(row[i]);
      for (std::size_t i = 0; i < n_action_cols; ++i)
        action_fields[i] = std::stoi(row[arity + i]);
    } catch (const std::exception&) {
      throw FormatError("policy CSV row " + std::to_string(r) + " is not numeric");
    }
    policy.actions[model.state_space().encode(tuple)] =
        action_from_fields(model, action_fields);
  }
  return policy;
}

template <typename M>
void write_policy_outputs(const M& model, const Policy& policy, const ExperimentConfig& config,
                          const std::filesystem::path& csv_path) {
  atomic_write_text(csv_path, policy_to_csv(model, policy));
  json meta;
  meta["scenario"] = std::string(1, config.scenario);
  meta["name"] = config.name;
  meta["fingerprint"] = fingerprint_hex(sha256_fingerprint(model.fingerprint_material()));
  meta["states"] = model.state_count();
  atomic_write_text(csv_path.string() + ".meta.json", meta.dump(2) + "\n");
}

std::uint64_t resolve_checkpoint_every(const ExperimentConfig& config) {
  if (config.vi.checkpoint_every > 0) return config.vi.checkpoint_every;
  return config.scenario == 'a' ? 100 : 1;
}

ViConfig make_vi_config(const ExperimentConfig& config, const RunnerOptions& options,
                        const std::filesystem::path& checkpoint_path) {
  ViConfig vi;
  vi.epsilon = config.vi.epsilon;
  vi.max_batch_size = config.vi.max_batch_size;
  vi.max_iterations = config.vi.max_iterations;
  vi.fixed_iterations = config.vi.fixed_iterations;
  vi.checkpoint_every = resolve_checkpoint_every(config);
  vi.checkpoint_path = checkpoint_path;
  vi.precision = config.vi.precision;
  vi.convergence_test = config.vi.convergence_test;
  vi.threads = options.threads;
  vi.max_states = config.vi.max_states;
  return vi;
}

struct HeuristicFile {
  std::string policy_kind;
  std::vector<int> params;
};

template <typename M>
std::string heuristic_kind(const M&);
template <>
std::string heuristic_kind(const ScenarioA&) {
  return "base_stock";
}
template <>
std::string heuristic_kind(const ScenarioB&) {
  return "modified_base_stock";
}
template <>
std::string heuristic_kind(const ScenarioC&) {
  return "weekday_sS";
}

template <typename M>
std::string heuristic_params_text(const M& model, const std::vector<int>& params) {
  const auto space = heuristic_space(model);
  std::ostringstream os;
  os << "policy = " << heuristic_kind(model) << "\n";
  os << "fingerprint = " << fingerprint_hex(sha256_fingerprint(model.fingerprint_material()))
     << "\n";
  for (std::size_t i = 0; i < space.params.size(); ++i)
    os << space.params[i].name << " = " << params[i] << "\n";
  return os.str();
}

template <typename M>
std::vector<int> heuristic_params_from_file(const M& model, const std::filesystem::path& path) {
  const auto space = heuristic_space(model);
  std::istringstream in(read_text_file(path));
  std::string line;
  std::map<std::string, std::string> kv;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  if (kv.contains("fingerprint")) {
    const std::string expected =
        fingerprint_hex(sha256_fingerprint(model.fingerprint_material()));
    if (kv["fingerprint"] != expected)
      throw FingerprintMismatch("heuristic parameter fingerprint " + kv["fingerprint"] +
                                " does not match the configured scenario's " + expected);
  }
  std::vector<int> params;
  for (const auto& spec : space.params) {
    if (!kv.contains(spec.name))
      throw FormatError("heuristic parameter file is missing " + spec.name);
    params.push_back(std::stoi(kv[spec.name]));
    if (params.back() < spec.lo || params.back() > spec.hi)
      throw FormatError("heuristic parameter " + spec.name + " out of range");
  }
  return params;
}

std::vector<std::string> kpi_header(int products) {
  std::vector<std::string> h{"policy", "return_mean", "return_sd"};
  const auto add = [&](const std::string& base, const std::string& suffix) {
    h.push_back(base + suffix + "_mean");
    h.push_back(base + suffix + "_sd");
  };
  if (products == 1) {
    add("service_pct", "");
    add("wastage_pct", "");
    add("holding", "");
  } else {
    for (const std::string suffix : {"_a", "_b"}) {
      add("service_pct", suffix);
      add("wastage_pct", suffix);
      add("holding", suffix);
    }
  }
  h.push_back("optimality_gap_pct");
  return h;
}

std::vector<std::string> kpi_row(const std::string& name, const Evaluation& eval,
                                 const std::optional<double>& gap) {
  std::vector<std::string> row{name, format_double(eval.ret.mean), format_double(eval.ret.sd)};
  for (int k = 0; k < eval.products; ++k) {
    row.push_back(format_double(eval.service_pct[k].mean));
    row.push_back(format_double(eval.service_pct[k].sd));
    row.push_back(format_double(eval.wastage_pct[k].mean));
    row.push_back(format_double(eval.wastage_pct[k].sd));
    row.push_back(format_double(eval.holding_mean[k].mean));
    row.push_back(format_double(eval.holding_mean[k].sd));
  }
  row.push_back(gap ? format_double(*gap) : "");
  return row;
}

std::string report_text(const ExperimentConfig& config, const RunnerOptions& options,
                        const std::vector<std::pair<std::string, std::string>>& extra) {
  std::ostringstream os;
  os << "name = " << config.name << "\n";
  os << "scenario = " << config.scenario << "\n";
  os << "threads = " << options.threads << "\n";
  for (const auto& [k, v] : extra) os << k << " = " << v << "\n";
  return os.str();
}

}  // namespace

SolveOutcome cmd_solve(const ExperimentConfig& config, const RunnerOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(options.output_dir);
  const auto checkpoint_path = options.output_dir / "checkpoint.ckpt";
  const auto policy_path = options.output_dir / "policy.csv";
  const auto report_path = options.output_dir / "report.txt";

  return with_model(config, [&](const auto& model) {
    ViConfig vi = make_vi_config(config, options, checkpoint_path);

    Checkpoint resume_from;
    const Checkpoint* resume_ptr = nullptr;
    if (options.resume) {
      resume_from = load_checkpoint(checkpoint_path,
                                    sha256_fingerprint(model.fingerprint_material()));
      resume_ptr = &resume_from;
    }

    const ViResult result = run_value_iteration(model, vi, resume_ptr);
    save_checkpoint(checkpoint_path, result.vf.values, result.vf.iteration,
                    result.vf.fingerprint);
    write_policy_outputs(model, result.policy, config, policy_path);

    SolveOutcome outcome;
    outcome.states = model.state_count();
    outcome.iterations = result.iterations;
    outcome.converged = result.converged;
    outcome.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    outcome.policy_csv = policy_path;
    outcome.checkpoint = checkpoint_path;
    outcome.report = report_path;

    atomic_write_text(
        report_path,
        report_text(config, options,
                    {{"command", "solve"},
                     {"states", std::to_string(model.state_count())},
                     {"actions", std::to_string(model.action_count())},
                     {"outcomes", std::to_string(model.outcome_count())},
                     {"iterations", std::to_string(result.iterations)},
                     {"converged", result.converged ? "true" : "false"},
                     {"precision", vi.precision == Precision::f32 ? "f32" : "f64"},
                     {"resumed", options.resume ? "true" : "false"},
                     {"wall_seconds", format_double(outcome.wall_seconds)}}));
    return outcome;
  });
}

SimoptOutcome cmd_simopt(const ExperimentConfig& config, const RunnerOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(options.output_dir);
  const auto params_path = options.output_dir / "best_params.txt";
  const auto log_path = options.output_dir / "search_log.csv";
  const auto report_path = options.output_dir / "report.txt";

  return with_model(config, [&](const auto& model) {
    const auto space = heuristic_space(model);

    RolloutConfig rollout_config;
    rollout_config.horizon_days = config.eval.horizon;
    rollout_config.warmup_days = config.eval.warmup;
    rollout_config.n_rollouts = config.simopt.rollouts_per_candidate;
    rollout_config.base_seed = config.eval.base_seed;
    rollout_config.threads = 1;  // candidates are evaluated concurrently instead

    const simopt::CandidateEvaluator evaluator = [&](const std::vector<int>& candidate) {
      const Evaluation eval =
          evaluate_policy(model, make_heuristic_policy(model, candidate), rollout_config);
      return simopt::Score{eval.ret.mean, eval.ret.sd};
    };

    std::string sampler = config.simopt.sampler;
    if (sampler == "auto") sampler = space.dimension() == 1 ? "grid" : "ga";

    std::vector<simopt::ScoredCandidate> log;
    SimoptOutcome outcome;
    if (sampler == "grid") {
      const auto grid = simopt::grid_search(space, evaluator, options.threads);
      outcome.best = grid.best;
      outcome.best_mean = grid.best_score.mean;
      outcome.best_sd = grid.best_score.sd;
      outcome.generations = 1;
      log = grid.table;
    } else {
      simopt::GaConfig ga;
      ga.population = config.simopt.population;
      ga.max_generations = config.simopt.max_generations;
      ga.patience = config.simopt.patience;
      ga.rollouts_per_candidate = config.simopt.rollouts_per_candidate;
      ga.crossover_rate = config.simopt.crossover_rate;
      ga.mutation_rate = config.simopt.mutation_rate;
      ga.seed = config.simopt.seed;
      ga.threads = options.threads;
      const auto result = simopt::ga_search(space, evaluator, ga);
      outcome.best = result.best;
      outcome.best_mean = result.best_score.mean;
      outcome.best_sd = result.best_score.sd;
      outcome.generations = result.generations;
      log = result.log;
    }

    std::string log_csv;
    {
      std::vector<std::string> header{"generation"};
      for (const auto& p : space.params) header.push_back(p.name);
      header.push_back("mean_return");
      header.push_back("sd_return");
      log_csv += csv_row(header);
      for (const auto& entry : log) {
        std::vector<std::string> row{std::to_string(entry.generation)};
        for (int v : entry.values) row.push_back(std::to_string(v));
        row.push_back(format_double(entry.mean));
        row.push_back(format_double(entry.sd));
        log_csv += csv_row(row);
      }
    }
    atomic_write_text(log_path, log_csv);
    atomic_write_text(params_path, heuristic_params_text(model, outcome.best));

    outcome.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    outcome.best_params = params_path;
    outcome.search_log = log_path;
    outcome.report = report_path;
    atomic_write_text(
        report_path,
        report_text(config, options,
                    {{"command", "simopt"},
                     {"sampler", sampler},
                     {"candidates_evaluated", std::to_string(log.size())},
                     {"generations", std::to_string(outcome.generations)},
                     {"best_mean_return", format_double(outcome.best_mean)},
                     {"wall_seconds", format_double(outcome.wall_seconds)}}));
    return outcome;
  });
}

EvaluateOutcome cmd_evaluate(const ExperimentConfig& config, const RunnerOptions& options,
                             const std::optional<std::filesystem::path>& vi_policy,
                             const std::optional<std::filesystem::path>& heuristic_params) {
  if (!vi_policy && !heuristic_params)
    throw ConfigError("evaluate needs a policy CSV and/or a heuristic parameter file");
  std::filesystem::create_directories(options.output_dir);
  const auto kpi_path = options.output_dir / "kpis.csv";

  return with_model(config, [&](const auto& model) {
    RolloutConfig rollout_config;
    rollout_config.horizon_days = config.eval.horizon;
    rollout_config.warmup_days = config.eval.warmup;
    rollout_config.n_rollouts = config.eval.n_rollouts;
    rollout_config.base_seed = config.eval.base_seed;
    rollout_config.threads = options.threads;

    EvaluateOutcome outcome;
    outcome.kpi_csv = kpi_path;
    if (vi_policy) {
      const Policy policy = policy_from_csv(model, *vi_policy);
      outcome.vi = evaluate_policy(model, make_vi_policy(model, policy.actions), rollout_config);
    }
    if (heuristic_params) {
      const auto params = heuristic_params_from_file(model, *heuristic_params);
      outcome.heuristic =
          evaluate_policy(model, make_heuristic_policy(model, params), rollout_config);
    }
    if (outcome.vi && outcome.heuristic) {
      outcome.optimality_gap_pct = 100.0 * (outcome.vi->ret.mean - outcome.heuristic->ret.mean) /
                                   std::abs(outcome.vi->ret.mean);
    }

    std::string csv = csv_row(kpi_header(model.products()));
    if (outcome.vi) csv += csv_row(kpi_row("value_iteration", *outcome.vi, std::nullopt));
    if (outcome.heuristic)
      csv += csv_row(kpi_row("heuristic", *outcome.heuristic, outcome.optimality_gap_pct));
    atomic_write_text(kpi_path, csv);
    return outcome;
  });
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ConfigError&) {
    return kExitConfigError;
  } catch (const ParameterError&) {
    return kExitConfigError;
  } catch (const CapacityError&) {
    return kExitCapacityError;
  } catch (const NumericDivergence&) {
    return kExitNumericDivergence;
  } catch (const IoError&) {
    return kExitIoError;
  } catch (...) {
    return kExitFailure;
  }
}

}  // namespace pvi
