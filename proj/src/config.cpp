#include "pvi/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "pvi/presets.hpp"

namespace pvi {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

int to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + value + "'");
  }
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
  }
}

void apply_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
  // clang-format off
  if (key == "scenario") {
    if (value != "a" && value != "b" && value != "c")
      throw ConfigError("scenario must be one of a, b, c");
    c.scenario = value[0];
  }
  else if (key == "name") c.name = value;

  else if (key == "a.m") c.a.useful_life = to_int(key, value);
  else if (key == "a.L") c.a.lead_time = to_int(key, value);
  else if (key == "a.issuing") {
    if (value == "fifo") c.a.issuing = Issuing::fifo;
    else if (value == "lifo") c.a.issuing = Issuing::lifo;
    else throw ConfigError("a.issuing must be fifo or lifo");
  }
  else if (key == "a.A_max") c.a.max_order = to_int(key, value);
  else if (key == "a.D_max") c.a.max_demand = to_int(key, value);
  else if (key == "a.C_v") c.a.unit_cost = to_double(key, value);
  else if (key == "a.C_h") c.a.holding_cost = to_double(key, value);
  else if (key == "a.C_s") c.a.shortage_cost = to_double(key, value);
  else if (key == "a.C_w") c.a.wastage_cost = to_double(key, value);
  else if (key == "a.mu") c.a.demand_mean = to_double(key, value);
  else if (key == "a.cv") c.a.demand_cv = to_double(key, value);
  else if (key == "a.gamma") c.a.discount_factor = to_double(key, value);

  else if (key == "b.m") c.b.useful_life = to_int(key, value);
  else if (key == "b.mu_a") c.b.demand_mean_a = to_double(key, value);
  else if (key == "b.mu_b") c.b.demand_mean_b = to_double(key, value);
  else if (key == "b.A_a_max") c.b.max_order_a = to_int(key, value);
  else if (key == "b.A_b_max") c.b.max_order_b = to_int(key, value);
  else if (key == "b.C_v_a") c.b.unit_cost_a = to_double(key, value);
  else if (key == "b.C_v_b") c.b.unit_cost_b = to_double(key, value);
  else if (key == "b.C_r_a") c.b.revenue_a = to_double(key, value);
  else if (key == "b.C_r_b") c.b.revenue_b = to_double(key, value);
  else if (key == "b.rho") c.b.substitution_prob = to_double(key, value);
  else if (key == "b.gamma") c.b.discount_factor = to_double(key, value);

  else if (key == "c.m") c.c.useful_life = to_int(key, value);
  else if (key == "c.shelf_life") {
    if (value != "exogenous" && value != "endogenous")
      throw ConfigError("c.shelf_life must be exogenous or endogenous");
    c.c_uncertainty = value;
  }
  else if (key == "c.A_max") c.c.max_order = to_int(key, value);
  else if (key == "c.D_max") c.c.max_demand = to_int(key, value);
  else if (key == "c.C_f") c.c.fixed_order_cost = to_double(key, value);
  else if (key == "c.C_h") c.c.holding_cost = to_double(key, value);
  else if (key == "c.C_s") c.c.shortage_cost = to_double(key, value);
  else if (key == "c.C_w") c.c.wastage_cost = to_double(key, value);
  else if (key == "c.gamma") c.c.discount_factor = to_double(key, value);

  else if (key == "vi.epsilon") c.vi.epsilon = to_double(key, value);
  else if (key == "vi.max_batch_size") c.vi.max_batch_size = to_u64(key, value);
  else if (key == "vi.max_iterations") c.vi.max_iterations = to_u64(key, value);
  else if (key == "vi.fixed_iterations") c.vi.fixed_iterations = to_u64(key, value);
  else if (key == "vi.checkpoint_every") c.vi.checkpoint_every = to_u64(key, value);
  else if (key == "vi.max_states") c.vi.max_states = to_u64(key, value);
  else if (key == "vi.precision") {
    if (value == "f32") c.vi.precision = Precision::f32;
    else if (value == "f64") c.vi.precision = Precision::f64;
    else throw ConfigError("vi.precision must be f32 or f64");
  }
  else if (key == "vi.convergence_test") c.vi.convergence_test = convergence_test_from_string(value);

  else if (key == "simopt.sampler") {
    if (value != "auto" && value != "grid" && value != "ga")
      throw ConfigError("simopt.sampler must be auto, grid or ga");
    c.simopt.sampler = value;
  }
  else if (key == "simopt.population") c.simopt.population = to_int(key, value);
  else if (key == "simopt.max_generations") c.simopt.max_generations = to_int(key, value);
  else if (key == "simopt.patience") c.simopt.patience = to_int(key, value);
  else if (key == "simopt.rollouts_per_candidate") c.simopt.rollouts_per_candidate = to_int(key, value);
  else if (key == "simopt.crossover_rate") c.simopt.crossover_rate = to_double(key, value);
  else if (key == "simopt.mutation_rate") c.simopt.mutation_rate = to_double(key, value);
  else if (key == "simopt.seed") c.simopt.seed = to_u64(key, value);

  else if (key == "eval.n_rollouts") c.eval.n_rollouts = to_int(key, value);
  else if (key == "eval.horizon") c.eval.horizon = to_int(key, value);
  else if (key == "eval.warmup") c.eval.warmup = to_int(key, value);
  else if (key == "eval.base_seed") c.eval.base_seed = to_u64(key, value);

  else throw ConfigError("unknown configuration key: " + key);
  // clang-format on
}

}  // namespace

void apply_config_text(ExperimentConfig& config, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    apply_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  apply_config_text(config, text);
  finalize_config(config);
  return config;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void finalize_config(ExperimentConfig& config) {
  if (config.scenario == 'c' && config.c.life_intercepts.empty()) {
    const auto [c0, c1] =
        shelf_life_coefficients(config.c.useful_life, config.c_uncertainty == "endogenous");
    config.c.life_intercepts = c0;
    config.c.life_slopes = c1;
  }
}

}  // namespace pvi
