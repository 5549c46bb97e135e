#include "pvi/presets.hpp"

#include <array>

namespace pvi {

namespace {

struct ScenarioARow {
  int lead_time;
  double wastage_cost;
  Issuing issuing;
};

// Experiments 1..8 share the same (L, C_w, issuing) grid for every m.
constexpr std::array<ScenarioARow, 8> kScenarioARows{{
    {1, 7.0, Issuing::lifo},
    {1, 7.0, Issuing::fifo},
    {1, 10.0, Issuing::lifo},
    {1, 10.0, Issuing::fifo},
    {2, 7.0, Issuing::lifo},
    {2, 7.0, Issuing::fifo},
    {2, 10.0, Issuing::lifo},
    {2, 10.0, Issuing::fifo},
}};

struct ScenarioBRow {
  const char* name;
  int m;
  double mu_a, mu_b;
  int max_a, max_b;  // negative: newsvendor-derived
  bool fixed_100;
};

constexpr std::array<ScenarioBRow, 10> kScenarioBRows{{
    {"b/m2/exp1", 2, 5, 5, -1, -1, false},
    {"b/m2/exp2", 2, 7, 3, -1, -1, false},
    {"b/m3/exp1", 3, 5, 5, -1, -1, false},
    {"b/m3/exp2", 3, 7, 3, -1, -1, false},
    {"b/m3/exp3", 3, 5, 5, 13, 13, false},
    {"b/m3/exp4", 3, 7, 3, 20, 4, false},
    {"b/m2/p1", 2, 5, 5, 10, 10, true},
    {"b/m2/p2", 2, 5, 6, 10, 12, true},
    {"b/m2/p3", 2, 6, 6, 12, 12, true},
    {"b/m2/p4", 2, 7, 7, 13, 13, true},
}};

}  // namespace

std::pair<std::vector<double>, std::vector<double>> shelf_life_coefficients(int useful_life,
                                                                            bool endogenous) {
  switch (useful_life) {
    case 3:
      return {{1.0, 0.5}, endogenous ? std::vector<double>{0.40, 0.80}
                                     : std::vector<double>{0.0, 0.0}};
    case 5:
      if (endogenous)
        return {{1.9, 3.1, 3.1, 2.5}, {-0.03, -0.06, -0.03, -0.09}};
      return {{1.6, 2.6, 2.8, 1.6}, {0.0, 0.0, 0.0, 0.0}};
    case 8:
      return {{0.8, 1.4, 1.9, 2.3, 1.7, 1.2, 0.8},
              endogenous ? std::vector<double>{-0.03, -0.04, -0.05, -0.06, -0.07, -0.08, -0.09}
                         : std::vector<double>(7, 0.0)};
    default:
      throw ConfigError("no shelf-life coefficients for useful life " +
                        std::to_string(useful_life));
  }
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (int m = 2; m <= 5; ++m)
    for (int exp = 1; exp <= 8; ++exp)
      names.push_back("a/m" + std::to_string(m) + "/exp" + std::to_string(exp));
  for (const auto& row : kScenarioBRows) names.push_back(row.name);
  for (int m : {3, 5, 8})
    for (int exp = 1; exp <= 2; ++exp)
      names.push_back("c/m" + std::to_string(m) + "/exp" + std::to_string(exp));
  return names;
}

ExperimentConfig make_preset(const std::string& name) {
  ExperimentConfig config;
  config.name = name;

  if (name.rfind("a/", 0) == 0) {
    config.scenario = 'a';
    for (int m = 2; m <= 5; ++m) {
      for (int exp = 1; exp <= 8; ++exp) {
        if (name == "a/m" + std::to_string(m) + "/exp" + std::to_string(exp)) {
          const auto& row = kScenarioARows[exp - 1];
          config.a.useful_life = m;
          config.a.lead_time = row.lead_time;
          config.a.wastage_cost = row.wastage_cost;
          config.a.issuing = row.issuing;
          config.vi.checkpoint_every = 100;
          return config;
        }
      }
    }
  } else if (name.rfind("b/", 0) == 0) {
    config.scenario = 'b';
    for (const auto& row : kScenarioBRows) {
      if (name == row.name) {
        config.b.useful_life = row.m;
        config.b.demand_mean_a = row.mu_a;
        config.b.demand_mean_b = row.mu_b;
        config.b.max_order_a = row.max_a;
        config.b.max_order_b = row.max_b;
        if (row.fixed_100) config.vi.fixed_iterations = 100;
        config.vi.checkpoint_every = 1;
        return config;
      }
    }
  } else if (name.rfind("c/", 0) == 0) {
    config.scenario = 'c';
    for (int m : {3, 5, 8}) {
      for (int exp = 1; exp <= 2; ++exp) {
        if (name == "c/m" + std::to_string(m) + "/exp" + std::to_string(exp)) {
          config.c.useful_life = m;
          config.c_uncertainty = exp == 2 ? "endogenous" : "exogenous";
          config.vi.checkpoint_every = 1;
          finalize_config(config);
          return config;
        }
      }
    }
  }
  throw ConfigError("unknown preset: " + name);
}

}  // namespace pvi
