#pragma once

#include <memory>
#include <vector>

#include "pvi/scenario_a.hpp"
#include "pvi/scenario_b.hpp"
#include "pvi/scenario_c.hpp"
#include "pvi/sim.hpp"
#include "pvi/simopt.hpp"
#include "pvi/vi.hpp"

// Glue between solved policies / heuristic parameter vectors and the
// simulator's policy-function interface.

namespace pvi {

inline PolicyFn make_vi_policy(const ScenarioA& model, std::vector<std::uint32_t> actions) {
  auto table = std::make_shared<std::vector<std::uint32_t>>(std::move(actions));
  return [&model, table](std::span<const int> state, std::span<int> action) {
    action[0] = static_cast<int>((*table)[model.state_space().encode(state)]);
  };
}

inline PolicyFn make_vi_policy(const ScenarioB& model, std::vector<std::uint32_t> actions) {
  auto table = std::make_shared<std::vector<std::uint32_t>>(std::move(actions));
  return [&model, table](std::span<const int> state, std::span<int> action) {
    const auto [a, b] = model.action_pair((*table)[model.state_space().encode(state)]);
    action[0] = a;
    action[1] = b;
  };
}

inline PolicyFn make_vi_policy(const ScenarioC& model, std::vector<std::uint32_t> actions) {
  auto table = std::make_shared<std::vector<std::uint32_t>>(std::move(actions));
  return [&model, table](std::span<const int> state, std::span<int> action) {
    action[0] = static_cast<int>((*table)[model.state_space().encode(state)]);
  };
}

// Heuristic parameter spaces: a base-stock level for scenario A, per-product
// order-up-to levels (searched up to twice the order cap) for scenario B,
// and an (s, S) pair per weekday for scenario C.
inline simopt::SearchSpace heuristic_space(const ScenarioA& model) {
  return {{{"S", 0, model.params().max_order}}};
}

inline simopt::SearchSpace heuristic_space(const ScenarioB& model) {
  return {{{"S_a", 0, 2 * model.max_order_a()}, {"S_b", 0, 2 * model.max_order_b()}}};
}

inline simopt::SearchSpace heuristic_space(const ScenarioC& model) {
  simopt::SearchSpace space;
  for (int tau = 0; tau < 7; ++tau)
    space.params.push_back({"s." + std::to_string(tau), 0, model.params().max_order});
  for (int tau = 0; tau < 7; ++tau)
    space.params.push_back({"S." + std::to_string(tau), 0, model.params().max_order});
  return space;
}

inline PolicyFn make_heuristic_policy(const ScenarioA& model, const std::vector<int>& params) {
  const int level = params.at(0);
  return [&model, level](std::span<const int> state, std::span<int> action) {
    action[0] = model.base_stock_action(level, state);
  };
}

inline PolicyFn make_heuristic_policy(const ScenarioB& model, const std::vector<int>& params) {
  const int level_a = params.at(0);
  const int level_b = params.at(1);
  return [&model, level_a, level_b](std::span<const int> state, std::span<int> action) {
    model.modified_base_stock_action(level_a, level_b, state, action);
  };
}

inline PolicyFn make_heuristic_policy(const ScenarioC& model, const std::vector<int>& params) {
  auto stored = std::make_shared<std::vector<int>>(params);
  return [&model, stored](std::span<const int> state, std::span<int> action) {
    const std::span<const int> all(*stored);
    action[0] = model.weekday_ss_action(all.subspan(0, 7), all.subspan(7, 7), state);
  };
}

}  // namespace pvi
