#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pvi/dist.hpp"
#include "pvi/model.hpp"
#include "pvi/rng.hpp"
#include "pvi/sim_types.hpp"
#include "pvi/tuple_space.hpp"

namespace pvi {

enum class Issuing { fifo, lifo };

std::string to_string(Issuing issuing);

// Single-product perishable replenishment with a deterministic lead time:
// the state tracks the age profile of stock on hand plus any orders in
// transit, daily demand follows a rounded, truncated gamma distribution and
// is filled FIFO or LIFO, and the reward charges ordering, holding,
// shortage and wastage.
struct ScenarioAParams {
  int useful_life = 2;  // periods before a fresh unit perishes
  int lead_time = 1;    // >= 1; orders arrive this many days after placement
  Issuing issuing = Issuing::lifo;
  int max_order = 10;
  int max_demand = 100;  // demand truncation point, far beyond mean + 5 sd
  double unit_cost = 3.0;
  double holding_cost = 1.0;
  double shortage_cost = 5.0;
  double wastage_cost = 7.0;
  double demand_mean = 4.0;
  double demand_cv = 0.5;
  double discount_factor = 0.99;
};

class ScenarioA {
 public:
  explicit ScenarioA(const ScenarioAParams& params);

  const ScenarioAParams& params() const { return params_; }
  const TupleSpace& state_space() const { return space_; }
  const dist::DiscretePmf& demand_pmf() const { return demand_pmf_; }

  // --- value-iteration model contract ---
  std::uint64_t state_count() const { return space_.count(); }
  std::uint32_t action_count() const { return params_.max_order + 1; }
  std::uint64_t outcome_count() const { return params_.max_demand + 1; }
  double discount() const { return params_.discount_factor; }
  ConvergenceTest default_convergence_test() const { return ConvergenceTest::value_span; }
  int periodicity() const { return 1; }
  double initial_value(std::uint64_t) const { return 0.0; }
  std::string fingerprint_material() const;

  Transition transition(std::uint64_t state, std::uint32_t action, std::uint64_t outcome) const;
  double outcome_probability(std::uint64_t, std::uint32_t, std::uint64_t outcome) const {
    return demand_pmf_.probs[outcome];
  }
  void q_row(std::uint64_t state, double gamma, std::span<const double> values,
             std::span<double> q) const;
  void q_row(std::uint64_t state, double gamma, std::span<const float> values,
             std::span<float> q) const;

  // --- simulator contract ---
  std::size_t state_arity() const { return space_.arity(); }
  std::size_t action_arity() const { return 1; }
  int products() const { return 1; }
  int sim_action_bound(int) const { return params_.max_order; }
  void initial_state(std::span<int> state) const {
    for (auto& c : state) c = 0;
  }
  void sample_step(std::span<int> state, std::span<const int> action, RolloutRng& rng,
                   StepStats& stats) const;

  // Order-up-to rule: order [S - I]+ where I counts stock on hand and in
  // transit.
  int base_stock_action(int order_up_to, std::span<const int> state) const;

 private:
  template <typename T>
  void q_row_impl(std::uint64_t state, double gamma, std::span<const T> values,
                  std::span<T> q) const;

  ScenarioAParams params_;
  TupleSpace space_;
  dist::DiscretePmf demand_pmf_;
  std::vector<double> demand_cdf_;
};

}  // namespace pvi
