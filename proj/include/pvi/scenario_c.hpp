#pragma once

#include <array>
#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "pvi/dist.hpp"
#include "pvi/model.hpp"
#include "pvi/rng.hpp"
#include "pvi/sim_types.hpp"
#include "pvi/tuple_space.hpp"

namespace pvi {

// Single-product blood-bank model with weekday-periodic demand and
// uncertain remaining useful life on arrival. Orders arrive instantly
// (before demand) and the remaining life of the delivered units follows a
// multinomial whose category log-odds are affine in the order quantity.
// Stock of each age is capped at max_order: excess units are rejected at
// delivery. Issuing is oldest-unit-first-out and the reward charges a fixed
// ordering cost plus holding, shortage and wastage.
struct ScenarioCParams {
  int useful_life = 3;  // m
  int max_order = 20;   // A_max; also the per-age stock capacity
  int max_demand = 20;  // D_max
  double fixed_order_cost = 10.0;
  double holding_cost = 1.0;
  double shortage_cost = 20.0;
  double wastage_cost = 5.0;
  double discount_factor = 0.95;
  // Weekday demand parameters, Monday (index 0) through Sunday: target
  // successes and mean of the truncated negative binomial.
  std::array<double, 7> demand_successes{3.5, 11.0, 7.2, 11.1, 5.9, 5.5, 2.2};
  std::array<double, 7> demand_means{5.7, 6.9, 6.5, 6.2, 5.8, 3.3, 3.4};
  // Log-odds of receiving a unit with k days of life versus 1 day:
  // intercept[k-2] + slope[k-2] * order, for k = 2..m. All-zero slopes make
  // the arrival uncertainty exogenous.
  std::vector<double> life_intercepts;
  std::vector<double> life_slopes;
};

// Category probabilities (index j = j+1 days of remaining life) for units
// delivered against an order of `order` units.
std::vector<double> receipt_category_probs(int order, std::span<const double> intercepts,
                                           std::span<const double> slopes);

class ScenarioC {
 public:
  explicit ScenarioC(const ScenarioCParams& params);

  const ScenarioCParams& params() const { return params_; }
  const TupleSpace& state_space() const { return space_; }
  dist::DiscretePmf weekday_demand_pmf(int weekday) const;
  std::vector<double> receipt_probs(int order) const;  // by remaining life, index j = j+1 days
  std::uint64_t composition_count() const { return n_compositions_; }

  // --- value-iteration model contract ---
  std::uint64_t state_count() const { return space_.count(); }
  std::uint32_t action_count() const { return params_.max_order + 1; }
  std::uint64_t outcome_count() const {
    return static_cast<std::uint64_t>(params_.max_demand + 1) * n_compositions_;
  }
  double discount() const { return params_.discount_factor; }
  ConvergenceTest default_convergence_test() const { return ConvergenceTest::periodic_span; }
  int periodicity() const { return 7; }
  double initial_value(std::uint64_t) const { return 0.0; }
  std::string fingerprint_material() const;

  Transition transition(std::uint64_t state, std::uint32_t action, std::uint64_t outcome) const;
  double outcome_probability(std::uint64_t state, std::uint32_t action,
                             std::uint64_t outcome) const;
  void q_row(std::uint64_t state, double gamma, std::span<const double> values,
             std::span<double> q) const;
  void q_row(std::uint64_t state, double gamma, std::span<const float> values,
             std::span<float> q) const;

  // Probabilities of the delivery age profiles with positive mass under the
  // given order quantity, aligned with composition_ids(order).
  std::span<const std::uint32_t> composition_ids(int order) const;
  std::span<const double> composition_probs(int order) const;
  void composition_tuple(std::uint32_t composition_id, std::span<int> out) const;

  // --- simulator contract ---
  std::size_t state_arity() const { return space_.arity(); }
  std::size_t action_arity() const { return 1; }
  int products() const { return 1; }
  int sim_action_bound(int) const { return params_.max_order; }
  void initial_state(std::span<int> state) const {
    for (auto& c : state) c = 0;  // weekday 0, empty stock
  }
  void sample_step(std::span<int> state, std::span<const int> action, RolloutRng& rng,
                   StepStats& stats) const;

  // Weekday (s, S) rule: order up to S only when the stock position is at or
  // below the reorder point, and only when s < S for that weekday.
  int weekday_ss_action(std::span<const int> reorder_points, std::span<const int> order_up_to,
                        std::span<const int> state) const;

 private:
  template <typename T>
  void q_row_impl(std::uint64_t state, double gamma, std::span<const T> values,
                  std::span<T> q) const;
  void ensure_outcome_tables() const;

  ScenarioCParams params_;
  TupleSpace space_;
  std::uint64_t n_compositions_ = 0;
  std::array<std::vector<double>, 7> demand_pmf_;
  std::array<std::vector<double>, 7> demand_cdf_;
  std::vector<std::vector<double>> receipt_probs_;  // per order quantity

  // Delivery age-profile tables, built on first use: the full composition
  // enumeration is only needed by the solver, not the simulator.
  mutable std::once_flag tables_once_;
  mutable std::vector<std::int8_t> comp_tuples_;  // n_compositions x m
  mutable std::vector<std::int8_t> comp_sums_;
  mutable std::vector<std::vector<std::uint32_t>> comp_ids_;  // per order
  mutable std::vector<std::vector<double>> comp_probs_;       // per order
};

}  // namespace pvi
