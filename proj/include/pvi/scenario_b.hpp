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

// Two perishable products, A and B, with one-way substitution: customers
// with unmet demand for product B accept product A with probability rho.
// Demand is Poisson per product, issuing is FIFO, lead time is one day and
// the reward is sales revenue minus variable ordering cost. The stochastic
// element of a transition is the pair of issued quantities.
struct ScenarioBParams {
  int useful_life = 2;  // m, shared by both products
  double demand_mean_a = 5.0;
  double demand_mean_b = 5.0;
  // Maximum order quantities; negative means derive the cap from the
  // newsvendor critical ratio.
  int max_order_a = -1;
  int max_order_b = -1;
  double unit_cost_a = 0.5;
  double unit_cost_b = 0.5;
  double revenue_a = 1.0;
  double revenue_b = 1.0;
  double substitution_prob = 0.5;  // rho
  double discount_factor = 1.0;
};

// Smallest order cap whose Poisson service level over a full lifetime of
// demand reaches the critical ratio (C_r - C_v) / C_r.
int newsvendor_max_order(int useful_life, double demand_mean, double revenue, double unit_cost);

// P(D_u = d | I_b = y, D_b >= y): distribution of the extra product-A demand
// from substitution, conditional on product B stocking out at level y, and
// its convolution with product-A demand, P(D_z = d | I_b = y). Columns are
// indexed by y; rows by d in 0..d_max.
struct SubstitutionTables {
  int d_max = 0;
  int y_max = 0;
  std::vector<double> pu;      // (y_max+1) x (d_max+1), row-major by y
  std::vector<double> pz;      // same layout
  std::vector<double> pz_cum;  // pz_cum(y, d) = sum_{k < d} pz(y, k)

  double pu_at(int y, int d) const { return pu[static_cast<std::size_t>(y) * (d_max + 1) + d]; }
  double pz_at(int y, int d) const { return pz[static_cast<std::size_t>(y) * (d_max + 1) + d]; }
  double pz_cum_at(int y, int d) const {
    return pz_cum[static_cast<std::size_t>(y) * (d_max + 1) + d];
  }
};

class ScenarioB {
 public:
  explicit ScenarioB(const ScenarioBParams& params);

  const ScenarioBParams& params() const { return params_; }
  const TupleSpace& state_space() const { return space_; }
  int max_order_a() const { return max_order_a_; }
  int max_order_b() const { return max_order_b_; }
  int issued_cap_a() const { return issued_cap_a_; }  // m * A_max per product
  int issued_cap_b() const { return issued_cap_b_; }
  const SubstitutionTables& substitution_tables() const { return tables_; }

  // --- value-iteration model contract ---
  std::uint64_t state_count() const { return space_.count(); }
  std::uint32_t action_count() const {
    return static_cast<std::uint32_t>((max_order_a_ + 1) * (max_order_b_ + 1));
  }
  std::uint64_t outcome_count() const {
    return static_cast<std::uint64_t>(issued_cap_a_ + 1) * (issued_cap_b_ + 1);
  }
  double discount() const { return params_.discount_factor; }
  ConvergenceTest default_convergence_test() const { return ConvergenceTest::change_span; }
  int periodicity() const { return 1; }
  double initial_value(std::uint64_t state) const;  // expected one-step sales revenue
  std::string fingerprint_material() const;

  Transition transition(std::uint64_t state, std::uint32_t action, std::uint64_t outcome) const;
  double outcome_probability(std::uint64_t state, std::uint32_t action,
                             std::uint64_t outcome) const;
  void q_row(std::uint64_t state, double gamma, std::span<const double> values,
             std::span<double> q) const;
  void q_row(std::uint64_t state, double gamma, std::span<const float> values,
             std::span<float> q) const;

  // Joint pmf of the issued pair for one state, over all outcomes in
  // enumeration order (h_a major, h_b minor).
  std::vector<double> issued_joint_pmf(std::uint64_t state) const;

  // --- simulator contract ---
  std::size_t state_arity() const { return space_.arity(); }
  std::size_t action_arity() const { return 2; }
  int products() const { return 2; }
  // Heuristic order-up-to levels may exceed the value-iteration cap, so the
  // simulator accepts orders up to twice each product's cap.
  int sim_action_bound(int product) const {
    return 2 * (product == 0 ? max_order_a_ : max_order_b_);
  }
  void initial_state(std::span<int> state) const {
    for (auto& c : state) c = 0;
  }
  void sample_step(std::span<int> state, std::span<const int> action, RolloutRng& rng,
                   StepStats& stats) const;

  // Waste-adjusted order-up-to rule, applied per product.
  void modified_base_stock_action(int level_a, int level_b, std::span<const int> state,
                                  std::span<int> action) const;

  std::pair<int, int> action_pair(std::uint32_t action_index) const {
    const int width = max_order_b_ + 1;
    return {static_cast<int>(action_index) / width, static_cast<int>(action_index) % width};
  }

 private:
  template <typename T>
  void q_row_impl(std::uint64_t state, double gamma, std::span<const T> values,
                  std::span<T> q) const;
  double issued_probability(int h_a, int h_b, int stock_a, int stock_b) const;
  void build_tables();

  ScenarioBParams params_;
  int max_order_a_ = 0, max_order_b_ = 0;
  int issued_cap_a_ = 0, issued_cap_b_ = 0;
  TupleSpace space_;
  SubstitutionTables tables_;
  std::vector<double> pmf_a_, pmf_b_;  // Poisson demand pmfs
  std::vector<double> sf_a_, sf_b_;    // sf[i] = P(D >= i)
  std::vector<double> cdf_a_, cdf_b_;  // for inverse-cdf demand sampling
};

}  // namespace pvi
