#pragma once

#include <array>
#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pvi/errors.hpp"
#include "pvi/tuple_space.hpp"

namespace pvi {

enum class ConvergenceTest { value_span, change_span, periodic_span };

std::string to_string(ConvergenceTest test);
ConvergenceTest convergence_test_from_string(const std::string& name);

struct Transition {
  std::uint64_t next_state;
  double reward;
};

// Contract every value-iteration model satisfies: enumerable state, action
// and outcome sets, a deterministic transition T(s, a, w) -> (s', r), and
// per-(s, a) outcome probabilities. q_row is the batched fast path used by
// the solver; it must produce, for one state, Q(s, a) for every action with
// outcome terms accumulated in outcome-enumeration order.
template <typename M>
concept MdpModel = requires(const M& m, std::uint64_t s, std::uint32_t a, std::uint64_t w,
                            double gamma, std::span<const double> v64, std::span<double> q64,
                            std::span<const float> v32, std::span<float> q32) {
  { m.state_count() } -> std::convertible_to<std::uint64_t>;
  { m.action_count() } -> std::convertible_to<std::uint32_t>;
  { m.outcome_count() } -> std::convertible_to<std::uint64_t>;
  { m.discount() } -> std::convertible_to<double>;
  { m.transition(s, a, w) } -> std::convertible_to<Transition>;
  { m.outcome_probability(s, a, w) } -> std::convertible_to<double>;
  { m.initial_value(s) } -> std::convertible_to<double>;
  { m.default_convergence_test() } -> std::convertible_to<ConvergenceTest>;
  { m.periodicity() } -> std::convertible_to<int>;
  { m.fingerprint_material() } -> std::convertible_to<std::string>;
  m.q_row(s, gamma, v64, q64);
  m.q_row(s, gamma, v32, q32);
};

// P(w | s, a) for every outcome, in enumeration order.
template <MdpModel M>
std::vector<double> outcome_probabilities(const M& model, std::uint64_t state,
                                          std::uint32_t action) {
  std::vector<double> probs(model.outcome_count());
  for (std::uint64_t w = 0; w < probs.size(); ++w)
    probs[w] = model.outcome_probability(state, action, w);
  return probs;
}

// Ordered state list as tuples; refuses to materialise oversized spaces.
template <MdpModel M>
std::vector<std::vector<int>> enumerate_states(const M& model,
                                               std::uint64_t limit = 50'000'000) {
  const std::uint64_t n = model.state_count();
  if (n > limit)
    throw CapacityError("state enumeration requires " + std::to_string(n) +
                            " states, exceeding the limit of " + std::to_string(limit),
                        n);
  std::vector<std::vector<int>> states(n, std::vector<int>(model.state_space().arity()));
  for (std::uint64_t i = 0; i < n; ++i) model.state_space().decode(i, states[i]);
  return states;
}

}  // namespace pvi
