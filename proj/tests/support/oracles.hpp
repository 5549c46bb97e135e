#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pvi/model.hpp"

// Independent reference implementations used as test oracles. These stay
// deliberately naive: plain loops over the public model contract and dense
// linear algebra, with no code shared with the solver's fast paths.

namespace pvi::testing {

// Q(s, a) for every action via the outcome_probabilities / transition
// contract, accumulating in outcome-enumeration order.
template <MdpModel M>
std::vector<double> naive_q_row(const M& model, std::uint64_t state, double gamma,
                                std::span<const double> values) {
  std::vector<double> q(model.action_count(), 0.0);
  for (std::uint32_t a = 0; a < model.action_count(); ++a) {
    for (std::uint64_t w = 0; w < model.outcome_count(); ++w) {
      const double p = model.outcome_probability(state, a, w);
      if (p == 0.0) continue;
      const auto t = model.transition(state, a, w);
      q[a] += p * (t.reward + gamma * values[t.next_state]);
    }
  }
  return q;
}

// Solves the linear system V = r_pi + gamma P_pi V by Gaussian elimination
// with partial pivoting; sized for brute-force instances only.
template <MdpModel M>
std::vector<double> policy_value_linear_solve(const M& model,
                                              std::span<const std::uint32_t> policy) {
  const std::size_t n = model.state_count();
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t s = 0; s < n; ++s) {
    a[s][s] = 1.0;
    for (std::uint64_t w = 0; w < model.outcome_count(); ++w) {
      const double p = model.outcome_probability(s, policy[s], w);
      if (p == 0.0) continue;
      const auto t = model.transition(s, policy[s], w);
      a[s][t.next_state] -= model.discount() * p;
      a[s][n] += p * t.reward;
    }
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    if (std::abs(a[col][col]) < 1e-12) throw std::runtime_error("singular policy system");
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> v(n);
  for (std::size_t s = 0; s < n; ++s) v[s] = a[s][n] / a[s][s];
  return v;
}

struct BruteForceSolution {
  std::vector<double> optimal_values;
  std::vector<std::uint32_t> optimal_policy;
};

// Enumerates every deterministic policy, evaluates each by linear solve and
// takes the pointwise maximum as V*; the reported policy is the greedy
// argmax against V* with ties broken toward the smallest action index,
// matching the solver's convention.
template <MdpModel M>
BruteForceSolution brute_force_solve(const M& model) {
  const std::size_t n = model.state_count();
  const std::uint32_t n_actions = model.action_count();
  std::vector<std::uint32_t> policy(n, 0);
  std::vector<double> best(n, -1e300);
  for (;;) {
    const auto v = policy_value_linear_solve(model, policy);
    for (std::size_t s = 0; s < n; ++s) best[s] = std::max(best[s], v[s]);
    std::size_t i = 0;
    while (i < n && policy[i] + 1 == n_actions) policy[i++] = 0;
    if (i == n) break;
    ++policy[i];
  }

  BruteForceSolution out;
  out.optimal_values = best;
  out.optimal_policy.assign(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    double top = -1e300;
    for (std::uint32_t a = 0; a < n_actions; ++a) {
      double q = 0.0;
      for (std::uint64_t w = 0; w < model.outcome_count(); ++w) {
        const double p = model.outcome_probability(s, a, w);
        if (p == 0.0) continue;
        const auto t = model.transition(s, a, w);
        q += p * (t.reward + model.discount() * best[t.next_state]);
      }
      if (q > top) {
        top = q;
        out.optimal_policy[s] = a;
      }
    }
  }
  return out;
}

}  // namespace pvi::testing
