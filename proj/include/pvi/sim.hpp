#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pvi/errors.hpp"
#include "pvi/parallel.hpp"
#include "pvi/rng.hpp"
#include "pvi/sim_types.hpp"

// Monte-Carlo policy evaluation: independent rollouts with a warm-up
// period, discounted returns and service/wastage/holding KPIs. Rollout i of
// an evaluation uses stream base_seed + i of the counter-based generator,
// so results are bitwise reproducible for a fixed base seed regardless of
// thread count, and two policies evaluated with the same base seed share
// random realisations (common random numbers).

namespace pvi {

template <typename S>
concept Simulator = requires(const S& s, std::span<int> state, std::span<const int> action,
                             RolloutRng& rng, StepStats& stats) {
  { s.state_arity() } -> std::convertible_to<std::size_t>;
  { s.action_arity() } -> std::convertible_to<std::size_t>;
  { s.products() } -> std::convertible_to<int>;
  { s.sim_action_bound(0) } -> std::convertible_to<int>;
  { s.discount() } -> std::convertible_to<double>;
  s.initial_state(state);
  s.sample_step(state, action, rng, stats);
};

using PolicyFn = std::function<void(std::span<const int> state, std::span<int> action)>;

struct RolloutConfig {
  int horizon_days = 365;
  int warmup_days = 100;
  int n_rollouts = 10'000;
  std::uint64_t base_seed = 0;
  int threads = 1;
};

struct RolloutSummary {
  double ret = 0.0;                        // discounted reward over the measured window
  std::array<double, 2> service_pct{100.0, 100.0};
  std::array<double, 2> wastage_pct{0.0, 0.0};
  std::array<double, 2> holding_mean{0.0, 0.0};
};

struct KpiStat {
  double mean = 0.0;
  double sd = 0.0;
};

struct Evaluation {
  KpiStat ret;
  std::array<KpiStat, 2> service_pct;
  std::array<KpiStat, 2> wastage_pct;
  std::array<KpiStat, 2> holding_mean;
  int products = 1;
  int n_rollouts = 0;
};

template <Simulator S>
RolloutSummary rollout(const S& sim, const PolicyFn& policy, const RolloutConfig& config,
                       int rollout_index) {
  const int products = sim.products();
  std::vector<int> state(sim.state_arity());
  std::vector<int> action(sim.action_arity());
  sim.initial_state(state);

  RolloutRng rng(config.base_seed, static_cast<std::uint64_t>(rollout_index));
  const double gamma = sim.discount();
  const int total_days = config.warmup_days + config.horizon_days;

  double ret = 0.0;
  double weight = 1.0;  // gamma^0 on the first post-warm-up day
  std::array<std::int64_t, 2> demand{}, filled{}, expired{}, received{}, holding{};

  StepStats stats;
  for (int day = 0; day < total_days; ++day) {
    policy(state, action);
    for (std::size_t k = 0; k < action.size(); ++k) {
      if (action[k] < 0 || action[k] > sim.sim_action_bound(static_cast<int>(k))) {
        std::string tuple;
        for (int c : state) tuple += std::to_string(c) + " ";
        throw ContractViolation("policy returned out-of-range order " +
                                std::to_string(action[k]) + " in state [ " + tuple + "]");
      }
    }
    rng.begin_day(static_cast<std::uint32_t>(day));
    stats = StepStats{};
    sim.sample_step(state, action, rng, stats);

    if (day >= config.warmup_days) {
      ret += weight * stats.reward;
      weight *= gamma;
      for (int k = 0; k < products; ++k) {
        demand[k] += stats.demand[k];
        filled[k] += stats.filled[k];
        expired[k] += stats.expired[k];
        received[k] += stats.received[k];
        holding[k] += stats.holding[k];
      }
    }
  }

  RolloutSummary out;
  out.ret = ret;
  for (int k = 0; k < products; ++k) {
    // Empty-window conventions: no demand counts as full service, nothing
    // received counts as zero wastage.
    out.service_pct[k] = demand[k] > 0 ? 100.0 * double(filled[k]) / double(demand[k]) : 100.0;
    out.wastage_pct[k] =
        received[k] > 0 ? 100.0 * double(expired[k]) / double(received[k]) : 0.0;
    out.holding_mean[k] =
        config.horizon_days > 0 ? double(holding[k]) / config.horizon_days : 0.0;
  }
  return out;
}

namespace detail {

inline KpiStat reduce(std::span<const double> xs) {
  KpiStat stat;
  const std::size_t n = xs.size();
  if (n == 0) return stat;
  double sum = 0.0;
  for (double x : xs) sum += x;
  stat.mean = sum / double(n);
  if (n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - stat.mean) * (x - stat.mean);
    stat.sd = std::sqrt(ss / double(n - 1));
  }
  return stat;
}

}  // namespace detail

template <Simulator S>
Evaluation evaluate_policy(const S& sim, const PolicyFn& policy, const RolloutConfig& config) {
  if (config.n_rollouts < 1) throw ParameterError("evaluation needs at least one rollout");
  const int n = config.n_rollouts;
  std::vector<RolloutSummary> results(n);
  parallel_for_chunks(n, 16, config.threads, [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i)
      results[i] = rollout(sim, policy, config, static_cast<int>(i));
  });

  Evaluation eval;
  eval.products = sim.products();
  eval.n_rollouts = n;
  std::vector<double> xs(n);
  const auto collect = [&](auto&& get) {
    for (int i = 0; i < n; ++i) xs[i] = get(results[i]);
    return detail::reduce(xs);
  };
  eval.ret = collect([](const RolloutSummary& r) { return r.ret; });
  for (int k = 0; k < eval.products; ++k) {
    eval.service_pct[k] = collect([k](const RolloutSummary& r) { return r.service_pct[k]; });
    eval.wastage_pct[k] = collect([k](const RolloutSummary& r) { return r.wastage_pct[k]; });
    eval.holding_mean[k] = collect([k](const RolloutSummary& r) { return r.holding_mean[k]; });
  }
  return eval;
}

}  // namespace pvi
