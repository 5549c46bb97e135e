#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "pvi/checkpoint.hpp"
#include "pvi/errors.hpp"
#include "pvi/model.hpp"
#include "pvi/parallel.hpp"

// Batched, synchronous (Jacobi) value iteration: every backup in sweep i
// reads only the sweep i-1 value vector, states are partitioned into
// fixed-size batches processed across worker threads, and a barrier
// separates sweeps. Two runs with the same configuration produce bitwise
// identical value vectors at every iteration regardless of batch size and
// thread count, because each state is written exactly once per sweep and the
// per-state summation order is fixed (outcomes in enumeration order, actions
// in enumeration order).

namespace pvi {

enum class Precision { f32, f64 };

struct ViConfig {
  double epsilon = 1e-4;
  std::optional<double> gamma;  // defaults to the model's discount factor
  std::uint64_t max_batch_size = 0;  // states per parallel batch; 0 = pick automatically
  std::uint64_t max_iterations = 10'000;
  std::uint64_t fixed_iterations = 0;  // > 0: run exactly this many sweeps, no test
  std::uint64_t checkpoint_every = 0;  // 0 = no periodic checkpoints
  std::filesystem::path checkpoint_path;
  Precision precision = Precision::f64;
  std::optional<ConvergenceTest> convergence_test;  // defaults to the model's
  int threads = 1;
  // Capacity gate for materialising |S|-sized arrays.
  std::uint64_t max_states = 200'000'000;
};

struct Policy {
  std::vector<std::uint32_t> actions;  // one action index per state
};

struct ValueFunction {
  std::vector<double> values;
  std::uint64_t iteration = 0;
  Fingerprint fingerprint{};
};

struct ViResult {
  ValueFunction vf;
  Policy policy;
  std::uint64_t iterations = 0;
  bool converged = false;
  double wall_seconds = 0.0;
};

// Q(s, a) for all actions followed by an argmax with ties broken toward the
// smallest action index.
template <typename T, MdpModel M>
inline std::pair<T, std::uint32_t> backup_state(const M& model, std::uint64_t state, double gamma,
                                                std::span<const T> values, std::span<T> q) {
  model.q_row(state, gamma, values, q);
  T best = q[0];
  std::uint32_t best_action = 0;
  for (std::uint32_t a = 1; a < q.size(); ++a) {
    if (q[a] > best) {
      best = q[a];
      best_action = a;
    }
  }
  return {best, best_action};
}

// One Bellman backup for every state in [lo, hi): out_values[i - lo] and
// out_actions[i - lo] receive max_a Q(i, a) and the argmax.
template <typename T, MdpModel M>
void bellman_backup_batch(const M& model, std::span<const T> values, std::uint64_t lo,
                          std::uint64_t hi, double gamma, std::span<T> out_values,
                          std::span<std::uint32_t> out_actions) {
  std::vector<T> q(model.action_count());
  for (std::uint64_t s = lo; s < hi; ++s) {
    auto [v, a] = backup_state<T>(model, s, gamma, values, std::span<T>(q));
    out_values[s - lo] = v;
    out_actions[s - lo] = a;
  }
}

inline std::size_t history_needed(ConvergenceTest test) {
  return test == ConvergenceTest::periodic_span ? 8 : 2;
}

// Convergence tests over the trailing window of value vectors
// (oldest..newest):
//  - value_span:    max_s |V_i - V_{i-1}| < epsilon
//  - change_span:   max_s (V_i - V_{i-1}) - min_s (V_i - V_{i-1}) < epsilon
//  - periodic_span: with D(s) = sum_{j=0..6} (V_{i-j}(s) - V_{i-j-1}(s)) / gamma^{i-j-1},
//    require max_s D - min_s D <= 2 epsilon min(|max|, |min|); defined only
//    once iteration >= 7. The common factor gamma^{-(i-1)} scales both sides
//    of the inequality equally, so it is dropped and the weights become
//    gamma^j, which cannot overflow at large iteration counts.
template <typename T>
bool check_convergence(ConvergenceTest test, std::span<const std::vector<T>> history,
                       double gamma, double epsilon, std::uint64_t iteration) {
  if (history.size() < history_needed(test))
    throw ContractViolation("convergence test needs " +
                            std::to_string(history_needed(test)) + " value vectors, got " +
                            std::to_string(history.size()));

  const auto& cur = history[history.size() - 1];
  const auto& prev = history[history.size() - 2];
  const std::size_t n = cur.size();

  switch (test) {
    case ConvergenceTest::value_span: {
      double worst = 0.0;
      for (std::size_t s = 0; s < n; ++s)
        worst = std::max(worst, std::abs(double(cur[s]) - double(prev[s])));
      return worst < epsilon;
    }
    case ConvergenceTest::change_span: {
      double lo = double(cur[0]) - double(prev[0]);
      double hi = lo;
      for (std::size_t s = 1; s < n; ++s) {
        const double d = double(cur[s]) - double(prev[s]);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
      return hi - lo < epsilon;
    }
    case ConvergenceTest::periodic_span: {
      if (iteration < 7) return false;
      double lo = 0.0, hi = 0.0;
      const std::size_t base = history.size() - 1;
      for (std::size_t s = 0; s < n; ++s) {
        double acc = 0.0;
        double w = 1.0;
        for (int j = 0; j <= 6; ++j) {
          acc += w * (double(history[base - j][s]) - double(history[base - j - 1][s]));
          w *= gamma;
        }
        if (s == 0) {
          lo = hi = acc;
        } else {
          lo = std::min(lo, acc);
          hi = std::max(hi, acc);
        }
      }
      return hi - lo <= 2.0 * epsilon * std::min(std::abs(hi), std::abs(lo));
    }
  }
  return false;
}

namespace detail {

template <typename T, MdpModel M>
ViResult run_value_iteration_impl(const M& model, const ViConfig& config,
                                  const Checkpoint* resume) {
  const auto t_start = std::chrono::steady_clock::now();
  const std::uint64_t n = model.state_count();
  if (n > config.max_states)
    throw CapacityError("value iteration requires " + std::to_string(n) +
                            " states, exceeding the configured capacity of " +
                            std::to_string(config.max_states),
                        n);
  if (n == 0) throw ParameterError("value iteration: empty state space");

  const double gamma = config.gamma.value_or(model.discount());
  const ConvergenceTest test =
      config.convergence_test.value_or(model.default_convergence_test());
  const Fingerprint fp = sha256_fingerprint(model.fingerprint_material());
  const int threads = config.threads < 1 ? 1 : config.threads;

  std::uint64_t batch = config.max_batch_size;
  if (batch == 0)
    batch = std::clamp<std::uint64_t>((n + 8 * threads - 1) / (8 * threads), 1, 65'536);

  std::vector<T> v_prev(n), v_next(n);
  std::uint64_t iteration = 0;
  if (resume != nullptr) {
    if (resume->fingerprint != fp)
      throw FingerprintMismatch("resume checkpoint fingerprint " +
                                fingerprint_hex(resume->fingerprint) +
                                " does not match model fingerprint " + fingerprint_hex(fp));
    if (resume->values.size() != n)
      throw FormatError("resume checkpoint has " + std::to_string(resume->values.size()) +
                        " states, model has " + std::to_string(n));
    for (std::uint64_t s = 0; s < n; ++s) v_prev[s] = static_cast<T>(resume->values[s]);
    iteration = resume->iteration;
  } else {
    parallel_for_chunks(n, batch, threads, [&](std::uint64_t lo, std::uint64_t hi) {
      for (std::uint64_t s = lo; s < hi; ++s)
        v_prev[s] = static_cast<T>(model.initial_value(s));
    });
  }

  auto write_checkpoint = [&](const std::vector<T>& values, std::uint64_t iter) {
    if (config.checkpoint_path.empty()) return;
    std::vector<double> wide(values.begin(), values.end());
    save_checkpoint(config.checkpoint_path, wide, iter, fp);
  };
  // An initial checkpoint makes a fresh run resumable before the first sweep
  // completes (the initial value can itself be expensive to build).
  if (config.checkpoint_every > 0 && resume == nullptr) write_checkpoint(v_prev, iteration);

  // Sliding window of past value vectors for the convergence test; dropping
  // the oldest entry only moves vector headers, not payloads.
  std::vector<std::vector<T>> history;
  const std::size_t hist_cap = history_needed(test);
  history.push_back(v_prev);

  bool converged = false;
  const std::uint64_t start_iteration = iteration;
  while (true) {
    if (config.fixed_iterations > 0) {
      if (iteration >= config.fixed_iterations) {
        converged = true;  // ran for exactly the requested number of sweeps
        break;
      }
    } else if (iteration >= start_iteration + config.max_iterations) {
      break;
    }

    ++iteration;
    parallel_for_chunks(n, batch, threads, [&](std::uint64_t lo, std::uint64_t hi) {
      std::vector<T> q(model.action_count());
      // Ragged tail batches are padded with copies of state 0; the padded
      // outputs are discarded rather than written back.
      const std::uint64_t padded_hi = lo + batch;
      for (std::uint64_t i = lo; i < padded_hi; ++i) {
        const std::uint64_t s = i < hi ? i : 0;
        auto [value, action] =
            backup_state<T>(model, s, gamma, std::span<const T>(v_prev), std::span<T>(q));
        (void)action;
        if (i < hi) v_next[i] = value;
      }
    });

    for (std::uint64_t s = 0; s < n; ++s) {
      if (!std::isfinite(double(v_next[s])))
        throw NumericDivergence("non-finite value for state " + std::to_string(s) +
                                    " at iteration " + std::to_string(iteration),
                                iteration);
    }

    std::swap(v_prev, v_next);
    history.push_back(v_prev);
    if (history.size() > hist_cap) history.erase(history.begin());

    if (config.fixed_iterations == 0 && history.size() >= hist_cap) {
      converged = check_convergence<T>(test, std::span<const std::vector<T>>(history), gamma,
                                       config.epsilon, iteration);
    }

    if (config.checkpoint_every > 0 && iteration % config.checkpoint_every == 0)
      write_checkpoint(v_prev, iteration);

    if (converged) break;
  }

  // Policy extraction: one extra argmax sweep over the converged values.
  Policy policy;
  policy.actions.assign(n, 0);
  parallel_for_chunks(n, batch, threads, [&](std::uint64_t lo, std::uint64_t hi) {
    std::vector<T> q(model.action_count());
    const std::uint64_t padded_hi = lo + batch;
    for (std::uint64_t i = lo; i < padded_hi; ++i) {
      const std::uint64_t s = i < hi ? i : 0;
      auto [value, action] =
          backup_state<T>(model, s, gamma, std::span<const T>(v_prev), std::span<T>(q));
      (void)value;
      if (i < hi) policy.actions[i] = action;
    }
  });

  ViResult result;
  result.vf.values.assign(v_prev.begin(), v_prev.end());
  result.vf.iteration = iteration;
  result.vf.fingerprint = fp;
  result.policy = std::move(policy);
  result.iterations = iteration;
  result.converged = converged;
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

}  // namespace detail

template <MdpModel M>
ViResult run_value_iteration(const M& model, const ViConfig& config,
                             const Checkpoint* resume = nullptr) {
  if (!(config.epsilon > 0.0)) throw ParameterError("value iteration: epsilon must be > 0");
  if (config.precision == Precision::f32)
    return detail::run_value_iteration_impl<float>(model, config, resume);
  return detail::run_value_iteration_impl<double>(model, config, resume);
}

}  // namespace pvi
