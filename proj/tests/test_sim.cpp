#include <doctest.h>

#include <cmath>

#include "pvi/policies.hpp"
#include "pvi/scenario_a.hpp"
#include "pvi/sim.hpp"

using namespace pvi;

namespace {

ScenarioA make_model() {
  ScenarioAParams p;
  p.wastage_cost = 7.0;
  return ScenarioA(p);
}

PolicyFn constant_order(int quantity) {
  return [quantity](std::span<const int>, std::span<int> action) { action[0] = quantity; };
}

}  // namespace

TEST_CASE("philox streams are deterministic and independent of draw history") {
  RolloutRng a(123, 0), b(123, 0);
  a.begin_day(5);
  b.begin_day(5);
  CHECK(a.next_u64() == b.next_u64());
  // Jumping straight to a later day reproduces the same draws regardless of
  // what was consumed before.
  a.begin_day(9);
  const auto first = a.next_u64();
  RolloutRng c(123, 0);
  c.begin_day(9);
  CHECK(c.next_u64() == first);
  // Different rollouts and seeds decorrelate.
  RolloutRng d(123, 1), e(124, 0);
  d.begin_day(9);
  e.begin_day(9);
  CHECK(d.next_u64() != first);
  CHECK(e.next_u64() != first);
  // Seed arithmetic: rollout i of base seed s matches rollout 0 of s + i.
  RolloutRng f(100, 7), g(107, 0);
  f.begin_day(3);
  g.begin_day(3);
  CHECK(f.next_u64() == g.next_u64());
}

TEST_CASE("uniforms land in the unit interval") {
  RolloutRng rng(42, 0);
  rng.begin_day(0);
  for (int i = 0; i < 10'000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("single-uniform samplers agree with their distributions") {
  // Binomial mean over many draws.
  RolloutRng rng(7, 0);
  rng.begin_day(0);
  double total = 0.0;
  constexpr int kDraws = 200'000;
  for (int i = 0; i < kDraws; ++i) total += sample_binomial(12, 0.3, rng.uniform());
  CHECK(total / kDraws == doctest::Approx(3.6).epsilon(0.01));
  CHECK(sample_binomial(5, 0.0, 0.99) == 0);
  CHECK(sample_binomial(5, 1.0, 0.01) == 5);
  CHECK(sample_binomial(0, 0.5, 0.99) == 0);

  // Inverse-cdf draw hits each bucket with its probability.
  const std::vector<double> cdf{0.2, 0.5, 1.0};
  CHECK(sample_from_cdf(cdf, 0.1) == 0);
  CHECK(sample_from_cdf(cdf, 0.2) == 1);
  CHECK(sample_from_cdf(cdf, 0.49999) == 1);
  CHECK(sample_from_cdf(cdf, 0.5) == 2);
  CHECK(sample_from_cdf(cdf, 0.9999999) == 2);
}

TEST_CASE("zero-horizon rollouts use the empty-window conventions") {
  const auto model = make_model();
  RolloutConfig config;
  config.horizon_days = 0;
  config.warmup_days = 3;
  const auto summary = rollout(model, constant_order(2), config, 0);
  CHECK(summary.ret == 0.0);
  CHECK(summary.service_pct[0] == 100.0);
  CHECK(summary.wastage_pct[0] == 0.0);
  CHECK(summary.holding_mean[0] == 0.0);
}

TEST_CASE("evaluation is reproducible and thread-count independent") {
  const auto model = make_model();
  RolloutConfig config;
  config.n_rollouts = 400;
  config.base_seed = 99;
  config.threads = 1;
  const auto one = evaluate_policy(model, constant_order(3), config);
  config.threads = 2;
  const auto two = evaluate_policy(model, constant_order(3), config);
  CHECK(one.ret.mean == two.ret.mean);
  CHECK(one.ret.sd == two.ret.sd);
  CHECK(one.service_pct[0].mean == two.service_pct[0].mean);
  CHECK(one.wastage_pct[0].mean == two.wastage_pct[0].mean);
  CHECK(one.holding_mean[0].mean == two.holding_mean[0].mean);
}

TEST_CASE("the evaluation mean matches independently recomputed rollouts") {
  const auto model = make_model();
  RolloutConfig config;
  config.n_rollouts = 128;
  config.base_seed = 17;
  const auto eval = evaluate_policy(model, constant_order(4), config);
  double total = 0.0;
  for (int i = 0; i < config.n_rollouts; ++i)
    total += rollout(model, constant_order(4), config, i).ret;
  CHECK(eval.ret.mean == doctest::Approx(total / config.n_rollouts).epsilon(1e-12));
}

TEST_CASE("a single rollout reports zero standard deviation") {
  const auto model = make_model();
  RolloutConfig config;
  config.n_rollouts = 1;
  const auto eval = evaluate_policy(model, constant_order(1), config);
  CHECK(eval.ret.sd == 0.0);
}

TEST_CASE("never ordering forfeits all demand at the shortage cost") {
  const auto model = make_model();
  RolloutConfig config;
  config.n_rollouts = 2'000;
  config.base_seed = 5;
  config.threads = 2;
  const auto eval = evaluate_policy(model, constant_order(0), config);
  // Service is identically zero with an empty system.
  CHECK(eval.service_pct[0].mean == 0.0);
  CHECK(eval.wastage_pct[0].mean == 0.0);
  CHECK(eval.holding_mean[0].mean == 0.0);
  // Analytic expectation: -C_s * E[D] * sum_{k<365} gamma^k.
  const double annuity = (1.0 - std::pow(0.99, 365)) / 0.01;
  const double expected = -5.0 * 4.0 * annuity;
  const double tolerance = 4.0 * eval.ret.sd / std::sqrt(double(config.n_rollouts));
  CHECK(std::abs(eval.ret.mean - expected) <= tolerance);
}

TEST_CASE("common random numbers: demand realisations are shared across policies") {
  const auto model = make_model();
  // Demand is the first draw of each day, so two policies with different
  // actions observe identical demand streams under the same seed.
  RolloutConfig config;
  config.n_rollouts = 1;
  config.base_seed = 2024;

  const auto demands_under = [&](int order) {
    std::vector<int> state(model.state_arity(), 0);
    std::vector<int> action{0};
    RolloutRng rng(config.base_seed, 0);
    std::vector<int> demands;
    StepStats stats;
    for (int day = 0; day < 50; ++day) {
      action[0] = order;
      rng.begin_day(day);
      stats = StepStats{};
      model.sample_step(state, action, rng, stats);
      demands.push_back(stats.demand[0]);
    }
    return demands;
  };
  CHECK(demands_under(0) == demands_under(9));
}

TEST_CASE("out-of-range policy actions are reported with the offending state") {
  const auto model = make_model();
  RolloutConfig config;
  config.n_rollouts = 1;
  try {
    (void)rollout(model, constant_order(11), config, 0);  // cap is 10
    FAIL("expected a contract violation");
  } catch (const ContractViolation& e) {
    CHECK(std::string(e.what()).find("state") != std::string::npos);
  }
}
