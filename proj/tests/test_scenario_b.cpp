#include <doctest.h>

#include <cmath>
#include <random>

#include "pvi/scenario_b.hpp"
#include "pvi/vi.hpp"

using namespace pvi;

namespace {

ScenarioBParams base_params() {
  ScenarioBParams p;  // defaults follow the two-product experiment family
  return p;
}

std::uint64_t encode_stocks(const ScenarioB& model, std::vector<int> a_profile,
                            std::vector<int> b_profile) {
  std::vector<int> tuple;
  tuple.insert(tuple.end(), a_profile.begin(), a_profile.end());
  tuple.insert(tuple.end(), b_profile.begin(), b_profile.end());
  return model.state_space().encode(tuple);
}

}  // namespace

TEST_CASE("newsvendor order caps") {
  CHECK(newsvendor_max_order(2, 5.0, 1.0, 0.5) == 10);
  CHECK(newsvendor_max_order(3, 7.0, 1.0, 0.5) == 21);
  CHECK(newsvendor_max_order(3, 3.0, 1.0, 0.5) == 9);
  CHECK(newsvendor_max_order(2, 7.0, 1.0, 0.5) == 14);
  CHECK(newsvendor_max_order(2, 5.0, 1.0, 1.0) == 0);  // zero critical ratio
  CHECK_THROWS_AS((void)newsvendor_max_order(2, 5.0, 0.0, 0.5), ParameterError);
}

TEST_CASE("derived caps match the published experiment rows") {
  ScenarioBParams p = base_params();
  const ScenarioB exp1(p);
  CHECK(exp1.max_order_a() == 10);
  CHECK(exp1.max_order_b() == 10);
  CHECK(exp1.state_count() == 14'641);
  CHECK(exp1.action_count() == 121);
  CHECK(exp1.outcome_count() == 441);

  p.demand_mean_a = 7.0;
  p.demand_mean_b = 3.0;
  const ScenarioB exp2(p);
  CHECK(exp2.max_order_a() == 14);
  CHECK(exp2.max_order_b() == 6);
  CHECK(exp2.state_count() == 11'025);
  CHECK(exp2.action_count() == 105);
  CHECK(exp2.outcome_count() == 377);
}

TEST_CASE("no substitution acceptance collapses the extra-demand distribution") {
  ScenarioBParams p = base_params();
  p.substitution_prob = 0.0;
  const ScenarioB model(p);
  const auto& tables = model.substitution_tables();
  for (int y = 0; y <= tables.y_max; ++y) {
    CHECK(tables.pu_at(y, 0) == doctest::Approx(1.0).epsilon(1e-12));
    for (int d = 1; d <= tables.d_max; ++d) CHECK(tables.pu_at(y, d) == 0.0);
  }
}

TEST_CASE("substitution-demand columns are normalised; unreachable stockouts degenerate") {
  ScenarioBParams p = base_params();
  p.useful_life = 3;
  p.demand_mean_b = 1.0;
  p.max_order_a = 15;
  p.max_order_b = 15;
  const ScenarioB model(p);
  const auto& tables = model.substitution_tables();

  for (int y = 0; y <= tables.y_max; ++y) {
    double sum = 0.0;
    for (int d = 0; d <= tables.d_max; ++d) sum += tables.pz_at(y, d);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
  }

  // P(demand for B >= 45) is far below the truncation tolerance for a unit
  // mean, so that column reduces to the product-A demand pmf.
  const auto pois_a = dist::poisson_pmf_cdf(p.demand_mean_a, tables.d_max);
  for (int d = 0; d <= tables.d_max; ++d)
    CHECK(tables.pz_at(45, d) == doctest::Approx(pois_a.pmf.probs[d]).epsilon(1e-9));
}

TEST_CASE("substitution tables match a monte-carlo oracle of the sampling process") {
  ScenarioBParams p = base_params();
  p.demand_mean_a = 1.0;
  p.demand_mean_b = 1.0;
  p.max_order_a = 3;
  p.max_order_b = 3;
  const ScenarioB model(p);
  const auto& tables = model.substitution_tables();

  constexpr int kSamples = 10'000'000;
  std::mt19937 rng(20240229);
  std::poisson_distribution<int> pois_a(1.0), pois_b(1.0);
  std::bernoulli_distribution accept(0.5);
  std::vector<double> freq(tables.d_max + 1, 0.0);
  for (int i = 0; i < kSamples; ++i) {
    const int excess_b = pois_b(rng);  // stock level y = 0: all B demand is excess
    int substituted = 0;
    for (int c = 0; c < excess_b; ++c) substituted += accept(rng) ? 1 : 0;
    const int dz = pois_a(rng) + substituted;
    if (dz <= tables.d_max) freq[dz] += 1.0;
  }
  for (int d = 0; d <= 8; ++d) {
    const double expected = tables.pz_at(0, d);
    const double se = std::sqrt(expected * (1.0 - expected) / kSamples);
    CHECK(std::abs(freq[d] / kSamples - expected) <= 3.0 * se + 1e-9);
  }
}

TEST_CASE("issued joint pmf: empty stock is a point mass and every state is normalised") {
  ScenarioBParams p = base_params();
  p.max_order_a = 4;
  p.max_order_b = 4;
  const ScenarioB model(p);

  const auto empty = model.issued_joint_pmf(0);
  CHECK(empty[0] == doctest::Approx(1.0).epsilon(1e-12));

  for (std::uint64_t s = 0; s < model.state_count(); ++s) {
    const auto pmf = model.issued_joint_pmf(s);
    double sum = 0.0;
    for (double v : pmf) {
      REQUIRE(v >= 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("issued joint pmf matches a monte-carlo oracle of the full issuing day") {
  ScenarioBParams p = base_params();
  p.demand_mean_a = 1.0;
  p.demand_mean_b = 1.0;
  p.max_order_a = 2;
  p.max_order_b = 2;
  const ScenarioB model(p);

  // One unit of A on hand, no B: the only issued pairs are (0,0) and (1,0).
  const std::uint64_t state = encode_stocks(model, {0, 1}, {0, 0});
  const auto pmf = model.issued_joint_pmf(state);

  constexpr int kSamples = 10'000'000;
  std::mt19937 rng(77);
  std::poisson_distribution<int> pois(1.0);
  std::bernoulli_distribution accept(0.5);
  int issued_one = 0;
  for (int i = 0; i < kSamples; ++i) {
    const int da = pois(rng);
    const int db = pois(rng);
    int substituted = 0;
    for (int c = 0; c < db; ++c) substituted += accept(rng) ? 1 : 0;
    if (std::min(da + substituted, 1) == 1) ++issued_one;
  }
  const double expected = pmf[1 * (model.issued_cap_b() + 1) + 0];
  const double se = std::sqrt(expected * (1.0 - expected) / kSamples);
  CHECK(std::abs(double(issued_one) / kSamples - expected) <= 3.0 * se);
  CHECK(pmf[0] + expected == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("transition: worked example, ageing and the stock contract") {
  ScenarioBParams p = base_params();
  const ScenarioB model(p);

  // X_a = (2, 1): issuing two units FIFO consumes the expiring unit plus one
  // fresh, leaving one aged unit; the fresh slot takes the order.
  const std::uint64_t state = encode_stocks(model, {2, 1}, {0, 0});
  const std::uint64_t outcome = 2 * (model.issued_cap_b() + 1) + 0;
  const auto t = model.transition(state, /*action (3, 0)*/ 3 * 11 + 0, outcome);
  std::vector<int> next(4);
  model.state_space().decode(t.next_state, next);
  CHECK(next == std::vector<int>{3, 1, 0, 0});
  CHECK(t.reward == doctest::Approx(-0.5 * 3 + 1.0 * 2));

  // Zero issued, zero order: pure ageing, zero reward.
  const auto idle = model.transition(state, 0, 0);
  model.state_space().decode(idle.next_state, next);
  CHECK(next == std::vector<int>{0, 2, 0, 0});
  CHECK(idle.reward == 0.0);

  // Issuing beyond the stock on hand violates the contract.
  CHECK_THROWS_AS((void)model.transition(state, 0, 4 * (model.issued_cap_b() + 1)),
                  ContractViolation);
}

TEST_CASE("leftover oldest stock drops off even when issuing skips buckets") {
  ScenarioBParams p = base_params();
  p.useful_life = 3;
  p.max_order_a = 5;
  p.max_order_b = 5;
  const ScenarioB model(p);
  // Profile (2, 0, 3): five units, with a hole in the middle bucket.
  const std::uint64_t state = encode_stocks(model, {2, 0, 3}, {0, 0, 0});
  const std::uint64_t outcome = 5 * (model.issued_cap_b() + 1);
  const auto t = model.transition(state, 0, outcome);
  std::vector<int> next(6);
  model.state_space().decode(t.next_state, next);
  CHECK(next == std::vector<int>{0, 0, 0, 0, 0, 0});
}

TEST_CASE("initial value is the expected one-step revenue") {
  ScenarioBParams p = base_params();
  p.max_order_a = 10;
  p.max_order_b = 10;
  const ScenarioB model(p);
  CHECK(model.initial_value(0) == 0.0);

  // Saturated product A with no substitution pressure: revenue tends to the
  // unconstrained Poisson mean.
  ScenarioBParams no_sub = p;
  no_sub.substitution_prob = 0.0;
  const ScenarioB model_ns(no_sub);
  const std::uint64_t fat = encode_stocks(model_ns, {10, 10}, {0, 0});
  CHECK(model_ns.initial_value(fat) == doctest::Approx(5.0).epsilon(1e-4));

  // Against a monte-carlo oracle of expected revenue on a mid-size state.
  const std::uint64_t state = encode_stocks(model, {3, 2}, {1, 4});
  constexpr int kSamples = 4'000'000;
  std::mt19937 rng(5150);
  std::poisson_distribution<int> pois(5.0);
  std::bernoulli_distribution accept(0.5);
  double total = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    const int da = pois(rng), db = pois(rng);
    const int hb = std::min(db, 5);
    int substituted = 0;
    for (int c = 0; c < db - hb; ++c) substituted += accept(rng) ? 1 : 0;
    const int ha = std::min(da + substituted, 5);
    total += 1.0 * ha + 1.0 * hb;
  }
  const double mc = total / kSamples;
  CHECK(model.initial_value(state) == doctest::Approx(mc).epsilon(2e-3));
}

TEST_CASE("sampled steps reproduce the analytic issued distribution") {
  ScenarioBParams p = base_params();
  const ScenarioB model(p);
  const std::uint64_t state = encode_stocks(model, {3, 2}, {1, 4});
  std::vector<int> start(4);
  model.state_space().decode(state, start);

  constexpr int kSteps = 1'000'000;
  const auto pmf = model.issued_joint_pmf(state);
  std::vector<int> counts(pmf.size(), 0);
  std::vector<int> scratch(4);
  const std::vector<int> action{0, 0};
  for (int i = 0; i < kSteps; ++i) {
    scratch = start;
    RolloutRng rng(9090, static_cast<std::uint64_t>(i));
    rng.begin_day(0);
    StepStats stats;
    model.sample_step(scratch, action, rng, stats);
    const int ha = stats.filled[0] + (stats.filled[1] - std::min(stats.demand[1], 5));
    const int hb = std::min(stats.demand[1], 5);
    ++counts[ha * (model.issued_cap_b() + 1) + hb];
  }
  int checked = 0;
  for (std::size_t w = 0; w < pmf.size(); ++w) {
    if (pmf[w] < 1e-4) continue;
    const double se = std::sqrt(pmf[w] * (1.0 - pmf[w]) / kSteps);
    CHECK(std::abs(double(counts[w]) / kSteps - pmf[w]) <= 4.0 * se);
    ++checked;
  }
  CHECK(checked >= 10);
}

TEST_CASE("with no substitution the two products decompose exactly") {
  ScenarioBParams joint = base_params();
  joint.substitution_prob = 0.0;
  joint.demand_mean_a = 2.0;
  joint.demand_mean_b = 1.5;
  joint.max_order_a = 3;
  joint.max_order_b = 3;
  const ScenarioB joint_model(joint);

  ScenarioBParams only_a = joint;
  only_a.demand_mean_b = 0.0;
  only_a.max_order_b = 0;
  const ScenarioB a_model(only_a);

  ScenarioBParams only_b = joint;
  only_b.demand_mean_a = 0.0;
  only_b.max_order_a = 0;
  const ScenarioB b_model(only_b);

  ViConfig config;
  config.fixed_iterations = 40;
  const auto v_joint = run_value_iteration(joint_model, config).vf.values;
  const auto v_a = run_value_iteration(a_model, config).vf.values;
  const auto v_b = run_value_iteration(b_model, config).vf.values;

  std::vector<int> tuple(4);
  for (std::uint64_t s = 0; s < joint_model.state_count(); ++s) {
    joint_model.state_space().decode(s, tuple);
    const std::uint64_t sa =
        a_model.state_space().encode(std::vector<int>{tuple[0], tuple[1], 0, 0});
    const std::uint64_t sb =
        b_model.state_space().encode(std::vector<int>{0, 0, tuple[2], tuple[3]});
    CHECK(v_joint[s] == doctest::Approx(v_a[sa] + v_b[sb]).epsilon(1e-6));
  }
}

TEST_CASE("waste-adjusted base stock") {
  const ScenarioB model(base_params());
  std::vector<int> action(2);
  // Empty stock: order the full level for each product.
  model.modified_base_stock_action(13, 12, std::vector<int>{0, 0, 0, 0}, action);
  CHECK(action == std::vector<int>{13, 12});
  // Expiring stock above the mean inflates the order.
  model.modified_base_stock_action(13, 12, std::vector<int>{2, 8, 0, 0}, action);
  CHECK(action[0] == 13 - 10 + 3);
  // Below the mean it reduces to the plain rule.
  model.modified_base_stock_action(13, 12, std::vector<int>{5, 3, 0, 0}, action);
  CHECK(action[0] == 5);
}

TEST_CASE("random positive-probability transitions stay inside the state space") {
  ScenarioBParams p = base_params();
  p.max_order_a = 6;
  p.max_order_b = 5;
  const ScenarioB model(p);
  std::mt19937_64 rng(2);
  std::vector<int> tuple(4);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t s = rng() % model.state_count();
    model.state_space().decode(s, tuple);
    const int stock_a = tuple[0] + tuple[1];
    const int stock_b = tuple[2] + tuple[3];
    const std::uint32_t a = static_cast<std::uint32_t>(rng() % model.action_count());
    const int h_a = static_cast<int>(rng() % (stock_a + 1));
    const int h_b = static_cast<int>(rng() % (stock_b + 1));
    const std::uint64_t w = std::uint64_t(h_a) * (model.issued_cap_b() + 1) + h_b;
    const auto t = model.transition(s, a, w);
    CHECK(t.next_state < model.state_count());
    CHECK(std::isfinite(t.reward));
  }
}
