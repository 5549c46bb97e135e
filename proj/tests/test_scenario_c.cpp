#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "pvi/presets.hpp"
#include "pvi/scenario_c.hpp"

using namespace pvi;

namespace {

ScenarioCParams m3_params(bool endogenous) {
  ScenarioCParams p;
  p.useful_life = 3;
  const auto [c0, c1] = shelf_life_coefficients(3, endogenous);
  p.life_intercepts = c0;
  p.life_slopes = c1;
  return p;
}

}  // namespace

TEST_CASE("receipt category probabilities from the affine log-odds model") {
  // All-zero coefficients: uniform over the m categories.
  const auto uniform =
      receipt_category_probs(4, std::vector<double>{0.0, 0.0}, std::vector<double>{0.0, 0.0});
  for (double p : uniform) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-14));

  // Intercepts (1.0, 0.5): p_1 = 1 / (1 + e + e^0.5), frozen from a
  // 50-digit evaluation.
  const auto probs =
      receipt_category_probs(0, std::vector<double>{1.0, 0.5}, std::vector<double>{0.0, 0.0});
  CHECK(probs[0] == doctest::Approx(0.18632372322584757702).epsilon(1e-13));
  CHECK(probs[1] == doctest::Approx(0.5064803910556540259).epsilon(1e-13));
  CHECK(probs[2] == doctest::Approx(0.30719588571849839707).epsilon(1e-13));

  // Zero slopes: independent of the order quantity.
  const ScenarioC model(m3_params(false));
  CHECK(model.receipt_probs(0) == model.receipt_probs(20));

  // Non-zero slopes: order quantity shifts the distribution.
  const ScenarioC endo(m3_params(true));
  CHECK(endo.receipt_probs(0) != endo.receipt_probs(20));

  for (int a = 0; a <= 20; ++a) {
    const auto p = endo.receipt_probs(a);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : p) CHECK(v > 0.0);
  }
}

TEST_CASE("weekday demand distributions") {
  const ScenarioC model(m3_params(false));
  for (int tau = 0; tau < 7; ++tau) {
    const auto pmf = model.weekday_demand_pmf(tau);
    REQUIRE(pmf.support_max() == 20);
    double sum = 0.0;
    for (double p : pmf.probs) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Monday uses (3.5, 5.7); Sunday uses (2.2, 3.4).
  CHECK(model.weekday_demand_pmf(0).probs[0] ==
        doctest::Approx(0.033961022655604473532).epsilon(1e-12));
  CHECK(model.weekday_demand_pmf(6).probs[0] ==
        doctest::Approx(0.12803132451497213352).epsilon(1e-12));
}

TEST_CASE("outcome enumeration counts follow the composition identity") {
  const ScenarioC m3(m3_params(false));
  CHECK(m3.composition_count() == 1'771);  // C(23, 3)
  CHECK(m3.outcome_count() == 37'191);
  CHECK(m3.state_count() == 3'087);
  CHECK(m3.action_count() == 21);

  // Positive-mass age profiles per order quantity sum to one.
  for (int a = 0; a <= 20; ++a) {
    const auto probs = m3.composition_probs(a);
    double sum = 0.0;
    for (double p : probs) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    const auto ids = m3.composition_ids(a);
    std::vector<int> tuple(3);
    for (std::uint32_t id : ids) {
      m3.composition_tuple(id, tuple);
      CHECK(tuple[0] + tuple[1] + tuple[2] == a);
    }
  }
}

TEST_CASE("transition: worked delivery-and-demand example") {
  const ScenarioC model(m3_params(false));
  // Monday, empty stock, order two units that both arrive fresh, demand one.
  const std::uint64_t state = model.state_space().encode(std::vector<int>{0, 0, 0});
  std::uint32_t fresh_pair = 0;
  bool found = false;
  std::vector<int> tuple(3);
  for (std::uint32_t id : model.composition_ids(2)) {
    model.composition_tuple(id, tuple);
    if (tuple == std::vector<int>{2, 0, 0}) {
      fresh_pair = id;
      found = true;
    }
  }
  REQUIRE(found);
  const std::uint64_t outcome = 1 * model.composition_count() + fresh_pair;
  const auto t = model.transition(state, 2, outcome);
  // Fixed order cost plus one held unit.
  CHECK(t.reward == doctest::Approx(-11.0));
  std::vector<int> next(3);
  model.state_space().decode(t.next_state, next);
  CHECK(next == std::vector<int>{1, 1, 0});  // Tuesday, one unit aged to two days

  // A mismatched order / age-profile pair violates the contract.
  CHECK_THROWS_AS((void)model.transition(state, 3, outcome), ContractViolation);
}

TEST_CASE("deliveries beyond the per-age capacity are rejected without cost") {
  const ScenarioC model(m3_params(false));
  // Expiring bucket already full; three more expiring units arrive.
  const std::uint64_t state = model.state_space().encode(std::vector<int>{0, 0, 20});
  std::uint32_t profile = 0;
  std::vector<int> tuple(3);
  for (std::uint32_t id : model.composition_ids(3)) {
    model.composition_tuple(id, tuple);
    if (tuple == std::vector<int>{0, 0, 3}) profile = id;
  }
  const auto t = model.transition(state, 3, 0 * model.composition_count() + profile);
  std::vector<int> next(3);
  model.state_space().decode(t.next_state, next);
  CHECK(next == std::vector<int>{1, 0, 0});
  // Fixed cost, 20 held (the capped bucket), 20 wasted; the rejected units
  // never enter stock and are not charged.
  CHECK(t.reward == doctest::Approx(-10.0 - 20.0 - 5.0 * 20.0));
}

TEST_CASE("outcome probabilities factor into demand and receipt terms") {
  const ScenarioC model(m3_params(true));
  const std::uint64_t state = model.state_space().encode(std::vector<int>{4, 2, 1});  // Friday
  const auto pmf = model.weekday_demand_pmf(4);
  for (const int a : {0, 3, 20}) {
    double sum = 0.0;
    const auto ids = model.composition_ids(a);
    const auto probs = model.composition_probs(a);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (int d = 0; d <= 20; ++d) {
        const std::uint64_t outcome = std::uint64_t(d) * model.composition_count() + ids[i];
        const double p = model.outcome_probability(state, a, outcome);
        CHECK(p == doctest::Approx(pmf.probs[d] * probs[i]).epsilon(1e-12));
        sum += p;
      }
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("sampled receipts match the category distribution") {
  const ScenarioC model(m3_params(true));
  const auto probs = model.receipt_probs(20);

  constexpr int kDraws = 1'000'000;
  std::array<std::int64_t, 3> totals{};
  int counts[3];
  for (int i = 0; i < kDraws; ++i) {
    RolloutRng rng(31337, static_cast<std::uint64_t>(i));
    rng.begin_day(0);
    sample_multinomial(20, probs, std::span<int>(counts, 3), rng);
    totals[0] += counts[0];
    totals[1] += counts[1];
    totals[2] += counts[2];
  }
  for (int k = 0; k < 3; ++k) {
    const double mean_fraction = double(totals[k]) / (20.0 * kDraws);
    const double se = std::sqrt(probs[k] * (1.0 - probs[k]) / (20.0 * kDraws));
    CHECK(std::abs(mean_fraction - probs[k]) <= 4.0 * se);
  }
}

TEST_CASE("per-step conservation: accepted receipts, fills, expiries and stock balance") {
  const ScenarioC model(m3_params(true));
  std::mt19937_64 seeds(4);
  std::vector<int> state(3);
  std::vector<int> action(1);
  for (int trial = 0; trial < 2000; ++trial) {
    model.state_space().decode(seeds() % model.state_count(), state);
    action[0] = static_cast<int>(seeds() % 21);
    int opening = state[1] + state[2];

    RolloutRng rng(seeds(), 1);
    rng.begin_day(0);
    StepStats stats;
    model.sample_step(state, action, rng, stats);
    const int closing = state[1] + state[2];
    CHECK(opening + stats.received[0] - stats.filled[0] - stats.expired[0] == closing);
    CHECK(stats.received[0] <= action[0]);
    CHECK(stats.filled[0] <= stats.demand[0]);
  }
}

TEST_CASE("weekday order-up-to rule with reorder points") {
  const ScenarioC model(m3_params(false));
  std::vector<int> reorder(7, 6), up_to(7, 13);

  CHECK(model.weekday_ss_action(reorder, up_to, std::vector<int>{0, 0, 0}) == 13);
  CHECK(model.weekday_ss_action(reorder, up_to, std::vector<int>{0, 2, 4}) == 7);
  CHECK(model.weekday_ss_action(reorder, up_to, std::vector<int>{0, 3, 4}) == 0);  // above s

  // Degenerate pair (s >= S) suppresses ordering entirely on that weekday.
  reorder[2] = 13;
  CHECK(model.weekday_ss_action(reorder, up_to, std::vector<int>{2, 0, 0}) == 0);
  reorder[2] = 14;
  CHECK(model.weekday_ss_action(reorder, up_to, std::vector<int>{2, 0, 0}) == 0);
}

TEST_CASE("an order of zero always delivers nothing") {
  const ScenarioC model(m3_params(true));
  std::vector<int> state{3, 5, 2};
  const std::vector<int> none{0};
  RolloutRng rng(1, 2);
  rng.begin_day(0);
  StepStats stats;
  model.sample_step(state, none, rng, stats);
  CHECK(stats.received[0] == 0);
  CHECK(stats.reward <= 0.0);
}

TEST_CASE("random positive-probability transitions stay inside the state space") {
  const ScenarioC model(m3_params(true));
  std::mt19937_64 rng(6);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t s = rng() % model.state_count();
    const std::uint32_t a = static_cast<std::uint32_t>(rng() % model.action_count());
    const auto ids = model.composition_ids(a);
    const std::uint32_t ci = ids[rng() % ids.size()];
    const std::uint64_t d = rng() % 21;
    const auto t = model.transition(s, a, d * model.composition_count() + ci);
    CHECK(t.next_state < model.state_count());
    CHECK(std::isfinite(t.reward));
    CHECK(model.outcome_probability(s, a, d * model.composition_count() + ci) > 0.0);
  }
}
