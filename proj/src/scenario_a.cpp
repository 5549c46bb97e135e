#include "pvi/scenario_a.hpp"

#include <algorithm>
#include <sstream>

namespace pvi {

namespace {

constexpr int kMaxLife = 12;

inline int pos(int x) { return x > 0 ? x : 0; }

// Ages a stock profile indexed by remaining life (x[j] = units with j days
// left, j = 1..m) after filling `demand` under the given issuing policy.
// Writes the carried-over profile into next[1..m-1] and returns the number
// of units expiring at the end of the day.
inline int age_stock(const int* x, int m, int demand, Issuing issuing, int* next) {
  int expired;
  if (issuing == Issuing::fifo) {
    // Oldest units are consumed first.
    expired = pos(x[1] - demand);
    int prefix = 0;
    for (int j = 1; j <= m - 1; ++j) {
      prefix += x[j];
      next[j] = pos(x[j + 1] - pos(demand - prefix));
    }
  } else {
    // Freshest units are consumed first; whatever is left of the oldest
    // bucket after any spill-over expires.
    int suffix = 0;  // sum of x[j+2..m]
    for (int j = 2; j <= m; ++j) suffix += x[j];
    expired = pos(x[1] - pos(demand - suffix));
    for (int j = 1; j <= m - 1; ++j) {
      suffix -= x[j + 1];
      next[j] = pos(x[j + 1] - pos(demand - suffix));
    }
  }
  return expired;
}

}  // namespace

std::string to_string(Issuing issuing) { return issuing == Issuing::fifo ? "fifo" : "lifo"; }

ScenarioA::ScenarioA(const ScenarioAParams& params) : params_(params) {
  if (params_.useful_life < 1 || params_.useful_life > kMaxLife)
    throw ParameterError("scenario a: useful_life out of range");
  if (params_.lead_time < 1) throw ParameterError("scenario a: lead_time must be >= 1");
  if (params_.max_order < 0) throw ParameterError("scenario a: max_order must be >= 0");

  const int components = params_.useful_life + params_.lead_time - 1;
  space_ = TupleSpace(std::vector<int>(components, params_.max_order + 1));
  demand_pmf_ =
      dist::truncated_gamma_demand_pmf(params_.demand_mean, params_.demand_cv, params_.max_demand);
  demand_cdf_ = demand_pmf_.cumulative();
}

std::string ScenarioA::fingerprint_material() const {
  std::ostringstream os;
  os << "scenario=a;m=" << params_.useful_life << ";L=" << params_.lead_time
     << ";issuing=" << to_string(params_.issuing) << ";A_max=" << params_.max_order
     << ";D_max=" << params_.max_demand << ";C_v=" << params_.unit_cost
     << ";C_h=" << params_.holding_cost << ";C_s=" << params_.shortage_cost
     << ";C_w=" << params_.wastage_cost << ";mu=" << params_.demand_mean
     << ";cv=" << params_.demand_cv << ";gamma=" << params_.discount_factor;
  return os.str();
}

Transition ScenarioA::transition(std::uint64_t state, std::uint32_t action,
                                 std::uint64_t outcome) const {
  const int m = params_.useful_life;
  const int lead = params_.lead_time;
  const int demand = static_cast<int>(outcome);

  int st[2 * kMaxLife];
  space_.decode(state, std::span<int>(st, space_.arity()));

  // st[0..L-2] hold orders in transit (most recent first); st[L-1..L-1+m-1]
  // hold stock by descending remaining life.
  int x[kMaxLife + 1];
  int x_total = 0;
  for (int j = 1; j <= m; ++j) {
    x[j] = st[lead - 1 + m - j];
    x_total += x[j];
  }

  int aged[kMaxLife];
  const int expired = age_stock(x, m, demand, params_.issuing, aged);

  int nx[2 * kMaxLife];
  nx[0] = static_cast<int>(action);
  for (int k = 1; k <= lead - 2; ++k) nx[k] = st[k - 1];
  if (lead >= 2) nx[lead - 1] = st[lead - 2];  // the oldest in-transit slot lands in stock
  for (int j = 1; j <= m - 1; ++j) nx[lead + m - 1 - j] = aged[j];

  const double reward = -params_.unit_cost * action -
                        params_.holding_cost * pos(x_total - demand - expired) -
                        params_.shortage_cost * pos(demand - x_total) -
                        params_.wastage_cost * expired;
  return {space_.encode(std::span<const int>(nx, space_.arity())), reward};
}

template <typename T>
void ScenarioA::q_row_impl(std::uint64_t state, double gamma, std::span<const T> values,
                           std::span<T> q) const {
  const int m = params_.useful_life;
  const int lead = params_.lead_time;
  const int n_actions = params_.max_order + 1;

  int st[2 * kMaxLife];
  space_.decode(state, std::span<int>(st, space_.arity()));
  int x[kMaxLife + 1];
  int x_total = 0;
  for (int j = 1; j <= m; ++j) {
    x[j] = st[lead - 1 + m - j];
    x_total += x[j];
  }

  // Next-state digits that do not depend on the demand: the in-transit shift
  // and the slot arriving into stock. The ordered quantity occupies the most
  // significant digit.
  std::uint64_t base_static = 0;
  for (int k = 1; k <= lead - 2; ++k) base_static += st[k - 1] * space_.weight(k);
  if (lead >= 2) base_static += st[lead - 2] * space_.weight(lead - 1);
  const std::uint64_t action_weight = space_.weight(0);

  for (auto& qa : q) qa = T(0);

  int aged[kMaxLife];
  for (int d = 0; d <= params_.max_demand; ++d) {
    const double p = demand_pmf_.probs[d];
    const int expired = age_stock(x, m, d, params_.issuing, aged);
    std::uint64_t base = base_static;
    for (int j = 1; j <= m - 1; ++j) base += aged[j] * space_.weight(lead + m - 1 - j);

    const double reward_sd = -params_.holding_cost * pos(x_total - d - expired) -
                             params_.shortage_cost * pos(d - x_total) -
                             params_.wastage_cost * expired;
    for (int a = 0; a < n_actions; ++a) {
      const T term = static_cast<T>(
          p * (reward_sd - params_.unit_cost * a + gamma * values[base + a * action_weight]));
      q[a] += term;
    }
  }
}

void ScenarioA::q_row(std::uint64_t state, double gamma, std::span<const double> values,
                      std::span<double> q) const {
  q_row_impl<double>(state, gamma, values, q);
}
void ScenarioA::q_row(std::uint64_t state, double gamma, std::span<const float> values,
                      std::span<float> q) const {
  q_row_impl<float>(state, gamma, values, q);
}

void ScenarioA::sample_step(std::span<int> state, std::span<const int> action, RolloutRng& rng,
                            StepStats& stats) const {
  const int m = params_.useful_life;
  const int lead = params_.lead_time;
  const int order = action[0];

  int x[kMaxLife + 1];
  int x_total = 0;
  for (int j = 1; j <= m; ++j) {
    x[j] = state[lead - 1 + m - j];
    x_total += x[j];
  }

  const int demand = sample_from_cdf(demand_cdf_, rng.uniform());
  int aged[kMaxLife];
  const int expired = age_stock(x, m, demand, params_.issuing, aged);
  const int arriving = lead >= 2 ? state[lead - 2] : order;

  stats.reward = -params_.unit_cost * order -
                 params_.holding_cost * pos(x_total - demand - expired) -
                 params_.shortage_cost * pos(demand - x_total) -
                 params_.wastage_cost * expired;
  stats.demand[0] = demand;
  stats.filled[0] = std::min(demand, x_total);
  stats.expired[0] = expired;
  stats.received[0] = arriving;
  stats.holding[0] = pos(x_total - demand - expired);

  for (int k = lead - 2; k >= 1; --k) state[k] = state[k - 1];
  state[0] = order;
  if (lead >= 2) state[lead - 1] = arriving;
  for (int j = 1; j <= m - 1; ++j) state[lead + m - 1 - j] = aged[j];
}

int ScenarioA::base_stock_action(int order_up_to, std::span<const int> state) const {
  int position = 0;
  for (int c : state) position += c;
  return pos(order_up_to - position);
}

}  // namespace pvi
