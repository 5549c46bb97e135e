#include "pvi/scenario_c.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pvi {

namespace {

constexpr int kMaxLife = 12;

inline int pos(int x) { return x > 0 ? x : 0; }

std::uint64_t binomial_count(std::uint64_t n, std::uint64_t k) {
  std::uint64_t c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

}  // namespace

std::vector<double> receipt_category_probs(int order, std::span<const double> intercepts,
                                           std::span<const double> slopes) {
  const std::size_t m = intercepts.size() + 1;
  std::vector<double> probs(m);
  double denom = 1.0;
  for (std::size_t k = 2; k <= m; ++k) {
    probs[k - 1] = std::exp(intercepts[k - 2] + slopes[k - 2] * order);
    denom += probs[k - 1];
  }
  probs[0] = 1.0;
  for (auto& p : probs) p /= denom;
  return probs;
}

ScenarioC::ScenarioC(const ScenarioCParams& params) : params_(params) {
  const int m = params_.useful_life;
  if (m < 2 || m > kMaxLife) throw ParameterError("scenario c: useful_life out of range");
  if (params_.life_intercepts.size() != static_cast<std::size_t>(m - 1) ||
      params_.life_slopes.size() != static_cast<std::size_t>(m - 1))
    throw ParameterError("scenario c: expected one life intercept and slope per age 2..m");
  if (params_.max_order < 0) throw ParameterError("scenario c: max_order must be >= 0");

  std::vector<int> radices(m);
  radices[0] = 7;  // weekday
  for (int i = 1; i < m; ++i) radices[i] = params_.max_order + 1;
  space_ = TupleSpace(std::move(radices));

  n_compositions_ = binomial_count(params_.max_order + m, m);

  for (int tau = 0; tau < 7; ++tau) {
    auto pmf = dist::truncated_negbinom_pmf(params_.demand_successes[tau],
                                            params_.demand_means[tau], params_.max_demand);
    demand_cdf_[tau] = pmf.cumulative();
    demand_pmf_[tau] = std::move(pmf.probs);
  }

  receipt_probs_.resize(params_.max_order + 1);
  for (int a = 0; a <= params_.max_order; ++a)
    receipt_probs_[a] = receipt_category_probs(a, params_.life_intercepts, params_.life_slopes);
}

dist::DiscretePmf ScenarioC::weekday_demand_pmf(int weekday) const {
  dist::DiscretePmf pmf;
  pmf.probs = demand_pmf_[weekday];
  return pmf;
}

std::vector<double> ScenarioC::receipt_probs(int order) const { return receipt_probs_[order]; }

void ScenarioC::ensure_outcome_tables() const {
  std::call_once(tables_once_, [self = this] {
    const int m = self->params_.useful_life;
    const int cap = self->params_.max_order;

    self->comp_tuples_.reserve(self->n_compositions_ * m);
    self->comp_sums_.reserve(self->n_compositions_);
    // Lexicographic odometer over all age profiles with total at most cap;
    // tuple order is freshest first, matching the outcome layout.
    std::vector<int> tuple(m, 0);
    int total = 0;
    for (;;) {
      self->comp_sums_.push_back(static_cast<std::int8_t>(total));
      for (int i = 0; i < m; ++i)
        self->comp_tuples_.push_back(static_cast<std::int8_t>(tuple[i]));
      int i = m - 1;
      while (i >= 0) {
        if (total < cap) {
          ++tuple[i];
          ++total;
          break;
        }
        total -= tuple[i];
        tuple[i] = 0;
        --i;
      }
      if (i < 0) break;
    }

    self->comp_ids_.resize(cap + 1);
    self->comp_probs_.resize(cap + 1);
    std::vector<double> log_fact(cap + 1, 0.0);
    for (int i = 1; i <= cap; ++i) log_fact[i] = log_fact[i - 1] + std::log(double(i));

    for (int a = 0; a <= cap; ++a) {
      std::vector<double> log_p(m);
      for (int j = 0; j < m; ++j) log_p[j] = std::log(self->receipt_probs_[a][j]);
      for (std::uint32_t ci = 0; ci < self->comp_sums_.size(); ++ci) {
        if (self->comp_sums_[ci] != a) continue;
        const std::int8_t* yt = &self->comp_tuples_[static_cast<std::size_t>(ci) * m];
        double log_mass = log_fact[a];
        for (int i = 0; i < m; ++i) {
          const int count = yt[i];  // position i holds the (m - i)-day bucket
          if (count == 0) continue;
          log_mass += count * log_p[m - 1 - i] - log_fact[count];
        }
        self->comp_ids_[a].push_back(ci);
        self->comp_probs_[a].push_back(std::exp(log_mass));
      }
    }
  });
}

std::span<const std::uint32_t> ScenarioC::composition_ids(int order) const {
  ensure_outcome_tables();
  return comp_ids_[order];
}

std::span<const double> ScenarioC::composition_probs(int order) const {
  ensure_outcome_tables();
  return comp_probs_[order];
}

void ScenarioC::composition_tuple(std::uint32_t composition_id, std::span<int> out) const {
  ensure_outcome_tables();
  const int m = params_.useful_life;
  const std::int8_t* yt = &comp_tuples_[static_cast<std::size_t>(composition_id) * m];
  for (int i = 0; i < m; ++i) out[i] = yt[i];
}

std::string ScenarioC::fingerprint_material() const {
  std::ostringstream os;
  os << "scenario=c;m=" << params_.useful_life << ";A_max=" << params_.max_order
     << ";D_max=" << params_.max_demand << ";C_f=" << params_.fixed_order_cost
     << ";C_h=" << params_.holding_cost << ";C_s=" << params_.shortage_cost
     << ";C_w=" << params_.wastage_cost << ";gamma=" << params_.discount_factor << ";n=";
  for (double v : params_.demand_successes) os << v << ",";
  os << ";delta=";
  for (double v : params_.demand_means) os << v << ",";
  os << ";c0=";
  for (double v : params_.life_intercepts) os << v << ",";
  os << ";c1=";
  for (double v : params_.life_slopes) os << v << ",";
  return os.str();
}

Transition ScenarioC::transition(std::uint64_t state, std::uint32_t action,
                                 std::uint64_t outcome) const {
  ensure_outcome_tables();
  const int m = params_.useful_life;
  const int cap = params_.max_order;

  const std::uint64_t demand = outcome / n_compositions_;
  const std::uint32_t ci = static_cast<std::uint32_t>(outcome % n_compositions_);
  if (comp_sums_[ci] != static_cast<int>(action))
    throw ContractViolation("delivery age profile does not sum to the order quantity");

  int st[kMaxLife + 1];
  space_.decode(state, std::span<int>(st, space_.arity()));
  const int tau = st[0];
  const std::int8_t* yt = &comp_tuples_[static_cast<std::size_t>(ci) * m];

  // x[j] / y[j]: units with j days of remaining life. Stock has no fresh
  // (m-day) bucket; deliveries may.
  int x[kMaxLife + 1], y[kMaxLife + 1];
  for (int j = 1; j <= m; ++j) y[j] = yt[m - j];
  x[m] = 0;
  for (int j = 1; j <= m - 1; ++j) x[j] = st[m - j];

  const int d = static_cast<int>(demand);
  int z[kMaxLife + 1];
  int total = y[m];
  for (int j = 1; j <= m - 1; ++j) {
    z[j] = std::min(x[j] + y[j], cap);
    total += z[j];
  }

  int nx[kMaxLife + 1];
  nx[0] = (tau + 1) % 7;
  int prefix = 0;
  for (int j = 1; j <= m - 2; ++j) {
    prefix += z[j];
    nx[m - j] = pos(z[j + 1] - pos(d - prefix));
  }
  prefix += z[m - 1];
  nx[1] = pos(y[m] - pos(d - prefix));

  const double reward = -(action > 0 ? params_.fixed_order_cost : 0.0) -
                        params_.holding_cost * pos(total - d) -
                        params_.shortage_cost * pos(d - total) -
                        params_.wastage_cost * pos(z[1] - d);
  return {space_.encode(std::span<const int>(nx, space_.arity())), reward};
}

double ScenarioC::outcome_probability(std::uint64_t state, std::uint32_t action,
                                      std::uint64_t outcome) const {
  ensure_outcome_tables();
  const std::uint64_t demand = outcome / n_compositions_;
  const std::uint32_t ci = static_cast<std::uint32_t>(outcome % n_compositions_);
  if (comp_sums_[ci] != static_cast<int>(action)) return 0.0;

  int tau_only[kMaxLife + 1];
  space_.decode(state, std::span<int>(tau_only, space_.arity()));
  const int tau = tau_only[0];

  const auto& ids = comp_ids_[action];
  const auto it = std::lower_bound(ids.begin(), ids.end(), ci);
  const double comp_prob = comp_probs_[action][it - ids.begin()];
  return demand_pmf_[tau][demand] * comp_prob;
}

template <typename T>
void ScenarioC::q_row_impl(std::uint64_t state, double gamma, std::span<const T> values,
                           std::span<T> q) const {
  ensure_outcome_tables();
  const int m = params_.useful_life;
  const int cap = params_.max_order;
  const int d_max = params_.max_demand;

  int st[kMaxLife + 1];
  space_.decode(state, std::span<int>(st, space_.arity()));
  const int tau = st[0];
  int x[kMaxLife + 1];
  for (int j = 1; j <= m - 1; ++j) x[j] = st[m - j];

  const double* pmf = demand_pmf_[tau].data();
  const std::uint64_t tau_base = static_cast<std::uint64_t>((tau + 1) % 7) * space_.weight(0);

  // Per-composition scratch: prefix sums of the capped post-delivery
  // profile, the buckets needed for the age shift, and the fresh count.
  // Layout per composition: sp[1..m-1], z[2..m-1], y_m, z_1, total.
  const int stride = 2 * m;
  static thread_local std::vector<int> scratch;
  static thread_local std::vector<double> probs;

  for (int a = 0; a <= cap; ++a) {
    const auto& ids = comp_ids_[a];
    const auto& cps = comp_probs_[a];
    const int n_comps = static_cast<int>(ids.size());
    scratch.resize(static_cast<std::size_t>(n_comps) * stride);
    probs.assign(cps.begin(), cps.end());

    for (int c = 0; c < n_comps; ++c) {
      const std::int8_t* yt = &comp_tuples_[static_cast<std::size_t>(ids[c]) * m];
      int* row = &scratch[static_cast<std::size_t>(c) * stride];
      int prefix = 0;
      for (int j = 1; j <= m - 1; ++j) {
        const int zj = std::min(x[j] + yt[m - j], cap);
        prefix += zj;
        row[j - 1] = prefix;                  // sp[j] at 0..m-2
        if (j >= 2) row[m - 1 + j - 2] = zj;  // z[j] at m-1..2m-4
      }
      const int fresh = yt[0];
      row[2 * m - 4 + 1] = fresh;            // y_m
      row[2 * m - 4 + 2] = std::min(x[1] + yt[m - 1], cap);  // z_1
      row[2 * m - 4 + 3] = prefix + fresh;   // total
    }

    const double fixed_cost = a > 0 ? -params_.fixed_order_cost : 0.0;
    double acc = 0.0;
    for (int d = 0; d <= d_max; ++d) {
      const double pd = pmf[d];
      double inner = 0.0;
      for (int c = 0; c < n_comps; ++c) {
        const int* row = &scratch[static_cast<std::size_t>(c) * stride];
        const int fresh = row[2 * m - 3];
        const int z1 = row[2 * m - 2];
        const int total = row[2 * m - 1];

        std::uint64_t idx = tau_base;
        for (int j = 1; j <= m - 2; ++j) {
          const int e = d > row[j - 1] ? d - row[j - 1] : 0;
          int nxj = row[m - 2 + j] - e;  // z[j+1] - excess
          if (nxj < 0) nxj = 0;
          idx += static_cast<std::uint64_t>(nxj) * space_.weight(m - j);
        }
        const int e_last = d > row[m - 2] ? d - row[m - 2] : 0;
        int nx1 = fresh - e_last;
        if (nx1 < 0) nx1 = 0;
        idx += static_cast<std::uint64_t>(nx1) * space_.weight(1);

        const double reward = fixed_cost - params_.holding_cost * pos(total - d) -
                              params_.shortage_cost * pos(d - total) -
                              params_.wastage_cost * pos(z1 - d);
        inner += probs[c] * (reward + gamma * values[idx]);
      }
      acc += pd * inner;
    }
    q[a] = static_cast<T>(acc);
  }
}

void ScenarioC::q_row(std::uint64_t state, double gamma, std::span<const double> values,
                      std::span<double> q) const {
  q_row_impl<double>(state, gamma, values, q);
}
void ScenarioC::q_row(std::uint64_t state, double gamma, std::span<const float> values,
                      std::span<float> q) const {
  q_row_impl<float>(state, gamma, values, q);
}

void ScenarioC::sample_step(std::span<int> state, std::span<const int> action, RolloutRng& rng,
                            StepStats& stats) const {
  const int m = params_.useful_life;
  const int cap = params_.max_order;
  const int tau = state[0];
  const int order = action[0];

  // Delivery age profile, by remaining life; category j of the receipt
  // distribution is j+1 days.
  int counts[kMaxLife];
  sample_multinomial(order, receipt_probs_[order], std::span<int>(counts, m), rng);
  int y[kMaxLife + 1];
  for (int j = 1; j <= m; ++j) y[j] = counts[j - 1];

  const int d = sample_from_cdf(demand_cdf_[tau], rng.uniform());

  int x[kMaxLife + 1];
  for (int j = 1; j <= m - 1; ++j) x[j] = state[m - j];

  int z[kMaxLife + 1];
  int total = y[m];
  int accepted = y[m];
  for (int j = 1; j <= m - 1; ++j) {
    z[j] = std::min(x[j] + y[j], cap);
    total += z[j];
    accepted += z[j] - x[j];
  }

  int prefix = 0;
  for (int j = 1; j <= m - 2; ++j) {
    prefix += z[j];
    state[m - j] = pos(z[j + 1] - pos(d - prefix));
  }
  prefix += z[m - 1];
  state[1] = pos(y[m] - pos(d - prefix));
  state[0] = (tau + 1) % 7;

  const int expired = pos(z[1] - d);
  stats.reward = -(order > 0 ? params_.fixed_order_cost : 0.0) -
                 params_.holding_cost * pos(total - d) - params_.shortage_cost * pos(d - total) -
                 params_.wastage_cost * expired;
  stats.demand[0] = d;
  stats.filled[0] = std::min(d, total);
  stats.expired[0] = expired;
  stats.received[0] = accepted;  // units rejected at the capacity cap never enter stock
  stats.holding[0] = pos(total - d);  // includes the units expiring tonight
}

int ScenarioC::weekday_ss_action(std::span<const int> reorder_points,
                                 std::span<const int> order_up_to,
                                 std::span<const int> state) const {
  const int tau = state[0];
  if (reorder_points[tau] >= order_up_to[tau]) return 0;
  int stock = 0;
  for (std::size_t i = 1; i < state.size(); ++i) stock += state[i];
  if (stock > reorder_points[tau]) return 0;
  return pos(order_up_to[tau] - stock);
}

}  // namespace pvi
