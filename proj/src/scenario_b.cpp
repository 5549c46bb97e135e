#include "pvi/scenario_b.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pvi {

namespace {

constexpr int kMaxLife = 8;
constexpr double kTailTolerance = 1e-12;

inline int pos(int x) { return x > 0 ? x : 0; }

// FIFO consumption of `issued` units from a profile indexed by remaining
// life; the leftover of the oldest bucket drops off as (uncosted) waste.
inline int age_stock_fifo(const int* x, int m, int issued, int* next) {
  const int expired = pos(x[1] - issued);
  int prefix = 0;
  for (int j = 1; j <= m - 1; ++j) {
    prefix += x[j];
    next[j] = pos(x[j + 1] - pos(issued - prefix));
  }
  return expired;
}

}  // namespace

int newsvendor_max_order(int useful_life, double demand_mean, double revenue, double unit_cost) {
  if (!(revenue > 0.0)) throw ParameterError("newsvendor: revenue must be > 0");
  const double ratio = std::max(0.0, (revenue - unit_cost) / revenue);
  return dist::poisson_quantile(useful_life * demand_mean, ratio);
}

ScenarioB::ScenarioB(const ScenarioBParams& params) : params_(params) {
  if (params_.useful_life < 1 || params_.useful_life > kMaxLife)
    throw ParameterError("scenario b: useful_life out of range");
  if (params_.substitution_prob < 0.0 || params_.substitution_prob > 1.0)
    throw ParameterError("scenario b: substitution_prob must be in [0, 1]");

  const int m = params_.useful_life;
  max_order_a_ = params_.max_order_a >= 0
                     ? params_.max_order_a
                     : newsvendor_max_order(m, params_.demand_mean_a, params_.revenue_a,
                                            params_.unit_cost_a);
  max_order_b_ = params_.max_order_b >= 0
                     ? params_.max_order_b
                     : newsvendor_max_order(m, params_.demand_mean_b, params_.revenue_b,
                                            params_.unit_cost_b);
  issued_cap_a_ = m * max_order_a_;
  issued_cap_b_ = m * max_order_b_;

  std::vector<int> radices(2 * m);
  for (int i = 0; i < m; ++i) radices[i] = max_order_a_ + 1;
  for (int i = m; i < 2 * m; ++i) radices[i] = max_order_b_ + 1;
  space_ = TupleSpace(std::move(radices));

  build_tables();
}

void ScenarioB::build_tables() {
  const int m = params_.useful_life;
  const double mu_a = params_.demand_mean_a;
  const double mu_b = params_.demand_mean_b;
  const double rho = params_.substitution_prob;

  tables_.d_max = m * std::max(max_order_a_, max_order_b_) + 2;
  tables_.y_max = issued_cap_b_;

  // Poisson tables long enough that the remaining tail is far below the
  // truncation tolerance everywhere they are read.
  const auto table_len = [](double mean, int needed) {
    return std::max<int>(needed, static_cast<int>(mean + 20.0 * std::sqrt(mean) + 60.0)) + 1;
  };
  const int len_a = table_len(mu_a, tables_.d_max);
  const int len_b = table_len(mu_b, tables_.y_max + tables_.d_max);
  pmf_a_ = dist::poisson_pmf_cdf(mu_a, len_a - 1).pmf.probs;
  pmf_b_ = dist::poisson_pmf_cdf(mu_b, len_b - 1).pmf.probs;

  // Survival functions by backward accumulation, accurate in the far tail.
  const auto survival = [](const std::vector<double>& pmf) {
    std::vector<double> sf(pmf.size() + 1, 0.0);
    for (std::size_t i = pmf.size(); i-- > 0;) sf[i] = sf[i + 1] + pmf[i];
    return sf;
  };
  sf_a_ = survival(pmf_a_);
  sf_b_ = survival(pmf_b_);

  const auto cdf = [](const std::vector<double>& pmf) {
    std::vector<double> out(pmf.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) out[i] = (acc += pmf[i]);
    return out;
  };
  cdf_a_ = cdf(pmf_a_);
  cdf_b_ = cdf(pmf_b_);

  const int dn = tables_.d_max + 1;
  const int yn = tables_.y_max + 1;
  tables_.pu.assign(static_cast<std::size_t>(yn) * dn, 0.0);
  tables_.pz.assign(static_cast<std::size_t>(yn) * dn, 0.0);
  tables_.pz_cum.assign(static_cast<std::size_t>(yn) * dn, 0.0);

  std::vector<double> log_fact(len_b + 1, 0.0);
  for (int i = 1; i <= len_b; ++i) log_fact[i] = log_fact[i - 1] + std::log(double(i));
  const double log_rho = rho > 0.0 ? std::log(rho) : 0.0;
  const double log_1mrho = rho < 1.0 ? std::log1p(-rho) : 0.0;

  for (int y = 0; y < yn; ++y) {
    double* pu_row = &tables_.pu[static_cast<std::size_t>(y) * dn];
    const double sf_y = sf_b_[y];
    if (sf_y < kTailTolerance) {
      // Conditioning event has essentially no mass: no substitution demand.
      pu_row[0] = 1.0;
    } else if (rho == 1.0) {
      // Every stocked-out customer accepts, so the substitution demand is
      // exactly the excess demand for product B.
      for (int du = 0; du < dn; ++du)
        if (du + y < len_b) pu_row[du] = pmf_b_[du + y] / sf_y;
    } else {
      const int c_hi = len_b - 1 - y;  // beyond this the Poisson tail is negligible
      // No-acceptance branch: every stocked-out customer declines.
      double acc = 0.0;
      double w = 1.0;  // (1 - rho)^c
      for (int c = 0; c <= c_hi; ++c) {
        acc += pmf_b_[c + y] * w;
        w *= 1.0 - rho;
      }
      pu_row[0] = acc / sf_y;
      if (rho > 0.0) {
        for (int du = 1; du < dn; ++du) {
          double sum = 0.0;
          for (int c = du; c <= c_hi; ++c) {
            const double log_binom = log_fact[c] - log_fact[du] - log_fact[c - du] +
                                     du * log_rho + (c - du) * log_1mrho;
            sum += pmf_b_[c + y] * std::exp(log_binom);
          }
          pu_row[du] = sum / sf_y;
        }
      }
    }

    double* pz_row = &tables_.pz[static_cast<std::size_t>(y) * dn];
    double* pz_cum_row = &tables_.pz_cum[static_cast<std::size_t>(y) * dn];
    double cum = 0.0;
    for (int dz = 0; dz < dn; ++dz) {
      double sum = 0.0;
      for (int k = 0; k <= dz; ++k) sum += pmf_a_[k] * pu_row[dz - k];
      pz_row[dz] = sum;
      pz_cum_row[dz] = cum;  // exclusive prefix: P(D_z < dz)
      cum += sum;
    }
  }
}

std::string ScenarioB::fingerprint_material() const {
  std::ostringstream os;
  os << "scenario=b;m=" << params_.useful_life << ";mu_a=" << params_.demand_mean_a
     << ";mu_b=" << params_.demand_mean_b << ";A_a_max=" << max_order_a_
     << ";A_b_max=" << max_order_b_ << ";C_v_a=" << params_.unit_cost_a
     << ";C_v_b=" << params_.unit_cost_b << ";C_r_a=" << params_.revenue_a
     << ";C_r_b=" << params_.revenue_b << ";rho=" << params_.substitution_prob
     << ";gamma=" << params_.discount_factor;
  return os.str();
}

double ScenarioB::issued_probability(int h_a, int h_b, int stock_a, int stock_b) const {
  if (h_a > stock_a || h_b > stock_b) return 0.0;
  const bool a_interior = h_a < stock_a;
  const bool b_interior = h_b < stock_b;
  if (a_interior && b_interior) return pmf_a_[h_a] * pmf_b_[h_b];
  if (!a_interior && b_interior) return sf_a_[stock_a] * pmf_b_[h_b];
  if (a_interior) return tables_.pz_at(stock_b, h_a) * sf_b_[stock_b];
  return (1.0 - tables_.pz_cum_at(stock_b, stock_a)) * sf_b_[stock_b];
}

double ScenarioB::initial_value(std::uint64_t state) const {
  const int m = params_.useful_life;
  int st[2 * kMaxLife];
  space_.decode(state, std::span<int>(st, space_.arity()));
  int stock_a = 0, stock_b = 0;
  for (int i = 0; i < m; ++i) stock_a += st[i];
  for (int i = m; i < 2 * m; ++i) stock_b += st[i];

  double expected = 0.0;
  for (int h_a = 0; h_a <= stock_a; ++h_a)
    for (int h_b = 0; h_b <= stock_b; ++h_b)
      expected += issued_probability(h_a, h_b, stock_a, stock_b) *
                  (params_.revenue_a * h_a + params_.revenue_b * h_b);
  return expected;
}

std::vector<double> ScenarioB::issued_joint_pmf(std::uint64_t state) const {
  const int m = params_.useful_life;
  int st[2 * kMaxLife];
  space_.decode(state, std::span<int>(st, space_.arity()));
  int stock_a = 0, stock_b = 0;
  for (int i = 0; i < m; ++i) stock_a += st[i];
  for (int i = m; i < 2 * m; ++i) stock_b += st[i];

  std::vector<double> pmf(outcome_count(), 0.0);
  for (int h_a = 0; h_a <= std::min(stock_a, issued_cap_a_); ++h_a)
    for (int h_b = 0; h_b <= std::min(stock_b, issued_cap_b_); ++h_b)
      pmf[static_cast<std::size_t>(h_a) * (issued_cap_b_ + 1) + h_b] =
          issued_probability(h_a, h_b, stock_a, stock_b);
  return pmf;
}

double ScenarioB::outcome_probability(std::uint64_t state, std::uint32_t,
                                      std::uint64_t outcome) const {
  const int m = params_.useful_life;
  int st[2 * kMaxLife];
  space_.decode(state, std::span<int>(st, space_.arity()));
  int stock_a = 0, stock_b = 0;
  for (int i = 0; i < m; ++i) stock_a += st[i];
  for (int i = m; i < 2 * m; ++i) stock_b += st[i];
  const int h_a = static_cast<int>(outcome / (issued_cap_b_ + 1));
  const int h_b = static_cast<int>(outcome % (issued_cap_b_ + 1));
  return issued_probability(h_a, h_b, stock_a, stock_b);
}

Transition ScenarioB::transition(std::uint64_t state, std::uint32_t action,
                                 std::uint64_t outcome) const {
  const int m = params_.useful_life;
  int st[2 * kMaxLife];
  space_.decode(state, std::span<int>(st, space_.arity()));

  int xa[kMaxLife + 1], xb[kMaxLife + 1];
  int stock_a = 0, stock_b = 0;
  for (int j = 1; j <= m; ++j) {
    xa[j] = st[m - j];
    xb[j] = st[2 * m - j];
    stock_a += xa[j];
    stock_b += xb[j];
  }

  const int h_a = static_cast<int>(outcome / (issued_cap_b_ + 1));
  const int h_b = static_cast<int>(outcome % (issued_cap_b_ + 1));
  if (h_a > stock_a || h_b > stock_b)
    throw ContractViolation("issued quantity exceeds stock on hand");

  const auto [order_a, order_b] = action_pair(action);

  int aged_a[kMaxLife], aged_b[kMaxLife];
  age_stock_fifo(xa, m, h_a, aged_a);
  age_stock_fifo(xb, m, h_b, aged_b);

  int nx[2 * kMaxLife];
  nx[0] = order_a;
  nx[m] = order_b;
  for (int j = 1; j <= m - 1; ++j) {
    nx[m - j] = aged_a[j];
    nx[2 * m - j] = aged_b[j];
  }

  const double reward = -(params_.unit_cost_a * order_a + params_.unit_cost_b * order_b) +
                        params_.revenue_a * h_a + params_.revenue_b * h_b;
  return {space_.encode(std::span<const int>(nx, space_.arity())), reward};
}

template <typename T>
void ScenarioB::q_row_impl(std::uint64_t state, double gamma, std::span<const T> values,
                           std::span<T> q) const {
  const int m = params_.useful_life;
  int st[2 * kMaxLife];
  space_.decode(state, std::span<int>(st, space_.arity()));

  int xa[kMaxLife + 1], xb[kMaxLife + 1];
  int stock_a = 0, stock_b = 0;
  for (int j = 1; j <= m; ++j) {
    xa[j] = st[m - j];
    xb[j] = st[2 * m - j];
    stock_a += xa[j];
    stock_b += xb[j];
  }

  const int n_a = max_order_a_ + 1;
  const int n_b = max_order_b_ + 1;
  const std::uint64_t weight_a = space_.weight(0);
  const std::uint64_t weight_b = space_.weight(m);

  for (auto& qa : q) qa = T(0);

  // Aged product-B digits depend only on h_b; hoist them out of the h_a loop.
  const int hb_hi = std::min(stock_b, issued_cap_b_);
  static thread_local std::vector<std::uint64_t> base_b;
  base_b.resize(hb_hi + 1);
  int aged[kMaxLife];
  for (int h_b = 0; h_b <= hb_hi; ++h_b) {
    age_stock_fifo(xb, m, h_b, aged);
    std::uint64_t base = 0;
    for (int j = 1; j <= m - 1; ++j) base += aged[j] * space_.weight(2 * m - j);
    base_b[h_b] = base;
  }

  const int ha_hi = std::min(stock_a, issued_cap_a_);
  for (int h_a = 0; h_a <= ha_hi; ++h_a) {
    age_stock_fifo(xa, m, h_a, aged);
    std::uint64_t base_a = 0;
    for (int j = 1; j <= m - 1; ++j) base_a += aged[j] * space_.weight(m - j);
    const double revenue_a = params_.revenue_a * h_a;

    for (int h_b = 0; h_b <= hb_hi; ++h_b) {
      const double p = issued_probability(h_a, h_b, stock_a, stock_b);
      if (p == 0.0) continue;
      const double revenue = revenue_a + params_.revenue_b * h_b;
      const std::uint64_t base = base_a + base_b[h_b];

      T* qa = q.data();
      for (int order_a = 0; order_a < n_a; ++order_a) {
        const double head = revenue - params_.unit_cost_a * order_a;
        const T* va = values.data() + base + order_a * weight_a;
        for (int order_b = 0; order_b < n_b; ++order_b) {
          *qa++ += static_cast<T>(
              p * (head - params_.unit_cost_b * order_b + gamma * va[order_b * weight_b]));
        }
      }
    }
  }
}

void ScenarioB::q_row(std::uint64_t state, double gamma, std::span<const double> values,
                      std::span<double> q) const {
  q_row_impl<double>(state, gamma, values, q);
}
void ScenarioB::q_row(std::uint64_t state, double gamma, std::span<const float> values,
                      std::span<float> q) const {
  q_row_impl<float>(state, gamma, values, q);
}

void ScenarioB::sample_step(std::span<int> state, std::span<const int> action, RolloutRng& rng,
                            StepStats& stats) const {
  const int m = params_.useful_life;

  int xa[kMaxLife + 1], xb[kMaxLife + 1];
  int stock_a = 0, stock_b = 0;
  for (int j = 1; j <= m; ++j) {
    xa[j] = state[m - j];
    xb[j] = state[2 * m - j];
    stock_a += xa[j];
    stock_b += xb[j];
  }

  const int demand_a = sample_from_cdf(cdf_a_, rng.uniform());
  const int demand_b = sample_from_cdf(cdf_b_, rng.uniform());
  const int own_fill_a = std::min(demand_a, stock_a);
  const int fill_b = std::min(demand_b, stock_b);
  // Customers with unmet product-B demand accept product A independently.
  const int accepted = sample_binomial(demand_b - fill_b, params_.substitution_prob,
                                       rng.uniform());
  const int substitution_fill = std::min(accepted, stock_a - own_fill_a);
  const int h_a = own_fill_a + substitution_fill;
  const int h_b = fill_b;

  int aged_a[kMaxLife], aged_b[kMaxLife];
  const int expired_a = age_stock_fifo(xa, m, h_a, aged_a);
  const int expired_b = age_stock_fifo(xb, m, h_b, aged_b);

  stats.reward = -(params_.unit_cost_a * action[0] + params_.unit_cost_b * action[1]) +
                 params_.revenue_a * h_a + params_.revenue_b * h_b;
  stats.demand = {demand_a, demand_b};
  stats.filled = {own_fill_a, fill_b + substitution_fill};
  stats.expired = {expired_a, expired_b};
  stats.received = {action[0], action[1]};
  int hold_a = 0, hold_b = 0;
  for (int j = 1; j <= m - 1; ++j) {
    hold_a += aged_a[j];
    hold_b += aged_b[j];
  }
  stats.holding = {hold_a, hold_b};

  state[0] = action[0];
  state[m] = action[1];
  for (int j = 1; j <= m - 1; ++j) {
    state[m - j] = aged_a[j];
    state[2 * m - j] = aged_b[j];
  }
}

void ScenarioB::modified_base_stock_action(int level_a, int level_b, std::span<const int> state,
                                           std::span<int> action) const {
  const int m = params_.useful_life;
  int stock_a = 0, stock_b = 0;
  for (int i = 0; i < m; ++i) stock_a += state[i];
  for (int i = m; i < 2 * m; ++i) stock_b += state[i];
  const int expiring_a = state[m - 1];
  const int expiring_b = state[2 * m - 1];
  const double waste_a = std::max(0.0, expiring_a - params_.demand_mean_a);
  const double waste_b = std::max(0.0, expiring_b - params_.demand_mean_b);
  action[0] = static_cast<int>(std::lround(std::max(0.0, level_a - stock_a + waste_a)));
  action[1] = static_cast<int>(std::lround(std::max(0.0, level_b - stock_b + waste_b)));
}

}  // namespace pvi
