#pragma once

#include <span>
#include <vector>

#include "pvi/errors.hpp"

// Exact discrete probability primitives shared by the scenario models:
// pmf/cdf/quantile routines for the demand and shelf-life distributions.
// Mass functions are evaluated in log space and exponentiated so that
// large supports do not underflow.

namespace pvi::dist {

struct DiscretePmf {
  std::vector<double> probs;  // probs[d] = P(D = d), support 0..support_max()

  int support_max() const { return static_cast<int>(probs.size()) - 1; }

  // Prefix sums; cumulative()[k] = P(D <= k).
  std::vector<double> cumulative() const;
};

struct PmfCdf {
  DiscretePmf pmf;
  std::vector<double> cdf;
};

// Regularized lower incomplete gamma, P(shape, x / scale). Zero for x <= 0.
double gamma_cdf(double x, double shape, double scale);

/// Demand distribution obtained by rounding a gamma variate with the given
/// mean and coefficient of variation to the nearest integer and truncating
/// at d_max: probs[d] = F(d + 1/2) - F(d - 1/2) for d < d_max, with the
/// remaining tail mass collected in probs[d_max]. The shape parameter is
/// 1/cv^2 and the scale is mean * cv^2.
DiscretePmf truncated_gamma_demand_pmf(double mean, double cv, int d_max);

/// Poisson pmf and its prefix-sum cdf on 0..upper. Not renormalised: mass
/// beyond `upper` is simply absent, so callers should pick `upper` large
/// enough for their tolerance. mean == 0 yields a point mass at zero.
PmfCdf poisson_pmf_cdf(double mean, int upper);

/// Smallest k with Poisson CDF(k) >= q. q == 0 returns 0.
int poisson_quantile(double mean, double q);

/// Negative binomial with target successes n (possibly non-integer, via the
/// gamma-function generalisation) and mean delta, truncated at d_max with
/// the tail mass collected in probs[d_max]. Success probability per trial
/// is n / (n + delta).
DiscretePmf truncated_negbinom_pmf(double n, double delta, int d_max);

/// P(X = k) for X ~ Binomial(trials, rho). k > trials gives 0, not an error.
double binomial_pmf(int k, int trials, double rho);

/// Multinomial mass for the given category counts; the number of trials is
/// the sum of counts. A zero-probability category with a positive count
/// gives 0.
double multinomial_pmf(std::span<const int> counts, std::span<const double> probs);

}  // namespace pvi::dist
