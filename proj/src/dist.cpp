#include "pvi/dist.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>

namespace pvi::dist {

std::vector<double> DiscretePmf::cumulative() const {
  std::vector<double> cdf(probs.size());
  std::partial_sum(probs.begin(), probs.end(), cdf.begin());
  return cdf;
}

double gamma_cdf(double x, double shape, double scale) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(shape, x / scale);
}

DiscretePmf truncated_gamma_demand_pmf(double mean, double cv, int d_max) {
  if (!(mean > 0.0)) throw ParameterError("gamma demand: mean must be > 0");
  if (!(cv > 0.0)) throw ParameterError("gamma demand: cv must be > 0");
  if (d_max < 1) throw ParameterError("gamma demand: d_max must be >= 1");

  const double shape = 1.0 / (cv * cv);
  const double scale = mean * cv * cv;

  DiscretePmf out;
  out.probs.resize(static_cast<std::size_t>(d_max) + 1);
  double lo = 0.0;  // F(d - 1/2), clamped to 0 below the origin
  double partial = 0.0;
  for (int d = 0; d < d_max; ++d) {
    const double hi = gamma_cdf(d + 0.5, shape, scale);
    out.probs[d] = hi - lo;
    partial += out.probs[d];
    lo = hi;
  }
  // Tail bucket as the exact complement of the accumulated mass, so the
  // pmf sums to one by construction.
  out.probs[d_max] = std::max(0.0, 1.0 - partial);
  return out;
}

PmfCdf poisson_pmf_cdf(double mean, int upper) {
  if (mean < 0.0) throw ParameterError("poisson: mean must be >= 0");
  if (upper < 0) throw ParameterError("poisson: upper must be >= 0");

  PmfCdf out;
  out.pmf.probs.assign(static_cast<std::size_t>(upper) + 1, 0.0);
  if (mean == 0.0) {
    out.pmf.probs[0] = 1.0;
  } else {
    const double log_mean = std::log(mean);
    for (int k = 0; k <= upper; ++k) {
      out.pmf.probs[k] = std::exp(-mean + k * log_mean - std::lgamma(k + 1.0));
    }
  }
  out.cdf = out.pmf.cumulative();
  return out;
}

int poisson_quantile(double mean, double q) {
  if (mean < 0.0) throw ParameterError("poisson quantile: mean must be >= 0");
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("poisson quantile: q must be in [0, 1]");
  if (q == 0.0 || mean == 0.0) return 0;

  // Walk the cdf with the stable pmf recurrence. The cap is far beyond any
  // q < 1 quantile; rounding drives the cdf to 1 well before it.
  const int cap = static_cast<int>(mean + 50.0 * std::sqrt(mean) + 64.0);
  double term = std::exp(-mean);
  double cum = term;
  int k = 0;
  while (cum < q && k < cap) {
    ++k;
    term *= mean / k;
    cum += term;
  }
  return k;
}

DiscretePmf truncated_negbinom_pmf(double n, double delta, int d_max) {
  if (!(n > 0.0)) throw ParameterError("negbinom: n must be > 0");
  if (!(delta > 0.0)) throw ParameterError("negbinom: delta must be > 0");
  if (d_max < 1) throw ParameterError("negbinom: d_max must be >= 1");

  const double p = n / (n + delta);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double lg_n = std::lgamma(n);

  DiscretePmf out;
  out.probs.resize(static_cast<std::size_t>(d_max) + 1);
  double partial = 0.0;
  for (int d = 0; d < d_max; ++d) {
    const double log_mass =
        std::lgamma(n + d) - lg_n - std::lgamma(d + 1.0) + n * log_p + d * log_q;
    out.probs[d] = std::exp(log_mass);
    partial += out.probs[d];
  }
  out.probs[d_max] = std::max(0.0, 1.0 - partial);
  return out;
}

double binomial_pmf(int k, int trials, double rho) {
  if (trials < 0) throw ParameterError("binomial: trials must be >= 0");
  if (k < 0 || k > trials) return 0.0;
  if (!(rho >= 0.0 && rho <= 1.0)) throw ParameterError("binomial: rho must be in [0, 1]");
  if (rho == 0.0) return k == 0 ? 1.0 : 0.0;
  if (rho == 1.0) return k == trials ? 1.0 : 0.0;

  const double log_choose = std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) -
                            std::lgamma(trials - k + 1.0);
  return std::exp(log_choose + k * std::log(rho) + (trials - k) * std::log1p(-rho));
}

double multinomial_pmf(std::span<const int> counts, std::span<const double> probs) {
  if (counts.size() != probs.size())
    throw ParameterError("multinomial: counts and probs must have the same length");

  int trials = 0;
  for (int c : counts) {
    if (c < 0) throw ParameterError("multinomial: counts must be >= 0");
    trials += c;
  }
  double log_mass = std::lgamma(trials + 1.0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    if (probs[i] <= 0.0) return 0.0;
    log_mass += counts[i] * std::log(probs[i]) - std::lgamma(counts[i] + 1.0);
  }
  return std::exp(log_mass);
}

}  // namespace pvi::dist
