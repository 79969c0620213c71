#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace scheq {

struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double ess = 0.0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

// Plain sample mean with the standard error of the mean.
MCEstimate plain_mean(const std::vector<double>& x, std::uint64_t seed = 0);

// Importance weights held as log-weights; -inf marks a zero weight.
class Weights {
 public:
  Weights() = default;
  explicit Weights(std::vector<double> log_weights);

  std::size_t size() const { return w_.size(); }
  // Weights rescaled so that the largest equals one.
  const std::vector<double>& scaled() const { return w_; }
  double log_scale() const { return log_scale_; }
  double ess() const;
  std::size_t nonzero() const;
  // Mean of the raw weights exp(log_weight), with its standard error.
  MCEstimate raw_mean() const;

 private:
  std::vector<double> w_;
  double log_scale_ = 0.0;
};

// Self-normalized estimate of E[x] under the weights, delta-method stderr.
MCEstimate weighted_mean(const Weights& w, const std::vector<double>& x, std::uint64_t seed = 0);

// Paired difference E_a[x] - E_b[y] for two weightings of the same samples.
MCEstimate weighted_difference(const Weights& wa, const std::vector<double>& x, const Weights& wb,
                               const std::vector<double>& y, std::uint64_t seed = 0);

// Self-normalized second moment of x about its weighted mean (a variance
// estimate) with a delta-method stderr.
MCEstimate weighted_variance(const Weights& w, const std::vector<double>& x, std::uint64_t seed = 0);

struct KSResult {
  double statistic = 0.0;
  double effective_n = 0.0;
  double p_value = 0.0;
};

// Asymptotic Kolmogorov tail probability P(K > lambda).
double kolmogorov_tail(double lambda);

// One-sample KS of weighted samples against a continuous CDF; the effective
// sample size enters the p-value in place of n.
KSResult weighted_ks(const std::vector<double>& x, const std::vector<double>& w,
                     const std::function<double(double)>& cdf);

// Two-sample KS between weighted and unweighted samples.
KSResult weighted_ks_two_sample(const std::vector<double>& x, const std::vector<double>& wx,
                                const std::vector<double>& y);

// Standard normal CDF.
double normal_cdf(double z);

// Gauss-Legendre nodes and weights on (0,1).
void gauss_legendre_unit(int count, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace scheq
