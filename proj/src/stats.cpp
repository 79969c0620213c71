#include "scheq/stats.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "scheq/parallel.hpp"

namespace scheq {

MCEstimate plain_mean(const std::vector<double>& x, std::uint64_t seed) {
  MCEstimate e;
  e.count = x.size();
  e.seed = seed;
  e.ess = static_cast<double>(x.size());
  if (x.empty()) return e;
  double n = static_cast<double>(x.size());
  e.value = pairwise_sum(x) / n;
  if (x.size() > 1) {
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - e.value) * (x[i] - e.value);
    e.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  }
  return e;
}

Weights::Weights(std::vector<double> log_weights) {
  log_scale_ = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights)
    if (!std::isnan(lw)) log_scale_ = std::max(log_scale_, lw);
  w_.resize(log_weights.size());
  bool all_zero = !std::isfinite(log_scale_);
  for (std::size_t i = 0; i < w_.size(); ++i) {
    double lw = log_weights[i];
    w_[i] = (all_zero || std::isnan(lw) || lw == -std::numeric_limits<double>::infinity())
                ? 0.0
                : std::exp(lw - log_scale_);
  }
  if (all_zero) log_scale_ = 0.0;
}

double Weights::ess() const {
  std::vector<double> sq(w_.size());
  for (std::size_t i = 0; i < w_.size(); ++i) sq[i] = w_[i] * w_[i];
  double s = pairwise_sum(w_);
  double s2 = pairwise_sum(sq);
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

std::size_t Weights::nonzero() const {
  return static_cast<std::size_t>(std::count_if(w_.begin(), w_.end(), [](double v) { return v > 0.0; }));
}

MCEstimate Weights::raw_mean() const {
  MCEstimate e = plain_mean(w_);
  double s = std::exp(log_scale_);
  e.value *= s;
  e.std_error *= s;
  return e;
}

MCEstimate weighted_mean(const Weights& w, const std::vector<double>& x, std::uint64_t seed) {
  if (x.size() != w.size()) throw std::invalid_argument("weighted_mean: size mismatch");
  const auto& ww = w.scaled();
  std::size_t n = ww.size();
  std::vector<double> wx(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (ww[i] > 0.0) wx[i] = ww[i] * x[i];
  double sw = pairwise_sum(ww);
  MCEstimate e;
  e.count = n;
  e.seed = seed;
  e.ess = w.ess();
  if (sw <= 0.0) {
    e.value = std::numeric_limits<double>::quiet_NaN();
    e.std_error = std::numeric_limits<double>::infinity();
    return e;
  }
  e.value = pairwise_sum(wx) / sw;
  std::vector<double> dev(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (ww[i] > 0.0) {
      double d = ww[i] * (x[i] - e.value);
      dev[i] = d * d;
    }
  e.std_error = std::sqrt(pairwise_sum(dev)) / sw;
  return e;
}

MCEstimate weighted_difference(const Weights& wa, const std::vector<double>& x, const Weights& wb,
                               const std::vector<double>& y, std::uint64_t seed) {
  MCEstimate a = weighted_mean(wa, x, seed);
  MCEstimate b = weighted_mean(wb, y, seed);
  const auto& va = wa.scaled();
  const auto& vb = wb.scaled();
  double sa = pairwise_sum(va);
  double sb = pairwise_sum(vb);
  std::size_t n = va.size();
  std::vector<double> psi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double p = 0.0;
    if (va[i] > 0.0) p += va[i] * (x[i] - a.value) / sa;
    if (vb[i] > 0.0) p -= vb[i] * (y[i] - b.value) / sb;
    psi[i] = p * p;
  }
  MCEstimate e;
  e.value = a.value - b.value;
  e.std_error = std::sqrt(pairwise_sum(psi));
  e.ess = std::min(a.ess, b.ess);
  e.count = n;
  e.seed = seed;
  return e;
}

MCEstimate weighted_variance(const Weights& w, const std::vector<double>& x, std::uint64_t seed) {
  MCEstimate m = weighted_mean(w, x, seed);
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - m.value) * (x[i] - m.value);
  return weighted_mean(w, sq, seed);
}

double kolmogorov_tail(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p(double d, double ne) {
  double s = std::sqrt(ne);
  return kolmogorov_tail((s + 0.12 + 0.11 / s) * d);
}

std::vector<std::size_t> order_of(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  return idx;
}

}  // namespace

KSResult weighted_ks(const std::vector<double>& x, const std::vector<double>& w,
                     const std::function<double(double)>& cdf) {
  auto idx = order_of(x);
  double total = pairwise_sum(w);
  double total_sq = 0.0;
  for (double v : w) total_sq += v * v;
  double acc = 0.0;
  double d = 0.0;
  for (std::size_t i : idx) {
    double f = cdf(x[i]);
    d = std::max(d, std::abs(acc / total - f));
    acc += w[i];
    d = std::max(d, std::abs(acc / total - f));
  }
  KSResult r;
  r.statistic = d;
  r.effective_n = total * total / total_sq;
  r.p_value = ks_p(d, r.effective_n);
  return r;
}

KSResult weighted_ks_two_sample(const std::vector<double>& x, const std::vector<double>& wx,
                                const std::vector<double>& y) {
  auto ix = order_of(x);
  std::vector<double> ys = y;
  std::sort(ys.begin(), ys.end());
  double total = pairwise_sum(wx);
  double total_sq = 0.0;
  for (double v : wx) total_sq += v * v;
  double m = static_cast<double>(ys.size());
  double acc = 0.0;
  std::size_t j = 0;
  double d = 0.0;
  for (std::size_t i : ix) {
    while (j < ys.size() && ys[j] <= x[i]) ++j;
    acc += wx[i];
    d = std::max(d, std::abs(acc / total - static_cast<double>(j) / m));
  }
  // Also check just below each x value.
  acc = 0.0;
  j = 0;
  for (std::size_t i : ix) {
    while (j < ys.size() && ys[j] < x[i]) ++j;
    d = std::max(d, std::abs(acc / total - static_cast<double>(j) / m));
    acc += wx[i];
  }
  KSResult r;
  r.statistic = d;
  double ne = total * total / total_sq;
  r.effective_n = ne * m / (ne + m);
  r.p_value = ks_p(d, r.effective_n);
  return r;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

void gauss_legendre_unit(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.clear();
  weights.clear();
  auto fill = [&](const auto& absc, const auto& wts, bool odd) {
    // boost stores the nonnegative half of the symmetric rule on (-1,1)
    for (std::size_t i = 0; i < absc.size(); ++i) {
      double a = absc[i];
      double wt = wts[i];
      if (odd && i == 0) {
        nodes.push_back(0.5);
        weights.push_back(0.5 * wt);
        continue;
      }
      nodes.push_back(0.5 * (1.0 - a));
      weights.push_back(0.5 * wt);
      nodes.push_back(0.5 * (1.0 + a));
      weights.push_back(0.5 * wt);
    }
  };
  switch (count) {
    case 8:
      fill(boost::math::quadrature::gauss<double, 8>::abscissa(),
           boost::math::quadrature::gauss<double, 8>::weights(), false);
      break;
    case 16:
      fill(boost::math::quadrature::gauss<double, 16>::abscissa(),
           boost::math::quadrature::gauss<double, 16>::weights(), false);
      break;
    case 32:
      fill(boost::math::quadrature::gauss<double, 32>::abscissa(),
           boost::math::quadrature::gauss<double, 32>::weights(), false);
      break;
    case 64:
      fill(boost::math::quadrature::gauss<double, 64>::abscissa(),
           boost::math::quadrature::gauss<double, 64>::weights(), false);
      break;
    default:
      throw std::invalid_argument("gauss_legendre_unit: supported node counts are 8, 16, 32, 64");
  }
  std::vector<std::size_t> idx(nodes.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });
  std::vector<double> n2, w2;
  for (auto i : idx) {
    n2.push_back(nodes[i]);
    w2.push_back(weights[i]);
  }
  nodes.swap(n2);
  weights.swap(w2);
}

}  // namespace scheq
