#include "scheq/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "scheq/parallel.hpp"

namespace scheq {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

GridField sample_brownian(std::size_t M, Stream& rng) {
  GridField b(M);
  double h = 1.0 / static_cast<double>(M);
  double v = std::sqrt(0.5 * h) * rng.normal();
  b[0] = v;
  double sd = std::sqrt(h);
  for (std::size_t j = 1; j < M; ++j) {
    v += sd * rng.normal();
    b[j] = v;
  }
  return b;
}

GridField sample_mu_c(double c, std::size_t M, Stream& rng) {
  GridField y = sample_brownian(M, rng);
  double m = grid_mean(y);
  for (double& v : y.values) v = v - m + c;
  return y;
}

SpectralField sample_mu_c_modes(double c, std::size_t N, Stream& rng) {
  SpectralField a(N);
  if (N > 0) a[0] = c;
  for (std::size_t i = 1; i < N; ++i) a[i] = rng.normal() / std::sqrt(-eigenvalue(i));
  return a;
}

double log_k_membership(const GridField& x, KRule rule) {
  for (double v : x.values)
    if (!(v > 0.0)) return kNegInf;
  if (rule == KRule::Grid) return 0.0;
  const double M = static_cast<double>(x.size());
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < x.size(); ++j) s += std::log1p(-std::exp(-2.0 * x[j] * x[j + 1] * M));
  // Half cells at both ends: Brownian segments of length 1/(2M) with a free end.
  double root_h = std::sqrt(1.0 / M);
  s += std::log(std::erf(x[0] / root_h));
  s += std::log(std::erf(x[x.size() - 1] / root_h));
  return s;
}

double log_weight_reg(const NonlinSpec& spec, int n, const GridField& x) {
  return -potential_U_reg(spec, n, x);
}

double log_weight_limit(const NonlinSpec& spec, const GridField& x, KRule rule) {
  double lk = log_k_membership(x, rule);
  if (lk == kNegInf) return kNegInf;
  double U = potential_U(spec, x);
  if (std::isinf(U)) return kNegInf;
  return lk - U;
}

namespace {

Ensemble build(double c, std::size_t count, const SamplerOptions& opt,
               const std::function<double(const GridField&)>& lw) {
  if (count < 1) throw std::invalid_argument("ensemble size must be >= 1");
  Ensemble e(count);
  std::uint64_t key = stream_key(opt.stream);
  parallel_for(count, opt.threads, [&](std::size_t i) {
    Stream rng(opt.seed, key, i);
    e[i].field = sample_mu_c(c, opt.M, rng);
    e[i].log_weight = lw ? lw(e[i].field) : 0.0;
  });
  return e;
}

}  // namespace

Ensemble sample_mu_ensemble(double c, std::size_t count, const SamplerOptions& opt) {
  return build(c, count, opt, nullptr);
}

Ensemble sample_nu_reg(double c, const NonlinSpec& spec, int n, std::size_t count, const SamplerOptions& opt) {
  return build(c, count, opt, [&](const GridField& x) { return log_weight_reg(spec, n, x); });
}

Ensemble sample_nu_limit(double c, const NonlinSpec& spec, std::size_t count, const SamplerOptions& opt,
                         KRule rule) {
  if (!(c > 0.0)) throw std::invalid_argument("the limit measure needs c > 0");
  return build(c, count, opt, [&](const GridField& x) { return log_weight_limit(spec, x, rule); });
}

Weights weights_of(const Ensemble& e) {
  std::vector<double> lw(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) lw[i] = e[i].log_weight;
  return Weights(std::move(lw));
}

Weights reweight(const Ensemble& e, const std::function<double(const GridField&)>& log_weight, int threads) {
  std::vector<double> lw(e.size());
  parallel_for(e.size(), threads, [&](std::size_t i) { lw[i] = log_weight(e[i].field); });
  return Weights(std::move(lw));
}

MCEstimate expectation(const Ensemble& e, const Weights& w, const Functional& phi, int threads) {
  std::vector<double> v(e.size(), 0.0);
  const auto& ww = w.scaled();
  parallel_for(e.size(), threads, [&](std::size_t i) {
    if (ww[i] > 0.0) v[i] = phi(e[i].field);
  });
  return weighted_mean(w, v);
}

MCEstimate expectation(const Ensemble& e, const Functional& phi, int threads) {
  return expectation(e, weights_of(e), phi, threads);
}

EnsembleStats estimate_Z(double c, const NonlinSpec& spec, int n, std::size_t count, const SamplerOptions& opt) {
  Ensemble e = sample_nu_reg(c, spec, n, count, opt);
  std::vector<double> w(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) w[i] = std::exp(e[i].log_weight);
  EnsembleStats s = plain_mean(w, opt.seed);
  s.ess = weights_of(e).ess();
  return s;
}

MCEstimate metropolis_nu_reg(double c, const NonlinSpec& spec, int n, const Functional& phi,
                             std::size_t chain_length, std::size_t chains, std::size_t burn_in,
                             const SamplerOptions& opt, double* acceptance_rate) {
  if (chains < 2 || chain_length < 1) throw std::invalid_argument("need >= 2 chains of positive length");
  std::vector<double> chain_mean(chains, 0.0);
  std::vector<double> accepted(chains, 0.0);
  std::uint64_t key = stream_key(opt.stream + "/metropolis");
  parallel_for(chains, opt.threads, [&](std::size_t ch) {
    Stream rng(opt.seed, key, ch);
    GridField x = sample_mu_c(c, opt.M, rng);
    double lx = log_weight_reg(spec, n, x);
    std::vector<double> vals;
    vals.reserve(chain_length);
    double acc = 0.0;
    for (std::size_t t = 0; t < burn_in + chain_length; ++t) {
      GridField y = sample_mu_c(c, opt.M, rng);
      double ly = log_weight_reg(spec, n, y);
      double u = rng.uniform();
      if (std::log(u) < ly - lx) {
        x = std::move(y);
        lx = ly;
        if (t >= burn_in) acc += 1.0;
      }
      if (t >= burn_in) vals.push_back(phi(x));
    }
    chain_mean[ch] = pairwise_sum(vals) / static_cast<double>(vals.size());
    accepted[ch] = acc / static_cast<double>(chain_length);
  });
  MCEstimate e = plain_mean(chain_mean, opt.seed);
  e.count = chains * chain_length;
  e.ess = static_cast<double>(e.count);
  if (acceptance_rate) *acceptance_rate = pairwise_sum(accepted) / static_cast<double>(chains);
  return e;
}

std::vector<ScanRow> weak_convergence_scan(double c, const NonlinSpec& spec,
                                           const std::vector<NamedFunctional>& functionals,
                                           const std::vector<int>& n_grid, std::size_t count,
                                           const SamplerOptions& opt, KRule rule) {
  Ensemble e = sample_mu_ensemble(c, count, opt);
  Weights w_lim = reweight(e, [&](const GridField& x) { return log_weight_limit(spec, x, rule); }, opt.threads);
  std::vector<std::vector<double>> values(functionals.size(), std::vector<double>(e.size()));
  for (std::size_t f = 0; f < functionals.size(); ++f)
    parallel_for(e.size(), opt.threads, [&](std::size_t i) { values[f][i] = functionals[f].fn(e[i].field); });

  std::vector<ScanRow> rows;
  for (std::size_t f = 0; f < functionals.size(); ++f) {
    ScanRow lim;
    lim.n = 0;
    lim.functional = functionals[f].name;
    lim.estimate = weighted_mean(w_lim, values[f], opt.seed);
    lim.gap.seed = opt.seed;
    rows.push_back(lim);
  }
  for (int n : n_grid) {
    Weights w_n = reweight(e, [&](const GridField& x) { return log_weight_reg(spec, n, x); }, opt.threads);
    for (std::size_t f = 0; f < functionals.size(); ++f) {
      ScanRow r;
      r.n = n;
      r.functional = functionals[f].name;
      r.estimate = weighted_mean(w_n, values[f], opt.seed);
      r.gap = weighted_difference(w_n, values[f], w_lim, values[f], opt.seed);
      rows.push_back(r);
    }
  }
  return rows;
}

double exp_neg_sq(const GridField& x) { return std::exp(-grid_inner(x, x)); }

double clipped_min(const GridField& x) {
  double m = *std::min_element(x.values.begin(), x.values.end());
  return std::clamp(m, -1.0, 1.0);
}

}  // namespace scheq
