#include "scheq/meander.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "scheq/measures.hpp"
#include "scheq/parallel.hpp"

namespace scheq {

namespace {

constexpr double kPi = std::numbers::pi;

double left_time(double r, double theta) { return (r - theta) / r; }
double right_time(double r, double theta, double len) { return (theta - r) / len; }

void check_r(double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::domain_error("split point r must lie in (0,1)");
}

std::vector<double> normalized_times(std::vector<double> t) {
  t.push_back(0.0);
  t.push_back(1.0);
  for (double v : t)
    if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("meander times must lie in [0,1]");
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

}  // namespace

double MeanderPath::value_at(double s) const {
  if (s <= times.front()) return values.front();
  if (s >= times.back()) return values.back();
  auto it = std::lower_bound(times.begin(), times.end(), s);
  std::size_t k = static_cast<std::size_t>(it - times.begin());
  if (*it == s) return values[k];
  double t0 = times[k - 1], t1 = times[k];
  double w = (s - t0) / (t1 - t0);
  return (1.0 - w) * values[k - 1] + w * values[k];
}

MeanderPath sample_meander_at(std::vector<double> times, Stream& rng) {
  MeanderPath p;
  p.times = normalized_times(std::move(times));
  p.values.assign(p.times.size(), 0.0);
  double w[3] = {0.0, 0.0, 0.0};
  for (std::size_t k = 1; k < p.times.size(); ++k) {
    double sd = std::sqrt(p.times[k] - p.times[k - 1]);
    for (double& c : w) c += sd * rng.normal();
    p.values[k] = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
  }
  p.weight = std::sqrt(kPi / 2.0) / p.endpoint();
  return p;
}

MeanderPath sample_meander(std::size_t grid_size, Stream& rng) {
  if (grid_size < 2) throw std::invalid_argument("meander grid needs at least 2 points");
  std::vector<double> t(grid_size);
  for (std::size_t k = 0; k < grid_size; ++k) t[k] = static_cast<double>(k) / static_cast<double>(grid_size - 1);
  return sample_meander_at(std::move(t), rng);
}

MeanderPath sample_meander_rejection(std::size_t grid_size, Stream& rng, std::size_t* trials) {
  if (grid_size < 2) throw std::invalid_argument("meander grid needs at least 2 points");
  const double h = 1.0 / static_cast<double>(grid_size - 1);
  const double sd = std::sqrt(h);
  MeanderPath p;
  p.times.resize(grid_size);
  for (std::size_t k = 0; k < grid_size; ++k) p.times[k] = static_cast<double>(k) * h;
  p.times.back() = 1.0;
  p.values.assign(grid_size, 0.0);
  std::size_t count = 0;
  for (;;) {
    ++count;
    double y = sd * std::sqrt(-2.0 * std::log(rng.uniform()));
    p.values[1] = y;
    bool alive = true;
    for (std::size_t k = 2; k < grid_size && alive; ++k) {
      double z = y + sd * rng.normal();
      if (z <= 0.0) {
        alive = false;
        break;
      }
      double survive = -std::expm1(-2.0 * y * z / h);
      if (rng.uniform() > survive) alive = false;
      y = z;
      p.values[k] = z;
    }
    if (alive) break;
  }
  if (trials) *trials = count;
  p.weight = 1.0;
  return p;
}

std::vector<double> u_r_left_times(double r, std::size_t M) {
  std::vector<double> t;
  for (std::size_t j = 0; j < M; ++j) {
    double th = grid_point(j, M);
    if (th <= r) t.push_back(left_time(r, th));
  }
  return t;
}

std::vector<double> u_r_right_times(double r, std::size_t M) {
  std::vector<double> t;
  for (std::size_t j = 0; j < M; ++j) {
    double th = grid_point(j, M);
    if (th > r) t.push_back(right_time(r, th, 1.0 - r));
  }
  return t;
}

ConcatPath build_U_r(double r, const MeanderPath& m, const MeanderPath& mhat, std::size_t M) {
  check_r(r);
  ConcatPath u;
  u.r = r;
  u.path = GridField(M);
  double a = std::sqrt(r), b = std::sqrt(1.0 - r);
  for (std::size_t j = 0; j < M; ++j) {
    double th = grid_point(j, M);
    u.path[j] = th <= r ? a * m.value_at(left_time(r, th)) : b * mhat.value_at(right_time(r, th, 1.0 - r));
  }
  u.weight = m.weight * mhat.weight;
  u.m_end = m.endpoint();
  u.mhat_end = mhat.endpoint();
  u.end_value = b * mhat.endpoint();
  return u;
}

ConcatPath build_V_r(double r, const ConcatPath& u) {
  check_r(r);
  ConcatPath v = u;
  double shift = std::sqrt(r) * u.m_end;
  for (double& x : v.path.values) x -= shift;
  v.end_value -= shift;
  return v;
}

ConcatPath build_T_r(double r, const MeanderPath& m, const MeanderPath& mhat, std::size_t M) {
  if (!(r > 0.0 && r < 0.5)) throw std::domain_error("T_r needs r in (0,1/2)");
  if (M % 2 != 0) throw std::invalid_argument("T_r needs an even grid size");
  ConcatPath t;
  t.r = r;
  t.path = GridField(M / 2);
  double a = std::sqrt(r), len = 0.5 - r, b = std::sqrt(len);
  for (std::size_t j = 0; j < M / 2; ++j) {
    double th = grid_point(j, M);
    t.path[j] = th <= r ? a * m.value_at(left_time(r, th)) : b * mhat.value_at(right_time(r, th, len));
  }
  t.weight = m.weight * mhat.weight;
  t.m_end = m.endpoint();
  t.mhat_end = mhat.endpoint();
  t.end_value = b * mhat.endpoint();
  return t;
}

ConcatPath sample_U_r(double r, std::size_t M, Stream& rng) {
  check_r(r);
  MeanderPath m = sample_meander_at(u_r_left_times(r, M), rng);
  MeanderPath mh = sample_meander_at(u_r_right_times(r, M), rng);
  return build_U_r(r, m, mh, M);
}

ConcatPath sample_T_r(double r, std::size_t M, Stream& rng) {
  if (!(r > 0.0 && r < 0.5)) throw std::domain_error("T_r needs r in (0,1/2)");
  std::vector<double> lt, rt;
  double len = 0.5 - r;
  for (std::size_t j = 0; j < M / 2; ++j) {
    double th = grid_point(j, M);
    if (th <= r)
      lt.push_back(left_time(r, th));
    else
      rt.push_back(right_time(r, th, len));
  }
  MeanderPath m = sample_meander_at(std::move(lt), rng);
  MeanderPath mh = sample_meander_at(std::move(rt), rng);
  return build_T_r(r, m, mh, M);
}

double sample_arcsine(Stream& rng) {
  double s = std::sin(0.5 * kPi * rng.uniform());
  return s * s;
}

double m_functional(const std::vector<double>& half_values, double end_value) {
  if (half_values.empty()) return 0.5 * end_value;
  double s = 0.0;
  for (double v : half_values) s += v;
  return s / (2.0 * static_cast<double>(half_values.size())) + 0.5 * end_value;
}

ConcatPath sample_half_representation(double c, std::size_t M, Stream& rng) {
  if (M % 2 != 0) throw std::invalid_argument("half representation needs an even grid size");
  std::size_t L = M / 2;
  ConcatPath p;
  p.r = 0.5;
  p.path = GridField(L);
  double h = 1.0 / static_cast<double>(M);
  double v = std::sqrt(0.5 * h) * rng.normal();
  p.path[0] = v;
  for (std::size_t j = 1; j < L; ++j) {
    v += std::sqrt(h) * rng.normal();
    p.path[j] = v;
  }
  double end = v + std::sqrt(0.5 * h) * rng.normal();
  double shift = c - m_functional(p.path.values, end) + rng.normal() / std::sqrt(24.0);
  for (double& x : p.path.values) x += shift;
  p.end_value = end + shift;
  return p;
}

VTauReport v_tau_law_check(std::size_t count, std::uint64_t seed, int threads) {
  const std::vector<double> thetas = {0.25, 0.5, 0.75, 1.0};
  std::vector<std::array<double, 4>> v(count), b(count);
  std::vector<double> lw(count);
  std::uint64_t key = stream_key("meander/v_tau");
  std::uint64_t key_b = stream_key("meander/v_tau/brownian");
  parallel_for(count, threads, [&](std::size_t i) {
    Stream rng(seed, key, i);
    double tau = sample_arcsine(rng);
    std::vector<double> lt, rt;
    for (double th : thetas) {
      if (th <= tau)
        lt.push_back(left_time(tau, th));
      else
        rt.push_back(right_time(tau, th, 1.0 - tau));
    }
    MeanderPath m = sample_meander_at(lt, rng);
    MeanderPath mh = sample_meander_at(rt, rng);
    double shift = std::sqrt(tau) * m.endpoint();
    for (std::size_t k = 0; k < thetas.size(); ++k) {
      double th = thetas[k];
      double u = th <= tau ? std::sqrt(tau) * m.value_at(left_time(tau, th))
                           : std::sqrt(1.0 - tau) * mh.value_at(right_time(tau, th, 1.0 - tau));
      v[i][k] = u - shift;
    }
    lw[i] = std::log(m.weight * mh.weight);
    Stream rb(seed, key_b, i);
    double acc = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < thetas.size(); ++k) {
      acc += std::sqrt(thetas[k] - prev) * rb.normal();
      prev = thetas[k];
      b[i][k] = acc;
    }
  });
  Weights w(lw);
  VTauReport rep;
  for (std::size_t k : {std::size_t{0}, std::size_t{1}, std::size_t{3}}) {
    std::vector<double> xs(count), ys(count);
    for (std::size_t i = 0; i < count; ++i) {
      xs[i] = v[i][k];
      ys[i] = b[i][k];
    }
    double sd = std::sqrt(thetas[k]);
    MarginalCheck mc;
    mc.theta = thetas[k];
    mc.vs_normal = weighted_ks(xs, w.scaled(), [sd](double x) { return normal_cdf(x / sd); });
    mc.vs_brownian = weighted_ks_two_sample(xs, w.scaled(), ys);
    rep.marginals.push_back(mc);
  }
  std::vector<double> prod(count), prod_b(count);
  for (std::size_t i = 0; i < count; ++i) {
    prod[i] = v[i][0] * v[i][2];
    prod_b[i] = b[i][0] * b[i][2];
  }
  rep.covariance = weighted_mean(w, prod, seed);
  rep.brownian_covariance = plain_mean(prod_b, seed);
  return rep;
}

UrEnsemble sample_U_r_ensemble(double r, std::size_t count, std::size_t M, std::uint64_t seed,
                               std::uint64_t stream, int threads) {
  check_r(r);
  UrEnsemble e;
  e.r = r;
  e.paths.resize(count);
  std::vector<double> lw(count);
  auto lt = u_r_left_times(r, M);
  auto rt = u_r_right_times(r, M);
  parallel_for(count, threads, [&](std::size_t i) {
    Stream rng(seed, stream, i);
    MeanderPath m = sample_meander_at(lt, rng);
    MeanderPath mh = sample_meander_at(rt, rng);
    e.paths[i] = build_U_r(r, m, mh, M);
    lw[i] = std::log(e.paths[i].weight);
  });
  e.weights = Weights(std::move(lw));
  return e;
}

std::vector<MCEstimate> J_r_n_scan(double r, const NonlinSpec& spec, const std::vector<int>& n_grid,
                                   std::size_t count, std::size_t M, std::uint64_t seed, int threads) {
  UrEnsemble e = sample_U_r_ensemble(r, count, M, seed, stream_key("meander/J"), threads);
  std::vector<MCEstimate> out;
  for (int n : n_grid) {
    std::vector<double> v(count);
    parallel_for(count, threads, [&](std::size_t i) { v[i] = std::exp(-potential_U_reg(spec, n, e.paths[i].path)); });
    out.push_back(weighted_mean(e.weights, v, seed));
  }
  return out;
}

MCEstimate J_r_n(double r, const NonlinSpec& spec, int n, std::size_t count, std::size_t M, std::uint64_t seed,
                 int threads) {
  return J_r_n_scan(r, spec, {n}, count, M, seed, threads).front();
}

namespace {

double weighted_quantile(const std::vector<double>& x, const std::vector<double>& w, double q) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  double total = 0.0;
  for (double v : w) total += v;
  double acc = 0.0;
  for (std::size_t i : idx) {
    acc += w[i];
    if (acc >= q * total) return x[i];
  }
  return x[idx.back()];
}

}  // namespace

double silverman_bandwidth(const std::vector<double>& x, const Weights& w) {
  MCEstimate var = weighted_variance(w, x);
  double sd = std::sqrt(var.value);
  double iqr = weighted_quantile(x, w.scaled(), 0.75) - weighted_quantile(x, w.scaled(), 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  return 0.9 * spread * std::pow(w.ess(), -0.2);
}

KDEConditional kde_conditional(const UrEnsemble& ens, double c, const std::function<double(const GridField&)>& psi,
                               double bandwidth) {
  std::size_t n = ens.paths.size();
  std::vector<double> means(n);
  for (std::size_t i = 0; i < n; ++i) means[i] = grid_mean(ens.paths[i].path);
  KDEConditional out;
  out.bandwidth = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(means, ens.weights);
  double b = out.bandwidth;
  std::vector<double> v(n, 0.0);
  std::vector<double> kw(n, 0.0);
  const auto& w = ens.weights.scaled();
  for (std::size_t i = 0; i < n; ++i) {
    double z = (means[i] - c) / b;
    double k = std::exp(-0.5 * z * z) / (b * std::sqrt(2.0 * kPi));
    kw[i] = w[i] * k;
    if (k > 0.0 && w[i] > 0.0) v[i] = psi(ens.paths[i].path) * k;
  }
  out.value = weighted_mean(ens.weights, v);
  double s = 0.0, s2 = 0.0;
  for (double x : kw) {
    s += x;
    s2 += x * x;
  }
  out.kernel_ess = s2 > 0.0 ? s * s / s2 : 0.0;
  return out;
}

}  // namespace scheq
