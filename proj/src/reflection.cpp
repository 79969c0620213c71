#include "scheq/reflection.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "scheq/parallel.hpp"

namespace scheq {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double f_mean(const NonlinSpec& spec, int n, const GridField& x) {
  double s = 0.0;
  for (double v : x.values) s += f_reg(spec, n, v);
  return s / static_cast<double>(x.size());
}

double f_limit_mean(const NonlinSpec& spec, const GridField& x) {
  double s = 0.0;
  for (double v : x.values) s += f_singular(spec, v);
  return s / static_cast<double>(x.size());
}

double f_dir(const NonlinSpec& spec, int n, const GridField& x, const GridField& pk) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += (n > 0 ? f_reg(spec, n, x[j]) : f_singular(spec, x[j])) * pk[j];
  return s / static_cast<double>(x.size());
}

std::vector<double> column(const std::vector<std::vector<double>>& m, std::size_t k) {
  std::vector<double> v(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) v[i] = m[i][k];
  return v;
}

const std::vector<std::vector<double>>& series(const StationaryRun& run, Observable which) {
  switch (which) {
    case Observable::Mode1Sq:
      return run.mode1_sq;
    case Observable::Mode2Sq:
      return run.mode2_sq;
    default:
      return run.potential;
  }
}

}  // namespace

std::size_t StationaryRun::checkpoint(double t) const {
  if (times.empty()) throw std::logic_error("empty stationary run");
  std::size_t best = 0;
  for (std::size_t k = 1; k < times.size(); ++k)
    if (std::abs(times[k] - t) < std::abs(times[best] - t)) best = k;
  return best;
}

StationaryRun run_stationary(const StationaryOptions& opt) {
  const SimConfig& cfg = opt.sim;
  cfg.validate();
  if (opt.replicas < 2) throw std::invalid_argument("need at least two replicas");
  if (opt.stride < 1) throw std::invalid_argument("checkpoint stride must be >= 1");
  const std::size_t S = cfg.steps();
  std::vector<std::size_t> marks;
  for (std::size_t k = 0; k <= S; k += opt.stride) marks.push_back(k);
  if (marks.back() != S) marks.push_back(S);

  StationaryRun run;
  run.spec = cfg.spec;
  run.n = cfg.n;
  run.eps = opt.eps;
  run.gamma = opt.gamma;
  run.seed = cfg.seed;
  for (std::size_t k : marks) run.times.push_back(std::min(static_cast<double>(k) * cfg.dt, cfg.T));
  const std::size_t R = opt.replicas, C = marks.size(), E = opt.eps.size();
  auto blank = [&] { return std::vector<std::vector<double>>(R, std::vector<double>(C, 0.0)); };
  run.f_cum = blank();
  run.mode1_sq = blank();
  run.mode2_sq = blank();
  run.potential = blank();
  run.contact_cum.assign(E, blank());
  std::vector<double> lw(R);
  std::uint64_t key = stream_key(opt.stream);

  parallel_for(R, opt.threads, [&](std::size_t i) {
    Stream rng(cfg.seed, key, i);
    SpectralField x0 = sample_mu_c_modes(cfg.c, cfg.N, rng);
    std::vector<double> a = x0.coeffs;
    Stepper st(cfg);
    GridField g(cfg.M);
    auto observe = [&](std::size_t slot) {
      to_grid(a.data(), cfg.N, g.values.data(), cfg.M);
      run.mode1_sq[i][slot] = cfg.N > 1 ? a[1] * a[1] : 0.0;
      run.mode2_sq[i][slot] = cfg.N > 2 ? a[2] * a[2] : 0.0;
      run.potential[i][slot] = potential_U_reg(cfg.spec, cfg.n, g);
    };
    observe(0);
    lw[i] = -run.potential[i][0];
    double fsum = 0.0;
    std::vector<double> csum(E, 0.0);
    std::size_t slot = 1;
    const double inv_m = 1.0 / static_cast<double>(cfg.M);
    for (std::size_t k = 1; k <= S; ++k) {
      st.step(a, rng);
      const auto& y = st.last_grid();
      double fs = 0.0;
      for (double v : y) fs += f_reg(cfg.spec, cfg.n, v);
      fsum += cfg.dt * fs * inv_m;
      for (std::size_t e = 0; e < E; ++e) {
        double cs = 0.0;
        for (double v : y) cs += contact_integrand(cfg.spec, cfg.n, v, opt.eps[e], opt.gamma);
        csum[e] += cfg.dt * cs * inv_m;
      }
      if (slot < C && marks[slot] == k) {
        observe(slot);
        run.f_cum[i][slot] = fsum;
        for (std::size_t e = 0; e < E; ++e) run.contact_cum[e][i][slot] = csum[e];
        ++slot;
      }
    }
  });
  run.weights = Weights(std::move(lw));
  return run;
}

MCEstimate penalization_mass(const StationaryRun& run, double s, double t) {
  if (t < s) throw std::invalid_argument("penalization window needs s <= t");
  std::size_t a = run.checkpoint(s), b = run.checkpoint(t);
  std::vector<double> v(run.f_cum.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = run.f_cum[i][b] - run.f_cum[i][a];
  return weighted_mean(run.weights, v, run.seed);
}

double contact_integrand(const NonlinSpec& spec, int n, double x, double eps, double gamma) {
  if (!(x < eps)) return 0.0;
  double f = f_reg(spec, n, x);
  if (spec.kind == NonlinKind::Power && spec.alpha >= 1.0) {
    if (x <= 0.0) return 0.0;
    return std::pow(x, spec.alpha + gamma) * f;
  }
  return x * f;
}

double contact_bound(const NonlinSpec& spec, double eps, double T, double gamma) {
  if (spec.kind == NonlinKind::Log) return -T * eps * std::log(eps);
  if (spec.alpha < 1.0) return T * std::pow(eps, 1.0 - spec.alpha);
  return T * std::pow(eps, gamma);
}

MCEstimate contact_statistic(const StationaryRun& run, std::size_t eps_index) {
  if (eps_index >= run.contact_cum.size()) throw std::out_of_range("contact threshold index");
  return weighted_mean(run.weights, column(run.contact_cum[eps_index], run.times.size() - 1), run.seed);
}

MCEstimate observable_at(const StationaryRun& run, Observable which, std::size_t checkpoint) {
  return weighted_mean(run.weights, column(series(run, which), checkpoint), run.seed);
}

MCEstimate observable_change(const StationaryRun& run, Observable which, std::size_t from, std::size_t to) {
  const auto& s = series(run, which);
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s[i][to] - s[i][from];
  return weighted_mean(run.weights, v, run.seed);
}

MCEstimate stationary_f_mass(double c, const NonlinSpec& spec, int n, std::size_t count,
                             const ReflectionOptions& opt) {
  if (!(c > 0.0)) throw std::invalid_argument("stationary_f_mass needs c > 0");
  std::vector<double> lw(count), v(count);
  std::uint64_t key = stream_key(opt.stream);
  parallel_for(count, opt.threads, [&](std::size_t i) {
    Stream rng(opt.seed, key, i);
    GridField x = sample_mu_c(c, opt.M, rng);
    lw[i] = log_weight_reg(spec, n, x);
    v[i] = f_mean(spec, n, x);
  });
  Weights w(std::move(lw));
  MCEstimate e = weighted_mean(w, v, opt.seed);
  e.ess = w.ess();
  return e;
}

namespace {

struct DirectionData {
  GridField ak;
  GridField pk;
};

DirectionData direction_data(const SpectralField& k, std::size_t M) {
  return {to_grid(apply_A(k), M), to_grid(project_zero_mean(k), M)};
}

DefectEstimate defect_from(const std::vector<GridField>& xs, const Weights& w_lim, const Weights* w_cv,
                           const NonlinSpec& spec, int cv_level, const DirectionData& d, int threads,
                           std::uint64_t seed) {
  std::vector<double> g(xs.size(), 0.0), gcv(xs.size(), 0.0);
  const auto& wl = w_lim.scaled();
  parallel_for(xs.size(), threads, [&](std::size_t i) {
    double ax = grid_inner(xs[i], d.ak);
    if (wl[i] > 0.0) g[i] = ax + f_dir(spec, 0, xs[i], d.pk);
    if (w_cv) gcv[i] = ax + f_dir(spec, cv_level, xs[i], d.pk);
  });
  DefectEstimate out;
  out.plain = weighted_mean(w_lim, g, seed);
  out.estimate = w_cv ? weighted_difference(w_lim, g, *w_cv, gcv, seed) : out.plain;
  out.ess = w_lim.ess();
  out.plain.ess = out.estimate.ess = out.ess;
  return out;
}

std::vector<GridField> sample_fields(double c, std::size_t count, const ReflectionOptions& opt) {
  std::vector<GridField> xs(count);
  std::uint64_t key = stream_key(opt.stream);
  parallel_for(count, opt.threads, [&](std::size_t i) {
    Stream rng(opt.seed, key, i);
    xs[i] = sample_mu_c(c, opt.M, rng);
  });
  return xs;
}

Weights weights_for(const std::vector<GridField>& xs, int threads,
                    const std::function<double(const GridField&)>& lw) {
  std::vector<double> v(xs.size());
  parallel_for(xs.size(), threads, [&](std::size_t i) { v[i] = lw(xs[i]); });
  return Weights(std::move(v));
}

}  // namespace

DefectEstimate ibp_defect(const SpectralField& k, double c, const NonlinSpec& spec, std::size_t count,
                          const ReflectionOptions& opt) {
  if (!(c > 0.0)) throw std::invalid_argument("ibp_defect needs c > 0");
  std::vector<GridField> xs = sample_fields(c, count, opt);
  Weights wl = weights_for(xs, opt.threads, [&](const GridField& x) { return log_weight_limit(spec, x, opt.rule); });
  DirectionData d = direction_data(k, opt.M);
  if (opt.cv_level > 0) {
    Weights wc = weights_for(xs, opt.threads, [&](const GridField& x) { return log_weight_reg(spec, opt.cv_level, x); });
    return defect_from(xs, wl, &wc, spec, opt.cv_level, d, opt.threads, opt.seed);
  }
  return defect_from(xs, wl, nullptr, spec, 0, d, opt.threads, opt.seed);
}

ReflectionScanResult threshold_scan(const std::vector<NonlinSpec>& specs, const std::vector<int>& n_grid,
                                    const std::vector<SpectralField>& directions,
                                    const std::vector<std::string>& direction_names, double c, std::size_t count,
                                    const ReflectionOptions& opt) {
  if (!(c > 0.0)) throw std::invalid_argument("threshold_scan needs c > 0");
  if (directions.size() != direction_names.size()) throw std::invalid_argument("direction names mismatch");
  ReflectionScanResult res;
  res.c = c;
  res.count = count;
  res.n_grid = n_grid;
  std::vector<GridField> xs = sample_fields(c, count, opt);
  std::vector<DirectionData> dd;
  for (const auto& k : directions) dd.push_back(direction_data(k, opt.M));

  for (const NonlinSpec& spec : specs) {
    ThresholdRow row;
    row.spec = spec;
    row.directions = direction_names;
    Weights wl = weights_for(xs, opt.threads, [&](const GridField& x) { return log_weight_limit(spec, x, opt.rule); });
    row.ess = wl.ess();
    std::vector<double> fl(count, 0.0);
    parallel_for(count, opt.threads, [&](std::size_t i) {
      if (wl.scaled()[i] > 0.0) fl[i] = f_limit_mean(spec, xs[i]);
    });
    row.limit_mass = weighted_mean(wl, fl, opt.seed);
    row.limit_mass.ess = row.ess;

    Weights wc;
    if (opt.cv_level > 0)
      wc = weights_for(xs, opt.threads, [&](const GridField& x) { return log_weight_reg(spec, opt.cv_level, x); });
    for (const auto& d : dd)
      row.defects.push_back(
          defect_from(xs, wl, opt.cv_level > 0 ? &wc : nullptr, spec, opt.cv_level, d, opt.threads, opt.seed));

    for (int n : n_grid) {
      Weights wn = weights_for(xs, opt.threads, [&](const GridField& x) { return log_weight_reg(spec, n, x); });
      std::vector<double> fn(count);
      parallel_for(count, opt.threads, [&](std::size_t i) { fn[i] = f_mean(spec, n, xs[i]); });
      MassRow m;
      m.n = n;
      m.mass = weighted_mean(wn, fn, opt.seed);
      m.mass.ess = wn.ess();
      m.gap = weighted_difference(wn, fn, wl, fl, opt.seed);
      row.masses.push_back(m);
    }
    res.rows.push_back(std::move(row));
  }
  return res;
}

}  // namespace scheq
