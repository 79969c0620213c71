#include "scheq/harness/acceptance.hpp"

#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "scheq/dynamics.hpp"
#include "scheq/measures.hpp"
#include "scheq/parallel.hpp"
#include "scheq/spectral.hpp"
#include "scheq/verification.hpp"

namespace scheq::harness {

namespace {

constexpr double kPi = std::numbers::pi;

const char* kTitles[kCriterionCount] = {
    "spectral algebra",
    "linear law variances",
    "mass conservation",
    "coupled contraction",
    "Gaussian measure covariance",
    "invariance of the regularized Gibbs measure",
    "weak convergence in n",
    "meander laws",
    "integration by parts closure",
    "generator and symmetry",
    "contact bounds",
    "reflection threshold",
    "reproducibility across thread counts",
};

std::string cname(int id, const std::string& rest) { return "c" + std::to_string(id) + "/" + rest; }

double zscore(double diff, double sigma) { return sigma > 0.0 ? std::abs(diff) / sigma : (diff == 0.0 ? 0.0 : INFINITY); }

MCEstimate difference(const MCEstimate& a, const MCEstimate& b) {
  MCEstimate d;
  d.value = a.value - b.value;
  d.std_error = std::hypot(a.std_error, b.std_error);
  d.ess = std::min(a.ess, b.ess);
  d.count = std::min(a.count, b.count);
  return d;
}

std::string spec_name(const NonlinSpec& s) { return s.label(); }

IBPOptions ibp_options(const ExperimentConfig& cfg) {
  IBPOptions o;
  o.count = cfg.scaled(cfg.sampler.count);
  o.M = cfg.sampler.M;
  o.seed = cfg.seed;
  o.threads = cfg.worker_count();
  o.nodes = cfg.verification.nodes;
  o.boundary_count = cfg.scaled(cfg.verification.boundary_count);
  o.bandwidth = cfg.verification.bandwidth;
  o.rule = KRule::Bridge;
  return o;
}

struct Pair {
  TestFunctional phi;
  SpectralField h;
  std::string text;
};

// "<functional>@<mode>"
Pair parse_pair(const std::string& text) {
  auto at = text.find('@');
  if (at == std::string::npos) throw std::invalid_argument("pair '" + text + "' lacks '@<mode>'");
  std::string fn = text.substr(0, at);
  std::size_t mode = std::stoul(text.substr(at + 1));
  const std::size_t N = 16;
  if (mode >= N) throw std::invalid_argument("pair '" + text + "': mode too large");
  Pair p;
  p.text = text;
  p.h = SpectralField::mode(N, mode);
  auto colon = fn.find(':');
  std::string kind = fn.substr(0, colon);
  std::size_t k = colon == std::string::npos ? 0 : std::stoul(fn.substr(colon + 1));
  if (k >= N) throw std::invalid_argument("pair '" + text + "': mode too large");
  if (kind == "const")
    p.phi = TestFunctional::constant_fn();
  else if (kind == "exp_neg_sq")
    p.phi = TestFunctional::exp_neg_sq();
  else if (kind == "cos_inner")
    p.phi = TestFunctional::cos_inner(SpectralField::mode(N, k));
  else if (kind == "sin_inner")
    p.phi = TestFunctional::sin_inner(SpectralField::mode(N, k));
  else
    throw std::invalid_argument("unknown functional '" + kind + "'");
  return p;
}

Json ibp_params(const IBPReport& r, const std::string& pair) {
  Json p;
  p["pair"] = pair;
  p["lhs"] = r.lhs.value;
  p["lhs_stderr"] = r.lhs.std_error;
  p["bulk"] = r.rhs_bulk.value;
  p["bulk_stderr"] = r.rhs_bulk.std_error;
  p["boundary"] = r.rhs_boundary.value;
  p["boundary_stderr"] = r.rhs_boundary.std_error;
  p["sigma_paired"] = r.sigma_paired;
  p["k_fraction"] = r.k_fraction;
  p["degenerate"] = r.degenerate;
  return p;
}

MCEstimate ibp_estimate(const IBPReport& r) {
  MCEstimate e;
  e.value = r.lhs.value - r.rhs_bulk.value - r.rhs_boundary.value;
  e.std_error = r.sigma_combined;
  e.ess = r.ess;
  e.count = r.lhs.count;
  return e;
}

// ---- 1

CriterionResult c1(const ExperimentConfig& cfg, Recorder& rec) {
  const std::size_t N = cfg.sim.N, M = cfg.sim.M, fields = 100;
  const std::vector<std::pair<double, double>> pows = {{1.0, -0.5}, {0.5, 0.5}, {-1.0, 2.0}, {1.5, -1.0}};
  double e_qbar = 0.0, e_rt = 0.0, e_grid = 0.0, e_pow = 0.0;
  for (std::size_t f = 0; f < fields; ++f) {
    Stream rng(cfg.seed, "acceptance/spectral", f);
    SpectralField h(N);
    for (std::size_t i = 0; i < N; ++i) h[i] = rng.normal() / (1.0 + static_cast<double>(i));
    SpectralField lhs = apply_A(q_bar(h)), pi = project_zero_mean(h);
    for (std::size_t i = 0; i < N; ++i) e_qbar = std::max(e_qbar, std::abs(-lhs[i] - pi[i]));
    GridField g = to_grid(h, M);
    SpectralField back = to_spectral(g, N);
    for (std::size_t i = 0; i < N; ++i) e_rt = std::max(e_rt, std::abs(back[i] - h[i]));
    GridField g2 = to_grid(back, M);
    for (std::size_t j = 0; j < M; ++j) e_grid = std::max(e_grid, std::abs(g2[j] - g[j]));
    for (auto [a, b] : pows) {
      SpectralField l = apply_neg_A_pow(a, apply_neg_A_pow(b, pi)), r = apply_neg_A_pow(a + b, pi);
      double scale = 0.0, err = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        scale = std::max(scale, std::abs(r[i]));
        err = std::max(err, std::abs(l[i] - r[i]));
      }
      e_pow = std::max(e_pow, scale > 0.0 ? err / scale : err);
    }
  }
  const double tol = 1e-10;
  Json p;
  p["fields"] = fields;
  p["N"] = N;
  p["M"] = M;
  p["tolerance"] = tol;
  bool a = e_qbar <= tol, b = e_rt <= tol, c = e_grid <= tol, d = e_pow <= tol;
  put(rec, cfg, cname(1, "neg_A_qbar_equals_projection"), scalar(e_qbar, fields), p, a);
  put(rec, cfg, cname(1, "spectral_round_trip"), scalar(e_rt, fields), p, b);
  put(rec, cfg, cname(1, "grid_round_trip"), scalar(e_grid, fields), p, c);
  put(rec, cfg, cname(1, "power_composition_relative"), scalar(e_pow, fields), p, d);
  return {1, "", a && b && c && d,
          "max errors " + num(e_qbar, 2) + ", " + num(e_rt, 2) + ", " + num(e_grid, 2) + ", rel " + num(e_pow, 2) +
              " (tol 1e-10)"};
}

// ---- 2

CriterionResult c2(const ExperimentConfig& cfg, Recorder& rec) {
  SimConfig sc = cfg.sim;
  sc.nonlinear = false;
  sc.dt = 1e-3;
  sc.T = 0.1;
  sc.c = 0.0;
  sc.N = std::max<std::size_t>(sc.N, 5);
  sc.M = std::max(sc.M, sc.N);
  const std::array<std::size_t, 3> modes = {1, 2, 4};
  const std::size_t reps = cfg.scaled(10000);
  std::vector<std::array<double, 3>> sq(reps);
  const std::size_t steps = sc.steps();
  parallel_for(reps, cfg.worker_count(), [&](std::size_t r) {
    Stream rng(cfg.seed, "acceptance/linear", r);
    Stepper st(sc);
    std::vector<double> a(sc.N, 0.0);
    for (std::size_t s = 0; s < steps; ++s) st.step(a, rng);
    for (std::size_t k = 0; k < 3; ++k) sq[r][k] = a[modes[k]] * a[modes[k]];
  });
  bool pass = true;
  std::string detail;
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<double> x(reps);
    for (std::size_t r = 0; r < reps; ++r) x[r] = sq[r][k];
    MCEstimate e = plain_mean(x);
    double kk = static_cast<double>(modes[k]) * kPi;
    double target = -std::expm1(-0.1 * std::pow(kk, 4)) / (kk * kk);
    double z = zscore(e.value - target, e.std_error);
    bool ok = z <= 4.0;
    pass = pass && ok;
    Json p;
    p["mode"] = modes[k];
    p["t"] = sc.T;
    p["dt"] = sc.dt;
    p["target"] = target;
    p["z"] = z;
    put(rec, cfg, cname(2, "variance_mode" + std::to_string(modes[k])), e, p, ok);
    detail += (detail.empty() ? "" : "; ") + ("i=" + std::to_string(modes[k]) + " " + num(e.value, 5) + " vs " +
                                              num(target, 5) + " (" + num(z, 2) + " se)");
  }
  return {2, "", pass, detail};
}

// ---- 3

CriterionResult c3(const ExperimentConfig& cfg, Recorder& rec) {
  const std::vector<NonlinSpec> specs = {NonlinSpec::log(),      NonlinSpec::power(0.5), NonlinSpec::power(1.0),
                                         NonlinSpec::power(2.0), NonlinSpec::power(3.0), NonlinSpec::power(4.0)};
  const std::size_t steps = 1000;
  bool pass = true;
  std::size_t bad_total = 0;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    SimConfig sc = cfg.sim;
    sc.spec = specs[s];
    sc.nonlinear = true;
    sc.dt = std::min(cfg.sim.dt, sc.stability_cap / (2.0 * lipschitz(sc.spec, sc.n)));
    Stream init(cfg.seed, "acceptance/mass/init", s);
    SpectralField x0 = sample_mu_c_modes(sc.c, sc.N, init);
    Stepper st(sc);
    Stream rng(cfg.seed, "acceptance/mass/noise", s);
    std::vector<double> a = x0.coeffs;
    std::size_t bad = 0;
    double drift = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
      st.step(a, rng);
      if (std::memcmp(&a[0], &x0.coeffs[0], sizeof(double)) != 0) ++bad;
      drift = std::max(drift, std::abs(a[0] - x0[0]));
    }
    bool ok = bad == 0;
    pass = pass && ok;
    bad_total += bad;
    Json p;
    p["spec"] = spec_name(sc.spec);
    p["n"] = sc.n;
    p["dt"] = sc.dt;
    p["steps"] = steps;
    p["mismatched_steps"] = bad;
    put(rec, cfg, cname(3, "mean_drift/" + spec_name(sc.spec)), scalar(drift, steps), p, ok);
  }
  return {3, "", pass,
          std::to_string(specs.size()) + " specs x " + std::to_string(steps) + " steps, " + std::to_string(bad_total) +
              " steps with a changed mean"};
}

// ---- 4

CriterionResult c4(const ExperimentConfig& cfg, Recorder& rec) {
  const double t = 0.1;
  const double bound = std::exp(-std::pow(kPi, 4) * t / 2.0) * 1.05;
  const std::vector<NonlinSpec> specs = {NonlinSpec::log(), NonlinSpec::power(2.0)};
  const std::vector<int> levels = {2, 8};
  bool pass = true;
  double worst = 0.0;
  std::size_t idx = 0;
  for (const auto& spec : specs)
    for (int n : levels) {
      SimConfig sc = cfg.sim;
      sc.spec = spec;
      sc.n = n;
      sc.dt = 1e-4;
      sc.T = t;
      sc.nonlinear = true;
      Stream sx(cfg.seed, "acceptance/contraction/x", idx), sy(cfg.seed, "acceptance/contraction/y", idx);
      SpectralField x0 = sample_mu_c_modes(sc.c, sc.N, sx);
      SpectralField y0 = sample_mu_c_modes(sc.c, sc.N, sy);
      y0[0] = x0[0];
      Stream noise(cfg.seed, "acceptance/contraction/noise", idx);
      auto [tx, ty] = coupled_simulate(x0, y0, sc, noise);
      std::vector<double> d(tx.states.size());
      for (std::size_t k = 0; k < d.size(); ++k) {
        SpectralField w(sc.N);
        for (std::size_t i = 0; i < sc.N; ++i) w[i] = tx.states[k][i] - ty.states[k][i];
        d[k] = norm_gamma(-1.0, w).seminorm;
      }
      std::size_t increases = 0;
      for (std::size_t k = 1; k < d.size(); ++k)
        if (d[k] > d[k - 1]) ++increases;
      double ratio = d.back() / d.front();
      bool ok = ratio <= bound && increases == 0;
      pass = pass && ok;
      worst = std::max(worst, ratio);
      Json p;
      p["spec"] = spec_name(spec);
      p["n"] = n;
      p["dt"] = sc.dt;
      p["t"] = t;
      p["bound"] = bound;
      p["initial_distance"] = d.front();
      p["increasing_steps"] = increases;
      put(rec, cfg, cname(4, "ratio/" + spec_name(spec) + "/n" + std::to_string(n)), scalar(ratio, d.size() - 1), p,
          ok);
      ++idx;
    }
  return {4, "", pass, "worst ratio " + num(worst, 4) + " <= " + num(bound, 4) + ", monotone in every run"};
}

// ---- 5

CriterionResult c5(const ExperimentConfig& cfg, Recorder& rec) {
  const std::size_t count = cfg.scaled(cfg.sampler.count);
  const std::size_t M = cfg.sampler.M;
  std::vector<double> sq(count);
  parallel_for(count, cfg.worker_count(), [&](std::size_t i) {
    Stream rng(cfg.seed, "acceptance/mu_covariance", i);
    GridField g = sample_mu_c(cfg.sampler.c, M, rng);
    double y1 = to_spectral(g, 2)[1];
    sq[i] = y1 * y1;
  });
  MCEstimate e = plain_mean(sq);
  double target = 1.0 / (kPi * kPi);
  double z = zscore(e.value - target, e.std_error);
  bool ok = z <= 4.0;
  Json p;
  p["c"] = cfg.sampler.c;
  p["M"] = M;
  p["target"] = target;
  p["z"] = z;
  put(rec, cfg, cname(5, "variance_mode1"), e, p, ok);
  return {5, "", ok, num(e.value, 5) + " vs " + num(target, 5) + " (" + num(z, 2) + " se)"};
}

// ---- 7

CriterionResult c7(const ExperimentConfig& cfg, Recorder& rec) {
  SamplerOptions opt;
  opt.M = cfg.sampler.M;
  opt.seed = cfg.seed;
  opt.threads = cfg.worker_count();
  opt.stream = "acceptance/weak";
  std::vector<NamedFunctional> fns = {{"exp_neg_sq", exp_neg_sq}, {"clipped_min", clipped_min}};
  auto rows = weak_convergence_scan(cfg.sampler.c, cfg.sampler.spec, fns, cfg.sampler.n_grid,
                                    cfg.scaled(cfg.sampler.count), opt, KRule::Grid);
  bool pass = true;
  std::string detail;
  for (const auto& f : fns) {
    std::vector<double> gaps;
    for (const auto& r : rows) {
      if (r.functional != f.name) continue;
      Json p;
      p["spec"] = spec_name(cfg.sampler.spec);
      p["c"] = cfg.sampler.c;
      p["functional"] = f.name;
      p["n"] = r.n;
      if (r.n == 0) {
        put(rec, cfg, cname(7, f.name + "/limit"), r.estimate, p);
        continue;
      }
      p["expectation"] = r.estimate.value;
      put(rec, cfg, cname(7, f.name + "/gap_n" + std::to_string(r.n)), r.gap, p);
      gaps.push_back(std::abs(r.gap.value));
    }
    bool ok = gaps.size() >= 2;
    for (std::size_t k = 1; k < gaps.size(); ++k) ok = ok && gaps[k] < gaps[k - 1];
    pass = pass && ok;
    Json p;
    p["functional"] = f.name;
    put(rec, cfg, cname(7, f.name + "/strictly_decreasing"), scalar(ok ? 1.0 : 0.0, gaps.size()), p, ok);
    detail += (detail.empty() ? "" : "; ") + f.name + " |gap|";
    for (double g : gaps) detail += " " + num(g, 3);
  }
  return {7, "", pass, detail};
}

// ---- 8

CriterionResult c8(const ExperimentConfig& cfg, Recorder& rec) {
  const int threads = cfg.worker_count();
  const std::size_t count = cfg.scaled(cfg.sampler.count);
  bool pass = true;
  std::string detail;

  std::vector<double> ends(count), lw(count);
  parallel_for(count, threads, [&](std::size_t i) {
    Stream rng(cfg.seed, "acceptance/meander/endpoint", i);
    MeanderPath m = sample_meander_at({1.0}, rng);
    ends[i] = m.endpoint();
    lw[i] = std::log(m.weight);
  });
  Weights w(lw);
  KSResult ks = weighted_ks(ends, w.scaled(), [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-0.5 * x * x); });
  bool ok = ks.p_value >= 0.01;
  pass = pass && ok;
  {
    Json p;
    p["statistic"] = ks.statistic;
    p["p_value"] = ks.p_value;
    MCEstimate e = scalar(ks.statistic, count);
    e.ess = ks.effective_n;
    put(rec, cfg, cname(8, "endpoint_vs_rayleigh_ks"), e, p, ok);
  }
  detail = "Rayleigh p=" + num(ks.p_value, 3);

  VTauReport vt = v_tau_law_check(count, cfg.seed, threads);
  detail += "; V_tau p=";
  for (std::size_t k = 0; k < vt.marginals.size(); ++k) {
    const auto& mc = vt.marginals[k];
    bool m_ok = mc.vs_brownian.p_value >= 0.01;
    pass = pass && m_ok;
    Json p;
    p["theta"] = mc.theta;
    p["statistic"] = mc.vs_brownian.statistic;
    p["p_value"] = mc.vs_brownian.p_value;
    p["p_value_vs_normal"] = mc.vs_normal.p_value;
    MCEstimate e = scalar(mc.vs_brownian.statistic, count);
    e.ess = mc.vs_brownian.effective_n;
    put(rec, cfg, cname(8, "v_tau_vs_brownian_ks/theta" + num(mc.theta, 3)), e, p, m_ok);
    detail += (k ? "," : "") + num(mc.vs_brownian.p_value, 3);
  }

  // Imhof-weighted Bessel(3) paths against the rejection oracle on a 17-point grid.
  const std::size_t grid = 17;
  const std::size_t rcount = cfg.scaled(20000);
  std::vector<std::array<double, 3>> fi(count), fr(rcount);
  std::vector<double> lwi(count);
  auto feats = [](const MeanderPath& m) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < m.values.size(); ++k)
      s += 0.5 * (m.values[k] + m.values[k + 1]) * (m.times[k + 1] - m.times[k]);
    return std::array<double, 3>{m.endpoint(), m.value_at(0.5), s};
  };
  parallel_for(count, threads, [&](std::size_t i) {
    Stream rng(cfg.seed, "acceptance/meander/imhof", i);
    MeanderPath m = sample_meander(grid, rng);
    fi[i] = feats(m);
    lwi[i] = std::log(m.weight);
  });
  parallel_for(rcount, threads, [&](std::size_t i) {
    Stream rng(cfg.seed, "acceptance/meander/rejection", i);
    fr[i] = feats(sample_meander_rejection(grid, rng));
  });
  Weights wi(lwi);
  const char* names[3] = {"endpoint", "midpoint", "path_mean"};
  double zmax = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<double> xi(count), xr(rcount);
    for (std::size_t i = 0; i < count; ++i) xi[i] = fi[i][k];
    for (std::size_t i = 0; i < rcount; ++i) xr[i] = fr[i][k];
    MCEstimate a = weighted_mean(wi, xi), b = plain_mean(xr);
    MCEstimate d = difference(a, b);
    double z = zscore(d.value, d.std_error);
    zmax = std::max(zmax, z);
    bool c_ok = z <= 4.0;
    pass = pass && c_ok;
    Json p;
    p["functional"] = names[k];
    p["imhof"] = a.value;
    p["imhof_stderr"] = a.std_error;
    p["rejection"] = b.value;
    p["rejection_stderr"] = b.std_error;
    p["z"] = z;
    put(rec, cfg, cname(8, std::string("imhof_vs_rejection/") + names[k]), d, p, c_ok);
  }
  detail += "; Imhof vs rejection max " + num(zmax, 2) + " sigma";
  return {8, "", pass, detail};
}

// ---- 9

CriterionResult c9(const ExperimentConfig& cfg, Recorder& rec) {
  IBPOptions opt = ibp_options(cfg);
  struct Level {
    NonlinSpec spec;
    int n;
  };
  const std::vector<Level> levels = {{NonlinSpec::log(), 4}, {NonlinSpec::power(2.0), 8}};
  bool pass = true;
  double zmax = 0.0;
  std::size_t rows = 0;
  for (const auto& lv : levels)
    for (const auto& text : cfg.verification.gibbs_pairs) {
      Pair pr = parse_pair(text);
      IBPReport r = ibp_gibbs_reg(pr.phi, pr.h, cfg.sampler.c, lv.spec, lv.n, opt);
      double z = zscore(r.discrepancy, r.sigma_combined);
      bool ok = r.closes(3.0);
      pass = pass && ok;
      zmax = std::max(zmax, z);
      Json p = ibp_params(r, text);
      p["spec"] = spec_name(lv.spec);
      p["n"] = lv.n;
      p["c"] = cfg.sampler.c;
      p["z"] = z;
      put(rec, cfg, cname(9, "gibbs/" + spec_name(lv.spec) + "_n" + std::to_string(lv.n) + "/" + text),
          ibp_estimate(r), p, ok);
      ++rows;
    }
  for (const auto& text : cfg.verification.unconditioned_pairs) {
    Pair pr = parse_pair(text);
    IBPReport r = ibp_unconditioned(pr.phi, pr.h, opt);
    double z = zscore(r.discrepancy, r.sigma_combined);
    bool ok = r.closes(3.0);
    pass = pass && ok;
    zmax = std::max(zmax, z);
    Json p = ibp_params(r, text);
    p["z"] = z;
    put(rec, cfg, cname(9, "unconditioned/" + text), ibp_estimate(r), p, ok);
    ++rows;
  }
  bool enough = cfg.verification.gibbs_pairs.size() >= 3 && cfg.verification.unconditioned_pairs.size() >= 3;
  return {9, "", pass && enough,
          std::to_string(rows) + " identities, worst " + num(zmax, 2) + " combined sigma (limit 3)" +
              (enough ? "" : "; fewer than 3 pairs configured")};
}

// ---- 10

CriterionResult c10(const ExperimentConfig& cfg, Recorder& rec) {
  const NonlinSpec spec = NonlinSpec::log();
  const int n = 4;
  const std::size_t N = cfg.sim.N;
  SpectralField h = SpectralField::mode(N, 1);
  SpectralField x(N);
  x[0] = 2.0;
  x[1] = 0.5;
  x[2] = 0.3;
  GeneratorSlope gs = generator_slope(h, x, spec, n, cfg.verification.generator_dts,
                                      cfg.scaled(cfg.verification.generator_count), cfg.sampler.M, cfg.seed);
  for (const auto& q : gs.rows) {
    Json p;
    p["dt"] = q.dt;
    p["re"] = q.re.value;
    p["re_stderr"] = q.re.std_error;
    p["im"] = q.im.value;
    p["im_stderr"] = q.im.std_error;
    p["analytic_re"] = gs.analytic_re;
    p["analytic_im"] = gs.analytic_im;
    put(rec, cfg, cname(10, "generator_error/dt" + num(q.dt, 3)), scalar(q.error, q.re.count), p);
  }
  bool slope_ok = std::abs(gs.slope - 1.0) <= 0.3;
  {
    Json p;
    p["spec"] = spec_name(spec);
    p["n"] = n;
    p["dts"] = gs.rows.size();
    put(rec, cfg, cname(10, "generator_slope"), scalar(gs.slope, gs.rows.size()), p, slope_ok);
  }

  IBPOptions opt = ibp_options(cfg);
  SpectralField k1 = SpectralField::mode(8, 1);
  auto sym_record = [&](const std::string& label, const SymmetryReport& s, std::optional<bool> pass) {
    Json p;
    p["pair"] = label;
    p["spec"] = spec_name(spec);
    p["n"] = n;
    p["c"] = cfg.sampler.c;
    p["lhs"] = s.lhs.value;
    p["lhs_stderr"] = s.lhs.std_error;
    p["rhs"] = s.rhs.value;
    p["rhs_stderr"] = s.rhs.std_error;
    p["z"] = zscore(s.discrepancy, s.sigma_combined);
    MCEstimate e = difference(s.lhs, s.rhs);
    e.std_error = s.sigma_combined;
    e.ess = s.ess;
    ResultRecord& r = put(rec, cfg, cname(10, "symmetry/" + label), e, p);
    r.pass = pass;
  };
  SymmetryReport cs = symmetry_check(TestFunctional::cos_inner(k1), TestFunctional::sin_inner(k1), cfg.sampler.c,
                                     spec, n, opt);
  bool sym_ok = cs.discrepancy <= 3.0 * cs.sigma_combined;
  sym_record("cos_inner:1,sin_inner:1", cs, sym_ok);
  SymmetryReport cc = symmetry_check(TestFunctional::cos_inner(k1), TestFunctional::cos_inner(k1), cfg.sampler.c,
                                     spec, n, opt);
  bool sign_ok = cc.rhs.value <= 0.0;
  bool diag_ok = cc.discrepancy <= 3.0 * cc.sigma_combined;
  sym_record("cos_inner:1,cos_inner:1", cc, diag_ok);
  {
    Json p;
    p["pair"] = "cos_inner:1,cos_inner:1";
    put(rec, cfg, cname(10, "symmetry_diagonal_sign"), cc.rhs, p, sign_ok);
  }
  return {10, "", slope_ok && sym_ok && diag_ok && sign_ok,
          "slope " + num(gs.slope, 3) + " (1 +- 0.3); symmetry " + num(zscore(cs.discrepancy, cs.sigma_combined), 2) +
              " and " + num(zscore(cc.discrepancy, cc.sigma_combined), 2) + " sigma (limit 3)"};
}

// ---- 13

bool same_bytes(const std::string& a, const std::string& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
  return sa == sb;
}

CriterionResult c13(const ExperimentConfig& cfg, Recorder& rec) {
  namespace fs = std::filesystem;
  fs::path root = fs::temp_directory_path() /
                  ("scheq_repro_" + std::to_string(::getpid()) + "_" + std::to_string(cfg.seed));
  fs::remove_all(root);
  const std::vector<std::pair<std::string, int>> runs = {{"t1", 1}, {"t2", 2}, {"t2_again", 2}};
  std::vector<int> ids;
  for (int k = 1; k < kCriterionCount; ++k) ids.push_back(k);
  for (const auto& [tag, threads] : runs) {
    ExperimentConfig sub = cfg;
    sub.scale = cfg.scale * 0.01;
    sub.threads = threads;
    sub.output = (root / tag).string();
    Recorder r(sub.output, "verify_all", sub.experiment);
    run_verify_all(sub, r, ids);
    r.write();
  }
  bool pass = true;
  std::size_t files = 0;
  for (const char* suffix : {".jsonl", ".csv", "_summary.txt"}) {
    std::string base = (root / "t1" / (std::string("verify_all") + suffix)).string();
    for (std::size_t k = 1; k < runs.size(); ++k) {
      std::string other = (root / runs[k].first / (std::string("verify_all") + suffix)).string();
      bool ok = same_bytes(base, other);
      pass = pass && ok;
      ++files;
      Json p;
      p["file"] = std::string("verify_all") + suffix;
      p["reference_threads"] = 1;
      p["compared_run"] = runs[k].first;
      p["scale"] = cfg.scale * 0.01;
      put(rec, cfg, cname(13, std::string("identical/") + runs[k].first + "/" + p["file"].get<std::string>()),
          scalar(ok ? 1.0 : 0.0), p, ok);
    }
  }
  std::size_t nrec = read_jsonl((root / "t1" / "verify_all.jsonl").string()).size();
  fs::remove_all(root);
  return {13, "", pass,
          std::to_string(files) + " file comparisons over " + std::to_string(nrec) +
              " records (criteria 1-12 at scale " + num(cfg.scale * 0.01, 3) + ", 1 vs 2 threads)"};
}

}  // namespace

ResultRecord& put(Recorder& rec, const ExperimentConfig& cfg, const std::string& name, const MCEstimate& e,
                  Json params) {
  ResultRecord& r = rec.add(name, e, std::move(params));
  r.seed = cfg.seed;
  return r;
}

ResultRecord& put(Recorder& rec, const ExperimentConfig& cfg, const std::string& name, const MCEstimate& e,
                  Json params, bool pass) {
  ResultRecord& r = put(rec, cfg, name, e, std::move(params));
  r.pass = pass;
  return r;
}

MCEstimate scalar(double value, std::size_t count) {
  MCEstimate e;
  e.value = value;
  e.count = count;
  return e;
}

std::string num(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string criterion_title(int id) {
  if (id < 1 || id > kCriterionCount) throw std::out_of_range("criterion id " + std::to_string(id));
  return kTitles[id - 1];
}

std::string format_result(const CriterionResult& r) {
  char id[8];
  std::snprintf(id, sizeof id, "%02d", r.id);
  return std::string(r.pass ? "[PASS] " : "[FAIL] ") + id + " " + r.title + ": " + r.detail;
}

// ---- 6

CriterionResult criterion_invariance(const ExperimentConfig& cfg, Recorder& rec, std::vector<StationaryRun>* runs) {
  const std::vector<NonlinSpec> specs = {NonlinSpec::log(), NonlinSpec::power(2.0)};
  const std::pair<Observable, const char*> obs[] = {
      {Observable::Mode1Sq, "mode1_sq"}, {Observable::Mode2Sq, "mode2_sq"}, {Observable::Potential, "potential"}};
  bool pass = true;
  std::string detail;
  for (const auto& spec : specs) {
    StationaryOptions so;
    so.sim = cfg.sim;
    so.sim.spec = spec;
    so.sim.n = cfg.sampler.n;
    so.sim.c = cfg.sampler.c;
    so.sim.T = 0.5;
    so.sim.dt = 2e-4;
    so.sim.nonlinear = true;
    so.sim.seed = cfg.seed;
    so.replicas = cfg.scaled(cfg.sampler.replicas);
    so.stride = 250;
    so.threads = cfg.worker_count();
    so.stream = "acceptance/invariance/" + spec_name(spec);
    StationaryRun run = run_stationary(so);
    std::size_t last = run.times.size() - 1;
    double worst = 0.0;
    for (const auto& [which, name] : obs) {
      MCEstimate start = observable_at(run, which, 0);
      MCEstimate change = observable_change(run, which, 0, last);
      double tol = std::max(4.0 * change.std_error, 0.05 * std::abs(start.value));
      bool ok = std::abs(change.value) <= tol;
      pass = pass && ok;
      worst = std::max(worst, std::abs(change.value) / tol);
      Json p;
      p["spec"] = spec_name(spec);
      p["n"] = so.sim.n;
      p["c"] = so.sim.c;
      p["T"] = so.sim.T;
      p["dt"] = so.sim.dt;
      p["observable"] = name;
      p["initial"] = start.value;
      p["tolerance"] = tol;
      put(rec, cfg, cname(6, spec_name(spec) + "/" + name + "_change"), change, p, ok);
    }
    detail += (detail.empty() ? "" : "; ") + spec_name(spec) + " worst |change|/tol " + num(worst, 3);
    if (runs) runs->push_back(std::move(run));
  }
  return {6, criterion_title(6), pass, detail};
}

// ---- 11

CriterionResult criterion_contact(const ExperimentConfig& cfg, Recorder& rec, std::vector<StationaryRun>* runs) {
  const std::vector<NonlinSpec> specs = {NonlinSpec::log(), NonlinSpec::power(0.5)};
  const double eps = 0.01;
  bool pass = true;
  std::string detail;
  for (const auto& spec : specs) {
    StationaryOptions so;
    so.sim = cfg.sim;
    so.sim.spec = spec;
    so.sim.n = cfg.sampler.n;
    so.sim.c = cfg.sampler.c;
    so.sim.T = 1.0;
    so.sim.dt = 1e-3;
    so.sim.nonlinear = true;
    so.sim.seed = cfg.seed;
    so.replicas = cfg.scaled(cfg.sampler.replicas);
    so.stride = 100;
    so.eps = {0.005, eps, 0.02};
    so.threads = cfg.worker_count();
    so.stream = "acceptance/contact/" + spec_name(spec);
    StationaryRun run = run_stationary(so);
    MCEstimate s = contact_statistic(run, 1);
    double bound = contact_bound(spec, eps, so.sim.T, so.gamma);
    bool ok = s.value <= bound + 3.0 * s.std_error;
    pass = pass && ok;
    Json p;
    p["spec"] = spec_name(spec);
    p["n"] = so.sim.n;
    p["c"] = so.sim.c;
    p["eps"] = eps;
    p["T"] = so.sim.T;
    p["bound"] = bound;
    put(rec, cfg, cname(11, "contact/" + spec_name(spec)), s, p, ok);
    detail += (detail.empty() ? "" : "; ") + spec_name(spec) + " " + num(s.value, 3) + " <= " + num(bound, 4);
    if (runs) runs->push_back(std::move(run));
  }
  return {11, criterion_title(11), pass, detail};
}

// ---- 12

CriterionResult criterion_threshold(const ExperimentConfig& cfg, Recorder& rec, ThresholdOutputs* out) {
  ThresholdOutputs local;
  ThresholdOutputs& o = out ? *out : local;
  std::vector<NonlinSpec> specs;
  for (double a : cfg.sampler.alpha_grid) specs.push_back(NonlinSpec::power(a));
  specs.push_back(NonlinSpec::log());
  ReflectionOptions ro;
  ro.M = cfg.sampler.M;
  ro.seed = cfg.seed;
  ro.threads = cfg.worker_count();
  const std::vector<SpectralField> dirs = {SpectralField::mode(3, 1), SpectralField::mode(3, 2)};
  const std::vector<std::string> dnames = {"e1", "e2"};
  o.scan = threshold_scan(specs, cfg.sampler.n_grid, dirs, dnames, cfg.sampler.c, cfg.scaled(cfg.sampler.count), ro);

  auto find_row = [&](const NonlinSpec& s) -> const ThresholdRow* {
    for (const auto& r : o.scan.rows)
      if (r.spec.kind == s.kind && (s.kind == NonlinKind::Log || r.spec.alpha == s.alpha)) return &r;
    return nullptr;
  };
  bool pass = true;
  std::string detail;
  struct Expect {
    NonlinSpec spec;
    bool vanishing;
  };
  const std::vector<Expect> expects = {
      {NonlinSpec::power(4.0), true}, {NonlinSpec::power(1.0), false}, {NonlinSpec::log(), false}};
  for (const auto& ex : expects) {
    const ThresholdRow* row = find_row(ex.spec);
    bool ok = false;
    double z = NAN;
    if (row) {
      const DefectEstimate& d = row->defects[0];
      z = zscore(d.estimate.value, d.estimate.std_error);
      ok = ex.vanishing ? z <= 3.0 : z >= 5.0;
      Json p;
      p["spec"] = spec_name(ex.spec);
      p["direction"] = "e1";
      p["c"] = cfg.sampler.c;
      p["expect"] = ex.vanishing ? "within 3 sigma of 0" : "at least 5 sigma from 0";
      p["z"] = z;
      p["plain"] = d.plain.value;
      p["plain_stderr"] = d.plain.std_error;
      put(rec, cfg, cname(12, "defect_e1/" + spec_name(ex.spec)), d.estimate, p, ok);
    }
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + spec_name(ex.spec) + " D(e1) " + (row ? num(z, 2) : "missing") +
              " sigma" + (ok ? "" : " (fail)");
  }
  // The second direction is reported without assertion.
  for (const auto& row : o.scan.rows) {
    const DefectEstimate& d = row.defects[1];
    Json p;
    p["spec"] = spec_name(row.spec);
    p["direction"] = "e2";
    p["c"] = cfg.sampler.c;
    p["z"] = zscore(d.estimate.value, d.estimate.std_error);
    put(rec, cfg, cname(12, "defect_e2/" + spec_name(row.spec)), d.estimate, p);
  }

  o.j_specs = {NonlinSpec::power(4.0), NonlinSpec::power(1.0)};
  const auto& ng = cfg.sampler.n_grid;
  o.j.clear();
  for (const auto& s : o.j_specs) {
    o.j.push_back(J_r_n_scan(0.5, s, ng, cfg.scaled(20000), cfg.sampler.M, cfg.seed, cfg.worker_count()));
    for (std::size_t k = 0; k < ng.size(); ++k) {
      Json p;
      p["spec"] = spec_name(s);
      p["r"] = 0.5;
      p["n"] = ng[k];
      put(rec, cfg, cname(12, "J_half/" + spec_name(s) + "/n" + std::to_string(ng[k])), o.j.back()[k], p);
    }
  }
  bool j_ok = ng.size() >= 2;
  if (j_ok) {
    const auto& j4 = o.j[0];
    bool dec = true;
    for (std::size_t k = 1; k < j4.size(); ++k) dec = dec && j4[k].value < j4[k - 1].value;
    bool half = j4.back().value < 0.5 * j4.front().value;
    Json p;
    p["spec"] = "power:4";
    p["ratio_last_first"] = j4.back().value / j4.front().value;
    put(rec, cfg, cname(12, "J_half/power:4/decreasing_below_half"), scalar(j4.back().value / j4.front().value),
        p, dec && half);
    const auto& j1 = o.j[1];
    double prev = j1[j1.size() - 2].value;
    double rel = std::abs(j1.back().value - prev) / prev;
    bool plateau = rel <= 0.1;
    Json q;
    q["spec"] = "power:1";
    q["tolerance"] = 0.1;
    put(rec, cfg, cname(12, "J_half/power:1/plateau_relative_step"), scalar(rel), q, plateau);
    j_ok = dec && half && plateau;
    detail += "; J alpha=4 " + num(j4.front().value, 3) + " -> " + num(j4.back().value, 3) + ", alpha=1 last step " +
              num(100.0 * rel, 2) + "%";
  }
  pass = pass && j_ok;
  return {12, criterion_title(12), pass, detail};
}

CriterionResult run_criterion(int id, const ExperimentConfig& cfg, Recorder& rec) {
  CriterionResult r;
  switch (id) {
    case 1: r = c1(cfg, rec); break;
    case 2: r = c2(cfg, rec); break;
    case 3: r = c3(cfg, rec); break;
    case 4: r = c4(cfg, rec); break;
    case 5: r = c5(cfg, rec); break;
    case 6: r = criterion_invariance(cfg, rec); break;
    case 7: r = c7(cfg, rec); break;
    case 8: r = c8(cfg, rec); break;
    case 9: r = c9(cfg, rec); break;
    case 10: r = c10(cfg, rec); break;
    case 11: r = criterion_contact(cfg, rec); break;
    case 12: r = criterion_threshold(cfg, rec); break;
    case 13: r = c13(cfg, rec); break;
    default: throw std::out_of_range("criterion id " + std::to_string(id));
  }
  r.id = id;
  r.title = criterion_title(id);
  return r;
}

bool run_verify_all(const ExperimentConfig& cfg, Recorder& rec, const std::vector<int>& only, std::ostream* progress) {
  std::vector<int> ids = only;
  if (ids.empty())
    for (int k = 1; k <= kCriterionCount; ++k) ids.push_back(k);
  bool all = true;
  for (int id : ids) {
    auto t0 = std::chrono::steady_clock::now();
    CriterionResult r = run_criterion(id, cfg, rec);
    rec.timing(cname(id, "wall"), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    std::string line = format_result(r);
    rec.note(line);
    if (progress) *progress << line << std::endl;
    all = all && r.pass;
  }
  std::string tail = all ? "verify-all: PASS" : "verify-all: FAIL";
  rec.note(tail);
  if (progress) *progress << tail << std::endl;
  return all;
}

}  // namespace scheq::harness
