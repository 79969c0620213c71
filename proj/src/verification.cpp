#include "scheq/verification.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "scheq/dynamics.hpp"
#include "scheq/meander.hpp"
#include "scheq/parallel.hpp"

namespace scheq {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

GridField grid_of(const SpectralField& h, std::size_t M) { return to_grid(h, M); }

double quad(double a, double b) { return std::sqrt(a * a + b * b); }
double quad(double a, double b, double c) { return std::sqrt(a * a + b * b + c * c); }

void finish(IBPReport& r) {
  double rhs = r.rhs_bulk.value + r.rhs_boundary.value;
  r.discrepancy = std::abs(r.lhs.value - rhs);
  r.sigma_combined = quad(r.lhs.std_error, r.rhs_bulk.std_error, r.rhs_boundary.std_error);
}

// int_0^1 h(r) G(r) dr / (pi sqrt(r(1-r))) = int_0^1 h(r(u)) G(r(u)) du with
// r = sin^2(pi u / 2); G at each node from an Imhof-weighted U_r ensemble.
struct NodeValue {
  double value = 0.0;
  double std_error = 0.0;
  double bandwidth = 0.0;
  double kernel_ess = 0.0;
};

struct BoundaryResult {
  MCEstimate estimate;
  double mean_bandwidth = 0.0;
  double min_kernel_ess = std::numeric_limits<double>::infinity();
};

BoundaryResult meander_boundary(const SpectralField& h, bool zero_mean, const IBPOptions& opt,
                                const std::string& stream,
                                const std::function<NodeValue(const UrEnsemble&)>& node_fn) {
  std::vector<double> us, ws;
  gauss_legendre_unit(opt.nodes, us, ws);
  BoundaryResult out;
  double total = 0.0, var = 0.0, bw = 0.0;
  for (std::size_t q = 0; q < us.size(); ++q) {
    double s = std::sin(0.5 * kPi * us[q]);
    double r = s * s;
    double hr = eval_field(h, r, zero_mean);
    UrEnsemble e = sample_U_r_ensemble(r, opt.boundary_count, opt.M, opt.seed,
                                       stream_key(stream + "/node" + std::to_string(q)), opt.threads);
    NodeValue nv = node_fn(e);
    total += ws[q] * hr * nv.value;
    var += (ws[q] * hr * nv.std_error) * (ws[q] * hr * nv.std_error);
    bw += nv.bandwidth;
    if (nv.kernel_ess > 0.0) out.min_kernel_ess = std::min(out.min_kernel_ess, nv.kernel_ess);
  }
  out.estimate.value = total;
  out.estimate.std_error = std::sqrt(var);
  out.estimate.count = us.size() * opt.boundary_count;
  out.estimate.ess = static_cast<double>(out.estimate.count);
  out.estimate.seed = opt.seed;
  out.mean_bandwidth = bw / static_cast<double>(us.size());
  if (!std::isfinite(out.min_kernel_ess)) out.min_kernel_ess = 0.0;
  return out;
}

MCEstimate negate(MCEstimate e) {
  e.value = -e.value;
  return e;
}

}  // namespace

double eval_field(const SpectralField& h, double r, bool zero_mean) {
  double s = 0.0;
  for (std::size_t i = zero_mean ? 1 : 0; i < h.size(); ++i)
    if (h[i] != 0.0) s += h[i] * basis_eval(i, r);
  return s;
}

TestFunctional TestFunctional::constant_fn(double v) {
  TestFunctional t;
  t.kind = FunctionalKind::Const;
  t.constant = v;
  t.name = "const";
  return t;
}

TestFunctional TestFunctional::cos_inner(const SpectralField& k) {
  TestFunctional t;
  t.kind = FunctionalKind::CosInner;
  t.k = k;
  t.name = "cos_inner";
  return t;
}

TestFunctional TestFunctional::sin_inner(const SpectralField& k) {
  TestFunctional t;
  t.kind = FunctionalKind::SinInner;
  t.k = k;
  t.name = "sin_inner";
  return t;
}

TestFunctional TestFunctional::exp_neg_sq() {
  TestFunctional t;
  t.kind = FunctionalKind::ExpNegSq;
  t.name = "exp_neg_sq";
  return t;
}

TestFunctional TestFunctional::from_function(std::string name, std::function<double(const GridField&)> fn) {
  TestFunctional t;
  t.kind = FunctionalKind::Custom;
  t.custom = std::move(fn);
  t.name = std::move(name);
  return t;
}

TestFunctional& TestFunctional::bind(std::size_t M) {
  if (is_cylinder() && kind != FunctionalKind::Const) kg_ = to_grid(k, M);
  return *this;
}

bool TestFunctional::is_cylinder() const {
  return kind == FunctionalKind::Const || kind == FunctionalKind::CosInner || kind == FunctionalKind::SinInner;
}

double TestFunctional::inner_k(const GridField& x) const {
  if (kg_.size() == x.size()) return grid_inner(x, kg_);
  return grid_inner(x, to_grid(k, x.size()));
}

void TestFunctional::cylinder_derivatives(const GridField& x, double& g, double& g1, double& g2) const {
  switch (kind) {
    case FunctionalKind::Const:
      g = constant;
      g1 = g2 = 0.0;
      return;
    case FunctionalKind::CosInner: {
      double s = inner_k(x);
      g = std::cos(s);
      g1 = -std::sin(s);
      g2 = -g;
      return;
    }
    case FunctionalKind::SinInner: {
      double s = inner_k(x);
      g = std::sin(s);
      g1 = std::cos(s);
      g2 = -g;
      return;
    }
    default:
      throw std::logic_error("not a cylinder functional");
  }
}

double TestFunctional::operator()(const GridField& x) const {
  switch (kind) {
    case FunctionalKind::Const:
      return constant;
    case FunctionalKind::CosInner:
      return std::cos(inner_k(x));
    case FunctionalKind::SinInner:
      return std::sin(inner_k(x));
    case FunctionalKind::ExpNegSq:
      return std::exp(-grid_inner(x, x));
    case FunctionalKind::Custom:
      return custom(x);
  }
  return 0.0;
}

double directional_derivative(const TestFunctional& phi, const GridField& x, const GridField& h) {
  switch (phi.kind) {
    case FunctionalKind::Const:
      return 0.0;
    case FunctionalKind::CosInner:
    case FunctionalKind::SinInner: {
      double g, g1, g2;
      phi.cylinder_derivatives(x, g, g1, g2);
      return g1 * phi.inner_k(h);
    }
    case FunctionalKind::ExpNegSq:
      return -2.0 * grid_inner(x, h) * std::exp(-grid_inner(x, x));
    case FunctionalKind::Custom: {
      double norm = std::sqrt(grid_inner(h, h));
      if (norm == 0.0) return 0.0;
      double eps = 1e-5 / norm;
      GridField a = x, b = x;
      for (std::size_t j = 0; j < x.size(); ++j) {
        a[j] += eps * h[j];
        b[j] -= eps * h[j];
      }
      return (phi.custom(a) - phi.custom(b)) / (2.0 * eps);
    }
  }
  return 0.0;
}

IBPReport ibp_unconditioned(TestFunctional phi, const SpectralField& h, const IBPOptions& opt) {
  phi.bind(opt.M);
  const GridField hg = grid_of(h, opt.M);
  const GridField ahg = grid_of(apply_A(h), opt.M);
  const double hbar = mean(h);
  std::vector<double> lhs(opt.count), bulk(opt.count), paired(opt.count), hit(opt.count);
  std::uint64_t key = stream_key("verification/unconditioned");
  parallel_for(opt.count, opt.threads, [&](std::size_t i) {
    Stream rng(opt.seed, key, i);
    GridField y = sample_brownian(opt.M, rng);
    double zeta = rng.normal();
    double m = grid_mean(y);
    for (double& v : y.values) v = v - m + zeta;
    double lk = log_k_membership(y, opt.rule);
    double w = lk == kNegInf ? 0.0 : std::exp(lk);
    hit[i] = w > 0.0 ? 1.0 : 0.0;
    if (w == 0.0) {
      lhs[i] = bulk[i] = paired[i] = 0.0;
      return;
    }
    double p = phi(y);
    lhs[i] = directional_derivative(phi, y, hg) * w;
    bulk[i] = -(grid_inner(y, ahg) - zeta * hbar) * p * w;
    paired[i] = lhs[i] - bulk[i];
  });
  IBPReport r;
  r.label = "unconditioned/" + phi.name;
  r.lhs = plain_mean(lhs, opt.seed);
  r.rhs_bulk = plain_mean(bulk, opt.seed);
  r.k_fraction = pairwise_sum(hit) / static_cast<double>(opt.count);
  r.ess = static_cast<double>(opt.count);
  r.degenerate = r.k_fraction < 0.01;

  const double norm = 1.0 / std::sqrt(2.0 * kPi);
  BoundaryResult b = meander_boundary(h, false, opt, "verification/unconditioned/meander", [&](const UrEnsemble& e) {
    std::vector<double> v(e.paths.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const ConcatPath& p = e.paths[i];
      double ub = grid_mean(p.path);
      v[i] = p.weight * phi(p.path) * std::exp(-0.5 * ub * ub) * norm;
    }
    MCEstimate m = plain_mean(v);
    return NodeValue{m.value, m.std_error, 0.0, 0.0};
  });
  r.rhs_boundary = negate(b.estimate);
  r.nodes = opt.nodes;
  r.boundary_count = opt.boundary_count;
  finish(r);
  r.sigma_paired = quad(plain_mean(paired).std_error, r.rhs_boundary.std_error);
  return r;
}

IBPReport ibp_gibbs_reg(TestFunctional phi, const SpectralField& h, double c, const NonlinSpec& spec, int n,
                        const IBPOptions& opt) {
  if (!(c > 0.0)) throw std::invalid_argument("ibp_gibbs_reg needs c > 0");
  phi.bind(opt.M);
  const SpectralField ph = project_zero_mean(h);
  const GridField phg = grid_of(ph, opt.M);
  const GridField ahg = grid_of(apply_A(h), opt.M);
  const std::size_t M = opt.M;
  std::vector<double> lw(opt.count), lhs(opt.count), bulk(opt.count), bnd(opt.count), paired(opt.count);
  std::vector<double> fprof(opt.count * M);
  std::uint64_t key = stream_key("verification/gibbs_reg");
  parallel_for(opt.count, opt.threads, [&](std::size_t i) {
    Stream rng(opt.seed, key, i);
    GridField x = sample_mu_c(c, M, rng);
    lw[i] = log_weight_reg(spec, n, x);
    double p = phi(x);
    double fh = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      double f = f_reg(spec, n, x[j]);
      fprof[i * M + j] = f;
      fh += f * phg[j];
    }
    fh /= static_cast<double>(M);
    lhs[i] = directional_derivative(phi, x, phg);
    bulk[i] = -grid_inner(x, ahg) * p;
    bnd[i] = -fh * p;
    paired[i] = lhs[i] - bulk[i] - bnd[i];
  });
  Weights w(std::move(lw));
  IBPReport r;
  r.label = "gibbs_reg/" + phi.name;
  r.lhs = weighted_mean(w, lhs, opt.seed);
  r.rhs_bulk = weighted_mean(w, bulk, opt.seed);
  r.rhs_boundary = weighted_mean(w, bnd, opt.seed);
  r.ess = w.ess();
  r.degenerate = r.ess < opt.low_ess;
  finish(r);
  r.sigma_paired = weighted_mean(w, paired).std_error;
  r.boundary_profile.assign(M, 0.0);
  std::vector<double> col(opt.count);
  double sw = pairwise_sum(w.scaled());
  for (std::size_t j = 0; j < M; ++j) {
    for (std::size_t i = 0; i < opt.count; ++i) col[i] = w.scaled()[i] * fprof[i * M + j];
    r.boundary_profile[j] = pairwise_sum(col) / sw;
  }
  return r;
}

IBPReport ibp_limit(TestFunctional phi, const SpectralField& h, double c, const NonlinSpec& spec,
                    const IBPOptions& opt) {
  if (!(c > 0.0)) throw std::invalid_argument("ibp_limit needs c > 0");
  phi.bind(opt.M);
  const SpectralField ph = project_zero_mean(h);
  const GridField phg = grid_of(ph, opt.M);
  const GridField ahg = grid_of(apply_A(h), opt.M);
  const std::size_t M = opt.M;
  std::vector<double> lw(opt.count), lhs(opt.count, 0.0), bulk(opt.count, 0.0), paired(opt.count, 0.0);
  std::uint64_t key = stream_key("verification/limit");
  parallel_for(opt.count, opt.threads, [&](std::size_t i) {
    Stream rng(opt.seed, key, i);
    GridField x = sample_mu_c(c, M, rng);
    lw[i] = log_weight_limit(spec, x, opt.rule);
    if (lw[i] == kNegInf) return;
    double p = phi(x);
    double fh = 0.0;
    for (std::size_t j = 0; j < M; ++j) fh += f_singular(spec, x[j]) * phg[j];
    fh /= static_cast<double>(M);
    lhs[i] = directional_derivative(phi, x, phg);
    bulk[i] = -(grid_inner(x, ahg) + fh) * p;
    paired[i] = lhs[i] - bulk[i];
  });
  Weights w(std::move(lw));
  IBPReport r;
  r.label = "limit/" + phi.name;
  r.lhs = weighted_mean(w, lhs, opt.seed);
  r.rhs_bulk = weighted_mean(w, bulk, opt.seed);
  r.ess = w.ess();
  r.k_fraction = static_cast<double>(w.nonzero()) / static_cast<double>(opt.count);
  r.degenerate = r.ess < opt.low_ess;
  MCEstimate Z = w.raw_mean();

  BoundaryResult b = meander_boundary(h, true, opt, "verification/limit/meander", [&](const UrEnsemble& e) {
    KDEConditional k = kde_conditional(
        e, c,
        [&](const GridField& u) {
          double U = potential_U(spec, u);
          return std::isinf(U) ? 0.0 : phi(u) * std::exp(-U);
        },
        opt.bandwidth);
    return NodeValue{k.value.value, k.value.std_error, k.bandwidth, k.kernel_ess};
  });
  // Divide by Z_c; its relative error enters in quadrature.
  MCEstimate bnd = b.estimate;
  double v = bnd.value / Z.value;
  double rel = quad(bnd.value != 0.0 ? bnd.std_error / std::abs(bnd.value) : 0.0, Z.std_error / Z.value);
  r.rhs_boundary = bnd;
  r.rhs_boundary.value = -v;
  r.rhs_boundary.std_error = bnd.value != 0.0 ? std::abs(v) * rel : bnd.std_error / Z.value;
  r.bandwidth = b.mean_bandwidth;
  r.kernel_ess = b.min_kernel_ess;
  r.nodes = opt.nodes;
  r.boundary_count = opt.boundary_count;
  finish(r);
  r.sigma_paired = quad(weighted_mean(w, paired).std_error, r.rhs_boundary.std_error);
  return r;
}

CrossCheck boundary_cross_check(TestFunctional phi, const SpectralField& h, double c, const NonlinSpec& spec,
                                int n, const IBPOptions& opt) {
  if (!(c > 0.0)) throw std::invalid_argument("boundary_cross_check needs c > 0");
  phi.bind(opt.M);
  const SpectralField ph = project_zero_mean(h);
  const GridField phg = grid_of(ph, opt.M);
  const GridField ahg = grid_of(apply_A(h), opt.M);
  const std::size_t M = opt.M;
  std::vector<double> v(opt.count, 0.0);
  std::uint64_t key = stream_key("verification/cross_check");
  parallel_for(opt.count, opt.threads, [&](std::size_t i) {
    Stream rng(opt.seed, key, i);
    GridField x = sample_mu_c(c, M, rng);
    double lk = log_k_membership(x, opt.rule);
    if (lk == kNegInf) return;
    double g = std::exp(lk - potential_U_reg(spec, n, x));
    double fh = 0.0;
    for (std::size_t j = 0; j < M; ++j) fh += f_reg(spec, n, x[j]) * phg[j];
    fh /= static_cast<double>(M);
    v[i] = -(directional_derivative(phi, x, phg) + (grid_inner(x, ahg) + fh) * phi(x)) * g;
  });
  CrossCheck out;
  out.ensemble = plain_mean(v, opt.seed);
  BoundaryResult b = meander_boundary(h, true, opt, "verification/cross_check/meander", [&](const UrEnsemble& e) {
    KDEConditional k = kde_conditional(
        e, c, [&](const GridField& u) { return phi(u) * std::exp(-potential_U_reg(spec, n, u)); }, opt.bandwidth);
    return NodeValue{k.value.value, k.value.std_error, k.bandwidth, k.kernel_ess};
  });
  out.meander = b.estimate;
  out.bandwidth = b.mean_bandwidth;
  out.discrepancy = std::abs(out.ensemble.value - out.meander.value);
  out.sigma = quad(out.ensemble.std_error, out.meander.std_error);
  return out;
}

std::pair<double, double> generator_apply(const SpectralField& h, const SpectralField& x, const NonlinSpec& spec,
                                          int n, std::size_t M) {
  double a = 0.0, b = 0.0, phase = 0.0;
  for (std::size_t i = 1; i < h.size(); ++i) {
    double k2 = -eigenvalue(i);
    double xi = i < x.size() ? x[i] : 0.0;
    a += k2 * xi * h[i];
    b += h[i] * h[i] / k2;
    phase += h[i] * xi / k2;
  }
  GridField xg = to_grid(x, M);
  GridField phg = to_grid(project_zero_mean(h), M);
  double c = 0.0;
  for (std::size_t j = 0; j < M; ++j) c += f_reg(spec, n, xg[j]) * phg[j];
  c /= static_cast<double>(M);
  // psi (-b/2 + i (c - a)/2)
  double pr = std::cos(phase), pi = std::sin(phase);
  double zr = -0.5 * b, zi = 0.5 * (c - a);
  return {pr * zr - pi * zi, pr * zi + pi * zr};
}

GeneratorQuotient generator_quotient(const SpectralField& h, const SpectralField& x, const NonlinSpec& spec, int n,
                                     double dt, std::size_t count, std::size_t M, std::uint64_t seed) {
  SimConfig cfg;
  cfg.N = x.size();
  cfg.M = M;
  cfg.dt = dt;
  cfg.T = dt;
  cfg.spec = spec;
  cfg.n = n;
  cfg.c = mean(x);
  cfg.seed = seed;
  Stepper st(cfg);
  const std::size_t N = cfg.N;
  std::vector<double> g(N, 0.0);
  for (std::size_t i = 1; i < N && i < h.size(); ++i) g[i] = h[i] / (-eigenvalue(i));
  double phase = 0.0;
  for (std::size_t i = 1; i < N; ++i) phase += g[i] * x[i];

  // Exact one-step moments of the increment D = <X(dt) - x, g>.
  std::vector<double> a0 = x.coeffs;
  st.step(a0, static_cast<const double*>(nullptr));
  double mD = 0.0, vD = 0.0;
  for (std::size_t i = 1; i < N; ++i) {
    mD += g[i] * (a0[i] - x[i]);
    vD += g[i] * g[i] * st.noise_sd(i) * st.noise_sd(i);
  }
  double m2 = mD * mD + vD;

  // Second-order control variate: e^{iD} - (1 + iD - D^2/2).
  std::vector<double> yr(count), yi(count);
  std::uint64_t key = stream_key("verification/generator");
  std::vector<double> a(N);
  for (std::size_t s = 0; s < count; ++s) {
    Stream rng(seed, key, s);
    a = x.coeffs;
    st.step(a, rng);
    double D = 0.0;
    for (std::size_t i = 1; i < N; ++i) D += g[i] * (a[i] - x[i]);
    yr[s] = std::cos(D) - 1.0 + 0.5 * D * D;
    yi[s] = std::sin(D) - D;
  }
  MCEstimate er = plain_mean(yr, seed), ei = plain_mean(yi, seed);
  // E[e^{iD}] - 1
  double qr = er.value - 0.5 * m2;
  double qi = ei.value + mD;
  double pr = std::cos(phase), pim = std::sin(phase);
  GeneratorQuotient out;
  out.dt = dt;
  out.re = er;
  out.im = ei;
  out.re.value = (pr * qr - pim * qi) / dt;
  out.im.value = (pr * qi + pim * qr) / dt;
  double se = std::sqrt(er.std_error * er.std_error + ei.std_error * ei.std_error) / dt;
  out.re.std_error = se;
  out.im.std_error = se;
  auto [ar, ai] = generator_apply(h, x, spec, n, M);
  out.error = std::hypot(out.re.value - ar, out.im.value - ai);
  return out;
}

GeneratorSlope generator_slope(const SpectralField& h, const SpectralField& x, const NonlinSpec& spec, int n,
                               const std::vector<double>& dts, std::size_t count, std::size_t M,
                               std::uint64_t seed) {
  if (dts.size() < 2) throw std::invalid_argument("generator_slope needs at least two step sizes");
  GeneratorSlope out;
  std::tie(out.analytic_re, out.analytic_im) = generator_apply(h, x, spec, n, M);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (double dt : dts) {
    GeneratorQuotient q = generator_quotient(h, x, spec, n, dt, count, M, seed);
    out.rows.push_back(q);
    double lx = std::log(dt), ly = std::log(q.error);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double k = static_cast<double>(dts.size());
  out.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return out;
}

double generator_cylinder(const TestFunctional& phi, const GridField& x, const NonlinSpec& spec, int n) {
  if (!phi.is_cylinder()) throw std::invalid_argument("generator_cylinder needs a cylinder functional");
  if (phi.kind == FunctionalKind::Const) return 0.0;
  double g, g1, g2;
  phi.cylinder_derivatives(x, g, g1, g2);
  const std::size_t M = x.size();
  SpectralField ak = apply_A(phi.k);
  SpectralField a2k = apply_A(ak);
  double nak = -inner_l2(ak, phi.k);
  GridField akg = to_grid(ak, M), a2kg = to_grid(a2k, M);
  double fak = 0.0;
  for (std::size_t j = 0; j < M; ++j) fak += f_reg(spec, n, x[j]) * akg[j];
  fak /= static_cast<double>(M);
  return 0.5 * g2 * nak - 0.5 * g1 * (grid_inner(x, a2kg) + fak);
}

SymmetryReport symmetry_check(TestFunctional phi, TestFunctional psi, double c, const NonlinSpec& spec, int n,
                              const IBPOptions& opt) {
  if (!phi.is_cylinder() || !psi.is_cylinder())
    throw std::invalid_argument("symmetry_check needs cylinder functionals");
  phi.bind(opt.M);
  psi.bind(opt.M);
  double cross = 0.0;
  if (phi.kind != FunctionalKind::Const && psi.kind != FunctionalKind::Const)
    cross = -inner_l2(apply_A(phi.k), psi.k);
  std::vector<double> lw(opt.count), lhs(opt.count), rhs(opt.count);
  std::uint64_t key = stream_key("verification/symmetry");
  parallel_for(opt.count, opt.threads, [&](std::size_t i) {
    Stream rng(opt.seed, key, i);
    GridField x = sample_mu_c(c, opt.M, rng);
    lw[i] = log_weight_reg(spec, n, x);
    double a, a1, a2, b, b1, b2;
    phi.cylinder_derivatives(x, a, a1, a2);
    psi.cylinder_derivatives(x, b, b1, b2);
    lhs[i] = generator_cylinder(phi, x, spec, n) * b;
    rhs[i] = -0.5 * a1 * b1 * cross;
  });
  Weights w(std::move(lw));
  SymmetryReport r;
  r.lhs = weighted_mean(w, lhs, opt.seed);
  r.rhs = weighted_mean(w, rhs, opt.seed);
  r.discrepancy = std::abs(r.lhs.value - r.rhs.value);
  r.sigma_combined = quad(r.lhs.std_error, r.rhs.std_error);
  r.ess = w.ess();
  return r;
}

}  // namespace scheq
