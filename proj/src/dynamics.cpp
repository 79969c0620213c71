#include "scheq/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace scheq {

void SimConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
  if (N < 1) fail("N must be >= 1");
  if (M < N) fail("grid size M must be >= N");
  if (!(dt > 0.0)) fail("dt must be > 0");
  if (!(T >= 0.0)) fail("T must be >= 0");
  if (!std::isfinite(c)) fail("c must be finite");
  if (n < 1) fail("regularization level n must be >= 1");
  if (spec.kind == NonlinKind::Power && !(spec.alpha > 0.0)) fail("alpha must be > 0");
  if (nonlinear) {
    double lip = lipschitz(spec, n);
    if (dt * lip > stability_cap) {
      std::ostringstream s;
      s << "stability cap violated: dt*Lip(f^n) = " << dt * lip << " > " << stability_cap;
      fail(s.str());
    }
  }
}

std::size_t SimConfig::steps() const {
  if (T <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
}

double linear_noise_variance(std::size_t i, double dt) {
  if (i == 0) return 0.0;
  double k2 = -eigenvalue(i);
  return -std::expm1(-dt * k2 * k2) / k2;
}

Stepper::Stepper(const SimConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  decay_.resize(cfg_.N);
  noise_sd_.resize(cfg_.N);
  for (std::size_t i = 0; i < cfg_.N; ++i) {
    double k2 = -eigenvalue(i);
    decay_[i] = std::exp(-0.5 * cfg_.dt * k2 * k2);
    noise_sd_[i] = std::sqrt(linear_noise_variance(i, cfg_.dt));
  }
  grid_.resize(cfg_.M);
  fvals_.resize(cfg_.M);
  fcoef_.resize(cfg_.N);
  xi_.resize(cfg_.N > 0 ? cfg_.N - 1 : 0);
}

void Stepper::step(std::vector<double>& a, const double* xi) {
  const std::size_t N = cfg_.N;
  if (a.size() != N) throw std::invalid_argument("state size does not match N");
  to_grid(a.data(), N, grid_.data(), cfg_.M);
  if (cfg_.nonlinear) {
    for (std::size_t j = 0; j < cfg_.M; ++j) fvals_[j] = f_reg(cfg_.spec, cfg_.n, grid_[j]);
    to_spectral(fvals_.data(), cfg_.M, fcoef_.data(), N);
  }
  const double half_dt = 0.5 * cfg_.dt;
  for (std::size_t i = 1; i < N; ++i) {
    double ai = a[i];
    if (cfg_.nonlinear) ai -= half_dt * eigenvalue(i) * fcoef_[i];
    ai *= decay_[i];
    if (xi) ai += noise_sd_[i] * xi[i - 1];
    a[i] = ai;
  }
}

void Stepper::step(std::vector<double>& a, Stream& rng) {
  for (double& v : xi_) v = rng.normal();
  step(a, xi_.data());
}

SpectralField linear_step(const SpectralField& h, double dt, Stream& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  SpectralField r = h;
  for (std::size_t i = 1; i < r.size(); ++i) {
    double k2 = -eigenvalue(i);
    r[i] = std::exp(-0.5 * dt * k2 * k2) * r[i] + std::sqrt(linear_noise_variance(i, dt)) * rng.normal();
  }
  return r;
}

SpectralField step(const SpectralField& h, const SimConfig& cfg, Stream& rng) {
  SimConfig c = cfg;
  c.N = h.size();
  Stepper s(c);
  SpectralField r = h;
  s.step(r.coeffs, rng);
  return r;
}

Trajectory simulate(const SpectralField& x0, const SimConfig& cfg, Stream& rng, std::size_t stride) {
  if (x0.size() != cfg.N) throw std::invalid_argument("initial state size does not match N");
  if (stride == 0) stride = 1;
  Stepper s(cfg);
  Trajectory tr;
  tr.noise_seed = cfg.seed;
  std::vector<double> a = x0.coeffs;
  tr.times.push_back(0.0);
  tr.states.push_back(x0);
  std::size_t steps = cfg.steps();
  for (std::size_t k = 1; k <= steps; ++k) {
    s.step(a, rng);
    if (k % stride == 0 || k == steps) {
      tr.times.push_back(static_cast<double>(k) * cfg.dt);
      tr.states.emplace_back(a);
    }
  }
  return tr;
}

std::pair<Trajectory, Trajectory> coupled_simulate(const SpectralField& x0, const SpectralField& y0,
                                                   const SimConfig& cfg, Stream& rng) {
  if (x0.size() != cfg.N || y0.size() != cfg.N)
    throw std::invalid_argument("initial state size does not match N");
  if (mean(x0) != mean(y0)) throw std::invalid_argument("coupled runs need equal means");
  Stepper sx(cfg), sy(cfg);
  Trajectory tx, ty;
  tx.noise_seed = ty.noise_seed = cfg.seed;
  std::vector<double> a = x0.coeffs, b = y0.coeffs;
  std::vector<double> xi(cfg.N > 0 ? cfg.N - 1 : 0);
  tx.times.push_back(0.0);
  ty.times.push_back(0.0);
  tx.states.push_back(x0);
  ty.states.push_back(y0);
  std::size_t steps = cfg.steps();
  for (std::size_t k = 1; k <= steps; ++k) {
    for (double& v : xi) v = rng.normal();
    sx.step(a, xi.data());
    sy.step(b, xi.data());
    double t = static_cast<double>(k) * cfg.dt;
    tx.times.push_back(t);
    ty.times.push_back(t);
    tx.states.emplace_back(a);
    ty.states.emplace_back(b);
  }
  return {tx, ty};
}

}  // namespace scheq
