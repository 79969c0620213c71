#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

#include "scheq/dynamics.hpp"
#include "scheq/measures.hpp"

using namespace scheq;

TEST_CASE("step coefficients") {
  SimConfig c;
  c.dt = 0.01;
  c.nonlinear = false;
  Stepper s(c);
  CHECK(s.decay(0) == 1.0);
  CHECK(s.decay(1) == doctest::Approx(0.614439102875969).epsilon(1e-14));
  CHECK(linear_noise_variance(1, 0.01) == doctest::Approx(0.0630688489184298).epsilon(1e-14));
  CHECK(s.noise_sd(0) == 0.0);
  CHECK(s.noise_sd(1) * s.noise_sd(1) == doctest::Approx(0.0630688489184298).epsilon(1e-14));
}

TEST_CASE("configuration validation") {
  SimConfig c;
  c.spec = NonlinSpec::power(2.0);
  c.n = 8;
  c.dt = 1e-3;  // dt * 1024 > 0.5
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.nonlinear = false;
  CHECK_NOTHROW(c.validate());
  c.M = 32;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  SimConfig d;
  d.T = 0.1;
  d.dt = 1e-3;
  CHECK(d.steps() == 100);
}

TEST_CASE("one deterministic step matches the direct formula") {
  SimConfig c;
  c.N = 8;
  c.M = 16;
  c.dt = 1e-3;
  c.spec = NonlinSpec::log();
  c.n = 4;
  std::vector<double> a = {0.3, 0.2, -0.4, 0.1, 0.0, 0.05, 0.0, -0.02};
  std::vector<double> a0 = a;
  Stepper s(c);
  s.step(a, nullptr);
  const double pi = std::numbers::pi;
  for (std::size_t i = 1; i < c.N; ++i) {
    double fc = 0.0;
    for (std::size_t j = 0; j < c.M; ++j) {
      double th = (j + 0.5) / c.M, x = 0.0;
      for (std::size_t k = 0; k < c.N; ++k) x += a0[k] * (k == 0 ? 1.0 : std::sqrt(2.0) * std::cos(k * pi * th));
      fc += f_reg(c.spec, c.n, x) * std::sqrt(2.0) * std::cos(i * pi * th) / c.M;
    }
    double k2 = (i * pi) * (i * pi);
    double expect = std::exp(-0.5 * c.dt * k2 * k2) * (a0[i] + 0.5 * c.dt * k2 * fc);
    CHECK(a[i] == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(a[0] == a0[0]);
}

TEST_CASE("mean is conserved bit for bit") {
  SimConfig c;
  c.spec = NonlinSpec::power(1.0);
  c.n = 8;
  c.dt = 5e-4;
  Stream init(2, "test/mass", 0), rng(2, "test/mass/noise", 0);
  SpectralField x0 = sample_mu_c_modes(1.5, c.N, init);
  Stepper s(c);
  std::vector<double> a = x0.coeffs;
  for (int k = 0; k < 500; ++k) {
    s.step(a, rng);
    REQUIRE(std::memcmp(&a[0], &x0.coeffs[0], sizeof(double)) == 0);
  }
}

TEST_CASE("trajectories are reproducible") {
  SimConfig c;
  c.T = 0.01;
  SpectralField x0 = SpectralField::mode(c.N, 0, 2.0);
  Stream r1(9, "test/traj", 0), r2(9, "test/traj", 0);
  Trajectory a = simulate(x0, c, r1, 10), b = simulate(x0, c, r2, 10);
  REQUIRE(a.states.size() == 11);
  CHECK(a.times.back() == doctest::Approx(0.01));
  for (std::size_t k = 0; k < a.states.size(); ++k) CHECK(a.states[k].coeffs == b.states[k].coeffs);
}

TEST_CASE("coupled runs need equal means and contract") {
  SimConfig c;
  c.T = 0.02;
  SpectralField x0 = SpectralField::mode(c.N, 0, 2.0), y0 = x0;
  y0[1] = 0.3;
  y0[3] = -0.2;
  Stream rng(4, "test/coupled", 0);
  auto [tx, ty] = coupled_simulate(x0, y0, c, rng);
  double prev = INFINITY;
  for (std::size_t k = 0; k < tx.states.size(); ++k) {
    SpectralField w(c.N);
    for (std::size_t i = 0; i < c.N; ++i) w[i] = tx.states[k][i] - ty.states[k][i];
    double d = norm_gamma(-1.0, w).seminorm;
    CHECK(d <= prev);
    prev = d;
  }
  y0[0] = 2.5;
  CHECK_THROWS_AS(coupled_simulate(x0, y0, c, rng), std::invalid_argument);
}
