#include <doctest.h>

#include <cmath>
#include <limits>

#include "scheq/measures.hpp"
#include "scheq/parallel.hpp"

using namespace scheq;

TEST_CASE("Gaussian samples have the prescribed mean and increments") {
  Stream s(1, "test/mu", 0);
  GridField y = sample_mu_c(1.7, 64, s);
  CHECK(grid_mean(y) == doctest::Approx(1.7).epsilon(1e-13));
  const std::size_t M = 16, count = 40000;
  std::vector<double> first(count), inc(count);
  for (std::size_t i = 0; i < count; ++i) {
    Stream r(1, "test/brownian", i);
    GridField b = sample_brownian(M, r);
    first[i] = b[0] * b[0];
    inc[i] = (b[5] - b[4]) * (b[5] - b[4]);
  }
  MCEstimate a = plain_mean(first), d = plain_mean(inc);
  CHECK(std::abs(a.value - 0.5 / M) < 4 * a.std_error);
  CHECK(std::abs(d.value - 1.0 / M) < 4 * d.std_error);
}

TEST_CASE("mode sampler variances") {
  const std::size_t count = 40000;
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    Stream r(2, "test/modes", i);
    SpectralField a = sample_mu_c_modes(3.0, 8, r);
    REQUIRE(a[0] == 3.0);
    v[i] = a[2] * a[2];
  }
  MCEstimate e = plain_mean(v);
  CHECK(std::abs(e.value - 1.0 / (4 * M_PI * M_PI)) < 4 * e.std_error);
}

TEST_CASE("K membership rules") {
  GridField x(8, 1.0);
  CHECK(log_k_membership(x, KRule::Grid) == 0.0);
  double lb = log_k_membership(x, KRule::Bridge);
  double expect = 7 * std::log1p(-std::exp(-2.0 * 8)) + 2 * std::log(std::erf(std::sqrt(8.0)));
  CHECK(lb == doctest::Approx(expect));
  x[3] = -0.01;
  CHECK(log_k_membership(x, KRule::Grid) == -std::numeric_limits<double>::infinity());
  CHECK(log_k_membership(x, KRule::Bridge) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("bridge rule is consistent across grid refinements") {
  // Both weights are conditional survival probabilities of one continuous path,
  // so their means agree. Coarse midpoints (j+1/2)/8 sit at fine indices 63 j + 31.
  const std::size_t Mc = 8, Mf = 504, count = 20000;
  std::vector<double> wc(count), wf(count), d(count);
  parallel_for(count, 1, [&](std::size_t i) {
    Stream r(3, "test/bridge", i);
    GridField b = sample_mu_c(0.6, Mf, r);
    GridField c(Mc);
    for (std::size_t j = 0; j < Mc; ++j) c[j] = b[63 * j + 31];
    wc[i] = std::exp(log_k_membership(c, KRule::Bridge));
    wf[i] = std::exp(log_k_membership(b, KRule::Bridge));
    d[i] = wc[i] - wf[i];
  });
  MCEstimate diff = plain_mean(d), coarse = plain_mean(wc);
  CHECK(coarse.value > 0.05);
  CHECK(std::abs(diff.value) < 4 * diff.std_error);
}

TEST_CASE("weights and expectations") {
  SamplerOptions opt;
  opt.M = 32;
  opt.stream = "test/nu";
  Ensemble e = sample_nu_reg(2.0, NonlinSpec::log(), 8, 4000, opt);
  Weights w = weights_of(e);
  CHECK(w.ess() > 100.0);
  CHECK(w.ess() <= 4000.0);
  MCEstimate one = expectation(e, [](const GridField&) { return 1.0; });
  CHECK(one.value == doctest::Approx(1.0));
  MCEstimate z = estimate_Z(2.0, NonlinSpec::log(), 8, 4000, opt);
  CHECK(z.value > 0.0);
  CHECK(z.value <= 1.0);
  Ensemble lim = sample_nu_limit(2.0, NonlinSpec::log(), 4000, opt, KRule::Grid);
  for (const auto& s : lim)
    if (std::isfinite(s.log_weight))
      for (double v : s.field.values) REQUIRE(v > 0.0);
}

TEST_CASE("Metropolis agrees with importance sampling") {
  SamplerOptions opt;
  opt.M = 32;
  opt.stream = "test/importance";
  Ensemble e = sample_nu_reg(2.0, NonlinSpec::power(2.0), 4, 20000, opt);
  MCEstimate is = expectation(e, exp_neg_sq);
  opt.stream = "test/metropolis";
  double acc = 0.0;
  MCEstimate mh = metropolis_nu_reg(2.0, NonlinSpec::power(2.0), 4, exp_neg_sq, 1000, 32, 100, opt, &acc);
  CHECK(acc > 0.0);
  CHECK(acc <= 1.0);
  CHECK(std::abs(mh.value - is.value) < 4 * std::hypot(mh.std_error, is.std_error));
}

TEST_CASE("built-in functionals") {
  GridField x(4, 0.5);
  CHECK(exp_neg_sq(x) == doctest::Approx(std::exp(-0.25)));
  x[2] = -3.0;
  CHECK(clipped_min(x) == -1.0);
  CHECK(clipped_min(GridField(4, 0.3)) == doctest::Approx(0.3));
}

TEST_CASE("weak convergence scan layout") {
  SamplerOptions opt;
  opt.M = 32;
  opt.stream = "test/scan";
  auto rows = weak_convergence_scan(2.0, NonlinSpec::log(), {{"e", exp_neg_sq}}, {2, 8}, 2000, opt, KRule::Grid);
  REQUIRE(rows.size() == 3);
  int limits = 0;
  for (const auto& r : rows)
    if (r.n == 0) {
      ++limits;
      CHECK(r.gap.value == 0.0);
    }
  CHECK(limits == 1);
}
