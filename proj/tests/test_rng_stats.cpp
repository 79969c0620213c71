#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "scheq/parallel.hpp"
#include "scheq/rng.hpp"
#include "scheq/stats.hpp"

using namespace scheq;

TEST_CASE("streams are reproducible and keyed") {
  Stream a(7, "x", 3), b(7, "x", 3), c(7, "x", 4), d(7, "y", 3);
  double va = a.normal();
  CHECK(va == b.normal());
  CHECK(va != c.normal());
  CHECK(va != d.normal());
  for (int i = 0; i < 1000; ++i) {
    double u = a.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal draws have unit variance") {
  Stream s(1, "variance", 0);
  std::vector<double> x(200000);
  for (double& v : x) v = s.normal() * s.normal();
  // E[(XY)^2] = 1 for independent standard normals
  for (double& v : x) v *= v;
  MCEstimate e = plain_mean(x);
  CHECK(std::abs(e.value - 1.0) < 4.0 * e.std_error);
}

TEST_CASE("plain and weighted means") {
  std::vector<double> x = {1, 2, 3, 4};
  MCEstimate e = plain_mean(x);
  CHECK(e.value == doctest::Approx(2.5));
  CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  Weights w({0.0, std::log(3.0), -std::numeric_limits<double>::infinity(), 0.0});
  CHECK(w.nonzero() == 3);
  CHECK(w.ess() == doctest::Approx(25.0 / 11.0));
  CHECK(weighted_mean(w, x).value == doctest::Approx((1 + 6 + 4) / 5.0));
  MCEstimate raw = w.raw_mean();
  CHECK(raw.value == doctest::Approx(5.0 / 4.0));
}

TEST_CASE("weighted difference of identical weightings is zero") {
  Weights w({0.1, -0.3, 0.7});
  std::vector<double> x = {1.0, 5.0, -2.0};
  MCEstimate d = weighted_difference(w, x, w, x);
  CHECK(d.value == doctest::Approx(0.0));
}

TEST_CASE("distribution helpers") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
  CHECK(kolmogorov_tail(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-9));
  CHECK(kolmogorov_tail(1.36) == doctest::Approx(0.0494).epsilon(1e-2));
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  for (int q : {8, 16, 32, 64}) {
    std::vector<double> x, w;
    gauss_legendre_unit(q, x, w);
    double s = 0.0, s0 = 0.0;
    for (int i = 0; i < q; ++i) {
      s += w[i] * std::pow(x[i], 7);
      s0 += w[i];
    }
    CHECK(s == doctest::Approx(1.0 / 8.0).epsilon(1e-13));
    CHECK(s0 == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("KS of a sample against its own law") {
  Stream s(3, "ks", 0);
  std::vector<double> x(20000), w(20000, 1.0);
  for (double& v : x) v = s.normal();
  KSResult r = weighted_ks(x, w, normal_cdf);
  CHECK(r.p_value > 0.001);
  CHECK(r.effective_n == doctest::Approx(20000.0));
  for (double& v : x) v += 0.1;
  CHECK(weighted_ks(x, w, normal_cdf).p_value < 1e-6);
}

TEST_CASE("pairwise sums and parallel_for are thread-count independent") {
  std::vector<double> v(100003);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (1.0 + static_cast<double>(i));
  std::vector<double> a(v.size()), b(v.size());
  parallel_for(v.size(), 1, [&](std::size_t i) { a[i] = std::sin(v[i]); });
  parallel_for(v.size(), 4, [&](std::size_t i) { b[i] = std::sin(v[i]); });
  CHECK(pairwise_sum(a) == pairwise_sum(b));
  CHECK(pairwise_sum(std::vector<double>{1, 2, 3}) == 6.0);
  CHECK_THROWS(parallel_for(10, 2, [](std::size_t i) {
    if (i == 7) throw std::runtime_error("x");
  }));
}
