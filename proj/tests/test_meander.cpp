#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "scheq/meander.hpp"

using namespace scheq;

TEST_CASE("path interpolation") {
  MeanderPath p;
  p.times = {0.0, 0.5, 1.0};
  p.values = {0.0, 1.0, 3.0};
  CHECK(p.value_at(0.5) == 1.0);
  CHECK(p.value_at(0.75) == doctest::Approx(2.0));
  CHECK(p.endpoint() == 3.0);
}

TEST_CASE("Imhof weights have unit mean and give the Rayleigh endpoint") {
  const std::size_t count = 50000;
  std::vector<double> lw(count), end(count);
  for (std::size_t i = 0; i < count; ++i) {
    Stream r(1, "test/imhof", i);
    MeanderPath m = sample_meander(5, r);
    REQUIRE(m.times.size() == 5);
    REQUIRE(m.values[0] == 0.0);
    for (std::size_t k = 1; k < 5; ++k) REQUIRE(m.values[k] > 0.0);
    lw[i] = std::log(m.weight);
    end[i] = m.endpoint();
  }
  Weights w(lw);
  MCEstimate raw = w.raw_mean();
  CHECK(std::abs(raw.value - 1.0) < 4 * raw.std_error);
  MCEstimate e = weighted_mean(w, end);
  CHECK(std::abs(e.value - std::sqrt(std::numbers::pi / 2)) < 4 * e.std_error);
}

TEST_CASE("rejection oracle stays positive") {
  std::vector<double> end(20000);
  for (std::size_t i = 0; i < end.size(); ++i) {
    Stream r(2, "test/rejection", i);
    std::size_t trials = 0;
    MeanderPath m = sample_meander_rejection(9, r, &trials);
    REQUIRE(trials >= 1);
    for (std::size_t k = 1; k < m.values.size(); ++k) REQUIRE(m.values[k] > 0.0);
    CHECK(m.weight == 1.0);
    end[i] = m.endpoint();
  }
  MCEstimate e = plain_mean(end);
  CHECK(std::abs(e.value - std::sqrt(std::numbers::pi / 2)) < 4 * e.std_error);
  Stream r(2, "test/rejection", 0);
  CHECK_THROWS_AS(sample_meander_rejection(1, r), std::invalid_argument);
}

TEST_CASE("arcsine law moments") {
  std::vector<double> a(40000), b(40000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    Stream r(3, "test/arcsine", i);
    a[i] = sample_arcsine(r);
    b[i] = a[i] * a[i];
  }
  MCEstimate m1 = plain_mean(a), m2 = plain_mean(b);
  CHECK(std::abs(m1.value - 0.5) < 4 * m1.std_error);
  CHECK(std::abs(m2.value - 0.375) < 4 * m2.std_error);
}

TEST_CASE("concatenated paths") {
  Stream r(4, "test/concat", 0);
  ConcatPath u = sample_U_r(0.3, 64, r);
  CHECK(u.r == 0.3);
  REQUIRE(u.path.size() == 64);
  for (double v : u.path.values) CHECK(v >= 0.0);
  ConcatPath v = build_V_r(0.3, u);
  CHECK(v.path[10] == doctest::Approx(u.path[10] - std::sqrt(0.3) * u.m_end));
  ConcatPath t = sample_T_r(0.2, 64, r);
  CHECK(t.path.size() == 32);
  CHECK_THROWS(sample_T_r(0.7, 64, r));
  CHECK_THROWS(sample_T_r(0.2, 63, r));
}

TEST_CASE("m functional and the half-interval representation") {
  CHECK(m_functional(std::vector<double>(8, 1.5), 1.5) == doctest::Approx(1.5));
  const std::size_t count = 20000;
  std::vector<double> d(count);
  for (std::size_t i = 0; i < count; ++i) {
    Stream r(5, "test/half", i);
    ConcatPath p = sample_half_representation(2.0, 32, r);
    double m = m_functional(p.path.values, p.end_value) - 2.0;
    d[i] = m * m;
  }
  MCEstimate e = plain_mean(d);
  CHECK(std::abs(e.value - 1.0 / 24.0) < 4 * e.std_error);
}

TEST_CASE("bandwidth and kernel estimates") {
  std::vector<double> x(10000), lw(10000, 0.0);
  Stream r(6, "test/kde", 0);
  for (double& v : x) v = r.normal();
  double bw = silverman_bandwidth(x, Weights(lw));
  CHECK(bw == doctest::Approx(0.9 * std::pow(10000.0, -0.2)).epsilon(0.05));
  UrEnsemble e = sample_U_r_ensemble(0.5, 2000, 32, 7, stream_key("test/ur"), 1);
  KDEConditional k = kde_conditional(e, 1.0, [](const GridField&) { return 1.0; });
  CHECK(k.value.value > 0.0);
  CHECK(k.bandwidth > 0.0);
  CHECK(k.kernel_ess > 1.0);
}

TEST_CASE("J uses common samples across n") {
  auto scan = J_r_n_scan(0.5, NonlinSpec::power(4.0), {2, 8}, 500, 32, 3);
  MCEstimate one = J_r_n(0.5, NonlinSpec::power(4.0), 8, 500, 32, 3);
  CHECK(one.value == scan[1].value);
  CHECK(scan[1].value < scan[0].value);
}
