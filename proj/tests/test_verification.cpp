#include <doctest.h>

#include <cmath>
#include <numbers>

#include "scheq/verification.hpp"

using namespace scheq;

namespace {

SpectralField base_point() {
  SpectralField x(64);
  x[0] = 2.0;
  x[1] = 0.5;
  x[2] = 0.3;
  return x;
}

}  // namespace

TEST_CASE("directional derivatives") {
  const std::size_t M = 64;
  SpectralField k = SpectralField::mode(8, 2);
  GridField x = to_grid(base_point(), M), h = to_grid(SpectralField::mode(8, 3, 0.7), M);
  h[5] += 0.2;
  for (TestFunctional phi : {TestFunctional::cos_inner(k), TestFunctional::sin_inner(k), TestFunctional::exp_neg_sq(),
                             TestFunctional::constant_fn(2.0)}) {
    phi.bind(M);
    GridField xp = x, xm = x;
    const double e = 1e-6;
    for (std::size_t j = 0; j < M; ++j) {
      xp[j] += e * h[j];
      xm[j] -= e * h[j];
    }
    double fd = (phi(xp) - phi(xm)) / (2 * e);
    CHECK(directional_derivative(phi, x, h) == doctest::Approx(fd).epsilon(1e-6));
  }
  TestFunctional custom = TestFunctional::from_function("first", [](const GridField& y) { return y[0] * y[0]; });
  CHECK(directional_derivative(custom, x, h) == doctest::Approx(2 * x[0] * h[0]).epsilon(1e-5));
}

TEST_CASE("cylinder structure") {
  TestFunctional phi = TestFunctional::cos_inner(SpectralField::mode(8, 1));
  phi.bind(128);
  GridField x = to_grid(base_point(), 128);
  CHECK(phi.is_cylinder());
  CHECK(phi.inner_k(x) == doctest::Approx(0.5));
  double g, g1, g2;
  phi.cylinder_derivatives(x, g, g1, g2);
  CHECK(g == doctest::Approx(std::cos(0.5)));
  CHECK(g1 == doctest::Approx(-std::sin(0.5)));
  CHECK(g2 == doctest::Approx(-std::cos(0.5)));
  CHECK_FALSE(TestFunctional::exp_neg_sq().is_cylinder());
}

TEST_CASE("generator values") {
  auto [re, im] = generator_apply(SpectralField::mode(64, 1), base_point(), NonlinSpec::log(), 4, 128);
  CHECK(re == doctest::Approx(0.07963923183063587).epsilon(1e-10));
  CHECK(im == doctest::Approx(-2.5710982162908085).epsilon(1e-10));
  TestFunctional phi = TestFunctional::cos_inner(SpectralField::mode(8, 1));
  phi.bind(128);
  double L = generator_cylinder(phi, to_grid(base_point(), 128), NonlinSpec::log(), 4);
  CHECK(L == doctest::Approx(7.838546977793915).epsilon(1e-10));
}

TEST_CASE("generator quotient converges at first order") {
  GeneratorSlope s = generator_slope(SpectralField::mode(64, 1), base_point(), NonlinSpec::log(), 4,
                                     {1e-3, 5e-4, 2.5e-4}, 4000, 128, 2);
  REQUIRE(s.rows.size() == 3);
  CHECK(s.slope > 0.7);
  CHECK(s.slope < 1.3);
}

TEST_CASE("field evaluation") {
  SpectralField h = SpectralField::mode(4, 0, 3.0);
  h[2] = 1.0;
  CHECK(eval_field(h, 0.25) == doctest::Approx(3.0 + std::sqrt(2.0) * std::cos(std::numbers::pi / 2)));
  CHECK(eval_field(h, 0.0, true) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("regularized integration by parts closes") {
  IBPOptions o;
  o.count = 20000;
  o.M = 64;
  o.seed = 5;
  IBPReport r = ibp_gibbs_reg(TestFunctional::cos_inner(SpectralField::mode(8, 1)), SpectralField::mode(8, 2), 2.0,
                              NonlinSpec::log(), 4, o);
  CHECK(r.closes(4.0));
  CHECK_FALSE(r.degenerate);
  CHECK(r.boundary_profile.size() == 64);
}
