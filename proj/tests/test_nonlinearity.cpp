#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "scheq/nonlinearity.hpp"

using namespace scheq;

namespace {

const std::vector<NonlinSpec> kSpecs = {NonlinSpec::log(), NonlinSpec::power(0.5), NonlinSpec::power(1.0),
                                        NonlinSpec::power(2.0), NonlinSpec::power(3.0), NonlinSpec::power(4.0)};

}

TEST_CASE("drift values") {
  CHECK(f_reg(NonlinSpec::log(), 2, 0.0) == doctest::Approx(std::log(2.0)));
  CHECK(f_reg(NonlinSpec::log(), 2, -5.0) == doctest::Approx(std::log(2.0)));
  CHECK(f_reg(NonlinSpec::power(2.0), 4, -1.0) == doctest::Approx(16.0));
  CHECK(f_reg(NonlinSpec::power(0.5), 1, 3.0) == doctest::Approx(0.5));
  CHECK(std::isinf(f_singular(NonlinSpec::log(), 0.0)));
  CHECK(f_singular(NonlinSpec::power(3.0), 2.0) == doctest::Approx(0.125));
  CHECK_THROWS_AS(f_reg(NonlinSpec::log(), 0, 1.0), std::invalid_argument);
}

TEST_CASE("antiderivatives differentiate to minus the drift") {
  const double h = 1e-6;
  for (const auto& s : kSpecs) {
    for (double x : {0.05, 0.3, 1.0, 2.5}) {
      double d = (F_anti(s, x + h) - F_anti(s, x - h)) / (2 * h);
      CHECK(d == doctest::Approx(-f_singular(s, x)).epsilon(1e-6));
    }
    for (int n : {1, 4, 32}) {
      for (double x : {-2.0, -0.1, 0.05, 0.7, 3.0}) {
        double d = (F_reg_anti(s, n, x + h) - F_reg_anti(s, n, x - h)) / (2 * h);
        CHECK(d == doctest::Approx(-f_reg(s, n, x)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("antiderivative constants and limits") {
  CHECK(F_anti(NonlinSpec::log(), 0.0) == 1.0);
  CHECK(F_anti(NonlinSpec::log(), 1.0) == doctest::Approx(0.0));
  CHECK(std::isinf(F_anti(NonlinSpec::power(2.0), 0.0)));
  CHECK(std::isinf(F_anti(NonlinSpec::power(1.0), 0.0)));
  CHECK(F_anti(NonlinSpec::power(0.5), 0.0) == 0.0);
  CHECK(std::isinf(F_anti(NonlinSpec::log(), -0.1)));
  for (const auto& s : kSpecs)
    for (double x : {0.2, 1.0, 4.0})
      CHECK(F_reg_anti(s, 1000000, x) == doctest::Approx(F_anti(s, x)).epsilon(1e-4));
}

TEST_CASE("regularized potential is nonnegative where expected") {
  for (int n : {1, 8, 128})
    for (double x = -3.0; x <= 5.0; x += 0.01) {
      CHECK(F_reg_anti(NonlinSpec::log(), n, x) >= 0.0);
      if (x >= 0.0) CHECK(F_reg_anti(NonlinSpec::power(2.0), n, x) >= 0.0);
    }
}

TEST_CASE("Lipschitz constants bound the drift slope") {
  CHECK(lipschitz(NonlinSpec::log(), 8) == 8.0);
  CHECK(lipschitz(NonlinSpec::power(2.0), 8) == 1024.0);
  for (const auto& s : kSpecs)
    for (int n : {1, 8}) {
      double L = lipschitz(s, n), worst = 0.0;
      for (double x = -1.0; x < 3.0; x += 1e-3)
        worst = std::max(worst, std::abs(f_reg(s, n, x + 1e-3) - f_reg(s, n, x)) / 1e-3);
      CHECK(worst <= L * (1 + 1e-9));
      CHECK(worst >= 0.9 * L);
    }
}

TEST_CASE("potentials on the grid") {
  GridField c(16, 2.0);
  CHECK(potential_U(NonlinSpec::log(), c) == doctest::Approx(2 * std::log(2.0) - 1.0));
  CHECK(potential_U_reg(NonlinSpec::power(2.0), 4, c) == doctest::Approx(1.0 / 2.25));
  GridField neg(16, 1.0);
  neg[3] = -1e-9;
  CHECK(std::isinf(potential_U(NonlinSpec::log(), neg)));
  CHECK(half_potential_reg(NonlinSpec::log(), 4, c) == doctest::Approx(0.5 * potential_U_reg(NonlinSpec::log(), 4, c)));
  CHECK_THROWS_AS(half_potential_reg(NonlinSpec::log(), 4, GridField(15, 1.0)), std::invalid_argument);
}

TEST_CASE("spec parsing") {
  CHECK(parse_spec("log").kind == NonlinKind::Log);
  NonlinSpec p = parse_spec("power:2.5");
  CHECK(p.kind == NonlinKind::Power);
  CHECK(p.alpha == 2.5);
  CHECK(parse_spec(p.label()).alpha == 2.5);
  CHECK_THROWS_AS(parse_spec("power:0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_spec("power:2x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_spec("exp"), std::invalid_argument);
}
