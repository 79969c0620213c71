#include <doctest.h>

#include <cmath>

#include "scheq/reflection.hpp"

using namespace scheq;

TEST_CASE("contact bounds") {
  CHECK(contact_bound(NonlinSpec::log(), 0.01, 1.0, 1.0) == doctest::Approx(0.01 * std::log(100.0)));
  CHECK(contact_bound(NonlinSpec::power(0.5), 0.01, 1.0, 1.0) == doctest::Approx(0.1));
  CHECK(contact_bound(NonlinSpec::power(2.0), 0.01, 2.0, 1.0) == doctest::Approx(0.02));
}

TEST_CASE("contact integrand") {
  CHECK(contact_integrand(NonlinSpec::log(), 1000, 0.005, 0.01, 1.0) ==
        doctest::Approx(-0.005 * std::log(0.006)));
  CHECK(contact_integrand(NonlinSpec::log(), 1000, 0.02, 0.01, 1.0) == 0.0);
  CHECK(contact_integrand(NonlinSpec::power(0.5), 100, 0.004, 0.01, 1.0) ==
        doctest::Approx(0.004 / std::sqrt(0.014)));
  CHECK(contact_integrand(NonlinSpec::power(2.0), 100, 0.005, 0.01, 1.0) ==
        doctest::Approx(std::pow(0.005, 3.0) / (0.015 * 0.015)));
  CHECK(contact_integrand(NonlinSpec::power(2.0), 100, -0.5, 0.01, 1.0) == 0.0);
}

TEST_CASE("defect along the constant direction vanishes") {
  ReflectionOptions o;
  o.M = 32;
  DefectEstimate d = ibp_defect(SpectralField::mode(3, 0), 2.0, NonlinSpec::power(1.0), 500, o);
  CHECK(d.plain.value == 0.0);
  CHECK(d.estimate.value == 0.0);
}

TEST_CASE("small stationary run") {
  StationaryOptions o;
  o.sim.T = 0.01;
  o.sim.dt = 1e-3;
  o.sim.n = 4;
  o.replicas = 16;
  o.stride = 5;
  o.eps = {0.1, 0.3, 0.6};  // integrand is nonnegative below 1 - 1/n
  StationaryRun run = run_stationary(o);
  REQUIRE(run.times.size() == 3);
  CHECK(run.checkpoint(0.006) == 1);
  CHECK(penalization_mass(run, 0.005, 0.005).value == 0.0);
  double prev = -1.0;
  for (std::size_t k = 0; k < run.eps.size(); ++k) {
    double s = contact_statistic(run, k).value;
    CHECK(s >= prev);
    prev = s;
  }
  MCEstimate ch = observable_change(run, Observable::Mode1Sq, 0, 0);
  CHECK(ch.value == 0.0);
}

TEST_CASE("stationary f mass is finite") {
  ReflectionOptions o;
  o.M = 32;
  for (int n : {2, 32}) CHECK(std::isfinite(stationary_f_mass(2.0, NonlinSpec::log(), n, 2000, o).value));
}
