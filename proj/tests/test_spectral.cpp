#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "scheq/rng.hpp"
#include "scheq/spectral.hpp"

using namespace scheq;

namespace {

SpectralField random_field(std::size_t N, std::uint64_t seed) {
  Stream s(seed, "test/spectral", 0);
  SpectralField h(N);
  for (std::size_t i = 0; i < N; ++i) h[i] = s.normal() / (1.0 + static_cast<double>(i));
  return h;
}

}  // namespace

TEST_CASE("basis and eigenvalues") {
  const double pi = std::numbers::pi;
  CHECK(eigenvalue(0) == 0.0);
  CHECK(eigenvalue(3) == doctest::Approx(-9 * pi * pi));
  CHECK(basis_eval(0, 0.3) == 1.0);
  CHECK(basis_eval(2, 0.25) == doctest::Approx(std::sqrt(2.0) * std::cos(pi / 2)));
  CHECK_THROWS_AS(basis_eval(1, 1.5), std::domain_error);
  CHECK(grid_point(0, 4) == 0.125);
}

TEST_CASE("transform agrees with the direct cosine sum") {
  SpectralField h = random_field(16, 1);
  GridField g = to_grid(h, 40);
  for (std::size_t j = 0; j < 40; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < 16; ++i) s += h[i] * basis_eval(i, grid_point(j, 40));
    CHECK(g[j] == doctest::Approx(s).epsilon(1e-13));
  }
  CHECK_THROWS_AS(to_grid(h, 8), std::invalid_argument);
}

TEST_CASE("round trips and discrete orthonormality") {
  SpectralField h = random_field(64, 2);
  SpectralField back = to_spectral(to_grid(h, 128), 64);
  for (std::size_t i = 0; i < 64; ++i) CHECK(back[i] == doctest::Approx(h[i]).epsilon(1e-12));
  GridField a = to_grid(SpectralField::mode(8, 3), 32), b = to_grid(SpectralField::mode(8, 5), 32);
  CHECK(std::abs(grid_inner(a, b)) < 1e-14);
  CHECK(grid_inner(a, a) == doctest::Approx(1.0));
  CHECK(grid_mean(to_grid(h, 128)) == doctest::Approx(h[0]));
}

TEST_CASE("operator identities") {
  SpectralField h = random_field(32, 3);
  SpectralField lhs = apply_A(q_bar(h));
  SpectralField pi = project_zero_mean(h);
  for (std::size_t i = 0; i < 32; ++i) CHECK(-lhs[i] == doctest::Approx(pi[i]));
  CHECK(pi[0] == 0.0);
  SpectralField p = apply_neg_A_pow(0.5, apply_neg_A_pow(0.5, h)), q = apply_A(h);
  for (std::size_t i = 1; i < 32; ++i) CHECK(p[i] == doctest::Approx(-q[i]).epsilon(1e-12));
  SpectralField id = apply_neg_A_pow(0.0, h);
  CHECK(id[0] == h[0]);
}

TEST_CASE("norms and inner products") {
  const double pi = std::numbers::pi;
  SpectralField h(4);
  h[0] = 2.0;
  h[1] = 1.0;
  h[2] = 3.0;
  GammaNorm g = norm_gamma(-1.0, h);
  double s = 1.0 / (pi * pi) + 9.0 / (4 * pi * pi);
  CHECK(g.seminorm == doctest::Approx(std::sqrt(s)));
  CHECK(g.full_norm == doctest::Approx(std::sqrt(s + 4.0)));
  CHECK(inner_vm1(h, h) == doctest::Approx(s + 4.0));
  CHECK(inner_l2(h, h) == doctest::Approx(14.0));
  CHECK(mean(h) == 2.0);
}
