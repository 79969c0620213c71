#pragma once

#include <cstddef>
#include <vector>

namespace scheq {

// Coefficients in the Neumann cosine basis e_0 = 1, e_i = sqrt(2) cos(i pi theta).
// coeffs[0] is the mean.
struct SpectralField {
  std::vector<double> coeffs;

  SpectralField() = default;
  explicit SpectralField(std::size_t n) : coeffs(n, 0.0) {}
  explicit SpectralField(std::vector<double> c) : coeffs(std::move(c)) {}

  std::size_t size() const { return coeffs.size(); }
  double& operator[](std::size_t i) { return coeffs[i]; }
  double operator[](std::size_t i) const { return coeffs[i]; }

  // amp * e_i with N coefficients.
  static SpectralField mode(std::size_t N, std::size_t i, double amp = 1.0);
};

// Values at the midpoint grid theta_j = (j + 1/2)/M.
struct GridField {
  std::vector<double> values;

  GridField() = default;
  explicit GridField(std::size_t m, double v = 0.0) : values(m, v) {}
  explicit GridField(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t j) { return values[j]; }
  double operator[](std::size_t j) const { return values[j]; }
};

struct GammaNorm {
  double gamma = 0.0;
  double seminorm = 0.0;
  double full_norm = 0.0;
};

// lambda_i = -(i pi)^2.
double eigenvalue(std::size_t i);
// e_i(theta); throws std::domain_error for theta outside [0,1].
double basis_eval(std::size_t i, double theta);
double grid_point(std::size_t j, std::size_t M);

// Type-II/III cosine transform pair on the midpoint grid. to_spectral uses the
// midpoint rule, which is exact for fields band-limited below M. Both throw
// std::invalid_argument when M < N.
GridField to_grid(const SpectralField& h, std::size_t M);
SpectralField to_spectral(const GridField& g, std::size_t N);
void to_grid(const double* coeffs, std::size_t N, double* grid, std::size_t M);
void to_spectral(const double* grid, std::size_t M, double* coeffs, std::size_t N);

double mean(const SpectralField& h);
SpectralField project_zero_mean(const SpectralField& h);
// Mode i >= 1 scaled by ((i pi)^2)^gamma. The mean passes through for
// gamma = 0 and is dropped otherwise.
SpectralField apply_neg_A_pow(double gamma, const SpectralField& h);
// Mode i scaled by lambda_i.
SpectralField apply_A(const SpectralField& h);
SpectralField q_bar(const SpectralField& h);
GammaNorm norm_gamma(double gamma, const SpectralField& h);
double inner_vm1(const SpectralField& h, const SpectralField& k);
double inner_l2(const SpectralField& h, const SpectralField& k);

// Midpoint-rule integrals on the grid.
double grid_inner(const GridField& a, const GridField& b);
double grid_mean(const GridField& g);

}  // namespace scheq
