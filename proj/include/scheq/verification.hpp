#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "scheq/measures.hpp"
#include "scheq/nonlinearity.hpp"
#include "scheq/spectral.hpp"
#include "scheq/stats.hpp"

namespace scheq {

enum class FunctionalKind { Const, CosInner, SinInner, ExpNegSq, Custom };

// Bounded test functional on grid fields. CosInner/SinInner are cylinder
// functions g(<x,k>) with the L2 grid inner product.
struct TestFunctional {
  FunctionalKind kind = FunctionalKind::Const;
  SpectralField k;
  double constant = 1.0;
  std::function<double(const GridField&)> custom;
  std::string name;

  static TestFunctional constant_fn(double v = 1.0);
  static TestFunctional cos_inner(const SpectralField& k);
  static TestFunctional sin_inner(const SpectralField& k);
  static TestFunctional exp_neg_sq();
  static TestFunctional from_function(std::string name, std::function<double(const GridField&)> fn);

  // Precomputes k on an M-point grid; evaluation falls back to an on-the-fly
  // transform for other sizes.
  TestFunctional& bind(std::size_t M);

  double operator()(const GridField& x) const;
  bool is_cylinder() const;
  // g, g', g'' at <x,k> for cylinder kinds.
  void cylinder_derivatives(const GridField& x, double& g, double& g1, double& g2) const;
  double inner_k(const GridField& x) const;

 private:
  GridField kg_;
};

// d/dt Phi(x + t h) at t = 0; central differences with a perturbation of
// norm 1e-5 for Custom.
double directional_derivative(const TestFunctional& phi, const GridField& x, const GridField& h);

struct IBPReport {
  std::string label;
  MCEstimate lhs;
  MCEstimate rhs_bulk;
  MCEstimate rhs_boundary;
  double discrepancy = 0.0;
  double sigma_combined = 0.0;  // per-term errors in quadrature
  double sigma_paired = 0.0;    // lhs - bulk as one paired estimator, boundary in quadrature
  double ess = 0.0;
  double k_fraction = 1.0;      // share of samples with nonzero K weight
  double bandwidth = 0.0;       // mean KDE bandwidth (limit-measure routes)
  double kernel_ess = 0.0;      // smallest per-node kernel ESS
  int nodes = 0;
  std::size_t boundary_count = 0;
  bool degenerate = false;
  // Boundary integrand on the grid for the regularized formula.
  std::vector<double> boundary_profile;

  bool closes(double nsigma) const { return discrepancy <= nsigma * sigma_combined; }
};

struct IBPOptions {
  std::size_t count = 100000;
  std::size_t M = 128;
  std::uint64_t seed = 1;
  int threads = 1;
  int nodes = 32;
  std::size_t boundary_count = 4000;  // meander samples per node
  double bandwidth = 0.0;             // <= 0: Silverman
  KRule rule = KRule::Bridge;
  double low_ess = 100.0;
};

// E[d_h Phi(Y) 1_K] against the bulk and meander boundary terms for
// Y = B - mean(B) + zeta e_0, zeta ~ N(0,1).
IBPReport ibp_unconditioned(TestFunctional phi, const SpectralField& h, const IBPOptions& opt);

// Regularized Gibbs measure nu_c^n; all terms from one weighted ensemble.
IBPReport ibp_gibbs_reg(TestFunctional phi, const SpectralField& h, double c, const NonlinSpec& spec, int n,
                        const IBPOptions& opt);

// Limit measure nu_c with the KDE-conditioned meander boundary term.
IBPReport ibp_limit(TestFunctional phi, const SpectralField& h, double c, const NonlinSpec& spec,
                    const IBPOptions& opt);

struct CrossCheck {
  MCEstimate ensemble;  // boundary from the mu_c ensemble with gamma^n weights
  MCEstimate meander;   // boundary from conditioned meanders with gamma^n
  double discrepancy = 0.0;
  double sigma = 0.0;
  double bandwidth = 0.0;
};

// Both routes to the level-n boundary term on K, unnormalized by Z_c^n.
CrossCheck boundary_cross_check(TestFunctional phi, const SpectralField& h, double c, const NonlinSpec& spec,
                                int n, const IBPOptions& opt);

// L^n psi_h(x) for psi_h = exp(i (h,x)_{-1}) as (real, imaginary).
std::pair<double, double> generator_apply(const SpectralField& h, const SpectralField& x, const NonlinSpec& spec,
                                          int n, std::size_t M);

struct GeneratorQuotient {
  double dt = 0.0;
  MCEstimate re;
  MCEstimate im;
  double error = 0.0;  // |quotient - analytic|
};

// (E[psi_h(X(dt))] - psi_h(x))/dt over one integrator step from x.
GeneratorQuotient generator_quotient(const SpectralField& h, const SpectralField& x, const NonlinSpec& spec, int n,
                                     double dt, std::size_t count, std::size_t M, std::uint64_t seed);

struct GeneratorSlope {
  std::vector<GeneratorQuotient> rows;
  double analytic_re = 0.0;
  double analytic_im = 0.0;
  double slope = 0.0;  // least-squares slope of log error against log dt
};

GeneratorSlope generator_slope(const SpectralField& h, const SpectralField& x, const NonlinSpec& spec, int n,
                               const std::vector<double>& dts, std::size_t count, std::size_t M, std::uint64_t seed);

// L^n phi(x) for cylinder phi.
double generator_cylinder(const TestFunctional& phi, const GridField& x, const NonlinSpec& spec, int n);

struct SymmetryReport {
  MCEstimate lhs;  // E[L^n phi psi]
  MCEstimate rhs;  // -1/2 E[<-A grad phi, grad psi>]
  double discrepancy = 0.0;
  double sigma_combined = 0.0;
  double ess = 0.0;
};

SymmetryReport symmetry_check(TestFunctional phi, TestFunctional psi, double c, const NonlinSpec& spec, int n,
                              const IBPOptions& opt);

// h(r) from spectral coefficients; the mean is dropped when zero_mean is set.
double eval_field(const SpectralField& h, double r, bool zero_mean = false);

}  // namespace scheq
