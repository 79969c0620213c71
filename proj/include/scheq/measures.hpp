#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "scheq/nonlinearity.hpp"
#include "scheq/rng.hpp"
#include "scheq/spectral.hpp"
#include "scheq/stats.hpp"

namespace scheq {

using EnsembleStats = MCEstimate;

struct WeightedSample {
  GridField field;
  double log_weight = 0.0;
  double weight() const { return std::exp(log_weight); }
};

using Ensemble = std::vector<WeightedSample>;

// How membership in K = {x >= 0} is decided for a grid field.
//  Grid:   every grid value nonnegative.
//  Bridge: probability that the underlying continuous Brownian path stays
//          nonnegative given its grid values (Brownian-bridge crossing
//          probabilities between points, free half-cells at both ends).
enum class KRule { Grid, Bridge };

struct SamplerOptions {
  std::size_t M = 128;
  std::uint64_t seed = 1;
  int threads = 1;
  // Stream name; samples with equal (seed, stream, index) are identical.
  std::string stream = "path_measures";
};

// Brownian path on the midpoint grid with B(0) = 0.
GridField sample_brownian(std::size_t M, Stream& rng);
// B - mean(B) + c on the grid.
GridField sample_mu_c(double c, std::size_t M, Stream& rng);
// Coefficients of the N-mode Gaussian measure: mean c, mode i ~ N(0, 1/(i pi)^2).
SpectralField sample_mu_c_modes(double c, std::size_t N, Stream& rng);

// log of the K-membership weight (0 or -inf for Grid).
double log_k_membership(const GridField& x, KRule rule);

double log_weight_reg(const NonlinSpec& spec, int n, const GridField& x);
double log_weight_limit(const NonlinSpec& spec, const GridField& x, KRule rule = KRule::Grid);

// count fields from mu_c with zero log-weights.
Ensemble sample_mu_ensemble(double c, std::size_t count, const SamplerOptions& opt);
Ensemble sample_nu_reg(double c, const NonlinSpec& spec, int n, std::size_t count, const SamplerOptions& opt);
Ensemble sample_nu_limit(double c, const NonlinSpec& spec, std::size_t count, const SamplerOptions& opt,
                         KRule rule = KRule::Grid);

Weights weights_of(const Ensemble& e);
// Recomputes weights for a new target on the same fields.
Weights reweight(const Ensemble& e, const std::function<double(const GridField&)>& log_weight, int threads = 1);

using Functional = std::function<double(const GridField&)>;

MCEstimate expectation(const Ensemble& e, const Functional& phi, int threads = 1);
MCEstimate expectation(const Ensemble& e, const Weights& w, const Functional& phi, int threads = 1);

// E_{mu_c}[exp(-U^n)].
EnsembleStats estimate_Z(double c, const NonlinSpec& spec, int n, std::size_t count, const SamplerOptions& opt);

// Independence Metropolis chains with mu_c proposals targeting nu_c^n.
// The error bar treats chain means as independent replicates.
MCEstimate metropolis_nu_reg(double c, const NonlinSpec& spec, int n, const Functional& phi,
                             std::size_t chain_length, std::size_t chains, std::size_t burn_in,
                             const SamplerOptions& opt, double* acceptance_rate = nullptr);

struct NamedFunctional {
  std::string name;
  Functional fn;
};

struct ScanRow {
  int n = 0;  // 0 marks the limit measure
  std::string functional;
  MCEstimate estimate;
  MCEstimate gap;  // paired E_{nu^n} - E_nu; zero for the limit row
};

// E_{nu^n}[phi] over the n-grid and E_nu[phi], all on one mu_c ensemble.
std::vector<ScanRow> weak_convergence_scan(double c, const NonlinSpec& spec,
                                           const std::vector<NamedFunctional>& functionals,
                                           const std::vector<int>& n_grid, std::size_t count,
                                           const SamplerOptions& opt, KRule rule = KRule::Grid);

// Built-in bounded functionals.
double exp_neg_sq(const GridField& x);
double clipped_min(const GridField& x);

}  // namespace scheq
