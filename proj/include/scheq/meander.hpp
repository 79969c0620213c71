#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "scheq/nonlinearity.hpp"
#include "scheq/rng.hpp"
#include "scheq/spectral.hpp"
#include "scheq/stats.hpp"

namespace scheq {

// Meander values at increasing times in [0,1]; times[0] = 0 and
// times.back() = 1. weight is the Imhof density sqrt(pi/2)/R(1) for Bessel(3)
// samples and 1 for rejection samples.
struct MeanderPath {
  std::vector<double> times;
  std::vector<double> values;
  double weight = 1.0;

  double endpoint() const { return values.back(); }
  // Linear interpolation; exact at sample times.
  double value_at(double s) const;
};

// Bessel(3) path at the given times (0 and 1 are added when absent) with the
// Imhof weight attached.
MeanderPath sample_meander_at(std::vector<double> times, Stream& rng);
// Same on the uniform grid k/(grid_size-1); throws for grid_size < 2.
MeanderPath sample_meander(std::size_t grid_size, Stream& rng);
// Validation oracle: Brownian path with a Rayleigh(sqrt(h)) first value, killed
// on leaving (0, inf) at a grid point or between points (bridge crossing
// probability), retried until it survives. Exact at grid points.
MeanderPath sample_meander_rejection(std::size_t grid_size, Stream& rng, std::size_t* trials = nullptr);

struct ConcatPath {
  double r = 0.5;
  GridField path;        // values at theta_j (only theta_j < 1/2 for T_r)
  double weight = 1.0;   // product of the two meander weights
  double m_end = 0.0;    // M(1)
  double mhat_end = 0.0; // Mhat(1)
  double end_value = 0.0; // value at theta = 1/2 for T_r paths
};

// Meander times needed to evaluate U_r at the grid points.
std::vector<double> u_r_left_times(double r, std::size_t M);
std::vector<double> u_r_right_times(double r, std::size_t M);

// sqrt(r) M((r-theta)/r) on [0,r], sqrt(1-r) Mhat((theta-r)/(1-r)) on (r,1].
ConcatPath build_U_r(double r, const MeanderPath& m, const MeanderPath& mhat, std::size_t M);
// U - sqrt(r) M(1).
ConcatPath build_V_r(double r, const ConcatPath& u);
// Half-interval analogue on [0,1/2]; r must lie in (0,1/2).
ConcatPath build_T_r(double r, const MeanderPath& m, const MeanderPath& mhat, std::size_t M);
// Exact-at-grid samples.
ConcatPath sample_U_r(double r, std::size_t M, Stream& rng);
ConcatPath sample_T_r(double r, std::size_t M, Stream& rng);

// sin^2(pi u / 2) with u uniform.
double sample_arcsine(Stream& rng);

// m(u) = int_0^{1/2} u + u(1/2)/2 with midpoint values on [0,1/2].
double m_functional(const std::vector<double>& half_values, double end_value);

// Y_c restricted to [0,1/2] via B + c - m(B) + N(0,1/24); values at theta_j < 1/2
// plus the value at 1/2 in end_value. M must be even.
ConcatPath sample_half_representation(double c, std::size_t M, Stream& rng);

struct MarginalCheck {
  double theta = 0.0;
  KSResult vs_normal;
  KSResult vs_brownian;
};

struct VTauReport {
  std::vector<MarginalCheck> marginals;
  MCEstimate covariance;  // E[V(1/4) V(3/4)]
  MCEstimate brownian_covariance;
};

VTauReport v_tau_law_check(std::size_t count, std::uint64_t seed, int threads = 1);

// Imhof-weighted E[exp(-int F^n(U_r))] on the M grid.
MCEstimate J_r_n(double r, const NonlinSpec& spec, int n, std::size_t count, std::size_t M, std::uint64_t seed,
                 int threads = 1);
// One estimate per n on common meander samples.
std::vector<MCEstimate> J_r_n_scan(double r, const NonlinSpec& spec, const std::vector<int>& n_grid,
                                   std::size_t count, std::size_t M, std::uint64_t seed, int threads = 1);

// Imhof-weighted sample of U_r paths at one r.
struct UrEnsemble {
  double r = 0.5;
  std::vector<ConcatPath> paths;
  Weights weights;
};
UrEnsemble sample_U_r_ensemble(double r, std::size_t count, std::size_t M, std::uint64_t seed,
                               std::uint64_t stream, int threads = 1);

// Silverman bandwidth 0.9 min(sd, IQR/1.34) n_eff^(-1/5) for weighted data.
double silverman_bandwidth(const std::vector<double>& x, const Weights& w);

struct KDEConditional {
  MCEstimate value;  // p_{mean U_r}(c) E[psi(U_r) | mean U_r = c]
  double bandwidth = 0.0;
  double kernel_ess = 0.0;
};

// Gaussian-kernel estimate of E[psi(U_r) K_b(mean(U_r) - c)].
// bandwidth <= 0 selects Silverman's rule.
KDEConditional kde_conditional(const UrEnsemble& ens, double c, const std::function<double(const GridField&)>& psi,
                               double bandwidth = 0.0);

}  // namespace scheq
