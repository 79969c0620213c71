#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scheq/dynamics.hpp"
#include "scheq/measures.hpp"
#include "scheq/nonlinearity.hpp"
#include "scheq/stats.hpp"

namespace scheq {

// Replicas of the regularized dynamics started from the N-mode Gibbs measure:
// x0 from the N-mode Gaussian with mean c, weight exp(-U^n(x0)) on the grid.
// Weighted ensemble averages are then stationary in time.
struct StationaryOptions {
  SimConfig sim;
  std::size_t replicas = 2000;
  std::size_t stride = 10;  // steps between checkpoints
  std::vector<double> eps = {0.01};
  double gamma = 1.0;
  int threads = 1;
  std::string stream = "reflection/stationary";
};

struct StationaryRun {
  std::vector<double> times;  // checkpoint times, times[0] = 0
  Weights weights;
  // [replica][checkpoint]: int_0^t int_0^1 f^n(X) dtheta du (left rule)
  std::vector<std::vector<double>> f_cum;
  // [eps][replica][checkpoint]: time-space integral of the contact integrand
  std::vector<std::vector<std::vector<double>>> contact_cum;
  // [replica][checkpoint] observables
  std::vector<std::vector<double>> mode1_sq;
  std::vector<std::vector<double>> mode2_sq;
  std::vector<std::vector<double>> potential;
  std::vector<double> eps;
  NonlinSpec spec;
  int n = 1;
  double gamma = 1.0;
  std::uint64_t seed = 0;

  std::size_t checkpoint(double t) const;  // nearest checkpoint index
};

StationaryRun run_stationary(const StationaryOptions& opt);

// Weighted replica average of int_s^t int_0^1 f^n(X) dtheta du; s and t snap
// to the nearest checkpoints.
MCEstimate penalization_mass(const StationaryRun& run, double s, double t);

// Contact integrand x f^n(x) 1{x < eps}; for Power alpha >= 1 the weight x is
// replaced by (x+)^(alpha + gamma).
double contact_integrand(const NonlinSpec& spec, int n, double x, double eps, double gamma);
// Bound on the contact statistic over [0,T]: -T eps ln eps (Log),
// T eps^(1-alpha) (alpha < 1), T eps^gamma (alpha >= 1).
double contact_bound(const NonlinSpec& spec, double eps, double T, double gamma);
MCEstimate contact_statistic(const StationaryRun& run, std::size_t eps_index);

enum class Observable { Mode1Sq, Mode2Sq, Potential };
MCEstimate observable_at(const StationaryRun& run, Observable which, std::size_t checkpoint);
// Paired change of an observable between two checkpoints.
MCEstimate observable_change(const StationaryRun& run, Observable which, std::size_t from, std::size_t to);

struct ReflectionOptions {
  std::size_t M = 128;
  std::uint64_t seed = 1;
  int threads = 1;
  KRule rule = KRule::Bridge;
  // Level of the zero-mean control variate for the defect; 0 disables it.
  int cv_level = 128;
  std::string stream = "reflection/ensemble";
};

// E_{nu_c^n}[int_0^1 f^n]; self-normalized.
MCEstimate stationary_f_mass(double c, const NonlinSpec& spec, int n, std::size_t count,
                             const ReflectionOptions& opt);

struct MassRow {
  int n = 0;
  MCEstimate mass;
  MCEstimate gap;  // paired mass - E_nu[int f]
};

struct DefectEstimate {
  MCEstimate plain;     // direct nu_c average
  MCEstimate estimate;  // with the control variate when enabled
  double ess = 0.0;
};

// D(k) = E_{nu_c}[<x,Ak> + <f(x),Pi k>]. The control variate subtracts the
// level-n regularized average of the same quantity, whose mean is zero.
DefectEstimate ibp_defect(const SpectralField& k, double c, const NonlinSpec& spec, std::size_t count,
                          const ReflectionOptions& opt);

struct ThresholdRow {
  NonlinSpec spec;
  double ess = 0.0;
  std::vector<std::string> directions;
  std::vector<DefectEstimate> defects;
  MCEstimate limit_mass;  // E_nu[int f]
  std::vector<MassRow> masses;
};

struct ReflectionScanResult {
  double c = 2.0;
  std::size_t count = 0;
  std::vector<int> n_grid;
  std::vector<ThresholdRow> rows;
};

// One mu_c ensemble reweighted for every spec (common random numbers).
ReflectionScanResult threshold_scan(const std::vector<NonlinSpec>& specs, const std::vector<int>& n_grid,
                                    const std::vector<SpectralField>& directions,
                                    const std::vector<std::string>& direction_names, double c, std::size_t count,
                                    const ReflectionOptions& opt);

}  // namespace scheq
