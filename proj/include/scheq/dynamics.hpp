#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "scheq/nonlinearity.hpp"
#include "scheq/rng.hpp"
#include "scheq/spectral.hpp"

namespace scheq {

struct SimConfig {
  std::size_t N = 64;
  std::size_t M = 128;
  double dt = 1e-4;
  double T = 0.1;
  NonlinSpec spec = NonlinSpec::log();
  int n = 8;
  double c = 2.0;
  std::uint64_t seed = 1;
  double stability_cap = 0.5;
  // false integrates the linear equation only
  bool nonlinear = true;

  // Throws std::invalid_argument describing the violated invariant.
  void validate() const;
  std::size_t steps() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;
  std::uint64_t noise_seed = 0;
};

// Lawson exponential Euler for dX + 1/2 (A^2 X + A f^n(X)) dt = B dW on N modes,
// with f^n evaluated on the M-point grid.
class Stepper {
 public:
  explicit Stepper(const SimConfig& cfg);

  // Advances coefficients a (size N) by one step. xi holds N-1 standard
  // normals for modes 1..N-1; nullptr means zero noise.
  void step(std::vector<double>& a, const double* xi);
  void step(std::vector<double>& a, Stream& rng);

  // Grid values of the state at the start of the most recent step.
  const std::vector<double>& last_grid() const { return grid_; }
  const SimConfig& config() const { return cfg_; }
  double decay(std::size_t i) const { return decay_[i]; }
  double noise_sd(std::size_t i) const { return noise_sd_[i]; }

 private:
  SimConfig cfg_;
  std::vector<double> decay_;
  std::vector<double> noise_sd_;
  std::vector<double> grid_;
  std::vector<double> fvals_;
  std::vector<double> fcoef_;
  std::vector<double> xi_;
};

// Exact transition of the linear equation over dt.
SpectralField linear_step(const SpectralField& h, double dt, Stream& rng);
SpectralField step(const SpectralField& h, const SimConfig& cfg, Stream& rng);

// States at every `stride`-th step plus the final one.
Trajectory simulate(const SpectralField& x0, const SimConfig& cfg, Stream& rng, std::size_t stride = 1);

// Two trajectories driven by one noise realization; throws
// std::invalid_argument when the means differ.
std::pair<Trajectory, Trajectory> coupled_simulate(const SpectralField& x0, const SpectralField& y0,
                                                   const SimConfig& cfg, Stream& rng);

// Noise variance of mode i over one step of length dt.
double linear_noise_variance(std::size_t i, double dt);

}  // namespace scheq
