#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "scheq/dynamics.hpp"
#include "scheq/nonlinearity.hpp"

namespace scheq::harness {

// Invalid configuration; line is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& origin, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct SamplerBlock {
  std::size_t count = 100000;
  std::size_t replicas = 4000;
  std::size_t M = 128;
  double c = 2.0;
  NonlinSpec spec = NonlinSpec::log();
  int n = 8;
  std::vector<int> n_grid = {2, 8, 32, 128};
  std::vector<double> alpha_grid = {0.5, 1.0, 2.0, 3.0, 4.0};
};

struct VerificationBlock {
  int nodes = 32;
  std::size_t boundary_count = 4000;
  double bandwidth = 0.0;  // <= 0: Silverman
  double limit_c = 1.0;    // mean used by the conditioned-meander checks
  // "<functional>@<mode>" with functional const | exp_neg_sq | cos_inner:<k> | sin_inner:<k>
  std::vector<std::string> gibbs_pairs = {"const@1", "cos_inner:1@2", "exp_neg_sq@1", "sin_inner:2@2"};
  std::vector<std::string> unconditioned_pairs = {"const@1", "const@0", "exp_neg_sq@2", "cos_inner:1@1"};
  std::vector<double> generator_dts = {1e-3, 5e-4, 2.5e-4};
  std::size_t generator_count = 20000;
};

struct ExperimentConfig {
  std::string experiment = "default";
  std::uint64_t seed = 1;
  int threads = 0;  // 0: SCHEQ_THREADS or the hardware concurrency
  std::string output = "results";
  // Multiplies every sample and replica count (reduced-scale runs).
  double scale = 1.0;
  SimConfig sim;
  SamplerBlock sampler;
  VerificationBlock verification;

  std::size_t scaled(std::size_t count, std::size_t floor = 16) const;
  int worker_count() const;
  std::string to_yaml() const;
};

ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ExperimentConfig load_config(const std::string& path);

}  // namespace scheq::harness
