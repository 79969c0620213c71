#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scheq/harness/config.hpp"
#include "scheq/harness/experiments.hpp"

using namespace scheq::harness;

namespace {

const std::map<std::string, std::string> kDescriptions = {
    {"simulate", "integrate one trajectory and write it as CSV"},
    {"linear-check", "linear-equation mode variances and the Gaussian reference measure"},
    {"contraction", "H^-1 contraction of coupled trajectories"},
    {"invariant-check", "mass conservation and invariance of the regularized Gibbs measure"},
    {"measures-scan", "weak convergence of the regularized Gibbs measures"},
    {"meander-test", "meander samplers, V_tau marginals and J_r^n"},
    {"ibp-verify", "integration by parts identities and the generator"},
    {"reflection-scan", "contact bounds and the defect threshold in alpha"},
    {"verify-all", "run the 13 acceptance criteria"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic Cahn-Hilliard experiments with singular nonlinearity"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<double> scale;
  std::vector<int> only;
  bool print_config = false;

  for (const auto& name : subcommand_names()) {
    CLI::App* sub = app.add_subcommand(name, kDescriptions.at(name));
    sub->add_option("--config", config_path, "YAML configuration file");
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--threads", threads, "worker threads; 0 uses SCHEQ_THREADS or all cores")->check(CLI::NonNegativeNumber);
    sub->add_option("--scale", scale, "multiplier on sample and replica counts")->check(CLI::PositiveNumber);
    sub->add_flag("--print-config", print_config, "print the resolved configuration and exit");
    if (name == "verify-all") sub->add_option("--only", only, "criterion ids to run")->check(CLI::Range(1, 13));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string name = app.get_subcommands().front()->get_name();
  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (seed) {
    cfg.seed = *seed;
    cfg.sim.seed = *seed;
  }
  if (out) cfg.output = *out;
  if (threads) cfg.threads = *threads;
  if (scale) cfg.scale = *scale;
  if (print_config) {
    std::cout << cfg.to_yaml();
    return 0;
  }

  try {
    return run_subcommand(name, cfg, only);
  } catch (const std::exception& e) {
    std::cerr << name << ": " << e.what() << "\n";
    return 1;
  }
}
