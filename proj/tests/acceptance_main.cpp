#include <CLI11.hpp>

#include <iostream>

#include "scheq/harness/acceptance.hpp"
#include "scheq/harness/config.hpp"

using namespace scheq::harness;

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::vector<int> only;
  std::string config_path, out = "acceptance";
  int threads = 0;
  app.add_option("--only", only, "criterion ids")->check(CLI::Range(1, kCriterionCount));
  app.add_option("--config", config_path, "YAML configuration file");
  app.add_option("--out", out, "output directory");
  app.add_option("--threads", threads, "worker threads");
  CLI11_PARSE(app, argc, argv);

  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  cfg.output = out;
  if (threads > 0) cfg.threads = threads;
  std::string stem = "acceptance";
  if (only.size() == 1) stem += "_" + std::to_string(only[0]);
  Recorder rec(cfg.output, stem, cfg.experiment);
  bool ok = run_verify_all(cfg, rec, only, &std::cout);
  rec.write();
  return ok ? 0 : 1;
}
