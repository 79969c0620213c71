#pragma once

#include <string>
#include <vector>

#include "scheq/harness/acceptance.hpp"
#include "scheq/harness/config.hpp"
#include "scheq/harness/records.hpp"

namespace scheq::harness {

// Subcommands; each returns true when every asserted record passes.
bool run_simulate(const ExperimentConfig& cfg, Recorder& rec);
bool run_linear_check(const ExperimentConfig& cfg, Recorder& rec);
bool run_contraction(const ExperimentConfig& cfg, Recorder& rec);
bool run_invariant_check(const ExperimentConfig& cfg, Recorder& rec);
bool run_measures_scan(const ExperimentConfig& cfg, Recorder& rec);
bool run_meander_test(const ExperimentConfig& cfg, Recorder& rec);
bool run_ibp_verify(const ExperimentConfig& cfg, Recorder& rec);
bool run_reflection_scan(const ExperimentConfig& cfg, Recorder& rec);

const std::vector<std::string>& subcommand_names();
// Dispatches by name, writes <output>/<name>.{jsonl,csv} plus the summary and
// prints the summary. Returns 0 when all assertions pass, 1 otherwise.
// Throws std::invalid_argument for an unknown name.
int run_subcommand(const std::string& name, const ExperimentConfig& cfg, const std::vector<int>& only = {});

}  // namespace scheq::harness
