#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "scheq/harness/config.hpp"
#include "scheq/harness/records.hpp"
#include "scheq/meander.hpp"
#include "scheq/reflection.hpp"

namespace scheq::harness {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
};

constexpr int kCriterionCount = 13;

std::string criterion_title(int id);
// "[PASS] 01 <title>: <detail>"
std::string format_result(const CriterionResult& r);

// Runs one criterion, adding its records (named "c<id>/...") to rec.
// Throws std::out_of_range for ids outside 1..13.
CriterionResult run_criterion(int id, const ExperimentConfig& cfg, Recorder& rec);

// Criteria whose intermediate results the subcommands reuse.
CriterionResult criterion_invariance(const ExperimentConfig& cfg, Recorder& rec,
                                     std::vector<StationaryRun>* runs = nullptr);
CriterionResult criterion_contact(const ExperimentConfig& cfg, Recorder& rec,
                                  std::vector<StationaryRun>* runs = nullptr);
struct ThresholdOutputs {
  ReflectionScanResult scan;
  std::vector<NonlinSpec> j_specs;
  std::vector<std::vector<MCEstimate>> j;  // [spec][n]
};
CriterionResult criterion_threshold(const ExperimentConfig& cfg, Recorder& rec, ThresholdOutputs* out = nullptr);

// Runs the criteria in `only` (all when empty), notes one line per criterion
// in rec and echoes it to progress when given. True when all pass.
bool run_verify_all(const ExperimentConfig& cfg, Recorder& rec, const std::vector<int>& only = {},
                    std::ostream* progress = nullptr);

// Record helpers shared with the subcommands; the seed is always the master seed.
ResultRecord& put(Recorder& rec, const ExperimentConfig& cfg, const std::string& name, const MCEstimate& e,
                  Json params = Json::object());
ResultRecord& put(Recorder& rec, const ExperimentConfig& cfg, const std::string& name, const MCEstimate& e,
                  Json params, bool pass);
MCEstimate scalar(double value, std::size_t count = 1);
std::string num(double v, int digits = 4);

}  // namespace scheq::harness
