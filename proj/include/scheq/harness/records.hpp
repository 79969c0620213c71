#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scheq/stats.hpp"

namespace scheq::harness {

using Json = nlohmann::ordered_json;

struct ResultRecord {
  std::string experiment;
  std::string name;
  Json parameters = Json::object();  // flat: string, number or bool values
  double estimate = 0.0;
  double stderr_value = 0.0;
  double ess = 0.0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::optional<bool> pass;

  static ResultRecord from(const std::string& experiment, const std::string& name, const MCEstimate& e);
  Json to_json() const;
  static ResultRecord from_json(const Json& j);
};

// Collects records for one subcommand and writes
//   <dir>/<stem>.jsonl, <dir>/<stem>.csv, <dir>/<stem>_summary.txt
// plus wall times in <dir>/<stem>_timings.jsonl, kept apart so that the
// record files depend only on the configuration and seed.
class Recorder {
 public:
  Recorder(std::string dir, std::string stem, std::string experiment);

  ResultRecord& add(ResultRecord r);
  ResultRecord& add(const std::string& name, const MCEstimate& e, Json params = Json::object());
  void note(const std::string& line);
  void timing(const std::string& name, double seconds);
  void write() const;

  const std::vector<ResultRecord>& records() const { return records_; }
  const std::vector<std::string>& summary() const { return summary_; }
  const std::string& experiment() const { return experiment_; }
  std::string path(const std::string& suffix) const;
  bool all_pass() const;

 private:
  std::string dir_, stem_, experiment_;
  std::vector<ResultRecord> records_;
  std::vector<std::string> summary_;
  std::vector<std::pair<std::string, double>> timings_;
};

std::vector<ResultRecord> read_jsonl(const std::string& path);
std::string csv_header();
std::string csv_row(const ResultRecord& r);

}  // namespace scheq::harness
