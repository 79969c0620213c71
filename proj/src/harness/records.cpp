#include "scheq/harness/records.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace scheq::harness {

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string number(double v) { return Json(v).dump(); }

}  // namespace

ResultRecord ResultRecord::from(const std::string& experiment, const std::string& name, const MCEstimate& e) {
  ResultRecord r;
  r.experiment = experiment;
  r.name = name;
  r.estimate = e.value;
  r.stderr_value = e.std_error;
  r.ess = e.ess;
  r.count = e.count;
  r.seed = e.seed;
  return r;
}

Json ResultRecord::to_json() const {
  Json j;
  j["experiment"] = experiment;
  j["name"] = name;
  j["parameters"] = parameters;
  j["estimate"] = estimate;
  j["stderr"] = stderr_value;
  j["ess"] = ess;
  j["count"] = count;
  j["seed"] = seed;
  if (pass)
    j["pass"] = *pass;
  else
    j["pass"] = nullptr;
  return j;
}

ResultRecord ResultRecord::from_json(const Json& j) {
  ResultRecord r;
  r.experiment = j.at("experiment").get<std::string>();
  r.name = j.at("name").get<std::string>();
  r.parameters = j.at("parameters");
  auto num = [&](const char* k) { return j.at(k).is_null() ? std::nan("") : j.at(k).get<double>(); };
  r.estimate = num("estimate");
  r.stderr_value = num("stderr");
  r.ess = num("ess");
  r.count = j.at("count").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  if (!j.at("pass").is_null()) r.pass = j.at("pass").get<bool>();
  return r;
}

Recorder::Recorder(std::string dir, std::string stem, std::string experiment)
    : dir_(std::move(dir)), stem_(std::move(stem)), experiment_(std::move(experiment)) {}

ResultRecord& Recorder::add(ResultRecord r) {
  if (r.experiment.empty()) r.experiment = experiment_;
  records_.push_back(std::move(r));
  return records_.back();
}

ResultRecord& Recorder::add(const std::string& name, const MCEstimate& e, Json params) {
  ResultRecord r = ResultRecord::from(experiment_, name, e);
  r.parameters = std::move(params);
  return add(std::move(r));
}

void Recorder::note(const std::string& line) { summary_.push_back(line); }

void Recorder::timing(const std::string& name, double seconds) { timings_.emplace_back(name, seconds); }

std::string Recorder::path(const std::string& suffix) const {
  return (std::filesystem::path(dir_) / (stem_ + suffix)).string();
}

bool Recorder::all_pass() const {
  for (const auto& r : records_)
    if (r.pass && !*r.pass) return false;
  return true;
}

void Recorder::write() const {
  std::filesystem::create_directories(dir_);
  {
    std::ofstream out(path(".jsonl"));
    for (const auto& r : records_) out << r.to_json().dump() << "\n";
  }
  {
    std::ofstream out(path(".csv"));
    out << csv_header() << "\n";
    for (const auto& r : records_) out << csv_row(r) << "\n";
  }
  {
    std::ofstream out(path("_summary.txt"));
    for (const auto& s : summary_) out << s << "\n";
  }
  {
    std::ofstream out(path("_timings.jsonl"));
    for (const auto& [name, t] : timings_) {
      Json j;
      j["experiment"] = experiment_;
      j["name"] = name;
      j["wall_time"] = t;
      out << j.dump() << "\n";
    }
  }
}

std::vector<ResultRecord> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<ResultRecord> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(ResultRecord::from_json(Json::parse(line)));
  return out;
}

std::string csv_header() { return "experiment,name,parameters,estimate,stderr,ess,count,seed,pass"; }

std::string csv_row(const ResultRecord& r) {
  std::string pass = r.pass ? (*r.pass ? "true" : "false") : "";
  return csv_escape(r.experiment) + "," + csv_escape(r.name) + "," + csv_escape(r.parameters.dump()) + "," +
         number(r.estimate) + "," + number(r.stderr_value) + "," + number(r.ess) + "," + std::to_string(r.count) +
         "," + std::to_string(r.seed) + "," + pass;
}

}  // namespace scheq::harness
