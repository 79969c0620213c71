#include "scheq/harness/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "scheq/parallel.hpp"

namespace scheq::harness {

namespace {

std::string format_error(const std::string& origin, int line, const std::string& message) {
  std::ostringstream s;
  s << origin;
  if (line > 0) s << ":" << line;
  s << ": " << message;
  return s.str();
}

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    int line = node.Mark().is_null() ? 0 : node.Mark().line + 1;
    throw ConfigError(origin_, line, msg);
  }

  void check_map(const YAML::Node& node, const std::string& where, const std::set<std::string>& keys) const {
    if (!node.IsMap()) fail(node, where + " must be a mapping");
    for (const auto& kv : node) {
      std::string k = kv.first.as<std::string>();
      if (!keys.count(k)) fail(kv.first, "unknown key '" + k + "' in " + where);
    }
  }

  template <typename T>
  void get(const YAML::Node& map, const std::string& key, T& out) const {
    YAML::Node v = map[key];
    if (!v) return;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      fail(v, "invalid value for '" + key + "'");
    }
  }

  void get_count(const YAML::Node& map, const std::string& key, std::size_t& out) const {
    YAML::Node v = map[key];
    if (!v) return;
    long long x = 0;
    try {
      x = v.as<long long>();
    } catch (const YAML::Exception&) {
      fail(v, "'" + key + "' must be an integer");
    }
    if (x < 1) fail(v, "'" + key + "' must be >= 1");
    out = static_cast<std::size_t>(x);
  }

  void get_spec(const YAML::Node& map, const std::string& key, NonlinSpec& out) const {
    YAML::Node v = map[key];
    if (!v) return;
    try {
      out = parse_spec(v.as<std::string>());
    } catch (const std::exception& e) {
      fail(v, "invalid nonlinearity '" + key + "': " + e.what());
    }
  }

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
};

std::string spec_text(const NonlinSpec& s) { return s.label(); }

}  // namespace

ConfigError::ConfigError(const std::string& origin, int line, const std::string& message)
    : std::runtime_error(format_error(origin, line, message)), line_(line) {}

std::size_t ExperimentConfig::scaled(std::size_t count, std::size_t floor) const {
  double v = std::round(static_cast<double>(count) * scale);
  return std::max<std::size_t>(floor, static_cast<std::size_t>(v));
}

int ExperimentConfig::worker_count() const { return threads > 0 ? threads : default_threads(); }

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  Reader rd(origin);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(origin, e.mark.is_null() ? 0 : e.mark.line + 1, e.msg);
  }
  ExperimentConfig cfg;
  if (!root || root.IsNull()) return cfg;
  rd.check_map(root, "top level", {"experiment", "seed", "threads", "output", "scale", "sim", "sampler", "verification"});
  rd.get(root, "experiment", cfg.experiment);
  rd.get(root, "seed", cfg.seed);
  rd.get(root, "threads", cfg.threads);
  rd.get(root, "output", cfg.output);
  rd.get(root, "scale", cfg.scale);
  if (root["scale"] && !(cfg.scale > 0.0)) rd.fail(root["scale"], "'scale' must be > 0");
  if (root["threads"] && cfg.threads < 0) rd.fail(root["threads"], "'threads' must be >= 0");

  if (YAML::Node s = root["sim"]) {
    rd.check_map(s, "sim", {"N", "M", "dt", "T", "spec", "n", "c", "stability_cap", "nonlinear"});
    rd.get_count(s, "N", cfg.sim.N);
    rd.get_count(s, "M", cfg.sim.M);
    rd.get(s, "dt", cfg.sim.dt);
    rd.get(s, "T", cfg.sim.T);
    rd.get_spec(s, "spec", cfg.sim.spec);
    rd.get(s, "n", cfg.sim.n);
    rd.get(s, "c", cfg.sim.c);
    rd.get(s, "stability_cap", cfg.sim.stability_cap);
    rd.get(s, "nonlinear", cfg.sim.nonlinear);
    cfg.sim.seed = cfg.seed;
    try {
      cfg.sim.validate();
    } catch (const std::invalid_argument& e) {
      rd.fail(s, std::string("sim: ") + e.what());
    }
  }
  cfg.sim.seed = cfg.seed;

  if (YAML::Node s = root["sampler"]) {
    rd.check_map(s, "sampler", {"count", "replicas", "M", "c", "spec", "n", "n_grid", "alpha_grid"});
    rd.get_count(s, "count", cfg.sampler.count);
    rd.get_count(s, "replicas", cfg.sampler.replicas);
    rd.get_count(s, "M", cfg.sampler.M);
    rd.get(s, "c", cfg.sampler.c);
    rd.get_spec(s, "spec", cfg.sampler.spec);
    rd.get(s, "n", cfg.sampler.n);
    rd.get(s, "n_grid", cfg.sampler.n_grid);
    rd.get(s, "alpha_grid", cfg.sampler.alpha_grid);
    if (s["c"] && !(cfg.sampler.c > 0.0)) rd.fail(s["c"], "sampler.c must be > 0");
    if (s["n"] && cfg.sampler.n < 1) rd.fail(s["n"], "sampler.n must be >= 1");
    if (cfg.sampler.M % 2 != 0) rd.fail(s, "sampler.M must be even");
    for (int n : cfg.sampler.n_grid)
      if (n < 1) rd.fail(s["n_grid"], "n_grid entries must be >= 1");
    for (double a : cfg.sampler.alpha_grid)
      if (!(a > 0.0)) rd.fail(s["alpha_grid"], "alpha_grid entries must be > 0");
  }

  if (YAML::Node s = root["verification"]) {
    rd.check_map(s, "verification", {"nodes", "boundary_count", "bandwidth", "limit_c", "gibbs_pairs",
                                     "unconditioned_pairs", "generator_dts", "generator_count"});
    rd.get(s, "nodes", cfg.verification.nodes);
    rd.get_count(s, "boundary_count", cfg.verification.boundary_count);
    rd.get(s, "bandwidth", cfg.verification.bandwidth);
    rd.get(s, "limit_c", cfg.verification.limit_c);
    rd.get(s, "gibbs_pairs", cfg.verification.gibbs_pairs);
    rd.get(s, "unconditioned_pairs", cfg.verification.unconditioned_pairs);
    rd.get(s, "generator_dts", cfg.verification.generator_dts);
    rd.get_count(s, "generator_count", cfg.verification.generator_count);
    int q = cfg.verification.nodes;
    if (s["nodes"] && q != 8 && q != 16 && q != 32 && q != 64) rd.fail(s["nodes"], "nodes must be 8, 16, 32 or 64");
    if (s["limit_c"] && !(cfg.verification.limit_c > 0.0)) rd.fail(s["limit_c"], "limit_c must be > 0");
    if (s["generator_dts"] && cfg.verification.generator_dts.size() < 2)
      rd.fail(s["generator_dts"], "generator_dts needs at least two entries");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string ExperimentConfig::to_yaml() const {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "experiment" << YAML::Value << experiment;
  e << YAML::Key << "seed" << YAML::Value << seed;
  e << YAML::Key << "threads" << YAML::Value << threads;
  e << YAML::Key << "output" << YAML::Value << output;
  e << YAML::Key << "scale" << YAML::Value << scale;
  e << YAML::Key << "sim" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "N" << YAML::Value << sim.N << YAML::Key << "M" << YAML::Value << sim.M;
  e << YAML::Key << "dt" << YAML::Value << sim.dt << YAML::Key << "T" << YAML::Value << sim.T;
  e << YAML::Key << "spec" << YAML::Value << spec_text(sim.spec) << YAML::Key << "n" << YAML::Value << sim.n;
  e << YAML::Key << "c" << YAML::Value << sim.c;
  e << YAML::Key << "stability_cap" << YAML::Value << sim.stability_cap;
  e << YAML::Key << "nonlinear" << YAML::Value << sim.nonlinear;
  e << YAML::EndMap;
  e << YAML::Key << "sampler" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "count" << YAML::Value << sampler.count;
  e << YAML::Key << "replicas" << YAML::Value << sampler.replicas;
  e << YAML::Key << "M" << YAML::Value << sampler.M;
  e << YAML::Key << "c" << YAML::Value << sampler.c;
  e << YAML::Key << "spec" << YAML::Value << spec_text(sampler.spec);
  e << YAML::Key << "n" << YAML::Value << sampler.n;
  e << YAML::Key << "n_grid" << YAML::Value << YAML::Flow << sampler.n_grid;
  e << YAML::Key << "alpha_grid" << YAML::Value << YAML::Flow << sampler.alpha_grid;
  e << YAML::EndMap;
  e << YAML::Key << "verification" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "nodes" << YAML::Value << verification.nodes;
  e << YAML::Key << "boundary_count" << YAML::Value << verification.boundary_count;
  e << YAML::Key << "bandwidth" << YAML::Value << verification.bandwidth;
  e << YAML::Key << "limit_c" << YAML::Value << verification.limit_c;
  e << YAML::Key << "gibbs_pairs" << YAML::Value << YAML::Flow << verification.gibbs_pairs;
  e << YAML::Key << "unconditioned_pairs" << YAML::Value << YAML::Flow << verification.unconditioned_pairs;
  e << YAML::Key << "generator_dts" << YAML::Value << YAML::Flow << verification.generator_dts;
  e << YAML::Key << "generator_count" << YAML::Value << verification.generator_count;
  e << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace scheq::harness
