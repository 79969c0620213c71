#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <boost/random/normal_distribution.hpp>

namespace scheq {

// 64-bit FNV-1a of an experiment name; used as the stream key.
std::uint64_t stream_key(std::string_view name);

// Random stream keyed by (master seed, experiment key, replica index).
// Two streams with different keys are statistically independent; the same
// key always reproduces the same sequence.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t key, std::uint64_t replica);
  Stream(std::uint64_t seed, std::string_view experiment, std::uint64_t replica)
      : Stream(seed, stream_key(experiment), replica) {}

  double normal() { return normal_(engine_); }
  // Uniform on the open interval (0,1).
  double uniform();
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;  // ziggurat
  std::uniform_real_distribution<double> uniform_;
};

}  // namespace scheq
