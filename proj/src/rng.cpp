#include "scheq/rng.hpp"

namespace scheq {

std::uint64_t stream_key(std::string_view name) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t key, std::uint64_t replica) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(key), hi(key), lo(replica), hi(replica)};
  return std::mt19937_64(seq);
}

}  // namespace

Stream::Stream(std::uint64_t seed, std::uint64_t key, std::uint64_t replica)
    : engine_(seeded_engine(seed, key, replica)), uniform_(0.0, 1.0) {}

double Stream::uniform() {
  double u;
  do {
    u = uniform_(engine_);
  } while (u <= 0.0);
  return u;
}

}  // namespace scheq
