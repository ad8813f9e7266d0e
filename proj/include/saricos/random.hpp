#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace saricos {

using rng_t = std::mt19937_64;

// Independent stream for (seed, path...). The same path always gives the same
// stream, so work can be split across workers without changing results.
inline rng_t derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {}) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (path.size() + 1));
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto p : path) push(p);
  std::seed_seq seq(words.begin(), words.end());
  return rng_t(seq);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  auto rng = derive_rng(seed, path);
  return rng();
}

}  // namespace saricos
