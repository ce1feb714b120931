#pragma once

#include <cstdint>

namespace tiedpools {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stateless stream keyed by (seed, round): the n-th draw depends only on
// (seed, round, n), never on which thread or in which order rounds run.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t round) : key_(mix64(mix64(seed) ^ round)) {}

  std::uint64_t next() { return mix64(key_ ^ mix64(event_++)); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::uint64_t events() const { return event_; }

 private:
  std::uint64_t key_;
  std::uint64_t event_ = 0;
};

}  // namespace tiedpools
