#pragma once

#include <cstdint>
#include <random>

namespace fplab {

// splitmix64 finalizer. Used to turn (seed, index) pairs into well-separated
// engine seeds; the raw inputs are often small consecutive integers.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Seeded random source. One instance per logical stream; never shared
// across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  // Uniform on [0, 1).
  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  // Uniform on [a, b); degenerate a == b returns a.
  double uniform(double a, double b) {
    if (a == b) return a;
    return std::uniform_real_distribution<double>(a, b)(engine_);
  }

  double normal() { return normal_(engine_); }

  // Exact at the endpoints: p = 0 never fires, p = 1 always does.
  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{};
};

// Deterministic stream tree. child(i) depends only on (state, i), so a trial's
// randomness is fixed by its index no matter how trials are scheduled across
// threads.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(mix64(seed ^ kSalt)) {}

  Stream child(std::uint64_t index) const {
    return Stream(FromState{}, mix64(state_ ^ mix64(index + kSalt)));
  }

  Rng rng() const { return Rng(state_); }
  std::uint64_t state() const { return state_; }

 private:
  struct FromState {};
  Stream(FromState, std::uint64_t state) : state_(state) {}

  static constexpr std::uint64_t kSalt = 0xf1ea5eed9e3779b9ull;
  std::uint64_t state_;
};

}  // namespace fplab
