#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace portlab::rng {

// One step of the SplitMix64 sequence; doubles as a finalizer when deriving
// stream keys from a (seed, stream) pair.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t splitmix64_hash(std::uint64_t x) { return splitmix64(x); }

// xoshiro256++ (Blackman & Vigna), seeded per stream.
// Reference: https://prng.di.unimi.it/xoshiro256plusplus.c
//
// Streams are derived by hashing (seed, stream_id), not by advancing a shared
// generator, so stream k can be constructed without touching streams 0..k-1
// and the result does not depend on construction order. The SplitMix64
// finalizer is a bijection, hence distinct stream ids under one seed can never
// collapse to the same state chain.
class Xoshiro256PlusPlus {
 public:
  Xoshiro256PlusPlus(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t h = seed;
    (void)splitmix64(h);
    h ^= splitmix64_hash(stream_id);
    for (auto& w : state_) w = splitmix64(h);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t operator()() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> state_{};
};

// Standard normal draws via Box-Muller on top of a derived xoshiro stream.
// Fully deterministic for a fixed (seed, stream_id).
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream_id) : gen_(seed, stream_id) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = unit_positive(gen_());  // (0, 1]
    const double u2 = unit(gen_());           // [0, 1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static double unit_positive(std::uint64_t x) {
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
  }
  static double unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

  Xoshiro256PlusPlus gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace portlab::rng
