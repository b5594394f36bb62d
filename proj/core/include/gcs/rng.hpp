#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gcs {

// Splittable counter-based random stream (SplitMix64 core). Every output is a
// pure function of (key, counter), so sequences are bit-identical across
// platforms and compilers, and child streams obtained from split() can be
// handed to concurrent workers without sharing state.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(mix(seed + kGamma) ^ mix(stream + kLeaf))) {}

  // Derives an independent child stream. The child's identity depends only on
  // the parent's key and the child id, never on how much the parent has drawn.
  [[nodiscard]] RngStream split(std::uint64_t child) const {
    return RngStream(FromKey{}, mix(key_ + mix(child + kLeaf)));
  }

  std::uint64_t next_u64() {
    counter_ += kGamma;
    return mix(counter_ ^ key_);
  }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe under log().
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the paired value is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  // Exponential(1); used for Dirichlet(1) simplex draws.
  double exponential() { return -std::log(uniform_open()); }

 private:
  struct FromKey {};
  RngStream(FromKey, std::uint64_t key) : key_(key) {}

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kLeaf = 0xD1B54A32D192ED03ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gcs
