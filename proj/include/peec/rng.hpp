#pragma once
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace peec {

// Deterministic splitmix64 stream. One root seed fans out into independent
// per-purpose streams via derive(), so reordering draws in one subsystem
// never perturbs another.
class Rng {
 public:
  Rng() : state_(0x9e3779b97f4a7c15ull) {}
  explicit Rng(uint64_t seed) : state_(mix(seed + 0x9e3779b97f4a7c15ull)) {}

  static uint64_t hash_purpose(std::string_view purpose) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (char c : purpose) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
    return h;
  }

  static Rng derive(uint64_t root, std::string_view purpose, uint64_t index = 0) {
    uint64_t h = mix(root ^ mix(hash_purpose(purpose)));
    return Rng(mix(h + 0x632be59bd9b4e019ull * (index + 1)));
  }

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // uniform in [0, 1)
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // standard normal, Box-Muller; two u64 draws per value, no cache
  double normal() {
    double u1 = u01(), u2 = u01();
    while (u1 <= 0.0) u1 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // uniform integer in [0, n)
  uint64_t uniform_int(uint64_t n) { return next_u64() % n; }

  uint64_t state() const { return state_; }
  void set_state(uint64_t s) { state_ = s; }

 private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  uint64_t state_;
};

}  // namespace peec
