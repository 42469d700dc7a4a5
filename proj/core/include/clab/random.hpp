#ifndef CLAB_RANDOM_HPP
#define CLAB_RANDOM_HPP

#include <cstdint>

namespace clab {

// SplitMix64.  Used for every randomized suite so that runs reproduce
// bit-for-bit across platforms from a 64-bit seed.
class Rng {
public:
  explicit Rng(uint64_t seed = 0) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, n), n >= 1; rejection-free modulo is fine here because
  // n is tiny compared to 2^64
  uint64_t below(uint64_t n) { return next() % n; }

  // uniform double in [0, 1)
  double real() { return double(next() >> 11) * 0x1.0p-53; }

private:
  uint64_t state_;
};

} // namespace clab

#endif
