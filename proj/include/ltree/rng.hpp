#pragma once

#include <cstdint>
#include <random>

namespace ltree {

/// splitmix64 finalizer; used to derive independent per-trial seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Seedable generator with a fixed, platform-independent output stream.
///
/// Raw bits come from std::mt19937_64, whose sequence is pinned by the C++
/// standard. The distributions are implemented here rather than taken from
/// <random> because std::uniform_real_distribution and
/// std::normal_distribution are implementation-defined.
///
///  * uniform(): top 53 bits of one engine draw, scaled by 2^-53, in [0, 1).
///  * normal(): Marsaglia polar method; the second variate of each accepted
///    pair is cached and returned by the next call.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ltree
