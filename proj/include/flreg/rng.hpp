#pragma once

#include <cstdint>

namespace flreg {

/// Counter-based random stream: output i is a pure function of (key, i),
/// so draws are identical regardless of thread scheduling and streams can
/// be split without coordination.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  /// Independent substream for index idx (replicate splitting).
  CounterRng substream(std::uint64_t idx) const;

  std::uint64_t next_u64();
  /// Uniform draw strictly inside (0,1).
  double next_uniform();
  /// Standard normal via the inverse-CDF of a uniform draw.
  double next_normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Inverse of the standard normal CDF (Wichura's AS241, double precision).
double normal_quantile(double p);

}  // namespace flreg
