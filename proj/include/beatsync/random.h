#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace beatsync {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so results do not depend on call order or on
/// the standard library's distribution implementations.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const;
  /// Standard normal via Box-Muller on counters 2k and 2k+1.
  double normal(std::uint64_t counter) const;

  /// Sequential helpers over an internal counter.
  std::uint64_t next_bits() { return bits(counter_++); }
  double next_uniform() { return uniform(counter_++); }
  /// Uniform integer in [0, bound) by rejection sampling.
  std::uint64_t next_below(std::uint64_t bound);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

/// rows x cols standard-normal matrix; entry (r, c) uses counter r*cols + c.
Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, std::uint64_t stream);

}  // namespace beatsync
