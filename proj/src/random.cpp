#include "beatsync/random.h"

#include <cmath>
#include <numbers>

#include "beatsync/error.h"

namespace beatsync {

namespace {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  const std::uint64_t key = mix64(seed_ + 0x9e3779b97f4a7c15ULL * (stream_ + 1));
  return mix64(key ^ mix64(counter + 0x9e3779b97f4a7c15ULL));
}

double CounterRng::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t counter) const {
  const std::uint64_t pair = counter / 2;
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform(2 * pair);
  const double u2 = uniform(2 * pair + 1);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (counter % 2 == 0) ? radius * std::cos(angle) : radius * std::sin(angle);
}

std::uint64_t CounterRng::next_below(std::uint64_t bound) {
  BEATSYNC_CHECK(bound > 0, ErrorKind::kDomain, "bound must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t r = next_bits();
  while (r >= limit) r = next_bits();
  return r % bound;
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, std::uint64_t stream) {
  const CounterRng rng(seed, stream);
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = rng.normal(static_cast<std::uint64_t>(r * cols + c));
  }
  return out;
}

}  // namespace beatsync
