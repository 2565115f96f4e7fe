#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <random>
#include <set>

#include "beatsync/error.h"
#include "beatsync/fusion_mask.h"

using namespace beatsync;

namespace {

int brute_distance(const std::vector<int>& beats, int i) {
  int best = 1 << 30;
  for (int k : beats) best = std::min(best, std::abs(i - k));
  return best;
}

// Interval of the beat pair around i, with the boundary conventions spelled out.
int brute_interval(const std::vector<int>& beats, int length, int i) {
  if (beats.size() == 1) return length;
  for (std::size_t m = 0; m + 1 < beats.size(); ++m) {
    if (beats[m] <= i && i < beats[m + 1]) return beats[m + 1] - beats[m];
  }
  if (i < beats.front()) return beats[1] - beats[0];
  return beats.back() - beats[beats.size() - 2];
}

std::vector<std::uint8_t> brute_dilate(const std::vector<int>& keys, const std::vector<int>& beats, int length,
                                       int s) {
  std::vector<std::uint8_t> out(length, 0);
  for (int j = 0; j < length; ++j) {
    for (int k : keys) {
      const double raw = s * std::exp(-2.0 * brute_distance(beats, k) / brute_interval(beats, length, k));
      const int n = std::max(1, std::min(s, static_cast<int>(std::ceil(raw))));
      if (std::abs(j - k) <= n) out[j] = 1;
    }
  }
  return out;
}

std::vector<int> random_subset(std::mt19937_64& rng, int length, int max_count) {
  const int count = std::uniform_int_distribution<int>(1, std::min(length, max_count))(rng);
  std::set<int> picks;
  std::uniform_int_distribution<int> frame(0, length - 1);
  while (static_cast<int>(picks.size()) < count) picks.insert(frame(rng));
  return {picks.begin(), picks.end()};
}

}  // namespace

TEST_CASE("dilation step") {
  CHECK(dilation_step(0, 10, 4) == 4);
  CHECK(dilation_step(7, 7, 4) == 1);
  CHECK(dilation_step(5, 10, 8) == 3);
  CHECK(dilation_step(1e6, 1, 24) == 1);
  for (int s : kDefaultDilationSteps) CHECK(dilation_step(0, 30, s) == s);
  CHECK_THROWS_AS(dilation_step(1, 0, 4), Error);
  CHECK_THROWS_AS(dilation_step(-1, 5, 4), Error);
  CHECK_THROWS_AS(dilation_step(1, 5, 0), Error);

  SUBCASE("stays in range and shrinks with distance") {
    for (int s = 1; s <= 24; ++s) {
      for (int d = 1; d <= 40; ++d) {
        int prev = s + 1;
        for (int b = 0; b <= 2 * d; ++b) {
          const int n = dilation_step(b, d, s);
          CHECK(n >= 1);
          CHECK(n <= s);
          CHECK(n <= prev);
          prev = n;
        }
      }
    }
  }
}

TEST_CASE("dilate mask examples") {
  const auto m = dilate_mask(TemporalMask::from_keyframes(20, {10}), BeatGrid(20, {10}), 4);
  for (int j = 0; j < 20; ++j) CHECK(m[j] == (j >= 6 && j <= 14 ? 1 : 0));

  CHECK(dilate_mask(TemporalMask::zeros(20), BeatGrid(20, {10}), 4) == TemporalMask::zeros(20));

  SUBCASE("windows clip at the sequence edges") {
    const auto e = dilate_mask(TemporalMask::from_keyframes(10, {0, 9}), BeatGrid(10, {0, 9}), 4);
    CHECK(e.keyframes() == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  }
  SUBCASE("overlapping windows union") {
    // Keyframe 10 sits on a beat (n = 4); keyframe 12 is two frames off (n = ceil(4 e^-0.4) = 3).
    const auto u = dilate_mask(TemporalMask::from_keyframes(30, {10, 12}), BeatGrid(30, {0, 10, 20}), 4);
    CHECK(u.keyframes() == std::vector<int>{6, 7, 8, 9, 10, 11, 12, 13, 14, 15});
  }
  CHECK_THROWS_AS(dilate_mask(TemporalMask::zeros(5), BeatGrid(6, {1}), 4), Error);
  CHECK_THROWS_AS(dilate_mask(TemporalMask::from_keyframes(6, {2}), BeatGrid(6, {}), 4), Error);
}

TEST_CASE("dilate mask properties") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 400; ++trial) {
    const int length = std::uniform_int_distribution<int>(2, 150)(rng);
    const auto keys = random_subset(rng, length, 8);
    const auto beats = random_subset(rng, length, 12);
    const auto mask = TemporalMask::from_keyframes(length, keys);
    const BeatGrid grid(length, beats);
    TemporalMask prev = mask;
    for (int s : kDefaultDilationSteps) {
      const auto d = dilate_mask(mask, grid, s);
      REQUIRE(d.values() == brute_dilate(keys, beats, length, s));
      for (int j = 0; j < length; ++j) {
        CHECK(d[j] >= mask[j]);
        CHECK(d[j] >= prev[j]);
        if (d[j]) CHECK(brute_distance(keys, j) <= s);
      }
      prev = d;
    }
  }
}

TEST_CASE("attention mask is the outer product") {
  const auto m = TemporalMask::from_keyframes(6, {1, 4});
  const auto md = TemporalMask::from_keyframes(6, {0, 1, 2, 4});
  const auto a = attention_mask(m, md);
  REQUIRE(a.length() == 6);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) CHECK(a(i, j) == m[i] * md[j]);
  }
  CHECK_THROWS_AS(attention_mask(m, TemporalMask::zeros(5)), Error);
}

TEST_CASE("masked attention") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  auto randm = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = n01(rng);
    return m;
  };

  SUBCASE("a single allowed key copies its value") {
    const int length = 5;
    std::vector<std::uint8_t> v(length * length, 0);
    for (int i = 0; i < length; ++i) v[i * length + (i + 2) % length] = 1;
    const Eigen::MatrixXd q = randm(length, 3), k = randm(length, 3), val = randm(length, 4);
    const auto out = masked_attention(q, k, val, AttentionMask(length, v));
    for (int i = 0; i < length; ++i) CHECK((out.row(i) - val.row((i + 2) % length)).norm() < 1e-12);
  }
  SUBCASE("zero queries average the allowed values") {
    const int length = 4;
    std::vector<std::uint8_t> v(length * length, 1);
    const Eigen::MatrixXd val = randm(length, 2);
    const auto out = masked_attention(Eigen::MatrixXd::Zero(length, 3), randm(length, 3), val, AttentionMask(length, v));
    const Eigen::RowVectorXd mean = val.colwise().mean();
    for (int i = 0; i < length; ++i) CHECK((out.row(i) - mean).norm() < 1e-12);
  }
  SUBCASE("hand-computed softmax") {
    // Row 0 sees keys 0 and 1 with scores 0 and 1; row 1 is fully masked.
    Eigen::MatrixXd q(2, 1), k(2, 1), val(2, 2);
    q << 1, 1;
    k << 0, 1;
    val << 1, 0, 0, 1;
    const auto out = masked_attention(q, k, val, AttentionMask(2, {1, 1, 0, 0}));
    const double e = std::exp(1.0);
    CHECK(out(0, 0) == doctest::Approx(1.0 / (1.0 + e)).epsilon(1e-14));
    CHECK(out(0, 1) == doctest::Approx(e / (1.0 + e)).epsilon(1e-14));
    CHECK(out(1, 0) == 0.0);
    CHECK(out(1, 1) == 0.0);
  }
  SUBCASE("outputs are convex combinations of allowed values") {
    for (int trial = 0; trial < 100; ++trial) {
      const int length = std::uniform_int_distribution<int>(1, 12)(rng);
      std::vector<std::uint8_t> v(length * length);
      for (auto& x : v) x = std::bernoulli_distribution(0.4)(rng);
      const Eigen::MatrixXd q = 5 * randm(length, 4), k = randm(length, 4), val = randm(length, 3);
      const auto out = masked_attention(q, k, val, AttentionMask(length, v));
      REQUIRE(out.allFinite());
      for (int i = 0; i < length; ++i) {
        bool any = false;
        for (int c = 0; c < 3; ++c) {
          double lo = 1e300, hi = -1e300;
          for (int j = 0; j < length; ++j) {
            if (!v[i * length + j]) continue;
            any = true;
            lo = std::min(lo, val(j, c));
            hi = std::max(hi, val(j, c));
          }
          if (any) {
            CHECK(out(i, c) >= lo - 1e-12);
            CHECK(out(i, c) <= hi + 1e-12);
          } else {
            CHECK(out(i, c) == 0.0);
          }
        }
      }
    }
  }
  SUBCASE("large scores stay finite") {
    Eigen::MatrixXd q(2, 1), k(2, 1), val(2, 1);
    q << 1e6, 1e6;
    k << 1e6, -1e6;
    val << 3, 7;
    const auto out = masked_attention(q, k, val, AttentionMask(2, {1, 1, 1, 1}));
    CHECK(out(0, 0) == doctest::Approx(3.0));
  }
  CHECK_THROWS_AS(masked_attention(randm(3, 2), randm(2, 2), randm(3, 1), AttentionMask(3, std::vector<std::uint8_t>(9, 1))),
                  Error);
}
