#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <set>

#include "beatsync/beat.h"
#include "beatsync/error.h"
#include "beatsync/harness.h"

using namespace beatsync;

namespace {

std::vector<int> brute_force_distance(int length, const std::vector<int>& beats) {
  std::vector<int> out(length);
  for (int i = 0; i < length; ++i) {
    int best = length * 2;
    for (int k : beats) best = std::min(best, std::abs(i - k));
    out[i] = best;
  }
  return out;
}

BeatGrid random_grid(std::mt19937_64& rng, int max_length) {
  const int length = std::uniform_int_distribution<int>(1, max_length)(rng);
  const int count = std::uniform_int_distribution<int>(1, std::min(length, 20))(rng);
  std::set<int> picks;
  std::uniform_int_distribution<int> frame(0, length - 1);
  while (static_cast<int>(picks.size()) < count) picks.insert(frame(rng));
  return BeatGrid(length, std::vector<int>(picks.begin(), picks.end()));
}

}  // namespace

TEST_CASE("beat grid validation") {
  CHECK_THROWS_AS(BeatGrid(5, {0, 5}), Error);
  CHECK_THROWS_AS(BeatGrid(5, {3, 3}), Error);
  CHECK_THROWS_AS(BeatGrid(5, {3, 1}), Error);
  CHECK_THROWS_AS(BeatGrid(0, {}), Error);
  CHECK(BeatGrid(5, {}).empty());
}

TEST_CASE("nearest beat distance examples") {
  CHECK(nearest_beat_distance(BeatGrid(6, {0, 4})) == std::vector<int>{0, 1, 2, 1, 0, 1});
  CHECK(nearest_beat_distance(BeatGrid(5, {0})) == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(nearest_beat_distance(BeatGrid(4, {0, 1, 2, 3})) == std::vector<int>{0, 0, 0, 0});
  try {
    nearest_beat_distance(BeatGrid(4, {}));
    FAIL("expected no-beats error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNoBeats);
  }
}

TEST_CASE("nearest beat distance properties on random grids") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const BeatGrid grid = random_grid(rng, 200);
    const auto b = nearest_beat_distance(grid);
    REQUIRE(b == brute_force_distance(grid.length(), grid.beat_frames()));
    for (int i = 0; i + 1 < grid.length(); ++i) CHECK(std::abs(b[i + 1] - b[i]) <= 1);
    for (int i = 0; i < grid.length(); ++i) CHECK((b[i] == 0) == grid.contains(i));
  }
}

TEST_CASE("adjacent interval") {
  CHECK(adjacent_interval(BeatGrid(6, {0, 4}), 2) == 4);
  CHECK(adjacent_interval(BeatGrid(12, {0, 4, 10}), 7) == 6);
  CHECK(adjacent_interval(BeatGrid(8, {3}), 0) == 8);
  SUBCASE("boundary frames use the nearest interior interval") {
    const BeatGrid grid(20, {5, 8, 15});
    CHECK(adjacent_interval(grid, 0) == 3);
    CHECK(adjacent_interval(grid, 19) == 7);
    CHECK(adjacent_interval(grid, 15) == 7);
    CHECK(adjacent_interval(grid, 8) == 7);
    CHECK(adjacent_interval(grid, 5) == 3);
  }
  CHECK_THROWS_AS(adjacent_interval(BeatGrid(8, {}), 0), Error);
  CHECK_THROWS_AS(adjacent_interval(BeatGrid(8, {2}), 8), Error);
}

TEST_CASE("extract motion beats") {
  SUBCASE("increasing speed has no minima") {
    std::vector<double> s(20);
    for (int i = 0; i < 20; ++i) s[i] = i;
    CHECK(extract_motion_beats(s, 0.0, 1).empty());
  }
  SUBCASE("constant speed has no strict minima") {
    CHECK(extract_motion_beats(std::vector<double>(30, 2.0), 0.0, 1).empty());
  }
  SUBCASE("rectified sine has minima at its zeros") {
    std::vector<double> s(41);
    for (int i = 0; i < 41; ++i) s[i] = std::abs(std::sin(std::numbers::pi * i / 10));
    for (int radius : {0, 1, 2}) {
      CHECK(extract_motion_beats(s, 0.0, radius).beat_frames() == std::vector<int>{10, 20, 30});
    }
  }
  SUBCASE("endpoints are never beats") {
    CHECK(extract_motion_beats(std::vector<double>{0, 1, 2, 1, 0}, 0.0, 0).empty());
  }
  SUBCASE("prominence threshold") {
    // Valley at 1 is 3 deep (bounded by 4 on the right); valley at 3 is 1 deep.
    const std::vector<double> s = {5, 1, 3, 2, 4};
    CHECK(extract_motion_beats(s, 0.0, 0).beat_frames() == std::vector<int>{1, 3});
    CHECK(extract_motion_beats(s, 1.0, 0).beat_frames() == std::vector<int>{1, 3});
    CHECK(extract_motion_beats(s, 1.5, 0).beat_frames() == std::vector<int>{1});
    CHECK(extract_motion_beats(s, 3.0, 0).beat_frames() == std::vector<int>{1});
    CHECK(extract_motion_beats(s, 3.5, 0).empty());
  }
  SUBCASE("invariant to positive scaling at zero prominence") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> s(60), scaled(60);
      const double k = 0.1 + 10 * u(rng);
      for (int i = 0; i < 60; ++i) {
        s[i] = u(rng);
        scaled[i] = k * s[i];
      }
      CHECK(extract_motion_beats(s, 0.0, 0) == extract_motion_beats(scaled, 0.0, 0));
    }
  }
}

TEST_CASE("beats from times") {
  const std::vector<double> t1 = {0.0, 0.5};
  CHECK(beats_from_times(t1, 30.0, 60).beat_frames() == std::vector<int>{0, 15});
  const std::vector<double> t2 = {0.49};
  CHECK(beats_from_times(t2, 30.0, 60).beat_frames() == std::vector<int>{15});
  CHECK(beats_from_times(std::vector<double>{}, 30.0, 60).empty());
  const std::vector<double> dupes = {0.1, 0.1001, 0.2};
  CHECK(beats_from_times(dupes, 30.0, 60).beat_frames() == std::vector<int>{3, 6});
  const std::vector<double> late = {1.99};
  CHECK(beats_from_times(late, 30.0, 60).beat_frames() == std::vector<int>{59});
  const std::vector<double> out_of_range = {2.0};
  try {
    beats_from_times(out_of_range, 30.0, 60);
    FAIL("expected range error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kRange);
  }
  const std::vector<double> decreasing = {0.5, 0.2};
  CHECK_THROWS_AS(beats_from_times(decreasing, 30.0, 60), Error);
}

TEST_CASE("beats_from_times round-trips frame-aligned beats") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const BeatGrid grid = random_grid(rng, 300);
    for (double fps : {24.0, 30.0, 60.0}) {
      std::vector<double> times;
      for (int f : grid.beat_frames()) times.push_back(f / fps);
      CHECK(beats_from_times(times, fps, grid.length()) == grid);
    }
  }
}

TEST_CASE("estimate beat distance") {
  const Skeleton skel = Skeleton::smpl_default();
  SUBCASE("periodic motion matches brute-force distance to the constructed minima") {
    SynthParams params;
    params.period = 12;
    const auto seq = synth_motion(SynthKind::kPeriodic, 80, 30.0, params, 3);
    const auto est = estimate_beat_distance(seq, skel);
    CHECK_FALSE(est.no_beats);
    const std::vector<int> minima = {12, 24, 36, 48, 60, 72};
    CHECK(est.motion_beats.beat_frames() == minima);
    CHECK(est.distance == brute_force_distance(80, minima));
  }
  SUBCASE("static motion is flagged") {
    const auto est = estimate_beat_distance(synth_motion(SynthKind::kStatic, 30, 30.0, {}, 1), skel);
    CHECK(est.no_beats);
    CHECK(est.motion_beats.empty());
    CHECK(est.distance == std::vector<int>(30, 30));
  }
  SUBCASE("planted beats give zero distance exactly there") {
    SynthParams params;
    params.period = 15;
    const auto est = estimate_beat_distance(synth_motion(SynthKind::kPeriodic, 61, 30.0, params, 9), skel);
    for (int i = 0; i < 61; ++i) CHECK((est.distance[i] == 0) == (i == 15 || i == 30 || i == 45));
  }
  CHECK_THROWS_AS(estimate_beat_distance(MotionSequence::rest(30.0, 2), skel), Error);
}
