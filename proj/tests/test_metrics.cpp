#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "beatsync/error.h"
#include "beatsync/metrics.h"
#include "test_support.h"

using namespace beatsync;
using beatsync::testing::random_motion;
using beatsync::testing::shifted_root;

TEST_CASE("beat alignment score") {
  const MetricConfig cfg;
  const BeatGrid a(60, {5, 20, 41});
  CHECK(beat_alignment_score(a, a, cfg) == 1.0);
  CHECK(beat_alignment_score(BeatGrid(60, {13}), BeatGrid(60, {10}), cfg) ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
  CHECK(beat_alignment_score(BeatGrid(200, {0}), BeatGrid(200, {199}), cfg) < 1e-100);

  SUBCASE("direction picks the averaging side") {
    // Motion {10, 30} vs music {10}: motion side averages (1 + e^{-400/18}) / 2,
    // music side sees only the exact match.
    const BeatGrid motion(40, {10, 30}), music(40, {10});
    CHECK(beat_alignment_score(motion, music, cfg) == doctest::Approx((1.0 + std::exp(-400.0 / 18.0)) / 2.0));
    MetricConfig rev;
    rev.bas_direction = BasDirection::kMusicToMotion;
    CHECK(beat_alignment_score(motion, music, rev) == 1.0);
  }
  SUBCASE("range and shift invariance") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<int> m, u;
      for (int i = 0; i < 80; ++i) {
        if (std::bernoulli_distribution(0.1)(rng)) m.push_back(i);
        if (std::bernoulli_distribution(0.1)(rng)) u.push_back(i);
      }
      if (m.empty() || u.empty()) continue;
      const double s = beat_alignment_score(BeatGrid(80, m), BeatGrid(80, u), cfg);
      CHECK(s > 0.0);
      CHECK(s <= 1.0);
      for (int& x : m) x += 7;
      for (int& x : u) x += 7;
      CHECK(beat_alignment_score(BeatGrid(87, m), BeatGrid(87, u), cfg) == doctest::Approx(s).epsilon(1e-15));
    }
  }
  CHECK_THROWS_AS(beat_alignment_score(BeatGrid(10, {}), BeatGrid(10, {2}), cfg), Error);
  CHECK_THROWS_AS(beat_alignment_score(BeatGrid(10, {1}), BeatGrid(11, {2}), cfg), Error);
}

TEST_CASE("physical foot contact") {
  const Skeleton skel = Skeleton::smpl_default();
  CHECK(physical_foot_contact(forward_kinematics(MotionSequence::rest(30.0, 10), skel), 30.0) == 0.0);

  SUBCASE("pinned feet with an accelerating root") {
    JointPositions pos = JointPositions::zeros(8);
    for (int i = 0; i < 8; ++i) pos.set(i, 0, {0.0, 0.05 * i * i, 0.1 * i * i});
    CHECK(physical_foot_contact(pos, 30.0) == 0.0);
  }
  SUBCASE("five-frame hand case") {
    // Root height 0,0,1,3,4 at 1 fps: accelerations 1,1,-1 then -1,-1
    // replicated; downward ones clamp to 0 so |a| = 1,1,0,0,0.
    // Left foot speeds: ankle 1, toe 2 -> 1. Right: ankle 3, toe 0.5 -> 0.5.
    // Vertical foot motion is ignored.
    const double heights[5] = {0, 0, 1, 3, 4};
    JointPositions pos = JointPositions::zeros(5);
    for (int i = 0; i < 5; ++i) {
      pos.set(i, 0, {0.0, heights[i], 0.0});
      pos.set(i, kLeftAnkle, {1.0 * i, 5.0 * i, 0.0});
      pos.set(i, kLeftFoot, {0.0, 0.0, 2.0 * i});
      pos.set(i, kRightAnkle, {3.0 * i, 0.0, 0.0});
      pos.set(i, kRightFoot, {0.3 * i, -2.0 * i, 0.4 * i});
    }
    CHECK(physical_foot_contact(pos, 1.0) == doctest::Approx(2.0 * 0.5 / 5.0).epsilon(1e-12));
    // Read z-up, the left toe only moves vertically, so the left foot counts as planted.
    CHECK(physical_foot_contact(pos, 1.0, 2) == 0.0);
  }
  SUBCASE("nonnegative on random motion") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
      const double p = physical_foot_contact(forward_kinematics(random_motion(rng, 20), skel), 30.0);
      CHECK(p >= 0.0);
      CHECK(std::isfinite(p));
    }
  }
  CHECK_THROWS_AS(physical_foot_contact(JointPositions::zeros(2), 30.0), Error);
}

TEST_CASE("keypose distance") {
  std::mt19937_64 rng(3);
  const Skeleton skel = Skeleton::smpl_default();
  const auto x = random_motion(rng, 12);
  const auto px = forward_kinematics(x, skel);
  const auto mask = TemporalMask::from_keyframes(12, {0, 4, 9});
  CHECK(keypose_distance(px, px, mask) == 0.0);
  CHECK(keypose_distance(forward_kinematics(shifted_root(x, {5, 0, 0}), skel), px, mask) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  JointPositions moved = px;
  moved.set(4, 13, px.at(4, 13) + Eigen::Vector3d(0, 1, 0));
  CHECK(keypose_distance(moved, px, mask) == doctest::Approx(1.0 / (3 * 24 * 3)).epsilon(1e-12));
  // Off-keyframe edits are invisible.
  moved.set(5, 13, px.at(5, 13) + Eigen::Vector3d(9, 9, 9));
  CHECK(keypose_distance(moved, px, mask) == doctest::Approx(1.0 / (3 * 24 * 3)).epsilon(1e-12));

  const auto y = random_motion(rng, 12);
  const auto py = forward_kinematics(y, skel);
  const Eigen::Vector3d shift(-2, 0.5, 3);
  CHECK(keypose_distance(forward_kinematics(shifted_root(x, shift), skel),
                         forward_kinematics(shifted_root(y, shift), skel), mask) ==
        doctest::Approx(keypose_distance(px, py, mask)).epsilon(1e-12));

  CHECK_THROWS_AS(keypose_distance(px, px, TemporalMask::zeros(12)), Error);
  CHECK_THROWS_AS(keypose_distance(px, px, TemporalMask::zeros(11)), Error);
}

TEST_CASE("beat assignment precision") {
  MetricConfig cfg;
  const BeatGrid a(50, {10, 20, 33});
  CHECK(beat_assignment_precision(a, a, cfg).value == 1.0);
  CHECK(beat_assignment_precision(BeatGrid(50, {0, 1}), BeatGrid(50, {30, 40}), cfg).value == 0.0);
  const BeatGrid designated(50, {10, 21, 40});
  CHECK(beat_assignment_precision(a, designated, cfg).value == 2.0 / 3.0);

  const auto empty = beat_assignment_precision(BeatGrid(50, {}), designated, cfg);
  CHECK(empty.value == 0.0);
  CHECK(empty.degenerate);
  CHECK(beat_assignment_precision(a, BeatGrid(50, {}), cfg).value == 0.0);

  cfg.bap_mode = BapMode::kRecall;
  // Designated 40 has nothing within 3 frames; 10 and 21 do.
  CHECK(beat_assignment_precision(BeatGrid(50, {10, 20}), designated, cfg).value == 2.0 / 3.0);

  SUBCASE("monotone in tolerance") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<int> g, d;
      for (int i = 0; i < 100; ++i) {
        if (std::bernoulli_distribution(0.08)(rng)) g.push_back(i);
        if (std::bernoulli_distribution(0.08)(rng)) d.push_back(i);
      }
      MetricConfig c;
      double prev = 0.0;
      for (int tol = 0; tol <= 12; ++tol) {
        c.bap_tolerance = tol;
        const double v = beat_assignment_precision(BeatGrid(100, g), BeatGrid(100, d), c).value;
        CHECK(v >= prev);
        CHECK(v <= 1.0);
        prev = v;
      }
    }
  }
}

TEST_CASE("kinetic diversity") {
  std::mt19937_64 rng(5);
  const Skeleton skel = Skeleton::smpl_default();
  const auto x = random_motion(rng, 10);
  const std::vector<MotionSequence> dupes = {x, x, x};
  CHECK(kinetic_diversity(dupes, skel) == 0.0);

  const std::vector<Eigen::VectorXd> unit = {Eigen::VectorXd::Unit(24, 3), Eigen::VectorXd::Zero(24)};
  CHECK(mean_pairwise_distance(unit) == 1.0);

  SUBCASE("three sequences against a brute-force feature pipeline") {
    std::vector<MotionSequence> set = {random_motion(rng, 10), random_motion(rng, 10), random_motion(rng, 14)};
    std::vector<Eigen::VectorXd> feats;
    for (const auto& s : set) {
      const auto p = forward_kinematics(s, skel);
      Eigen::VectorXd f = Eigen::VectorXd::Zero(24);
      for (int i = 0; i < s.length(); ++i) {
        const int next = std::min(i + 1, s.length() - 1);
        const int from = next == i ? i - 1 : i;
        for (int j = 0; j < 24; ++j) f[j] += ((p.at(from + 1, j) - p.at(from, j)) * s.fps()).squaredNorm();
      }
      feats.push_back(f / s.length());
    }
    const double brute =
        ((feats[0] - feats[1]).norm() + (feats[0] - feats[2]).norm() + (feats[1] - feats[2]).norm()) / 3.0;
    CHECK(kinetic_diversity(set, skel) == doctest::Approx(brute).epsilon(1e-10));
    std::swap(set[0], set[2]);
    CHECK(kinetic_diversity(set, skel) == doctest::Approx(brute).epsilon(1e-10));
  }
  const std::vector<MotionSequence> single = {x};
  CHECK_THROWS_AS(kinetic_diversity(single, skel), Error);
}
