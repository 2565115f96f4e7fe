#include "beatsync/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "beatsync/error.h"

namespace beatsync {

namespace {

// Distance from `frame` to the closest entry of a sorted beat list.
int distance_to_nearest(const std::vector<int>& beats, int frame) {
  auto it = std::lower_bound(beats.begin(), beats.end(), frame);
  int best = std::numeric_limits<int>::max();
  if (it != beats.end()) best = *it - frame;
  if (it != beats.begin()) best = std::min(best, frame - *(it - 1));
  return best;
}

double horizontal_speed(Eigen::Vector3d v, int up_axis) {
  v[up_axis] = 0.0;
  return v.norm();
}

}  // namespace

void MetricConfig::validate() const {
  BEATSYNC_CHECK(bas_sigma > 0.0, ErrorKind::kDomain, "bas_sigma must be positive");
  BEATSYNC_CHECK(bap_tolerance >= 0, ErrorKind::kDomain, "bap_tolerance must be nonnegative");
  BEATSYNC_CHECK(up_axis >= 0 && up_axis < 3, ErrorKind::kDomain, "up_axis must be 0, 1 or 2");
  BEATSYNC_CHECK(motion_beats.min_prominence >= 0.0 && motion_beats.smooth_radius >= 0, ErrorKind::kDomain,
                 "motion beat parameters must be nonnegative");
}

double beat_alignment_score(const BeatGrid& motion_beats, const BeatGrid& music_beats, const MetricConfig& cfg) {
  cfg.validate();
  BEATSYNC_CHECK(!motion_beats.empty() && !music_beats.empty(), ErrorKind::kNoBeats, "BAS needs beats on both sides");
  BEATSYNC_CHECK(motion_beats.length() == music_beats.length(), ErrorKind::kShapeMismatch,
                 "beat grids must share length");
  const bool motion_src = cfg.bas_direction == BasDirection::kMotionToMusic;
  const auto& src = motion_src ? motion_beats.beat_frames() : music_beats.beat_frames();
  const auto& dst = motion_src ? music_beats.beat_frames() : motion_beats.beat_frames();
  double sum = 0.0;
  for (int t : src) {
    const double d = distance_to_nearest(dst, t);
    sum += std::exp(-d * d / (2.0 * cfg.bas_sigma * cfg.bas_sigma));
  }
  return sum / static_cast<double>(src.size());
}

double physical_foot_contact(const JointPositions& pos, double fps, int up_axis) {
  BEATSYNC_CHECK(pos.length() >= 3, ErrorKind::kSequenceTooShort, "PFC needs at least 3 frames");
  BEATSYNC_CHECK(up_axis >= 0 && up_axis < 3, ErrorKind::kDomain, "up_axis must be 0, 1 or 2");
  const JointSeries acc = joint_acceleration(pos, fps);
  const JointSeries vel = joint_velocity(pos, fps);
  const int length = pos.length();
  std::vector<double> root_acc(length);
  for (int i = 0; i < length; ++i) {
    Eigen::Vector3d a = acc.at(i, 0);
    a[up_axis] = std::max(a[up_axis], 0.0);
    root_acc[i] = a.norm();
  }
  const double max_acc = *std::max_element(root_acc.begin(), root_acc.end());
  if (max_acc == 0.0) return 0.0;
  double sum = 0.0;
  for (int i = 0; i < length; ++i) {
    const double left =
        std::min(horizontal_speed(vel.at(i, kLeftAnkle), up_axis), horizontal_speed(vel.at(i, kLeftFoot), up_axis));
    const double right = std::min(horizontal_speed(vel.at(i, kRightAnkle), up_axis),
                                  horizontal_speed(vel.at(i, kRightFoot), up_axis));
    sum += root_acc[i] * left * right;
  }
  return sum / (length * max_acc);
}

double keypose_distance(const JointPositions& generated, const JointPositions& reference, const KeyframeMask& mask) {
  BEATSYNC_CHECK(generated.length() == reference.length() && mask.length() == generated.length(),
                 ErrorKind::kShapeMismatch, "KPD inputs must share length");
  const std::vector<int> keys = mask.keyframes();
  BEATSYNC_CHECK(!keys.empty(), ErrorKind::kInvalidInput, "KPD needs at least one keyframe");
  double sum = 0.0;
  for (int i : keys) {
    const Eigen::Vector3d g_root = generated.at(i, 0);
    const Eigen::Vector3d r_root = reference.at(i, 0);
    for (int j = 0; j < kNumJoints; ++j) {
      sum += ((generated.at(i, j) - g_root) - (reference.at(i, j) - r_root)).squaredNorm();
    }
  }
  return sum / (static_cast<double>(keys.size()) * kNumJoints * 3);
}

BapResult beat_assignment_precision(const BeatGrid& generated, const BeatGrid& designated, const MetricConfig& cfg) {
  cfg.validate();
  const bool precision = cfg.bap_mode == BapMode::kPrecision;
  const auto& src = precision ? generated.beat_frames() : designated.beat_frames();
  const auto& dst = precision ? designated.beat_frames() : generated.beat_frames();
  if (src.empty()) return {0.0, true};
  int hits = 0;
  for (int t : src) {
    if (!dst.empty() && distance_to_nearest(dst, t) <= cfg.bap_tolerance) ++hits;
  }
  return {static_cast<double>(hits) / static_cast<double>(src.size()), false};
}

Eigen::VectorXd kinetic_features(const MotionSequence& seq, const Skeleton& skel) {
  const JointSeries vel = joint_velocity(forward_kinematics(seq, skel), seq.fps());
  Eigen::VectorXd feat = Eigen::VectorXd::Zero(kNumJoints);
  for (int i = 0; i < vel.length(); ++i) {
    for (int j = 0; j < kNumJoints; ++j) feat[j] += vel.at(i, j).squaredNorm();
  }
  return feat / vel.length();
}

double mean_pairwise_distance(std::span<const Eigen::VectorXd> features) {
  BEATSYNC_CHECK(features.size() >= 2, ErrorKind::kInvalidInput, "diversity needs at least two sequences");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < features.size(); ++a) {
    for (std::size_t b = a + 1; b < features.size(); ++b) {
      BEATSYNC_CHECK(features[a].size() == features[b].size(), ErrorKind::kShapeMismatch, "feature sizes differ");
      sum += (features[a] - features[b]).norm();
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

double kinetic_diversity(std::span<const MotionSequence> set, const Skeleton& skel) {
  BEATSYNC_CHECK(set.size() >= 2, ErrorKind::kInvalidInput, "diversity needs at least two sequences");
  std::vector<Eigen::VectorXd> features;
  features.reserve(set.size());
  for (const auto& seq : set) features.push_back(kinetic_features(seq, skel));
  return mean_pairwise_distance(features);
}

}  // namespace beatsync
