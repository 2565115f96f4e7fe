#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

#include "beatsync/beat.h"
#include "beatsync/fusion_mask.h"
#include "beatsync/motion.h"

namespace beatsync {

enum class BasDirection { kMotionToMusic, kMusicToMotion };
enum class BapMode { kPrecision, kRecall };

struct MetricConfig {
  double bas_sigma = 3.0;  // frames
  int bap_tolerance = 3;   // frames
  BasDirection bas_direction = BasDirection::kMotionToMusic;
  BapMode bap_mode = BapMode::kPrecision;
  int up_axis = 1;  // vertical axis of the skeleton frame (y for SMPL)
  MotionBeatParams motion_beats;

  void validate() const;
  bool operator==(const MetricConfig& o) const {
    return bas_sigma == o.bas_sigma && bap_tolerance == o.bap_tolerance && bas_direction == o.bas_direction &&
           bap_mode == o.bap_mode && up_axis == o.up_axis &&
           motion_beats.min_prominence == o.motion_beats.min_prominence &&
           motion_beats.smooth_radius == o.motion_beats.smooth_radius;
  }
};

/// Metrics that could not be evaluated for the given inputs are left empty.
struct MetricReport {
  std::optional<double> bas;
  std::optional<double> pfc;
  std::optional<double> kpd;
  std::optional<double> bap;
  std::optional<double> div_k;
  /// BAP was computed from an empty beat set and reported as 0.
  bool bap_degenerate = false;
  MetricConfig config;

  bool operator==(const MetricReport&) const = default;
};

/// Mean over source beats of exp(-min_dst (t - u)^2 / (2 sigma^2)). With the
/// default direction the sources are the motion beats.
double beat_alignment_score(const BeatGrid& motion_beats, const BeatGrid& music_beats, const MetricConfig& cfg);

/// Foot-contact plausibility with the root joint standing in for the center
/// of mass:
///   PFC = sum_i |a_i| * vL_i * vR_i / (L * max_i |a_i|)
/// a_i is the root acceleration with its upward component clamped at 0 from
/// below, vL / vR the smaller horizontal speed of each foot's ankle and toe
/// joints. Zero when the root never accelerates.
double physical_foot_contact(const JointPositions& pos, double fps, int up_axis = 1);

/// Root-relative joint MSE over the keyframes of `mask`.
double keypose_distance(const JointPositions& generated, const JointPositions& reference, const KeyframeMask& mask);

struct BapResult {
  double value = 0.0;
  bool degenerate = false;
};

/// Precision: share of generated beats within the tolerance of a designated
/// beat. Recall: share of designated beats within the tolerance of a
/// generated beat. An empty denominator yields 0 with `degenerate` set.
BapResult beat_assignment_precision(const BeatGrid& generated, const BeatGrid& designated, const MetricConfig& cfg);

/// Per-joint mean squared speed over the clip (24 values).
Eigen::VectorXd kinetic_features(const MotionSequence& seq, const Skeleton& skel);

/// Mean Euclidean distance over all unordered pairs of feature vectors.
double mean_pairwise_distance(std::span<const Eigen::VectorXd> features);

double kinetic_diversity(std::span<const MotionSequence> set, const Skeleton& skel);

}  // namespace beatsync
