#pragma once

#include <span>

#include "beatsync/beat.h"
#include "beatsync/motion.h"

namespace beatsync {

struct LossWeights {
  double lambda_joint = 1.0;
  double lambda_vel = 2.5;
  double lambda_contact = 10.0;
  double lambda_acc = 0.1;
  double lambda_kin = 1.0;
  double lambda_beat = 0.5;
  // Shrinkage weight w_s = 1 / (1 + exp(a * (c - relative_error))).
  double shrink_a = 10.0;
  double shrink_c = 0.2;
  // Relative beat error is |b - b_hat| / max(b, epsilon_b).
  double epsilon_b = 1.0;
  // Divide the beat loss by L instead of summing over frames.
  bool normalize_beat = false;

  void validate() const;
  bool operator==(const LossWeights&) const = default;
};

struct KinematicComponents {
  double joint = 0.0;
  double vel = 0.0;
  double contact = 0.0;
  double acc = 0.0;
};

struct LossReport {
  double simple = 0.0;
  double joint = 0.0;
  double vel = 0.0;
  double contact = 0.0;
  double acc = 0.0;
  double kin = 0.0;
  double beat = 0.0;
  double total = 0.0;

  bool operator==(const LossReport&) const = default;
};

/// Mean squared error over all frames and pose coordinates.
double simple_loss(const MotionSequence& x0, const MotionSequence& x0_hat);

/// (1/L) sum_i ||FK(x)_i - FK(x_hat)_i||^2.
double joint_loss(const MotionSequence& x0, const MotionSequence& x0_hat, const Skeleton& skel);

/// (1/L) sum_i ||x'_i - x_hat'_i||^2 + ||FK(x)'_i - FK(x_hat)'_i||^2.
double vel_loss(const MotionSequence& x0, const MotionSequence& x0_hat, const Skeleton& skel, double fps);

/// (1/L) sum_i sum_k ||v_k,i * g_hat_k,i||^2 over the four contact joints of
/// the prediction, using the raw (unthresholded) predicted contacts.
double contact_loss(const MotionSequence& x0_hat, const Skeleton& skel, double fps);

/// Second-derivative analogue of vel_loss.
double acc_loss(const MotionSequence& x0, const MotionSequence& x0_hat, const Skeleton& skel, double fps);

KinematicComponents kinematic_components(const MotionSequence& x0, const MotionSequence& x0_hat,
                                         const Skeleton& skel, double fps);
double combine_kinematic(const KinematicComponents& c, const LossWeights& w);
double kin_loss(const MotionSequence& x0, const MotionSequence& x0_hat, const Skeleton& skel, double fps,
                const LossWeights& w);

/// exp(-2 b / d).
double beat_proximity_weight(double beat_distance, double beat_interval);
/// Sigmoid of the relative beat-distance error, steepness a, threshold c.
double shrinkage_weight(double beat_distance, double predicted, const LossWeights& w);
/// One frame of the beat alignment loss: w_s * w_b * (b - b_hat)^2.
double beat_loss_term(double beat_distance, double predicted, double beat_interval, const LossWeights& w);

/// Sum (or mean, with normalize_beat) over frames of beat_loss_term, with
/// intervals taken from the designated beat grid.
double beat_loss(const BeatDistanceVector& b, std::span<const double> b_hat, const BeatGrid& grid,
                 const LossWeights& w);

/// Fills `kin` and `total` from the per-component values already in `parts`.
LossReport assemble_report(LossReport parts, const LossWeights& w);

/// Every component for a ground-truth / prediction pair; b_hat comes from
/// any beat-distance estimator run on the prediction.
LossReport total_loss(const MotionSequence& x0, const MotionSequence& x0_hat, const BeatDistanceVector& b,
                      std::span<const double> b_hat, const BeatGrid& grid, const Skeleton& skel,
                      const LossWeights& w);

}  // namespace beatsync
