#include "beatsync/losses.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "beatsync/error.h"

namespace beatsync {

namespace {

void check_same_shape(const MotionSequence& a, const MotionSequence& b) {
  BEATSYNC_CHECK(a.length() == b.length(), ErrorKind::kShapeMismatch,
                 "sequence lengths differ: " + std::to_string(a.length()) + " vs " + std::to_string(b.length()));
}

// (1/L) sum over rows of the squared row-difference norm.
double mean_row_sq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).squaredNorm() / static_cast<double>(a.rows());
}

}  // namespace

void LossWeights::validate() const {
  for (double v : {lambda_joint, lambda_vel, lambda_contact, lambda_acc, lambda_kin, lambda_beat}) {
    BEATSYNC_CHECK(v >= 0.0 && std::isfinite(v), ErrorKind::kDomain, "loss weights must be nonnegative");
  }
  BEATSYNC_CHECK(std::isfinite(shrink_a) && std::isfinite(shrink_c), ErrorKind::kDomain,
                 "shrinkage parameters must be finite");
  BEATSYNC_CHECK(epsilon_b > 0.0, ErrorKind::kDomain, "epsilon_b must be positive");
}

double simple_loss(const MotionSequence& x0, const MotionSequence& x0_hat) {
  check_same_shape(x0, x0_hat);
  return (x0.frames() - x0_hat.frames()).squaredNorm() / static_cast<double>(x0.frames().size());
}

double joint_loss(const MotionSequence& x0, const MotionSequence& x0_hat, const Skeleton& skel) {
  check_same_shape(x0, x0_hat);
  return mean_row_sq(forward_kinematics(x0, skel).data(), forward_kinematics(x0_hat, skel).data());
}

double vel_loss(const MotionSequence& x0, const MotionSequence& x0_hat, const Skeleton& skel, double fps) {
  check_same_shape(x0, x0_hat);
  const double rep = mean_row_sq(first_derivative(x0.frames(), fps), first_derivative(x0_hat.frames(), fps));
  const double fk = mean_row_sq(first_derivative(forward_kinematics(x0, skel).data(), fps),
                                first_derivative(forward_kinematics(x0_hat, skel).data(), fps));
  return rep + fk;
}

double contact_loss(const MotionSequence& x0_hat, const Skeleton& skel, double fps) {
  const JointSeries vel = joint_velocity(forward_kinematics(x0_hat, skel), fps);
  double sum = 0.0;
  for (int i = 0; i < vel.length(); ++i) {
    const Eigen::Vector4d g = x0_hat.contacts(i);
    for (int k = 0; k < kContactDim; ++k) sum += (vel.at(i, kContactJoints[k]) * g[k]).squaredNorm();
  }
  return sum / vel.length();
}

double acc_loss(const MotionSequence& x0, const MotionSequence& x0_hat, const Skeleton& skel, double fps) {
  check_same_shape(x0, x0_hat);
  const double rep = mean_row_sq(second_derivative(x0.frames(), fps), second_derivative(x0_hat.frames(), fps));
  const double fk = mean_row_sq(second_derivative(forward_kinematics(x0, skel).data(), fps),
                                second_derivative(forward_kinematics(x0_hat, skel).data(), fps));
  return rep + fk;
}

KinematicComponents kinematic_components(const MotionSequence& x0, const MotionSequence& x0_hat,
                                         const Skeleton& skel, double fps) {
  check_same_shape(x0, x0_hat);
  BEATSYNC_CHECK(x0.length() >= 3, ErrorKind::kSequenceTooShort, "kinematic losses need at least 3 frames");
  const Eigen::MatrixXd fk = forward_kinematics(x0, skel).data();
  const Eigen::MatrixXd fk_hat = forward_kinematics(x0_hat, skel).data();
  KinematicComponents c;
  c.joint = mean_row_sq(fk, fk_hat);
  c.vel = mean_row_sq(first_derivative(x0.frames(), fps), first_derivative(x0_hat.frames(), fps)) +
          mean_row_sq(first_derivative(fk, fps), first_derivative(fk_hat, fps));
  c.contact = contact_loss(x0_hat, skel, fps);
  c.acc = mean_row_sq(second_derivative(x0.frames(), fps), second_derivative(x0_hat.frames(), fps)) +
          mean_row_sq(second_derivative(fk, fps), second_derivative(fk_hat, fps));
  return c;
}

double combine_kinematic(const KinematicComponents& c, const LossWeights& w) {
  return w.lambda_joint * c.joint + w.lambda_vel * c.vel + w.lambda_contact * c.contact + w.lambda_acc * c.acc;
}

double kin_loss(const MotionSequence& x0, const MotionSequence& x0_hat, const Skeleton& skel, double fps,
                const LossWeights& w) {
  return combine_kinematic(kinematic_components(x0, x0_hat, skel, fps), w);
}

double beat_proximity_weight(double beat_distance, double beat_interval) {
  BEATSYNC_CHECK(beat_interval > 0.0, ErrorKind::kDomain, "beat interval must be positive");
  return std::exp(-2.0 * beat_distance / beat_interval);
}

double shrinkage_weight(double beat_distance, double predicted, const LossWeights& w) {
  const double relative = std::abs(beat_distance - predicted) / std::max(beat_distance, w.epsilon_b);
  return 1.0 / (1.0 + std::exp(w.shrink_a * (w.shrink_c - relative)));
}

double beat_loss_term(double beat_distance, double predicted, double beat_interval, const LossWeights& w) {
  const double diff = beat_distance - predicted;
  return shrinkage_weight(beat_distance, predicted, w) * beat_proximity_weight(beat_distance, beat_interval) * diff *
         diff;
}

double beat_loss(const BeatDistanceVector& b, std::span<const double> b_hat, const BeatGrid& grid,
                 const LossWeights& w) {
  BEATSYNC_CHECK(b.size() == b_hat.size() && static_cast<int>(b.size()) == grid.length(), ErrorKind::kShapeMismatch,
                 "beat distance vectors and grid must share length");
  const std::vector<int> intervals = adjacent_intervals(grid);
  double sum = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) sum += beat_loss_term(b[i], b_hat[i], intervals[i], w);
  return w.normalize_beat ? sum / static_cast<double>(b.size()) : sum;
}

LossReport assemble_report(LossReport parts, const LossWeights& w) {
  parts.kin = combine_kinematic({parts.joint, parts.vel, parts.contact, parts.acc}, w);
  parts.total = parts.simple + w.lambda_kin * parts.kin + w.lambda_beat * parts.beat;
  return parts;
}

LossReport total_loss(const MotionSequence& x0, const MotionSequence& x0_hat, const BeatDistanceVector& b,
                      std::span<const double> b_hat, const BeatGrid& grid, const Skeleton& skel,
                      const LossWeights& w) {
  w.validate();
  const double fps = x0.fps();
  const KinematicComponents kin = kinematic_components(x0, x0_hat, skel, fps);
  LossReport parts;
  parts.simple = simple_loss(x0, x0_hat);
  parts.joint = kin.joint;
  parts.vel = kin.vel;
  parts.contact = kin.contact;
  parts.acc = kin.acc;
  parts.beat = beat_loss(b, b_hat, grid, w);
  return assemble_report(parts, w);
}

}  // namespace beatsync
