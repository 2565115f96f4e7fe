#pragma once

#include <Eigen/Core>
#include <array>
#include <span>
#include <vector>

namespace beatsync {

// Pose layout: 4 contacts | 3 root translation | 24 x 6 rotation values.
inline constexpr int kNumJoints = 24;
inline constexpr int kContactDim = 4;
inline constexpr int kTranslationOffset = 4;
inline constexpr int kRotationOffset = 7;
inline constexpr int kRot6dDim = 6;
inline constexpr int kPoseDim = kContactDim + 3 + kNumJoints * kRot6dDim;  // 151

// Contact channel k belongs to joint kContactJoints[k]: left ankle, right
// ankle, left foot, right foot (heels on the ankles, toes on the feet).
inline constexpr std::array<int, kContactDim> kContactJoints = {7, 8, 10, 11};
inline constexpr int kLeftAnkle = 7;
inline constexpr int kRightAnkle = 8;
inline constexpr int kLeftFoot = 10;
inline constexpr int kRightFoot = 11;

using PoseVector = Eigen::Matrix<double, kPoseDim, 1>;

/// Identity 6-DOF encoding (1,0,0, 0,1,0).
inline constexpr std::array<double, kRot6dDim> kIdentityRot6d = {1, 0, 0, 0, 1, 0};

/// A dance clip: L frames of the 151-D pose representation at a fixed frame
/// rate. Frames are rows of an L x 151 matrix.
class MotionSequence {
 public:
  MotionSequence(double fps, Eigen::MatrixXd frames);

  /// L frames of identity rotations, zero translation and zero contacts.
  static MotionSequence rest(double fps, int length);

  double fps() const noexcept { return fps_; }
  int length() const noexcept { return static_cast<int>(frames_.rows()); }
  const Eigen::MatrixXd& frames() const noexcept { return frames_; }

  Eigen::Vector3d root_translation(int frame) const;
  Eigen::Vector4d contacts(int frame) const;
  /// The six rotation values of `joint` at `frame`.
  std::array<double, kRot6dDim> rot6d(int frame, int joint) const;

  bool operator==(const MotionSequence& other) const {
    return fps_ == other.fps_ && frames_ == other.frames_;
  }

 private:
  double fps_;
  Eigen::MatrixXd frames_;
};

/// Kinematic tree with parent-relative rest offsets.
class Skeleton {
 public:
  Skeleton(std::array<int, kNumJoints> parents, std::array<Eigen::Vector3d, kNumJoints> rest_offsets);

  /// SMPL 24-joint tree with neutral-body rest offsets (y up, meters).
  static Skeleton smpl_default();

  int parent(int joint) const { return parents_[joint]; }
  const std::array<int, kNumJoints>& parents() const noexcept { return parents_; }
  const Eigen::Vector3d& rest_offset(int joint) const { return rest_offsets_[joint]; }
  const std::array<Eigen::Vector3d, kNumJoints>& rest_offsets() const noexcept { return rest_offsets_; }

  /// Joint positions of the identity pose with the root at the origin. The
  /// root rest offset is not applied; forward kinematics places joint 0 at
  /// the root translation.
  std::array<Eigen::Vector3d, kNumJoints> rest_positions() const;

  bool operator==(const Skeleton& other) const {
    return parents_ == other.parents_ && rest_offsets_ == other.rest_offsets_;
  }

 private:
  std::array<int, kNumJoints> parents_;
  std::array<Eigen::Vector3d, kNumJoints> rest_offsets_;
};

/// L x 24 x 3 series (positions, velocities or accelerations), stored as an
/// L x 72 matrix with joint j in columns [3j, 3j+3).
class JointSeries {
 public:
  explicit JointSeries(Eigen::MatrixXd data);
  static JointSeries zeros(int length);

  int length() const noexcept { return static_cast<int>(data_.rows()); }
  const Eigen::MatrixXd& data() const noexcept { return data_; }

  Eigen::Vector3d at(int frame, int joint) const {
    return data_.row(frame).segment<3>(3 * joint).transpose();
  }
  void set(int frame, int joint, const Eigen::Vector3d& v) {
    data_.row(frame).segment<3>(3 * joint) = v.transpose();
  }

 private:
  Eigen::MatrixXd data_;
};

using JointPositions = JointSeries;

/// Decodes a 6-DOF rotation: Gram-Schmidt on the two 3-vectors, third column
/// by cross product. Throws kDegenerateRotation on zero or parallel inputs.
Eigen::Matrix3d rot6d_to_matrix(std::span<const double, kRot6dDim> r6);

/// Global joint positions for every frame. Degenerate rotations raise
/// DegenerateRotationError with the frame and joint index.
JointPositions forward_kinematics(const MotionSequence& seq, const Skeleton& skel);

/// Row-wise forward difference scaled by fps, last row replicated. L >= 2.
Eigen::MatrixXd first_derivative(const Eigen::MatrixXd& rows, double fps);

/// Row-wise second difference scaled by fps^2 over L-2 rows, then the last
/// row replicated twice to restore length L. L >= 3.
Eigen::MatrixXd second_derivative(const Eigen::MatrixXd& rows, double fps);

JointSeries joint_velocity(const JointPositions& pos, double fps);
JointSeries joint_acceleration(const JointPositions& pos, double fps);

/// Per-frame average over the 24 joints of the velocity norm.
std::vector<double> mean_joint_speed(const JointPositions& pos, double fps);

}  // namespace beatsync
