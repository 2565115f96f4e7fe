#include "beatsync/motion.h"

#include <Eigen/Geometry>
#include <cmath>
#include <string>

#include "beatsync/error.h"

namespace beatsync {

namespace {

constexpr double kMinNorm = 1e-12;
// Relative size of the orthogonal residual below which the two 3-vectors
// count as parallel (sine of the angle between them).
constexpr double kMinSine = 1e-9;

}  // namespace

MotionSequence::MotionSequence(double fps, Eigen::MatrixXd frames) : fps_(fps), frames_(std::move(frames)) {
  BEATSYNC_CHECK(std::isfinite(fps_) && fps_ > 0.0, ErrorKind::kInvalidInput, "fps must be positive");
  BEATSYNC_CHECK(frames_.rows() >= 1, ErrorKind::kInvalidInput, "motion needs at least one frame");
  BEATSYNC_CHECK(frames_.cols() == kPoseDim, ErrorKind::kShapeMismatch,
                 "pose dimensionality must be 151, got " + std::to_string(frames_.cols()));
  BEATSYNC_CHECK(frames_.allFinite(), ErrorKind::kInvalidInput, "motion contains non-finite values");
}

MotionSequence MotionSequence::rest(double fps, int length) {
  BEATSYNC_CHECK(length >= 1, ErrorKind::kInvalidInput, "motion needs at least one frame");
  Eigen::MatrixXd frames = Eigen::MatrixXd::Zero(length, kPoseDim);
  for (int j = 0; j < kNumJoints; ++j) {
    for (int k = 0; k < kRot6dDim; ++k) {
      frames.col(kRotationOffset + kRot6dDim * j + k).setConstant(kIdentityRot6d[k]);
    }
  }
  return MotionSequence(fps, std::move(frames));
}

Eigen::Vector3d MotionSequence::root_translation(int frame) const {
  return frames_.row(frame).segment<3>(kTranslationOffset).transpose();
}

Eigen::Vector4d MotionSequence::contacts(int frame) const {
  return frames_.row(frame).segment<kContactDim>(0).transpose();
}

std::array<double, kRot6dDim> MotionSequence::rot6d(int frame, int joint) const {
  std::array<double, kRot6dDim> out{};
  for (int k = 0; k < kRot6dDim; ++k) out[k] = frames_(frame, kRotationOffset + kRot6dDim * joint + k);
  return out;
}

Skeleton::Skeleton(std::array<int, kNumJoints> parents, std::array<Eigen::Vector3d, kNumJoints> rest_offsets)
    : parents_(parents), rest_offsets_(rest_offsets) {
  BEATSYNC_CHECK(parents_[0] == -1, ErrorKind::kInvalidInput, "joint 0 must be the root (parent -1)");
  for (int j = 1; j < kNumJoints; ++j) {
    BEATSYNC_CHECK(parents_[j] >= 0 && parents_[j] < j, ErrorKind::kInvalidInput,
                   "parent of joint " + std::to_string(j) + " must precede it");
  }
  for (const auto& offset : rest_offsets_) {
    BEATSYNC_CHECK(offset.allFinite(), ErrorKind::kInvalidInput, "rest offsets must be finite");
  }
}

Skeleton Skeleton::smpl_default() {
  constexpr std::array<int, kNumJoints> parents = {-1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8,
                                                   9, 9, 9, 12, 13, 14, 16, 17, 18, 19, 20, 21};
  const std::array<Eigen::Vector3d, kNumJoints> offsets = {
      Eigen::Vector3d(0.0, 0.0, 0.0),
      Eigen::Vector3d(0.05858135, -0.08228004, -0.01766408),
      Eigen::Vector3d(-0.06030973, -0.09051332, -0.01354254),
      Eigen::Vector3d(0.00443945, 0.12440352, -0.03838522),
      Eigen::Vector3d(0.04345142, -0.38646945, 0.008037),
      Eigen::Vector3d(-0.04325663, -0.38368791, -0.00484304),
      Eigen::Vector3d(0.00448844, 0.1379564, 0.02682033),
      Eigen::Vector3d(-0.01479032, -0.42687458, -0.037428),
      Eigen::Vector3d(0.01905555, -0.4200455, -0.03456167),
      Eigen::Vector3d(-0.00226458, 0.05603239, 0.00285505),
      Eigen::Vector3d(0.04105436, -0.06028581, 0.12204243),
      Eigen::Vector3d(-0.03483987, -0.06210566, 0.13032329),
      Eigen::Vector3d(-0.0133902, 0.21163553, -0.03346758),
      Eigen::Vector3d(0.07170245, 0.11399969, -0.01889817),
      Eigen::Vector3d(-0.08295366, 0.11247234, -0.02370739),
      Eigen::Vector3d(0.01011321, 0.08893734, 0.05040987),
      Eigen::Vector3d(0.12292141, 0.04520509, -0.019046),
      Eigen::Vector3d(-0.11322832, 0.04685326, -0.00847207),
      Eigen::Vector3d(0.2553319, -0.01564902, -0.02294649),
      Eigen::Vector3d(-0.26012748, -0.01436928, -0.03126873),
      Eigen::Vector3d(0.26570925, 0.01269811, -0.00737473),
      Eigen::Vector3d(-0.26910836, 0.00679372, -0.00602676),
      Eigen::Vector3d(0.08669055, -0.01063603, -0.01559429),
      Eigen::Vector3d(-0.0887537, -0.00865157, -0.01010708),
  };
  return Skeleton(parents, offsets);
}

std::array<Eigen::Vector3d, kNumJoints> Skeleton::rest_positions() const {
  std::array<Eigen::Vector3d, kNumJoints> out;
  out[0] = Eigen::Vector3d::Zero();
  for (int j = 1; j < kNumJoints; ++j) out[j] = out[parents_[j]] + rest_offsets_[j];
  return out;
}

JointSeries::JointSeries(Eigen::MatrixXd data) : data_(std::move(data)) {
  BEATSYNC_CHECK(data_.cols() == 3 * kNumJoints, ErrorKind::kShapeMismatch, "joint series must have 72 columns");
}

JointSeries JointSeries::zeros(int length) { return JointSeries(Eigen::MatrixXd::Zero(length, 3 * kNumJoints)); }

Eigen::Matrix3d rot6d_to_matrix(std::span<const double, kRot6dDim> r6) {
  const Eigen::Vector3d a1(r6[0], r6[1], r6[2]);
  const Eigen::Vector3d a2(r6[3], r6[4], r6[5]);
  if (!a1.allFinite() || !a2.allFinite()) {
    throw Error(ErrorKind::kDegenerateRotation, "6-DOF rotation contains non-finite values");
  }
  const double n1 = a1.norm();
  if (n1 < kMinNorm) throw Error(ErrorKind::kDegenerateRotation, "first 6-DOF column is zero");
  const Eigen::Vector3d b1 = a1 / n1;
  const Eigen::Vector3d residual = a2 - b1.dot(a2) * b1;
  const double n2 = residual.norm();
  if (a2.norm() < kMinNorm || n2 < kMinSine * a2.norm()) {
    throw Error(ErrorKind::kDegenerateRotation, "6-DOF columns are zero or parallel");
  }
  const Eigen::Vector3d b2 = residual / n2;
  Eigen::Matrix3d r;
  r.col(0) = b1;
  r.col(1) = b2;
  r.col(2) = b1.cross(b2);
  return r;
}

JointPositions forward_kinematics(const MotionSequence& seq, const Skeleton& skel) {
  const int length = seq.length();
  JointSeries out = JointSeries::zeros(length);
  std::array<Eigen::Matrix3d, kNumJoints> global;
  std::array<Eigen::Vector3d, kNumJoints> pos;
  for (int i = 0; i < length; ++i) {
    for (int j = 0; j < kNumJoints; ++j) {
      const auto r6 = seq.rot6d(i, j);
      Eigen::Matrix3d local;
      try {
        local = rot6d_to_matrix(r6);
      } catch (const Error& e) {
        throw DegenerateRotationError(
            std::string(e.what()) + " (frame " + std::to_string(i) + ", joint " + std::to_string(j) + ")", i, j);
      }
      if (j == 0) {
        global[0] = local;
        pos[0] = seq.root_translation(i);
      } else {
        const int p = skel.parent(j);
        global[j] = global[p] * local;
        pos[j] = pos[p] + global[p] * skel.rest_offset(j);
      }
      out.set(i, j, pos[j]);
    }
  }
  return out;
}

Eigen::MatrixXd first_derivative(const Eigen::MatrixXd& rows, double fps) {
  const Eigen::Index n = rows.rows();
  BEATSYNC_CHECK(n >= 2, ErrorKind::kSequenceTooShort, "velocity needs at least 2 frames");
  Eigen::MatrixXd out(n, rows.cols());
  out.topRows(n - 1) = (rows.bottomRows(n - 1) - rows.topRows(n - 1)) * fps;
  out.row(n - 1) = out.row(n - 2);
  return out;
}

Eigen::MatrixXd second_derivative(const Eigen::MatrixXd& rows, double fps) {
  const Eigen::Index n = rows.rows();
  BEATSYNC_CHECK(n >= 3, ErrorKind::kSequenceTooShort, "acceleration needs at least 3 frames");
  Eigen::MatrixXd out(n, rows.cols());
  // Difference of the unpadded velocities, so quadratic motion gives a
  // constant acceleration on every frame.
  const Eigen::MatrixXd vel = (rows.bottomRows(n - 1) - rows.topRows(n - 1)) * fps;
  out.topRows(n - 2) = (vel.bottomRows(n - 2) - vel.topRows(n - 2)) * fps;
  out.row(n - 2) = out.row(n - 3);
  out.row(n - 1) = out.row(n - 3);
  return out;
}

JointSeries joint_velocity(const JointPositions& pos, double fps) {
  return JointSeries(first_derivative(pos.data(), fps));
}

JointSeries joint_acceleration(const JointPositions& pos, double fps) {
  return JointSeries(second_derivative(pos.data(), fps));
}

std::vector<double> mean_joint_speed(const JointPositions& pos, double fps) {
  const JointSeries vel = joint_velocity(pos, fps);
  std::vector<double> speed(vel.length(), 0.0);
  for (int i = 0; i < vel.length(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < kNumJoints; ++j) sum += vel.at(i, j).norm();
    speed[i] = sum / kNumJoints;
  }
  return speed;
}

}  // namespace beatsync
