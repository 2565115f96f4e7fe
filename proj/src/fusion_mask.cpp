#include "beatsync/fusion_mask.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "beatsync/error.h"

namespace beatsync {

TemporalMask::TemporalMask(std::vector<std::uint8_t> values) : values_(std::move(values)) {
  for (auto v : values_) {
    BEATSYNC_CHECK(v == 0 || v == 1, ErrorKind::kInvalidInput, "mask entries must be 0 or 1");
  }
}

TemporalMask TemporalMask::zeros(int length) {
  BEATSYNC_CHECK(length >= 0, ErrorKind::kInvalidInput, "mask length must be nonnegative");
  return TemporalMask(std::vector<std::uint8_t>(length, 0));
}

TemporalMask TemporalMask::from_keyframes(int length, const std::vector<int>& keyframes) {
  std::vector<std::uint8_t> values(length, 0);
  for (int k : keyframes) {
    BEATSYNC_CHECK(k >= 0 && k < length, ErrorKind::kRange,
                   "keyframe " + std::to_string(k) + " outside [0, " + std::to_string(length) + ")");
    values[k] = 1;
  }
  return TemporalMask(std::move(values));
}

std::vector<int> TemporalMask::keyframes() const {
  std::vector<int> out;
  for (int i = 0; i < length(); ++i) {
    if (values_[i]) out.push_back(i);
  }
  return out;
}

int TemporalMask::count() const { return static_cast<int>(std::count(values_.begin(), values_.end(), 1)); }

AttentionMask::AttentionMask(int length, std::vector<std::uint8_t> values) : length_(length), values_(std::move(values)) {
  BEATSYNC_CHECK(length_ >= 0 && values_.size() == static_cast<std::size_t>(length_) * length_,
                 ErrorKind::kShapeMismatch, "attention mask must be L x L");
}

int dilation_step(double beat_distance, double beat_interval, int base_step) {
  BEATSYNC_CHECK(beat_interval > 0.0 && std::isfinite(beat_interval), ErrorKind::kDomain,
                 "beat interval must be positive");
  BEATSYNC_CHECK(beat_distance >= 0.0, ErrorKind::kDomain, "beat distance must be nonnegative");
  BEATSYNC_CHECK(base_step >= 1, ErrorKind::kDomain, "base dilation step must be at least 1");
  const double n = std::ceil(base_step * std::exp(-2.0 * beat_distance / beat_interval));
  // exp underflows to 0 for very distant frames; the window never collapses.
  return std::clamp(static_cast<int>(n), 1, base_step);
}

DilatedMask dilate_mask(const KeyframeMask& mask, const BeatGrid& grid, int base_step) {
  BEATSYNC_CHECK(mask.length() == grid.length(), ErrorKind::kShapeMismatch,
                 "mask length " + std::to_string(mask.length()) + " != beat grid length " +
                     std::to_string(grid.length()));
  const int length = mask.length();
  const BeatDistanceVector dist = nearest_beat_distance(grid);
  std::vector<std::uint8_t> out = mask.values();
  for (int k : mask.keyframes()) {
    const int n = dilation_step(dist[k], adjacent_interval(grid, k), base_step);
    const int lo = std::max(0, k - n);
    const int hi = std::min(length - 1, k + n);
    std::fill(out.begin() + lo, out.begin() + hi + 1, std::uint8_t{1});
  }
  return DilatedMask(std::move(out));
}

AttentionMask attention_mask(const KeyframeMask& mask, const DilatedMask& dilated) {
  BEATSYNC_CHECK(mask.length() == dilated.length(), ErrorKind::kShapeMismatch, "mask lengths differ");
  const int length = mask.length();
  std::vector<std::uint8_t> values(static_cast<std::size_t>(length) * length, 0);
  for (int i = 0; i < length; ++i) {
    if (!mask[i]) continue;
    for (int j = 0; j < length; ++j) values[static_cast<std::size_t>(i) * length + j] = dilated[j];
  }
  return AttentionMask(length, std::move(values));
}

Eigen::MatrixXd masked_attention(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& keys,
                                 const Eigen::MatrixXd& values, const AttentionMask& mask) {
  const Eigen::Index length = queries.rows();
  const Eigen::Index dim = queries.cols();
  BEATSYNC_CHECK(dim >= 1, ErrorKind::kShapeMismatch, "attention feature width must be at least 1");
  BEATSYNC_CHECK(keys.rows() == length && keys.cols() == dim, ErrorKind::kShapeMismatch, "keys shape mismatch");
  BEATSYNC_CHECK(values.rows() == length, ErrorKind::kShapeMismatch, "values row count mismatch");
  BEATSYNC_CHECK(mask.length() == length, ErrorKind::kShapeMismatch, "mask size mismatch");

  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(length, values.cols());
  Eigen::VectorXd scores(length);
  for (Eigen::Index i = 0; i < length; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < length; ++j) {
      if (!mask(static_cast<int>(i), static_cast<int>(j))) continue;
      scores[j] = queries.row(i).dot(keys.row(j)) * scale;
      best = std::max(best, scores[j]);
    }
    if (best == -std::numeric_limits<double>::infinity()) continue;
    double total = 0.0;
    for (Eigen::Index j = 0; j < length; ++j) {
      if (!mask(static_cast<int>(i), static_cast<int>(j))) continue;
      scores[j] = std::exp(scores[j] - best);
      total += scores[j];
    }
    for (Eigen::Index j = 0; j < length; ++j) {
      if (!mask(static_cast<int>(i), static_cast<int>(j))) continue;
      out.row(i) += (scores[j] / total) * values.row(j);
    }
  }
  return out;
}

}  // namespace beatsync
