#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "beatsync/beat.h"

namespace beatsync {

/// Binary per-frame mask.
class TemporalMask {
 public:
  explicit TemporalMask(std::vector<std::uint8_t> values);
  static TemporalMask zeros(int length);
  /// Mask of `length` frames with ones at `keyframes` (any order, no
  /// duplicates required).
  static TemporalMask from_keyframes(int length, const std::vector<int>& keyframes);

  int length() const noexcept { return static_cast<int>(values_.size()); }
  std::uint8_t operator[](int i) const { return values_[i]; }
  const std::vector<std::uint8_t>& values() const noexcept { return values_; }
  /// Indices of the set frames, ascending.
  std::vector<int> keyframes() const;
  int count() const;

  bool operator==(const TemporalMask&) const = default;

 private:
  std::vector<std::uint8_t> values_;
};

using KeyframeMask = TemporalMask;
using DilatedMask = TemporalMask;

/// Dense L x L binary mask, row-major; entry (i, j) = M[i] * M_d[j].
class AttentionMask {
 public:
  AttentionMask(int length, std::vector<std::uint8_t> values);

  int length() const noexcept { return length_; }
  std::uint8_t operator()(int i, int j) const { return values_[static_cast<std::size_t>(i) * length_ + j]; }
  const std::vector<std::uint8_t>& values() const noexcept { return values_; }

 private:
  int length_;
  std::vector<std::uint8_t> values_;
};

/// Base dilation steps of the six sparse-dense fusion blocks.
inline constexpr int kDefaultDilationSteps[] = {4, 8, 12, 16, 20, 24};

/// ceil(s * exp(-2 b / d)), kept in [1, s].
int dilation_step(double beat_distance, double beat_interval, int base_step);

/// Widens every keyframe k to the window [k - n_k, k + n_k] clipped to the
/// sequence, where n_k = dilation_step(b_k, d_k, s) with b and d taken from
/// the designated beat grid.
DilatedMask dilate_mask(const KeyframeMask& mask, const BeatGrid& grid, int base_step);

AttentionMask attention_mask(const KeyframeMask& mask, const DilatedMask& dilated);

/// Scaled dot-product attention restricted to mask(i, j) = 1. Rows with no
/// allowed column produce zeros.
Eigen::MatrixXd masked_attention(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& keys,
                                 const Eigen::MatrixXd& values, const AttentionMask& mask);

}  // namespace beatsync
