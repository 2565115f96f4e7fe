#pragma once

#include <span>
#include <vector>

#include "beatsync/motion.h"

namespace beatsync {

/// Sorted beat frames over a sequence of `length` frames. May be empty; the
/// distance and interval operations reject empty grids.
class BeatGrid {
 public:
  BeatGrid(int length, std::vector<int> beat_frames);

  int length() const noexcept { return length_; }
  const std::vector<int>& beat_frames() const noexcept { return beat_frames_; }
  bool empty() const noexcept { return beat_frames_.empty(); }
  std::size_t size() const noexcept { return beat_frames_.size(); }
  bool contains(int frame) const;

  bool operator==(const BeatGrid&) const = default;

 private:
  int length_;
  std::vector<int> beat_frames_;
};

/// b[i]: frames from i to the nearest beat.
using BeatDistanceVector = std::vector<int>;

BeatDistanceVector nearest_beat_distance(const BeatGrid& grid);

/// Span of the two beats enclosing frame i. Frames before the first or after
/// the last beat use the nearest interior interval; a single-beat grid yields
/// the sequence length. A frame that is itself a beat uses the interval that
/// starts at it (or the last interval when it is the final beat).
int adjacent_interval(const BeatGrid& grid, int frame);

/// adjacent_interval for every frame.
std::vector<int> adjacent_intervals(const BeatGrid& grid);

struct MotionBeatParams {
  double min_prominence = 0.0;
  int smooth_radius = 1;
};

/// Centered box average; the window is clipped at the sequence ends.
std::vector<double> box_smooth(std::span<const double> values, int radius);

/// Strict interior local minima of the (box-smoothed) speed curve whose
/// prominence is at least `min_prominence`. Endpoints are never beats.
BeatGrid extract_motion_beats(std::span<const double> speed, double min_prominence, int smooth_radius);

/// Converts beat times (seconds) to frames by round-half-away-from-zero,
/// clamping to [0, length) and merging duplicates.
BeatGrid beats_from_times(std::span<const double> times_sec, double fps, int length);

struct BeatDistanceEstimate {
  BeatDistanceVector distance;
  BeatGrid motion_beats;
  /// No velocity minimum was found; `distance` then holds the sentinel
  /// value `length` on every frame.
  bool no_beats = false;
};

/// Kinematic stand-in for a learned beat-distance regressor: FK, mean joint
/// speed, velocity-minimum beats, then nearest-beat distances.
BeatDistanceEstimate estimate_beat_distance(const MotionSequence& seq, const Skeleton& skel,
                                            const MotionBeatParams& params = {});

}  // namespace beatsync
