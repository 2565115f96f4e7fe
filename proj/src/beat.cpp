#include "beatsync/beat.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "beatsync/error.h"

namespace beatsync {

BeatGrid::BeatGrid(int length, std::vector<int> beat_frames) : length_(length), beat_frames_(std::move(beat_frames)) {
  BEATSYNC_CHECK(length_ >= 1, ErrorKind::kInvalidInput, "beat grid length must be positive");
  for (std::size_t k = 0; k < beat_frames_.size(); ++k) {
    const int f = beat_frames_[k];
    BEATSYNC_CHECK(f >= 0 && f < length_, ErrorKind::kRange,
                   "beat frame " + std::to_string(f) + " outside [0, " + std::to_string(length_) + ")");
    BEATSYNC_CHECK(k == 0 || beat_frames_[k - 1] < f, ErrorKind::kInvalidInput,
                   "beat frames must be strictly increasing");
  }
}

bool BeatGrid::contains(int frame) const {
  return std::binary_search(beat_frames_.begin(), beat_frames_.end(), frame);
}

BeatDistanceVector nearest_beat_distance(const BeatGrid& grid) {
  BEATSYNC_CHECK(!grid.empty(), ErrorKind::kNoBeats, "beat grid has no beats");
  const int length = grid.length();
  constexpr int kFar = std::numeric_limits<int>::max() / 2;
  BeatDistanceVector dist(length, kFar);
  for (int f : grid.beat_frames()) dist[f] = 0;
  for (int i = 1; i < length; ++i) dist[i] = std::min(dist[i], dist[i - 1] + 1);
  for (int i = length - 2; i >= 0; --i) dist[i] = std::min(dist[i], dist[i + 1] + 1);
  return dist;
}

int adjacent_interval(const BeatGrid& grid, int frame) {
  BEATSYNC_CHECK(!grid.empty(), ErrorKind::kNoBeats, "beat grid has no beats");
  BEATSYNC_CHECK(frame >= 0 && frame < grid.length(), ErrorKind::kRange, "frame index out of range");
  const auto& beats = grid.beat_frames();
  if (beats.size() == 1) return grid.length();
  auto next = std::upper_bound(beats.begin(), beats.end(), frame);
  if (next == beats.begin()) return beats[1] - beats[0];
  if (next == beats.end()) return beats.back() - beats[beats.size() - 2];
  return *next - *(next - 1);
}

std::vector<int> adjacent_intervals(const BeatGrid& grid) {
  std::vector<int> out(grid.length());
  for (int i = 0; i < grid.length(); ++i) out[i] = adjacent_interval(grid, i);
  return out;
}

std::vector<double> box_smooth(std::span<const double> values, int radius) {
  BEATSYNC_CHECK(radius >= 0, ErrorKind::kDomain, "smoothing radius must be nonnegative");
  const int n = static_cast<int>(values.size());
  std::vector<double> out(values.begin(), values.end());
  if (radius == 0) return out;
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - radius);
    const int hi = std::min(n - 1, i + radius);
    double sum = 0.0;
    for (int k = lo; k <= hi; ++k) sum += values[k];
    out[i] = sum / (hi - lo + 1);
  }
  return out;
}

namespace {

// Depth of the valley at i: how far the curve rises on the lower of its two
// sides before reaching a value below values[i] (or the sequence end).
double valley_prominence(const std::vector<double>& values, int i) {
  const int n = static_cast<int>(values.size());
  double left = values[i];
  for (int k = i - 1; k >= 0 && values[k] >= values[i]; --k) left = std::max(left, values[k]);
  double right = values[i];
  for (int k = i + 1; k < n && values[k] >= values[i]; ++k) right = std::max(right, values[k]);
  return std::min(left, right) - values[i];
}

}  // namespace

BeatGrid extract_motion_beats(std::span<const double> speed, double min_prominence, int smooth_radius) {
  BEATSYNC_CHECK(min_prominence >= 0.0, ErrorKind::kDomain, "prominence threshold must be nonnegative");
  const int n = static_cast<int>(speed.size());
  BEATSYNC_CHECK(n >= 1, ErrorKind::kInvalidInput, "speed curve is empty");
  const std::vector<double> curve = box_smooth(speed, smooth_radius);
  std::vector<int> beats;
  for (int i = 1; i + 1 < n; ++i) {
    if (curve[i] < curve[i - 1] && curve[i] < curve[i + 1] && valley_prominence(curve, i) >= min_prominence) {
      beats.push_back(i);
    }
  }
  return BeatGrid(n, std::move(beats));
}

BeatGrid beats_from_times(std::span<const double> times_sec, double fps, int length) {
  BEATSYNC_CHECK(fps > 0.0, ErrorKind::kDomain, "fps must be positive");
  const double duration = static_cast<double>(length) / fps;
  std::vector<int> frames;
  double previous = -std::numeric_limits<double>::infinity();
  for (double t : times_sec) {
    BEATSYNC_CHECK(std::isfinite(t) && t >= 0.0 && t < duration, ErrorKind::kRange,
                   "beat time " + std::to_string(t) + " s outside [0, " + std::to_string(duration) + ")");
    BEATSYNC_CHECK(t >= previous, ErrorKind::kInvalidInput, "beat times must be nondecreasing");
    previous = t;
    const int frame = std::clamp(static_cast<int>(std::round(t * fps)), 0, length - 1);
    if (frames.empty() || frames.back() != frame) frames.push_back(frame);
  }
  return BeatGrid(length, std::move(frames));
}

BeatDistanceEstimate estimate_beat_distance(const MotionSequence& seq, const Skeleton& skel,
                                            const MotionBeatParams& params) {
  BEATSYNC_CHECK(seq.length() >= 3, ErrorKind::kSequenceTooShort, "beat estimation needs at least 3 frames");
  const std::vector<double> speed = mean_joint_speed(forward_kinematics(seq, skel), seq.fps());
  BeatGrid beats = extract_motion_beats(speed, params.min_prominence, params.smooth_radius);
  if (beats.empty()) {
    return {BeatDistanceVector(seq.length(), seq.length()), std::move(beats), true};
  }
  BeatDistanceVector dist = nearest_beat_distance(beats);
  return {std::move(dist), std::move(beats), false};
}

}  // namespace beatsync
