#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "beatsync/beat.h"
#include "beatsync/fusion_mask.h"
#include "beatsync/motion.h"
#include "json.hpp"

namespace beatsync {

/// Exactly round(ratio * length) distinct keyframes drawn uniformly without
/// replacement; deterministic per seed. ratio must lie in (0, 1].
KeyframeMask sample_keyframes(int length, double ratio, std::uint64_t seed);

enum class SynthKind { kStatic, kLinear, kPeriodic };

SynthKind synth_kind_from_name(std::string_view name);

struct SynthParams {
  /// Linear: root speed (m/s). Periodic: peak root speed (m/s).
  double speed = 1.0;
  /// Periodic: frames between velocity minima.
  int period = 15;
  /// Half-width (radians) of the seed-dependent fixed joint rotations.
  double pose_jitter = 0.2;
};

/// Test fixtures with analytically known kinematics. Every kind holds a
/// fixed, seed-dependent pose and moves the whole body rigidly along x:
///   static   - no translation
///   linear   - constant root speed `speed`
///   periodic - per-frame speed speed * |sin(pi * i / period)|, so the mean
///              joint speed has strict minima at multiples of `period`
MotionSequence synth_motion(SynthKind kind, int length, double fps, const SynthParams& params, std::uint64_t seed);

/// Beat frames the construction places: multiples of `period` that a
/// velocity-minimum detector can see (at least half a period away from the
/// last frame). Empty for static and linear motion.
BeatGrid synth_beats(SynthKind kind, int length, const SynthParams& params);

struct PlotData {
  std::vector<int> frames;
  std::vector<double> mean_speed;
  std::vector<int> beat_frames;
  std::vector<int> motion_beat_frames;

  bool operator==(const PlotData&) const = default;
};

/// Mean joint speed curve with the given beat markers and the motion beats
/// extracted from the curve.
PlotData emit_plot_data(const MotionSequence& seq, const Skeleton& skel, const BeatGrid& music_beats,
                        const MotionBeatParams& params = {});

nlohmann::json plot_data_to_json(const PlotData& data);
PlotData plot_data_from_json(const nlohmann::json& j);
/// One row per frame: frame,mean_speed,is_beat,is_motion_beat.
std::string plot_data_to_csv(const PlotData& data);
PlotData plot_data_from_csv(const std::string& csv);

}  // namespace beatsync
