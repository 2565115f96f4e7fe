#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "beatsync/beat.h"
#include "beatsync/diffusion.h"
#include "beatsync/fusion_mask.h"
#include "beatsync/losses.h"
#include "beatsync/metrics.h"
#include "beatsync/motion.h"
#include "json.hpp"

namespace beatsync::io {

using nlohmann::json;

// Motion: { "fps": number, "frames": [[151 numbers], ...] }
json motion_to_json(const MotionSequence& seq);
MotionSequence motion_from_json(const json& j);

// Skeleton: { "parents": [24 ints], "rest_offsets": [[x,y,z] x 24] }
json skeleton_to_json(const Skeleton& skel);
Skeleton skeleton_from_json(const json& j);

/// Beat file: { "fps", "length", and exactly one of "beat_frames" or
/// "beat_times_sec" }. Times are converted with beats_from_times.
struct BeatFile {
  double fps = 30.0;
  BeatGrid grid;
};
json beats_to_json(const BeatFile& beats);
BeatFile beats_from_json(const json& j);

// Mask: { "length": int, "keyframes": [ints] }
json mask_to_json(const TemporalMask& mask);
TemporalMask mask_from_json(const json& j);

/// Dense row-major 0/1 matrix.
json attention_mask_to_json(const AttentionMask& mask);

/// { "steps": T, "betas": [...] }. Reading accepts { "steps": T } alone and
/// builds the cosine schedule.
json schedule_to_json(const NoiseSchedule& sched);
NoiseSchedule schedule_from_json(const json& j);

json loss_weights_to_json(const LossWeights& w);
LossWeights loss_weights_from_json(const json& j, LossWeights base = {});
/// Components plus the weights used.
json loss_report_to_json(const LossReport& report, const LossWeights& w);
LossReport loss_report_from_json(const json& j);

json metric_config_to_json(const MetricConfig& cfg);
MetricConfig metric_config_from_json(const json& j, MetricConfig base = {});
json metric_report_to_json(const MetricReport& report);
MetricReport metric_report_from_json(const json& j);

/// Merged `--config` document. Every section is optional:
/// { "loss": {...}, "metrics": {...}, "sampler": {"guidance_scale", "seed"},
///   "schedule": {"steps"} }
struct RunConfig {
  LossWeights loss;
  MetricConfig metrics;
  double guidance_scale = 2.0;
  std::uint64_t seed = 0;
  int schedule_steps = 1000;
};
RunConfig run_config_from_json(const json& j);
json run_config_to_json(const RunConfig& cfg);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace beatsync::io
