#include "beatsync/harness.h"

#include <Eigen/Geometry>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "beatsync/error.h"
#include "beatsync/io.h"
#include "beatsync/random.h"

namespace beatsync {

KeyframeMask sample_keyframes(int length, double ratio, std::uint64_t seed) {
  BEATSYNC_CHECK(length >= 1, ErrorKind::kInvalidInput, "length must be positive");
  BEATSYNC_CHECK(ratio > 0.0 && ratio <= 1.0, ErrorKind::kRange, "keyframe ratio must lie in (0, 1]");
  const int count = static_cast<int>(std::round(ratio * length));
  std::vector<int> order(length);
  std::iota(order.begin(), order.end(), 0);
  CounterRng rng(seed);
  for (int k = 0; k < count; ++k) {
    const int pick = k + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(length - k)));
    std::swap(order[k], order[pick]);
  }
  order.resize(count);
  return KeyframeMask::from_keyframes(length, order);
}

SynthKind synth_kind_from_name(std::string_view name) {
  if (name == "static") return SynthKind::kStatic;
  if (name == "linear") return SynthKind::kLinear;
  if (name == "periodic") return SynthKind::kPeriodic;
  throw Error(ErrorKind::kInvalidInput, "unknown synthetic motion kind: " + std::string(name));
}

MotionSequence synth_motion(SynthKind kind, int length, double fps, const SynthParams& params, std::uint64_t seed) {
  BEATSYNC_CHECK(length >= 1, ErrorKind::kInvalidInput, "length must be positive");
  BEATSYNC_CHECK(fps > 0.0, ErrorKind::kInvalidInput, "fps must be positive");
  BEATSYNC_CHECK(params.speed >= 0.0 && std::isfinite(params.speed), ErrorKind::kInvalidInput,
                 "speed must be nonnegative");
  BEATSYNC_CHECK(params.pose_jitter >= 0.0, ErrorKind::kInvalidInput, "pose jitter must be nonnegative");
  BEATSYNC_CHECK(kind != SynthKind::kPeriodic || params.period >= 2, ErrorKind::kInvalidInput,
                 "period must be at least 2 frames");

  Eigen::MatrixXd frames = MotionSequence::rest(fps, length).frames();

  CounterRng rng(seed, 1);
  for (int j = 0; j < kNumJoints; ++j) {
    const Eigen::Vector3d axis =
        Eigen::Vector3d(2 * rng.next_uniform() - 1, 2 * rng.next_uniform() - 1, 2 * rng.next_uniform() - 1);
    const double angle = params.pose_jitter * (2 * rng.next_uniform() - 1);
    if (axis.norm() < 1e-6) continue;
    const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
    for (int k = 0; k < 3; ++k) {
      frames.col(kRotationOffset + kRot6dDim * j + k).setConstant(r(k, 0));
      frames.col(kRotationOffset + kRot6dDim * j + 3 + k).setConstant(r(k, 1));
    }
  }

  const double contact = kind == SynthKind::kStatic ? 1.0 : 0.0;
  frames.leftCols(kContactDim).setConstant(contact);

  double x = 0.0;
  for (int i = 0; i < length; ++i) {
    frames(i, kTranslationOffset) = x;
    double step_speed = 0.0;
    if (kind == SynthKind::kLinear) {
      step_speed = params.speed;
    } else if (kind == SynthKind::kPeriodic) {
      step_speed = params.speed * std::abs(std::sin(std::numbers::pi * i / params.period));
    }
    x += step_speed / fps;
  }
  return MotionSequence(fps, std::move(frames));
}

BeatGrid synth_beats(SynthKind kind, int length, const SynthParams& params) {
  std::vector<int> beats;
  if (kind == SynthKind::kPeriodic) {
    for (int f = params.period; f + params.period / 2 <= length - 2; f += params.period) beats.push_back(f);
  }
  return BeatGrid(length, std::move(beats));
}

PlotData emit_plot_data(const MotionSequence& seq, const Skeleton& skel, const BeatGrid& music_beats,
                        const MotionBeatParams& params) {
  BEATSYNC_CHECK(music_beats.length() == seq.length(), ErrorKind::kShapeMismatch,
                 "beat grid length must equal motion length");
  PlotData out;
  out.frames.resize(seq.length());
  std::iota(out.frames.begin(), out.frames.end(), 0);
  out.mean_speed = mean_joint_speed(forward_kinematics(seq, skel), seq.fps());
  out.beat_frames = music_beats.beat_frames();
  out.motion_beat_frames = extract_motion_beats(out.mean_speed, params.min_prominence, params.smooth_radius).beat_frames();
  return out;
}

nlohmann::json plot_data_to_json(const PlotData& data) {
  return {{"frames", data.frames},
          {"mean_speed", data.mean_speed},
          {"beat_frames", data.beat_frames},
          {"motion_beat_frames", data.motion_beat_frames}};
}

PlotData plot_data_from_json(const nlohmann::json& j) {
  try {
    PlotData out;
    out.frames = j.at("frames").get<std::vector<int>>();
    out.mean_speed = j.at("mean_speed").get<std::vector<double>>();
    out.beat_frames = j.at("beat_frames").get<std::vector<int>>();
    out.motion_beat_frames = j.at("motion_beat_frames").get<std::vector<int>>();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("plot data: ") + e.what());
  }
}

std::string plot_data_to_csv(const PlotData& data) {
  std::vector<char> beat(data.frames.size(), 0);
  std::vector<char> motion_beat(data.frames.size(), 0);
  for (int f : data.beat_frames) beat.at(f) = 1;
  for (int f : data.motion_beat_frames) motion_beat.at(f) = 1;
  std::ostringstream out;
  out << "frame,mean_speed,is_beat,is_motion_beat\n";
  for (std::size_t i = 0; i < data.frames.size(); ++i) {
    out << data.frames[i] << ',' << io::format_double(data.mean_speed[i]) << ',' << int(beat[i]) << ','
        << int(motion_beat[i]) << '\n';
  }
  return out.str();
}

PlotData plot_data_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  if (line != "frame,mean_speed,is_beat,is_motion_beat") throw Error(ErrorKind::kParse, "unexpected plot CSV header");
  PlotData out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<std::string, 4> cells;
    std::istringstream row(line);
    for (auto& cell : cells) {
      if (!std::getline(row, cell, ',')) throw Error(ErrorKind::kParse, "short plot CSV row: " + line);
    }
    int frame = 0;
    int is_beat = 0;
    int is_motion_beat = 0;
    double speed = 0.0;
    const auto parse = [&line](const std::string& s, auto& value) {
      const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw Error(ErrorKind::kParse, "bad plot CSV value in row: " + line);
      }
    };
    parse(cells[0], frame);
    parse(cells[1], speed);
    parse(cells[2], is_beat);
    parse(cells[3], is_motion_beat);
    out.frames.push_back(frame);
    out.mean_speed.push_back(speed);
    if (is_beat) out.beat_frames.push_back(frame);
    if (is_motion_beat) out.motion_beat_frames.push_back(frame);
  }
  return out;
}

}  // namespace beatsync
