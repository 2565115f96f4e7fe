#include "beatsync/io.h"

#include <charconv>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "beatsync/error.h"

namespace beatsync::io {

namespace {

[[noreturn]] void parse_error(const std::string& message) { throw Error(ErrorKind::kParse, message); }

const json& field(const json& j, const char* key) {
  if (!j.is_object()) parse_error(std::string("expected an object containing \"") + key + "\"");
  auto it = j.find(key);
  if (it == j.end()) parse_error(std::string("missing field \"") + key + "\"");
  return *it;
}

double as_number(const json& j, const char* what) {
  if (!j.is_number()) parse_error(std::string(what) + " must be a number");
  return j.get<double>();
}

int as_int(const json& j, const char* what) {
  if (!j.is_number_integer()) parse_error(std::string(what) + " must be an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const char* what) {
  if (!j.is_boolean()) parse_error(std::string(what) + " must be a boolean");
  return j.get<bool>();
}

std::vector<int> as_int_list(const json& j, const char* what) {
  if (!j.is_array()) parse_error(std::string(what) + " must be an array");
  std::vector<int> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(as_int(v, what));
  return out;
}

std::vector<double> as_number_list(const json& j, const char* what) {
  if (!j.is_array()) parse_error(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(as_number(v, what));
  return out;
}

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed, const char* section) {
  if (!j.is_object()) parse_error(std::string(section) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) parse_error("unknown key \"" + key + "\" in " + section);
  }
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_number_from(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return as_number(*it, key);
}

std::string_view direction_name(BasDirection d) {
  return d == BasDirection::kMotionToMusic ? "motion-to-music" : "music-to-motion";
}

std::string_view bap_mode_name(BapMode m) { return m == BapMode::kPrecision ? "precision" : "recall"; }

}  // namespace

json motion_to_json(const MotionSequence& seq) {
  json frames = json::array();
  for (int i = 0; i < seq.length(); ++i) {
    json row = json::array();
    for (int k = 0; k < kPoseDim; ++k) row.push_back(seq.frames()(i, k));
    frames.push_back(std::move(row));
  }
  return {{"fps", seq.fps()}, {"frames", std::move(frames)}};
}

MotionSequence motion_from_json(const json& j) {
  const double fps = as_number(field(j, "fps"), "fps");
  const json& frames = field(j, "frames");
  if (!frames.is_array() || frames.empty()) parse_error("frames must be a nonempty array");
  Eigen::MatrixXd data(static_cast<Eigen::Index>(frames.size()), kPoseDim);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::vector<double> row = as_number_list(frames[i], "frame");
    if (row.size() != kPoseDim) {
      parse_error("frame " + std::to_string(i) + " has " + std::to_string(row.size()) + " values, expected 151");
    }
    for (int k = 0; k < kPoseDim; ++k) data(static_cast<Eigen::Index>(i), k) = row[k];
  }
  return MotionSequence(fps, std::move(data));
}

json skeleton_to_json(const Skeleton& skel) {
  json offsets = json::array();
  for (const auto& o : skel.rest_offsets()) offsets.push_back({o.x(), o.y(), o.z()});
  return {{"parents", skel.parents()}, {"rest_offsets", std::move(offsets)}};
}

Skeleton skeleton_from_json(const json& j) {
  const std::vector<int> parents = as_int_list(field(j, "parents"), "parents");
  const json& offsets = field(j, "rest_offsets");
  if (parents.size() != kNumJoints || !offsets.is_array() || offsets.size() != kNumJoints) {
    parse_error("skeleton must list exactly 24 parents and 24 rest offsets");
  }
  std::array<int, kNumJoints> p{};
  std::array<Eigen::Vector3d, kNumJoints> o;
  for (int k = 0; k < kNumJoints; ++k) {
    p[k] = parents[k];
    const std::vector<double> xyz = as_number_list(offsets[k], "rest offset");
    if (xyz.size() != 3) parse_error("rest offsets must have 3 components");
    o[k] = Eigen::Vector3d(xyz[0], xyz[1], xyz[2]);
  }
  return Skeleton(p, o);
}

json beats_to_json(const BeatFile& beats) {
  return {{"fps", beats.fps}, {"length", beats.grid.length()}, {"beat_frames", beats.grid.beat_frames()}};
}

BeatFile beats_from_json(const json& j) {
  const double fps = as_number(field(j, "fps"), "fps");
  const int length = as_int(field(j, "length"), "length");
  if (!(fps > 0.0)) parse_error("fps must be positive");
  const bool has_frames = j.contains("beat_frames");
  const bool has_times = j.contains("beat_times_sec");
  if (has_frames == has_times) parse_error("beat file needs exactly one of beat_frames or beat_times_sec");
  if (has_frames) return {fps, BeatGrid(length, as_int_list(j.at("beat_frames"), "beat_frames"))};
  const std::vector<double> times = as_number_list(j.at("beat_times_sec"), "beat_times_sec");
  return {fps, beats_from_times(times, fps, length)};
}

json mask_to_json(const TemporalMask& mask) {
  return {{"length", mask.length()}, {"keyframes", mask.keyframes()}};
}

TemporalMask mask_from_json(const json& j) {
  const int length = as_int(field(j, "length"), "length");
  if (length < 1) parse_error("mask length must be positive");
  return TemporalMask::from_keyframes(length, as_int_list(field(j, "keyframes"), "keyframes"));
}

json attention_mask_to_json(const AttentionMask& mask) {
  json rows = json::array();
  for (int i = 0; i < mask.length(); ++i) {
    json row = json::array();
    for (int k = 0; k < mask.length(); ++k) row.push_back(static_cast<int>(mask(i, k)));
    rows.push_back(std::move(row));
  }
  return {{"length", mask.length()}, {"values", std::move(rows)}};
}

json schedule_to_json(const NoiseSchedule& sched) {
  return {{"steps", sched.steps()}, {"betas", sched.betas()}};
}

NoiseSchedule schedule_from_json(const json& j) {
  const int steps = as_int(field(j, "steps"), "steps");
  if (!j.contains("betas")) return cosine_schedule(steps);
  std::vector<double> betas = as_number_list(j.at("betas"), "betas");
  if (static_cast<int>(betas.size()) != steps) parse_error("betas length must equal steps");
  return NoiseSchedule(std::move(betas));
}

json loss_weights_to_json(const LossWeights& w) {
  return {{"lambda_joint", w.lambda_joint},     {"lambda_vel", w.lambda_vel},   {"lambda_contact", w.lambda_contact},
          {"lambda_acc", w.lambda_acc},         {"lambda_kin", w.lambda_kin},   {"lambda_beat", w.lambda_beat},
          {"a", w.shrink_a},                    {"c", w.shrink_c},              {"epsilon_b", w.epsilon_b},
          {"normalize_beat", w.normalize_beat}};
}

LossWeights loss_weights_from_json(const json& j, LossWeights w) {
  reject_unknown_keys(j,
                      {"lambda_joint", "lambda_vel", "lambda_contact", "lambda_acc", "lambda_kin", "lambda_beat", "a",
                       "c", "epsilon_b", "normalize_beat"},
                      "loss config");
  const auto num = [&j](const char* key, double& out) {
    if (j.contains(key)) out = as_number(j.at(key), key);
  };
  num("lambda_joint", w.lambda_joint);
  num("lambda_vel", w.lambda_vel);
  num("lambda_contact", w.lambda_contact);
  num("lambda_acc", w.lambda_acc);
  num("lambda_kin", w.lambda_kin);
  num("lambda_beat", w.lambda_beat);
  num("a", w.shrink_a);
  num("c", w.shrink_c);
  num("epsilon_b", w.epsilon_b);
  if (j.contains("normalize_beat")) w.normalize_beat = as_bool(j.at("normalize_beat"), "normalize_beat");
  w.validate();
  return w;
}

json loss_report_to_json(const LossReport& r, const LossWeights& w) {
  return {{"simple", r.simple}, {"joint", r.joint}, {"vel", r.vel},     {"contact", r.contact},
          {"acc", r.acc},       {"kin", r.kin},     {"beat", r.beat},   {"total", r.total},
          {"weights", loss_weights_to_json(w)}};
}

LossReport loss_report_from_json(const json& j) {
  LossReport r;
  r.simple = as_number(field(j, "simple"), "simple");
  r.joint = as_number(field(j, "joint"), "joint");
  r.vel = as_number(field(j, "vel"), "vel");
  r.contact = as_number(field(j, "contact"), "contact");
  r.acc = as_number(field(j, "acc"), "acc");
  r.kin = as_number(field(j, "kin"), "kin");
  r.beat = as_number(field(j, "beat"), "beat");
  r.total = as_number(field(j, "total"), "total");
  return r;
}

json metric_config_to_json(const MetricConfig& cfg) {
  return {{"bas_sigma", cfg.bas_sigma},
          {"bap_tolerance", cfg.bap_tolerance},
          {"bas_direction", direction_name(cfg.bas_direction)},
          {"bap_mode", bap_mode_name(cfg.bap_mode)},
          {"up_axis", cfg.up_axis},
          {"min_prominence", cfg.motion_beats.min_prominence},
          {"smooth_radius", cfg.motion_beats.smooth_radius}};
}

MetricConfig metric_config_from_json(const json& j, MetricConfig cfg) {
  reject_unknown_keys(j,
                      {"bas_sigma", "bap_tolerance", "bas_direction", "bap_mode", "up_axis", "min_prominence",
                       "smooth_radius"},
                      "metrics config");
  if (j.contains("bas_sigma")) cfg.bas_sigma = as_number(j.at("bas_sigma"), "bas_sigma");
  if (j.contains("bap_tolerance")) cfg.bap_tolerance = as_int(j.at("bap_tolerance"), "bap_tolerance");
  if (j.contains("up_axis")) cfg.up_axis = as_int(j.at("up_axis"), "up_axis");
  if (j.contains("min_prominence")) cfg.motion_beats.min_prominence = as_number(j.at("min_prominence"), "min_prominence");
  if (j.contains("smooth_radius")) cfg.motion_beats.smooth_radius = as_int(j.at("smooth_radius"), "smooth_radius");
  if (j.contains("bas_direction")) {
    const auto& v = j.at("bas_direction");
    if (v == "motion-to-music") {
      cfg.bas_direction = BasDirection::kMotionToMusic;
    } else if (v == "music-to-motion") {
      cfg.bas_direction = BasDirection::kMusicToMotion;
    } else {
      parse_error("bas_direction must be motion-to-music or music-to-motion");
    }
  }
  if (j.contains("bap_mode")) {
    const auto& v = j.at("bap_mode");
    if (v == "precision") {
      cfg.bap_mode = BapMode::kPrecision;
    } else if (v == "recall") {
      cfg.bap_mode = BapMode::kRecall;
    } else {
      parse_error("bap_mode must be precision or recall");
    }
  }
  cfg.validate();
  return cfg;
}

json metric_report_to_json(const MetricReport& r) {
  return {{"bas", optional_number(r.bas)},
          {"pfc", optional_number(r.pfc)},
          {"kpd", optional_number(r.kpd)},
          {"bap", optional_number(r.bap)},
          {"div_k", optional_number(r.div_k)},
          {"bap_degenerate", r.bap_degenerate},
          {"config", metric_config_to_json(r.config)}};
}

MetricReport metric_report_from_json(const json& j) {
  MetricReport r;
  r.bas = optional_number_from(j, "bas");
  r.pfc = optional_number_from(j, "pfc");
  r.kpd = optional_number_from(j, "kpd");
  r.bap = optional_number_from(j, "bap");
  r.div_k = optional_number_from(j, "div_k");
  if (j.contains("bap_degenerate")) r.bap_degenerate = as_bool(j.at("bap_degenerate"), "bap_degenerate");
  r.config = metric_config_from_json(field(j, "config"));
  return r;
}

RunConfig run_config_from_json(const json& j) {
  reject_unknown_keys(j, {"loss", "metrics", "sampler", "schedule"}, "config");
  RunConfig cfg;
  if (j.contains("loss")) cfg.loss = loss_weights_from_json(j.at("loss"));
  if (j.contains("metrics")) cfg.metrics = metric_config_from_json(j.at("metrics"));
  if (j.contains("sampler")) {
    const json& s = j.at("sampler");
    reject_unknown_keys(s, {"guidance_scale", "seed"}, "sampler config");
    if (s.contains("guidance_scale")) cfg.guidance_scale = as_number(s.at("guidance_scale"), "guidance_scale");
    if (s.contains("seed")) {
      if (!s.at("seed").is_number_unsigned()) parse_error("seed must be a nonnegative integer");
      cfg.seed = s.at("seed").get<std::uint64_t>();
    }
  }
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    reject_unknown_keys(s, {"steps"}, "schedule config");
    if (s.contains("steps")) cfg.schedule_steps = as_int(s.at("steps"), "steps");
  }
  return cfg;
}

json run_config_to_json(const RunConfig& cfg) {
  return {{"loss", loss_weights_to_json(cfg.loss)},
          {"metrics", metric_config_to_json(cfg.metrics)},
          {"sampler", {{"guidance_scale", cfg.guidance_scale}, {"seed", cfg.seed}}},
          {"schedule", {{"steps", cfg.schedule_steps}}}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidInput, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    parse_error(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kInvalidInput, "cannot write " + path.string());
  out << text;
}

void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump() + "\n"); }

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace beatsync::io
