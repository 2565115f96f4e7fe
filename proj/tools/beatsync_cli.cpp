// beatsync: command-line front end for beat representations, mask dilation,
// losses, metrics, sampling and fixture generation. Every input and output
// is a file named by a flag.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "beatsync/beat.h"
#include "beatsync/diffusion.h"
#include "beatsync/error.h"
#include "beatsync/fusion_mask.h"
#include "beatsync/harness.h"
#include "beatsync/io.h"
#include "beatsync/losses.h"
#include "beatsync/metrics.h"
#include "beatsync/motion.h"

namespace {

using beatsync::io::json;

constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;
constexpr int kExitNumeric = 3;

struct Common {
  std::string config_path;
  std::string skeleton_path;

  beatsync::io::RunConfig config() const {
    if (config_path.empty()) return {};
    return beatsync::io::run_config_from_json(beatsync::io::read_json_file(config_path));
  }
  beatsync::Skeleton skeleton() const {
    if (skeleton_path.empty()) return beatsync::Skeleton::smpl_default();
    return beatsync::io::skeleton_from_json(beatsync::io::read_json_file(skeleton_path));
  }
};

beatsync::MotionSequence load_motion(const std::string& path) {
  return beatsync::io::motion_from_json(beatsync::io::read_json_file(path));
}

beatsync::io::BeatFile load_beats(const std::string& path) {
  return beatsync::io::beats_from_json(beatsync::io::read_json_file(path));
}

beatsync::TemporalMask load_mask(const std::string& path) {
  return beatsync::io::mask_from_json(beatsync::io::read_json_file(path));
}

json mask_values_json(const beatsync::TemporalMask& mask) {
  std::vector<int> values(mask.values().begin(), mask.values().end());
  return {{"length", mask.length()}, {"values", values}, {"keyframes", mask.keyframes()}};
}

void add_synth(CLI::App& app, const Common& common) {
  auto* cmd = app.add_subcommand("synth", "Generate a synthetic motion fixture");
  auto kind = std::make_shared<std::string>("periodic");
  auto length = std::make_shared<int>(150);
  auto fps = std::make_shared<double>(30.0);
  auto params = std::make_shared<beatsync::SynthParams>();
  auto seed = std::make_shared<std::uint64_t>(0);
  auto out = std::make_shared<std::string>();
  auto beats_out = std::make_shared<std::string>();
  cmd->add_option("--kind", *kind, "static | linear | periodic")->check(CLI::IsMember({"static", "linear", "periodic"}));
  cmd->add_option("--length", *length, "Frames")->check(CLI::PositiveNumber);
  cmd->add_option("--fps", *fps, "Frames per second")->check(CLI::PositiveNumber);
  cmd->add_option("--speed", params->speed, "Root speed (m/s); peak speed for periodic");
  cmd->add_option("--period", params->period, "Frames between velocity minima (periodic)");
  cmd->add_option("--jitter", params->pose_jitter, "Fixed pose rotation range (radians)");
  cmd->add_option("--seed", *seed, "Pose seed");
  cmd->add_option("--out", *out, "Motion file to write")->required();
  cmd->add_option("--beats-out", *beats_out, "Also write the constructed beat grid");
  cmd->callback([=, &common] {
    common.config();  // reject a malformed --config even though no section applies
    const auto k = beatsync::synth_kind_from_name(*kind);
    const auto seq = beatsync::synth_motion(k, *length, *fps, *params, *seed);
    beatsync::io::write_json_file(*out, beatsync::io::motion_to_json(seq));
    if (!beats_out->empty()) {
      beatsync::io::write_json_file(*beats_out,
                                    beatsync::io::beats_to_json({*fps, beatsync::synth_beats(k, *length, *params)}));
    }
  });
}

void add_sample_keyframes(CLI::App& app, const Common& common) {
  auto* cmd = app.add_subcommand("sample-keyframes", "Draw a random keyframe mask");
  auto length = std::make_shared<int>(150);
  auto ratio = std::make_shared<double>(0.1);
  auto seed = std::make_shared<std::optional<std::uint64_t>>();
  auto out = std::make_shared<std::string>();
  cmd->add_option("--length", *length, "Frames")->required();
  cmd->add_option("--ratio", *ratio, "Share of frames in (0, 1]")->required();
  cmd->add_option("--seed", *seed, "Sampling seed (defaults to sampler.seed)");
  cmd->add_option("--out", *out, "Mask file to write")->required();
  cmd->callback([=, &common] {
    const auto mask = beatsync::sample_keyframes(*length, *ratio, seed->value_or(common.config().seed));
    beatsync::io::write_json_file(*out, beatsync::io::mask_to_json(mask));
  });
}

void add_beat_distance(CLI::App& app, const Common& common) {
  auto* cmd = app.add_subcommand("beat-distance", "Nearest-beat distances from a beat file or a motion");
  auto beats = std::make_shared<std::string>();
  auto motion = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto* beats_opt = cmd->add_option("--beats", *beats, "Beat file");
  auto* motion_opt = cmd->add_option("--motion", *motion, "Motion file (estimate from velocity minima)");
  beats_opt->excludes(motion_opt);
  cmd->add_option("--out", *out, "Output JSON")->required();
  cmd->callback([=, &common] {
    if (!beats->empty()) {
      const auto grid = load_beats(*beats).grid;
      beatsync::io::write_json_file(*out, {{"length", grid.length()},
                                           {"distances", beatsync::nearest_beat_distance(grid)},
                                           {"intervals", beatsync::adjacent_intervals(grid)}});
    } else if (!motion->empty()) {
      const auto cfg = common.config();
      const auto est = beatsync::estimate_beat_distance(load_motion(*motion), common.skeleton(), cfg.metrics.motion_beats);
      beatsync::io::write_json_file(*out, {{"length", est.motion_beats.length()},
                                           {"distances", est.distance},
                                           {"motion_beat_frames", est.motion_beats.beat_frames()},
                                           {"no_beats", est.no_beats}});
    } else {
      throw CLI::ValidationError("beat-distance", "one of --beats or --motion is required");
    }
  });
}

void add_mask_commands(CLI::App& app, const Common& common) {
  for (const bool attention : {false, true}) {
    auto* cmd = app.add_subcommand(attention ? "attention-mask" : "dilate-mask",
                                   attention ? "Dense L x L attention mask M M_d^T" : "Beat-aware keyframe dilation");
    auto mask = std::make_shared<std::string>();
    auto beats = std::make_shared<std::string>();
    auto step = std::make_shared<int>(4);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--mask", *mask, "Keyframe mask file")->required();
    cmd->add_option("--beats", *beats, "Designated beat file")->required();
    cmd->add_option("--step", *step, "Base dilation step s")->check(CLI::PositiveNumber);
    cmd->add_option("--out", *out, "Output JSON")->required();
    cmd->callback([=, &common] {
      common.config();  // reject a malformed --config even though no section applies
      const auto m = load_mask(*mask);
      const auto dilated = beatsync::dilate_mask(m, load_beats(*beats).grid, *step);
      const json result = attention ? beatsync::io::attention_mask_to_json(beatsync::attention_mask(m, dilated))
                                    : mask_values_json(dilated);
      beatsync::io::write_json_file(*out, result);
    });
  }
}

void add_losses(CLI::App& app, const Common& common) {
  auto* cmd = app.add_subcommand("losses", "Evaluate the training losses for a target/prediction pair");
  auto target = std::make_shared<std::string>();
  auto prediction = std::make_shared<std::string>();
  auto beats = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  cmd->add_option("--target", *target, "Ground-truth motion")->required();
  cmd->add_option("--prediction", *prediction, "Predicted motion")->required();
  cmd->add_option("--beats", *beats, "Designated beat file")->required();
  cmd->add_option("--out", *out, "Loss report JSON")->required();
  cmd->callback([=, &common] {
    const auto cfg = common.config();
    const auto skel = common.skeleton();
    const auto x0 = load_motion(*target);
    const auto x0_hat = load_motion(*prediction);
    const auto grid = load_beats(*beats).grid;
    const auto b = beatsync::nearest_beat_distance(grid);
    const auto est = beatsync::estimate_beat_distance(x0_hat, skel, cfg.metrics.motion_beats);
    const std::vector<double> b_hat(est.distance.begin(), est.distance.end());
    const auto report = beatsync::total_loss(x0, x0_hat, b, b_hat, grid, skel, cfg.loss);
    json j = beatsync::io::loss_report_to_json(report, cfg.loss);
    j["estimated_no_beats"] = est.no_beats;
    beatsync::io::write_json_file(*out, j);
  });
}

void add_metrics(CLI::App& app, const Common& common) {
  auto* cmd = app.add_subcommand("metrics", "Evaluate BAS, PFC, KPD, BAP and kinetic diversity");
  auto motions = std::make_shared<std::vector<std::string>>();
  auto beats = std::make_shared<std::string>();
  auto music_beats = std::make_shared<std::string>();
  auto reference = std::make_shared<std::string>();
  auto mask = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  cmd->add_option("--motion", *motions, "Generated motion file(s)")->required();
  cmd->add_option("--beats", *beats, "Designated beat file (BAP)")->required();
  cmd->add_option("--music-beats", *music_beats, "Music beat file for BAS (defaults to --beats)");
  auto* ref_opt = cmd->add_option("--reference", *reference, "Reference motion for KPD");
  auto* mask_opt = cmd->add_option("--mask", *mask, "Keyframe mask for KPD");
  ref_opt->needs(mask_opt);
  mask_opt->needs(ref_opt);
  cmd->add_option("--out", *out, "Metric report JSON")->required();
  cmd->callback([=, &common] {
    const auto cfg = common.config().metrics;
    const auto skel = common.skeleton();
    const auto designated = load_beats(*beats).grid;
    const auto music = music_beats->empty() ? designated : load_beats(*music_beats).grid;
    std::optional<beatsync::JointPositions> ref_pos;
    std::optional<beatsync::TemporalMask> key_mask;
    if (!reference->empty()) {
      ref_pos = beatsync::forward_kinematics(load_motion(*reference), skel);
      key_mask = load_mask(*mask);
    }

    beatsync::MetricReport report;
    report.config = cfg;
    std::vector<beatsync::MotionSequence> seqs;
    double bas_sum = 0.0, pfc_sum = 0.0, kpd_sum = 0.0, bap_sum = 0.0;
    int bas_count = 0;
    for (const auto& path : *motions) {
      seqs.push_back(load_motion(path));
      const auto& seq = seqs.back();
      const auto pos = beatsync::forward_kinematics(seq, skel);
      const auto speed = beatsync::mean_joint_speed(pos, seq.fps());
      const auto motion_beats =
          beatsync::extract_motion_beats(speed, cfg.motion_beats.min_prominence, cfg.motion_beats.smooth_radius);
      if (!motion_beats.empty() && !music.empty()) {
        bas_sum += beatsync::beat_alignment_score(motion_beats, music, cfg);
        ++bas_count;
      }
      pfc_sum += beatsync::physical_foot_contact(pos, seq.fps(), cfg.up_axis);
      if (ref_pos) kpd_sum += beatsync::keypose_distance(pos, *ref_pos, *key_mask);
      const auto bap = beatsync::beat_assignment_precision(motion_beats, designated, cfg);
      bap_sum += bap.value;
      report.bap_degenerate = report.bap_degenerate || bap.degenerate;
    }
    const double n = static_cast<double>(seqs.size());
    if (bas_count > 0) report.bas = bas_sum / bas_count;
    report.pfc = pfc_sum / n;
    if (ref_pos) report.kpd = kpd_sum / n;
    report.bap = bap_sum / n;
    if (seqs.size() >= 2) report.div_k = beatsync::kinetic_diversity(seqs, skel);
    beatsync::io::write_json_file(*out, beatsync::io::metric_report_to_json(report));
  });
}

void add_sample(CLI::App& app, const Common& common) {
  auto* cmd = app.add_subcommand("sample", "Run the ancestral sampler with a built-in denoiser");
  struct Options {
    int length = 150;
    int dim = beatsync::kPoseDim;
    double fps = 30.0;
    std::string denoiser = "ground-truth";
    double target_value = 0.0;
    std::string reference;
    std::string constraint_motion;
    std::string constraint_mask;
    std::string schedule;
    std::optional<int> steps;
    std::optional<std::uint64_t> seed;
    std::optional<double> guidance;
    std::string out;
  };
  auto opt = std::make_shared<Options>();
  cmd->add_option("--length", opt->length, "Frames")->check(CLI::PositiveNumber);
  cmd->add_option("--dim", opt->dim, "Values per frame")->check(CLI::PositiveNumber);
  cmd->add_option("--fps", opt->fps, "Frame rate recorded in the output")->check(CLI::PositiveNumber);
  cmd->add_option("--denoiser", opt->denoiser, "identity | constant | ground-truth")
      ->check(CLI::IsMember({"identity", "constant", "ground-truth"}));
  cmd->add_option("--target-value", opt->target_value, "Fill value for the constant denoiser");
  cmd->add_option("--reference", opt->reference, "Motion returned by the ground-truth denoiser");
  auto* cm = cmd->add_option("--constraint-motion", opt->constraint_motion, "Constraint reference motion");
  auto* ck = cmd->add_option("--constraint-mask", opt->constraint_mask, "Constraint keyframe mask");
  cm->needs(ck);
  ck->needs(cm);
  cmd->add_option("--schedule", opt->schedule, "Schedule file (overrides --steps)");
  cmd->add_option("--steps", opt->steps, "Cosine schedule steps");
  cmd->add_option("--seed", opt->seed, "Sampling seed");
  cmd->add_option("--guidance", opt->guidance, "Classifier-free guidance scale");
  cmd->add_option("--out", opt->out, "Output motion file")->required();
  cmd->callback([opt, &common] {
    const auto cfg = common.config();
    const auto sched = !opt->schedule.empty() ? beatsync::io::schedule_from_json(beatsync::io::read_json_file(opt->schedule))
                                              : beatsync::cosine_schedule(opt->steps.value_or(cfg.schedule_steps));
    beatsync::SamplerConfig sampler;
    sampler.guidance_scale = opt->guidance.value_or(cfg.guidance_scale);
    sampler.seed = opt->seed.value_or(cfg.seed);

    beatsync::Denoiser denoiser;
    if (opt->denoiser == "identity") {
      denoiser = beatsync::identity_denoiser();
    } else if (opt->denoiser == "constant") {
      denoiser = beatsync::constant_denoiser(opt->target_value);
    } else {
      if (opt->reference.empty()) throw CLI::ValidationError("sample", "--reference is required for ground-truth");
      const auto ref = load_motion(opt->reference);
      denoiser = beatsync::ground_truth_denoiser(ref.frames());
      opt->length = ref.length();
    }
    if (!opt->constraint_motion.empty()) {
      const auto ref = load_motion(opt->constraint_motion);
      const auto mask = load_mask(opt->constraint_mask);
      sampler.constraint = beatsync::SamplingConstraint{ref.frames(), beatsync::frame_mask_entries(mask, ref.frames().cols())};
    }
    const Eigen::MatrixXd x = beatsync::sample(denoiser, sampler, sched, opt->length, opt->dim);
    json frames = json::array();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index k = 0; k < x.cols(); ++k) row.push_back(x(i, k));
      frames.push_back(std::move(row));
    }
    beatsync::io::write_json_file(opt->out, {{"fps", opt->fps}, {"frames", std::move(frames)}});
  });
}

void add_plot_data(CLI::App& app, const Common& common) {
  auto* cmd = app.add_subcommand("plot-data", "Mean joint speed curve with beat and motion-beat markers");
  auto motion = std::make_shared<std::string>();
  auto beats = std::make_shared<std::string>();
  auto out_json = std::make_shared<std::string>();
  auto out_csv = std::make_shared<std::string>();
  cmd->add_option("--motion", *motion, "Motion file")->required();
  cmd->add_option("--beats", *beats, "Beat file for the markers")->required();
  cmd->add_option("--out", *out_json, "Plot data JSON")->required();
  cmd->add_option("--csv", *out_csv, "Also write CSV");
  cmd->callback([=, &common] {
    const auto cfg = common.config();
    const auto data = beatsync::emit_plot_data(load_motion(*motion), common.skeleton(), load_beats(*beats).grid,
                                               cfg.metrics.motion_beats);
    beatsync::io::write_json_file(*out_json, beatsync::plot_data_to_json(data));
    if (!out_csv->empty()) beatsync::io::write_text_file(*out_csv, beatsync::plot_data_to_csv(data));
  });
}

int exit_code_for(beatsync::ErrorKind kind) {
  switch (kind) {
    case beatsync::ErrorKind::kDegenerateRotation:
    case beatsync::ErrorKind::kNumericFailure:
      return kExitNumeric;
    default:
      return kExitDomain;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"beatsync: beat-synchronized dance generation toolkit"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "JSON config (loss, metrics, sampler, schedule sections)");
  app.add_option("--skeleton", common.skeleton_path, "Skeleton JSON (defaults to the built-in SMPL tree)");
  app.fallthrough();

  add_synth(app, common);
  add_sample_keyframes(app, common);
  add_beat_distance(app, common);
  add_mask_commands(app, common);
  add_losses(app, common);
  add_metrics(app, common);
  add_sample(app, common);
  add_plot_data(app, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const beatsync::Error& e) {
    std::cerr << "error: " << beatsync::error_kind_name(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
