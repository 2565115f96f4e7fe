#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "beatsync/fusion_mask.h"

namespace beatsync {

/// Variance schedule over steps t = 1..T. alpha_bar(0) is 1 by convention.
class NoiseSchedule {
 public:
  /// Builds alphas and cumulative products from betas; each beta must lie
  /// in (0, 0.999].
  explicit NoiseSchedule(std::vector<double> betas);

  int steps() const noexcept { return static_cast<int>(betas_.size()); }
  double beta(int t) const { return betas_[index(t)]; }
  double alpha(int t) const { return 1.0 - betas_[index(t)]; }
  double alpha_bar(int t) const { return t == 0 ? 1.0 : alpha_bars_[index(t)]; }
  const std::vector<double>& betas() const noexcept { return betas_; }
  const std::vector<double>& alpha_bars() const noexcept { return alpha_bars_; }

  bool operator==(const NoiseSchedule& other) const { return betas_ == other.betas_; }

 private:
  std::size_t index(int t) const;

  std::vector<double> betas_;
  std::vector<double> alpha_bars_;
};

inline constexpr double kCosineOffset = 0.008;
inline constexpr double kMaxBeta = 0.999;

/// Improved-DDPM cosine schedule: f(t) = cos^2(((t/T + s0) / (1 + s0)) * pi/2),
/// beta_t = min(1 - f(t)/f(t-1), 0.999).
NoiseSchedule cosine_schedule(int steps);

/// sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) noise, for 1 <= t <= T.
Eigen::MatrixXd forward_diffuse(const Eigen::MatrixXd& x0, int t, const Eigen::MatrixXd& noise,
                                const NoiseSchedule& sched);

/// One ancestral step x_t -> x_{t-1} from an x0 prediction. At t = 1 the
/// result is x0_hat itself.
Eigen::MatrixXd posterior_step(const Eigen::MatrixXd& x_t, const Eigen::MatrixXd& x0_hat, int t,
                               const Eigen::MatrixXd& noise, const NoiseSchedule& sched);

/// Replaces the entries where `mask` is 1 with the constraint diffused to
/// level t (t = 0 uses the clean constraint). Entries where `mask` is 0 are
/// returned unchanged.
Eigen::MatrixXd apply_constraint(const Eigen::MatrixXd& x_t, const Eigen::MatrixXd& constraint,
                                 const Eigen::MatrixXd& mask, int t, const Eigen::MatrixXd& noise,
                                 const NoiseSchedule& sched);

/// Broadcasts a per-frame mask over `dim` columns.
Eigen::MatrixXd frame_mask_entries(const TemporalMask& frames, Eigen::Index dim);

/// x0_uncond + scale * (x0_cond - x0_uncond).
Eigen::MatrixXd cfg_combine(const Eigen::MatrixXd& x0_cond, const Eigen::MatrixXd& x0_uncond, double scale);

enum class Conditioning { kConditional, kUnconditional };

/// Predicts the clean sequence from (x_t, t, condition branch).
using Denoiser = std::function<Eigen::MatrixXd(const Eigen::MatrixXd& x_t, int t, Conditioning branch)>;

Denoiser identity_denoiser();
/// Returns a matrix filled with `value` for both branches.
Denoiser constant_denoiser(double value);
/// Returns `target` for both branches.
Denoiser ground_truth_denoiser(Eigen::MatrixXd target);

struct SamplingConstraint {
  Eigen::MatrixXd reference;
  Eigen::MatrixXd mask;
};

struct SamplerConfig {
  double guidance_scale = 2.0;
  std::uint64_t seed = 0;
  std::optional<SamplingConstraint> constraint;
};

/// Ancestral sampling from x_T ~ N(0, I). Guidance evaluates both branches
/// whenever the scale differs from 1. Denoiser failures are rethrown as
/// kNumericFailure with the step number.
Eigen::MatrixXd sample(const Denoiser& denoiser, const SamplerConfig& cfg, const NoiseSchedule& sched,
                       Eigen::Index length, Eigen::Index dim);

}  // namespace beatsync
