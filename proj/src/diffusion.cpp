#include "beatsync/diffusion.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "beatsync/error.h"
#include "beatsync/random.h"

namespace beatsync {

namespace {

void check_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const char* what) {
  BEATSYNC_CHECK(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::kShapeMismatch,
                 std::string(what) + ": shape mismatch");
}

// Noise streams: 0 draws x_T, 2t-1 the posterior noise of step t, 2t the
// constraint noise applied after step t.
std::uint64_t posterior_stream(int t) { return 2 * static_cast<std::uint64_t>(t) - 1; }
std::uint64_t constraint_stream(int t) { return 2 * static_cast<std::uint64_t>(t); }

}  // namespace

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : betas_(std::move(betas)) {
  BEATSYNC_CHECK(!betas_.empty(), ErrorKind::kDomain, "schedule needs at least one step");
  alpha_bars_.resize(betas_.size());
  double prod = 1.0;
  for (std::size_t i = 0; i < betas_.size(); ++i) {
    BEATSYNC_CHECK(betas_[i] > 0.0 && betas_[i] <= kMaxBeta, ErrorKind::kDomain,
                   "beta at step " + std::to_string(i + 1) + " outside (0, 0.999]");
    prod *= 1.0 - betas_[i];
    alpha_bars_[i] = prod;
  }
}

std::size_t NoiseSchedule::index(int t) const {
  BEATSYNC_CHECK(t >= 1 && t <= steps(), ErrorKind::kRange,
                 "diffusion step " + std::to_string(t) + " outside [1, " + std::to_string(steps()) + "]");
  return static_cast<std::size_t>(t - 1);
}

NoiseSchedule cosine_schedule(int steps) {
  BEATSYNC_CHECK(steps >= 1, ErrorKind::kDomain, "schedule needs at least one step");
  const auto f = [steps](int t) {
    const double c = std::cos((static_cast<double>(t) / steps + kCosineOffset) / (1.0 + kCosineOffset) *
                              std::numbers::pi / 2.0);
    return c * c;
  };
  std::vector<double> betas(steps);
  for (int t = 1; t <= steps; ++t) betas[t - 1] = std::min(1.0 - f(t) / f(t - 1), kMaxBeta);
  return NoiseSchedule(std::move(betas));
}

Eigen::MatrixXd forward_diffuse(const Eigen::MatrixXd& x0, int t, const Eigen::MatrixXd& noise,
                                const NoiseSchedule& sched) {
  check_shape(x0, noise, "forward_diffuse");
  BEATSYNC_CHECK(t >= 1 && t <= sched.steps(), ErrorKind::kRange,
                 "diffusion step " + std::to_string(t) + " outside [1, " + std::to_string(sched.steps()) + "]");
  const double ab = sched.alpha_bar(t);
  return std::sqrt(ab) * x0 + std::sqrt(1.0 - ab) * noise;
}

Eigen::MatrixXd posterior_step(const Eigen::MatrixXd& x_t, const Eigen::MatrixXd& x0_hat, int t,
                               const Eigen::MatrixXd& noise, const NoiseSchedule& sched) {
  check_shape(x_t, x0_hat, "posterior_step");
  check_shape(x_t, noise, "posterior_step");
  const double beta = sched.beta(t);
  if (t == 1) return x0_hat;
  const double ab = sched.alpha_bar(t);
  const double ab_prev = sched.alpha_bar(t - 1);
  const double coef_x0 = std::sqrt(ab_prev) * beta / (1.0 - ab);
  const double coef_xt = std::sqrt(sched.alpha(t)) * (1.0 - ab_prev) / (1.0 - ab);
  const double sigma = std::sqrt(beta * (1.0 - ab_prev) / (1.0 - ab));
  return coef_x0 * x0_hat + coef_xt * x_t + sigma * noise;
}

Eigen::MatrixXd apply_constraint(const Eigen::MatrixXd& x_t, const Eigen::MatrixXd& constraint,
                                 const Eigen::MatrixXd& mask, int t, const Eigen::MatrixXd& noise,
                                 const NoiseSchedule& sched) {
  check_shape(x_t, constraint, "apply_constraint");
  check_shape(x_t, mask, "apply_constraint");
  const Eigen::MatrixXd diffused = t == 0 ? constraint : forward_diffuse(constraint, t, noise, sched);
  Eigen::MatrixXd out = x_t;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      if (mask(r, c) != 0.0) out(r, c) = diffused(r, c);
    }
  }
  return out;
}

Eigen::MatrixXd frame_mask_entries(const TemporalMask& frames, Eigen::Index dim) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(frames.length(), dim);
  for (int i = 0; i < frames.length(); ++i) {
    if (frames[i]) out.row(i).setOnes();
  }
  return out;
}

Eigen::MatrixXd cfg_combine(const Eigen::MatrixXd& x0_cond, const Eigen::MatrixXd& x0_uncond, double scale) {
  check_shape(x0_cond, x0_uncond, "cfg_combine");
  return x0_uncond + scale * (x0_cond - x0_uncond);
}

Denoiser identity_denoiser() {
  return [](const Eigen::MatrixXd& x_t, int, Conditioning) { return x_t; };
}

Denoiser constant_denoiser(double value) {
  return [value](const Eigen::MatrixXd& x_t, int, Conditioning) {
    return Eigen::MatrixXd::Constant(x_t.rows(), x_t.cols(), value).eval();
  };
}

Denoiser ground_truth_denoiser(Eigen::MatrixXd target) {
  return [target = std::move(target)](const Eigen::MatrixXd& x_t, int, Conditioning) {
    check_shape(x_t, target, "ground-truth denoiser");
    return target;
  };
}

Eigen::MatrixXd sample(const Denoiser& denoiser, const SamplerConfig& cfg, const NoiseSchedule& sched,
                       Eigen::Index length, Eigen::Index dim) {
  BEATSYNC_CHECK(length >= 1 && dim >= 1, ErrorKind::kInvalidInput, "sample shape must be positive");
  BEATSYNC_CHECK(cfg.guidance_scale >= 0.0 && std::isfinite(cfg.guidance_scale), ErrorKind::kDomain,
                 "guidance scale must be nonnegative");
  if (cfg.constraint) {
    BEATSYNC_CHECK(cfg.constraint->reference.rows() == length && cfg.constraint->reference.cols() == dim,
                   ErrorKind::kShapeMismatch, "constraint reference shape mismatch");
    check_shape(cfg.constraint->reference, cfg.constraint->mask, "constraint mask");
  }
  const bool guided = cfg.guidance_scale != 1.0;

  Eigen::MatrixXd x = gaussian_matrix(length, dim, cfg.seed, 0);
  for (int t = sched.steps(); t >= 1; --t) {
    Eigen::MatrixXd x0_hat;
    try {
      x0_hat = denoiser(x, t, Conditioning::kConditional);
      if (guided) x0_hat = cfg_combine(x0_hat, denoiser(x, t, Conditioning::kUnconditional), cfg.guidance_scale);
    } catch (const std::exception& e) {
      throw Error(ErrorKind::kNumericFailure, "denoiser failed at step " + std::to_string(t) + ": " + e.what());
    }
    BEATSYNC_CHECK(x0_hat.rows() == length && x0_hat.cols() == dim, ErrorKind::kShapeMismatch,
                   "denoiser output shape mismatch at step " + std::to_string(t));
    BEATSYNC_CHECK(x0_hat.allFinite(), ErrorKind::kNumericFailure,
                   "denoiser produced non-finite values at step " + std::to_string(t));

    const Eigen::MatrixXd noise =
        t > 1 ? gaussian_matrix(length, dim, cfg.seed, posterior_stream(t)) : Eigen::MatrixXd::Zero(length, dim);
    x = posterior_step(x, x0_hat, t, noise, sched);
    if (cfg.constraint) {
      // x now sits at level t-1; the last replacement uses the clean values.
      const Eigen::MatrixXd cnoise = t > 1 ? gaussian_matrix(length, dim, cfg.seed, constraint_stream(t))
                                           : Eigen::MatrixXd::Zero(length, dim);
      x = apply_constraint(x, cfg.constraint->reference, cfg.constraint->mask, t - 1, cnoise, sched);
    }
  }
  return x;
}

}  // namespace beatsync
