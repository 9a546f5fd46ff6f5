// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rgbdfill/error.hpp"

namespace rgbdfill {

class Denoiser;

/// H×W×4 image in normalized diffusion space, channels interleaved per pixel.
struct Image4 {
  static constexpr int kChannels = 4;

  int width = 0;
  int height = 0;
  std::vector<double> values;

  Image4() = default;
  Image4(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h * kChannels, fill) {}

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  double& at(int x, int y, int c) { return values[(static_cast<std::size_t>(y) * width + x) * kChannels + c]; }
  double at(int x, int y, int c) const { return values[(static_cast<std::size_t>(y) * width + x) * kChannels + c]; }
  bool same_shape(const Image4& o) const { return width == o.width && height == o.height; }
  bool operator==(const Image4&) const = default;
};

/// Per-pixel visibility: 1 = known, 0 = to be generated.
using Mask = std::vector<std::uint8_t>;

/// β_1..β_T with α_t = 1 − β_t and ᾱ_t = ∏ α_s; ᾱ_0 = 1.
class NoiseSchedule {
 public:
  /// Throws kInvalidSchedule unless 0 < β_1 < ... < β_T < 1.
  explicit NoiseSchedule(std::vector<double> betas);

  int steps() const { return static_cast<int>(beta_.size()); }
  double beta(int t) const { return beta_.at(static_cast<std::size_t>(t - 1)); }
  double alpha(int t) const { return 1.0 - beta(t); }
  /// Valid for t in [0, T].
  double alpha_bar(int t) const { return alpha_bar_.at(static_cast<std::size_t>(t)); }

 private:
  std::vector<double> beta_;
  std::vector<double> alpha_bar_;
};

/// β linear from beta_start to beta_end inclusive; T = 1 uses beta_start.
/// Throws kInvalidSchedule unless 0 < beta_start < beta_end < 1 and T >= 1.
NoiseSchedule make_linear_schedule(int steps, double beta_start = 1e-4, double beta_end = 0.02);

struct SamplerConfig {
  int steps = 50;             ///< S, number of inference steps
  std::vector<int> tau;       ///< explicit τ_1..τ_S; empty = uniform stride
  double eta = 0.0;
  double guidance_beta = 1.0;

  /// τ_1..τ_S, strictly increasing with τ_S = T. Throws kInvalidConfig.
  std::vector<int> timesteps(const NoiseSchedule& sched) const;
};

/// τ_i = round(i·T/S) for i = 1..S.
std::vector<int> strided_timesteps(int total_steps, int inference_steps);

/// x_t = √ᾱ_t·x0 + √(1−ᾱ_t)·eps.
Image4 forward_sample(const Image4& x0, int t, const Image4& eps, const NoiseSchedule& sched);

/// Ancestral DDPM step with σ_t² = (1−ᾱ_{t−1})/(1−ᾱ_t)·β_t.
Image4 ddpm_step(const Image4& x_t, int t, const Image4& eps_hat, const Image4& noise, const NoiseSchedule& sched);

/// Strided DDIM step from t to t_prev < t (t_prev = 0 means ᾱ = 1). The
/// variance uses the effective β of the stride, 1 − ᾱ_t/ᾱ_{t_prev}, which is
/// β_t for consecutive steps. Throws kInvalidEta when σ² > 1 − ᾱ_{t_prev}.
Image4 ddim_step(const Image4& x_t, int t, int t_prev, const Image4& eps_hat, const Image4& noise, double eta,
                 const NoiseSchedule& sched);

/// Visible pixels become the forward-diffused condition at time t, invisible
/// ones keep x_prev_full. t = 0 is allowed.
Image4 inpaint_merge(const Image4& x_prev_full, const Image4& cond, const Mask& mask, int t, const Image4& eps_vis,
                     const NoiseSchedule& sched);

/// Classifier-free guidance: eps_uncond + β·(eps_cond − eps_uncond), evaluated
/// as (1−β)·eps_uncond + β·eps_cond so β = 0 and β = 1 reduce exactly.
Image4 cfg_combine(const Image4& eps_uncond, const Image4& eps_cond, double guidance_beta);

/// Masked DDIM inpainting from pure noise. Randomness comes from one stream
/// seeded by `seed`, drawn in a fixed order (x_T, then per step: step noise,
/// visible-region noise). Known pixels of the result equal `cond` exactly.
Image4 inpaint_sample(const Denoiser& denoiser, const Image4& cond, const Mask& mask, const NoiseSchedule& sched,
                      const SamplerConfig& cfg, std::uint64_t seed);

}  // namespace rgbdfill
