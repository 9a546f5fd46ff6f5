// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#include "rgbdfill/diffusion.hpp"

#include <cmath>
#include <string>

#include "rgbdfill/denoiser.hpp"
#include "rgbdfill/random.hpp"

namespace rgbdfill {

namespace {

void require_same(const Image4& a, const Image4& b, const char* what) {
  if (!a.same_shape(b) || a.values.size() != b.values.size()) fail(ErrorCode::kShapeMismatch, what);
}

void require_timestep(const NoiseSchedule& sched, int t, int lo) {
  if (t < lo || t > sched.steps()) {
    fail(ErrorCode::kInvalidTimestep, "t=" + std::to_string(t) + " outside [" + std::to_string(lo) + ", " +
                                          std::to_string(sched.steps()) + "]");
  }
}

// out[i] = a·x[i] + b·y[i]
Image4 axpby(double a, const Image4& x, double b, const Image4& y) {
  Image4 out(x.width, x.height);
  const auto n = static_cast<std::int64_t>(x.values.size());
#pragma omp parallel for schedule(static) if (n > 65536)
  for (std::int64_t i = 0; i < n; ++i) out.values[i] = a * x.values[i] + b * y.values[i];
  return out;
}

}  // namespace

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : beta_(std::move(betas)) {
  if (beta_.empty()) fail(ErrorCode::kInvalidSchedule, "schedule needs at least one step");
  for (std::size_t i = 0; i < beta_.size(); ++i) {
    const double b = beta_[i];
    if (!(b > 0.0 && b < 1.0)) fail(ErrorCode::kInvalidSchedule, "beta outside (0, 1)");
    if (i > 0 && !(b > beta_[i - 1])) fail(ErrorCode::kInvalidSchedule, "betas must be strictly increasing");
  }
  alpha_bar_.resize(beta_.size() + 1);
  alpha_bar_[0] = 1.0;
  for (std::size_t i = 0; i < beta_.size(); ++i) alpha_bar_[i + 1] = alpha_bar_[i] * (1.0 - beta_[i]);
}

NoiseSchedule make_linear_schedule(int steps, double beta_start, double beta_end) {
  if (steps < 1) fail(ErrorCode::kInvalidSchedule, "T must be >= 1");
  if (!(beta_start > 0.0 && beta_start < beta_end && beta_end < 1.0)) {
    fail(ErrorCode::kInvalidSchedule, "need 0 < beta_start < beta_end < 1");
  }
  std::vector<double> betas(static_cast<std::size_t>(steps));
  for (int t = 0; t < steps; ++t) {
    betas[static_cast<std::size_t>(t)] =
        steps == 1 ? beta_start : beta_start + (beta_end - beta_start) * t / static_cast<double>(steps - 1);
  }
  return NoiseSchedule(std::move(betas));
}

std::vector<int> strided_timesteps(int total_steps, int inference_steps) {
  if (inference_steps < 1 || inference_steps > total_steps) {
    fail(ErrorCode::kInvalidConfig, "need 1 <= S <= T, got S=" + std::to_string(inference_steps));
  }
  std::vector<int> tau(static_cast<std::size_t>(inference_steps));
  for (int i = 1; i <= inference_steps; ++i) {
    tau[static_cast<std::size_t>(i - 1)] =
        static_cast<int>(std::lround(static_cast<double>(i) * total_steps / inference_steps));
  }
  return tau;
}

std::vector<int> SamplerConfig::timesteps(const NoiseSchedule& sched) const {
  if (!(eta >= 0.0)) fail(ErrorCode::kInvalidConfig, "eta must be >= 0");
  if (!(guidance_beta >= 0.0)) fail(ErrorCode::kInvalidConfig, "guidance beta must be >= 0");
  if (tau.empty()) return strided_timesteps(sched.steps(), steps);
  if (static_cast<int>(tau.size()) != steps) fail(ErrorCode::kInvalidConfig, "tau length differs from steps");
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (tau[i] < 1 || (i > 0 && tau[i] <= tau[i - 1])) fail(ErrorCode::kInvalidConfig, "tau must increase from 1");
  }
  if (tau.back() != sched.steps()) fail(ErrorCode::kInvalidConfig, "tau must end at T");
  return tau;
}

Image4 forward_sample(const Image4& x0, int t, const Image4& eps, const NoiseSchedule& sched) {
  require_timestep(sched, t, 1);
  require_same(x0, eps, "forward_sample: eps shape");
  const double ab = sched.alpha_bar(t);
  return axpby(std::sqrt(ab), x0, std::sqrt(1.0 - ab), eps);
}

Image4 ddpm_step(const Image4& x_t, int t, const Image4& eps_hat, const Image4& noise, const NoiseSchedule& sched) {
  require_timestep(sched, t, 1);
  require_same(x_t, eps_hat, "ddpm_step: eps shape");
  require_same(x_t, noise, "ddpm_step: noise shape");
  const double a = sched.alpha(t);
  const double ab = sched.alpha_bar(t);
  const double ab_prev = sched.alpha_bar(t - 1);
  const double c_x = 1.0 / std::sqrt(a);
  const double c_eps = -(1.0 - a) / (std::sqrt(1.0 - ab) * std::sqrt(a));
  const double sigma = t == 1 ? 0.0 : std::sqrt((1.0 - ab_prev) / (1.0 - ab) * sched.beta(t));
  Image4 out(x_t.width, x_t.height);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = c_x * x_t.values[i] + c_eps * eps_hat.values[i] + sigma * noise.values[i];
  }
  return out;
}

Image4 ddim_step(const Image4& x_t, int t, int t_prev, const Image4& eps_hat, const Image4& noise, double eta,
                 const NoiseSchedule& sched) {
  require_timestep(sched, t, 1);
  require_timestep(sched, t_prev, 0);
  if (t_prev >= t) fail(ErrorCode::kInvalidTimestep, "t_prev must be < t");
  if (!(eta >= 0.0)) fail(ErrorCode::kInvalidEta, "eta must be >= 0");
  require_same(x_t, eps_hat, "ddim_step: eps shape");
  require_same(x_t, noise, "ddim_step: noise shape");
  const double ab = sched.alpha_bar(t);
  const double ab_prev = sched.alpha_bar(t_prev);
  const double beta_eff = 1.0 - ab / ab_prev;
  const double sigma2 = eta * (1.0 - ab_prev) / (1.0 - ab) * beta_eff;
  if (sigma2 > 1.0 - ab_prev) fail(ErrorCode::kInvalidEta, "sigma^2 exceeds 1 - alpha_bar_prev");
  const double sigma = std::sqrt(sigma2);
  const double sqrt_ab = std::sqrt(ab);
  const double sqrt_1mab = std::sqrt(1.0 - ab);
  const double sqrt_ab_prev = std::sqrt(ab_prev);
  const double dir = std::sqrt(std::max(1.0 - ab_prev - sigma2, 0.0));
  Image4 out(x_t.width, x_t.height);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double x0_hat = (x_t.values[i] - sqrt_1mab * eps_hat.values[i]) / sqrt_ab;
    out.values[i] = sqrt_ab_prev * x0_hat + dir * eps_hat.values[i] + sigma * noise.values[i];
  }
  return out;
}

Image4 inpaint_merge(const Image4& x_prev_full, const Image4& cond, const Mask& mask, int t, const Image4& eps_vis,
                     const NoiseSchedule& sched) {
  require_timestep(sched, t, 0);
  require_same(x_prev_full, cond, "inpaint_merge: condition shape");
  require_same(x_prev_full, eps_vis, "inpaint_merge: noise shape");
  if (mask.size() != x_prev_full.pixel_count()) fail(ErrorCode::kShapeMismatch, "inpaint_merge: mask size");
  const double ab = sched.alpha_bar(t);
  const double a = std::sqrt(ab);
  const double b = std::sqrt(1.0 - ab);
  Image4 out = x_prev_full;
  for (std::size_t p = 0; p < mask.size(); ++p) {
    if (!mask[p]) continue;
    for (int c = 0; c < Image4::kChannels; ++c) {
      const std::size_t i = p * Image4::kChannels + static_cast<std::size_t>(c);
      out.values[i] = a * cond.values[i] + b * eps_vis.values[i];
    }
  }
  return out;
}

Image4 cfg_combine(const Image4& eps_uncond, const Image4& eps_cond, double guidance_beta) {
  require_same(eps_uncond, eps_cond, "cfg_combine: shapes");
  return axpby(1.0 - guidance_beta, eps_uncond, guidance_beta, eps_cond);
}

Image4 inpaint_sample(const Denoiser& denoiser, const Image4& cond, const Mask& mask, const NoiseSchedule& sched,
                      const SamplerConfig& cfg, std::uint64_t seed) {
  const std::vector<int> tau = cfg.timesteps(sched);
  if (mask.size() != cond.pixel_count()) fail(ErrorCode::kShapeMismatch, "inpaint_sample: mask size");
  for (std::size_t p = 0; p < mask.size(); ++p) {
    if (mask[p]) continue;
    for (int c = 0; c < Image4::kChannels; ++c) {
      if (cond.values[p * Image4::kChannels + static_cast<std::size_t>(c)] != 0.0) {
        fail(ErrorCode::kShapeMismatch, "inpaint_sample: condition must be zero outside the mask");
      }
    }
  }

  Rng rng(seed);
  Image4 x(cond.width, cond.height);
  rng.fill_normal(x.values);
  const Image4 null_cond(cond.width, cond.height);
  Image4 noise(cond.width, cond.height);
  Image4 eps_vis(cond.width, cond.height);

  for (std::size_t i = tau.size(); i-- > 0;) {
    const int t = tau[i];
    const int t_prev = i == 0 ? 0 : tau[i - 1];
    Image4 eps;
    if (cfg.guidance_beta == 0.0) {
      eps = denoise(denoiser, x, null_cond, t);
    } else if (cfg.guidance_beta == 1.0) {
      eps = denoise(denoiser, x, cond, t);
    } else {
      eps = cfg_combine(denoise(denoiser, x, null_cond, t), denoise(denoiser, x, cond, t), cfg.guidance_beta);
    }
    rng.fill_normal(noise.values);
    rng.fill_normal(eps_vis.values);
    const Image4 x_prev = ddim_step(x, t, t_prev, eps, noise, cfg.eta, sched);
    x = inpaint_merge(x_prev, cond, mask, t_prev, eps_vis, sched);
  }

  for (std::size_t p = 0; p < mask.size(); ++p) {
    if (!mask[p]) continue;
    for (int c = 0; c < Image4::kChannels; ++c) {
      const std::size_t i = p * Image4::kChannels + static_cast<std::size_t>(c);
      x.values[i] = cond.values[i];
    }
  }
  return x;
}

}  // namespace rgbdfill
