// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "rgbdfill/diffusion.hpp"

namespace rgbdfill {

/// Noise estimator ε(x_t, cond, t). The unconditional branch is the same
/// estimator evaluated with the null condition, an all-zeros image.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual Image4 predict(const Image4& x_t, const Image4& cond, int t) const = 0;
};

/// Checked evaluation: shapes must agree and inputs must be finite
/// (kShapeMismatch / kNonFiniteInput); the output has the input's shape.
Image4 denoise(const Denoiser& denoiser, const Image4& x_t, const Image4& cond, int t);

/// The unique ε consistent with x_t when the data is fixed at `target`.
/// Throws kDegenerateTimestep when ᾱ_t = 1.
Image4 analytic_point_mass(const Image4& x_t, int t, const Image4& target, const NoiseSchedule& sched);

/// Minimum-MSE ε for data x0 ~ N(mu, s²I), through the posterior mean
/// E[x0|x_t] = (√ᾱ·s²·x_t + (1−ᾱ)·mu) / (ᾱ·s² + 1 − ᾱ).
Image4 analytic_gaussian(const Image4& x_t, int t, double mu, double s, const NoiseSchedule& sched);

class PointMassDenoiser final : public Denoiser {
 public:
  PointMassDenoiser(Image4 target, const NoiseSchedule& sched) : target_(std::move(target)), sched_(sched) {}
  Image4 predict(const Image4& x_t, const Image4& cond, int t) const override;

 private:
  Image4 target_;
  const NoiseSchedule& sched_;
};

class GaussianDenoiser final : public Denoiser {
 public:
  GaussianDenoiser(double mu, double s, const NoiseSchedule& sched) : mu_(mu), s_(s), sched_(sched) {}
  Image4 predict(const Image4& x_t, const Image4& cond, int t) const override;

 private:
  double mu_;
  double s_;
  const NoiseSchedule& sched_;
};

}  // namespace rgbdfill
