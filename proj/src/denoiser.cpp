// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#include "rgbdfill/denoiser.hpp"

#include <cmath>
#include <string>

namespace rgbdfill {

Image4 denoise(const Denoiser& denoiser, const Image4& x_t, const Image4& cond, int t) {
  if (!x_t.same_shape(cond)) fail(ErrorCode::kShapeMismatch, "x_t and condition differ in shape");
  for (double v : x_t.values) {
    if (!std::isfinite(v)) fail(ErrorCode::kNonFiniteInput, "x_t has a non-finite value");
  }
  for (double v : cond.values) {
    if (!std::isfinite(v)) fail(ErrorCode::kNonFiniteInput, "condition has a non-finite value");
  }
  Image4 eps = denoiser.predict(x_t, cond, t);
  if (!eps.same_shape(x_t)) fail(ErrorCode::kShapeMismatch, "denoiser returned a different shape");
  return eps;
}

Image4 analytic_point_mass(const Image4& x_t, int t, const Image4& target, const NoiseSchedule& sched) {
  if (t < 0 || t > sched.steps()) fail(ErrorCode::kInvalidTimestep, "t=" + std::to_string(t));
  if (!x_t.same_shape(target)) fail(ErrorCode::kShapeMismatch, "target shape");
  const double ab = sched.alpha_bar(t);
  if (!(ab < 1.0)) fail(ErrorCode::kDegenerateTimestep, "alpha_bar(t) = 1");
  const double a = std::sqrt(ab);
  const double inv = 1.0 / std::sqrt(1.0 - ab);
  Image4 eps(x_t.width, x_t.height);
  for (std::size_t i = 0; i < eps.values.size(); ++i) eps.values[i] = (x_t.values[i] - a * target.values[i]) * inv;
  return eps;
}

Image4 analytic_gaussian(const Image4& x_t, int t, double mu, double s, const NoiseSchedule& sched) {
  if (t < 1 || t > sched.steps()) fail(ErrorCode::kInvalidTimestep, "t=" + std::to_string(t));
  if (!(s >= 0.0)) fail(ErrorCode::kInvalidConfig, "s must be >= 0");
  const double ab = sched.alpha_bar(t);
  const double a = std::sqrt(ab);
  const double s2 = s * s;
  const double denom = ab * s2 + 1.0 - ab;
  const double inv = 1.0 / std::sqrt(1.0 - ab);
  Image4 eps(x_t.width, x_t.height);
  for (std::size_t i = 0; i < eps.values.size(); ++i) {
    const double mean_x0 = (a * s2 * x_t.values[i] + (1.0 - ab) * mu) / denom;
    eps.values[i] = (x_t.values[i] - a * mean_x0) * inv;
  }
  return eps;
}

Image4 PointMassDenoiser::predict(const Image4& x_t, const Image4&, int t) const {
  return analytic_point_mass(x_t, t, target_, sched_);
}

Image4 GaussianDenoiser::predict(const Image4& x_t, const Image4&, int t) const {
  return analytic_gaussian(x_t, t, mu_, s_, sched_);
}

}  // namespace rgbdfill
