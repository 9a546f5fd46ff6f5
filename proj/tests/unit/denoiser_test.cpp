// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "rgbdfill/denoiser.hpp"
#include "rgbdfill/random.hpp"

namespace rgbdfill {
namespace {

Image4 noise_image(int w, int h, std::uint64_t seed) {
  Image4 x(w, h);
  Rng rng(seed);
  rng.fill_normal(x.values);
  return x;
}

TEST(PointMass, InvertsForwardSample) {
  const auto s = make_linear_schedule(1000);
  const Image4 x0 = noise_image(4, 4, 1), eps = noise_image(4, 4, 2);
  for (int t : {1, 250, 1000}) {
    const Image4 e = analytic_point_mass(forward_sample(x0, t, eps, s), t, x0, s);
    for (std::size_t i = 0; i < e.values.size(); ++i) EXPECT_NEAR(e.values[i], eps.values[i], 1e-9) << t;
  }
}

TEST(PointMass, Examples) {
  const auto s = make_linear_schedule(1000);
  const Image4 x0 = noise_image(2, 2, 3);
  Image4 on = x0;
  for (double& v : on.values) v *= std::sqrt(s.alpha_bar(400));
  for (double v : analytic_point_mass(on, 400, x0, s).values) EXPECT_NEAR(v, 0.0, 1e-15);

  const Image4 xt = noise_image(2, 2, 4);
  const Image4 e = analytic_point_mass(xt, 400, Image4(2, 2, 0.0), s);
  for (std::size_t i = 0; i < e.values.size(); ++i) {
    EXPECT_DOUBLE_EQ(e.values[i], xt.values[i] / std::sqrt(1.0 - s.alpha_bar(400)));
  }

  const NoiseSchedule q({0.75});
  EXPECT_NEAR(analytic_point_mass(Image4(1, 1, 1.3660254037844386), 1, Image4(1, 1, 1.0), q).values[0], 1.0, 1e-15);
}

TEST(PointMass, DegenerateAtZero) {
  const auto s = make_linear_schedule(10);
  try {
    analytic_point_mass(Image4(1, 1), 0, Image4(1, 1), s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateTimestep);
  }
}

TEST(Gaussian, ZeroSpreadIsPointMass) {
  const auto s = make_linear_schedule(1000);
  const Image4 xt = noise_image(3, 3, 5);
  for (int t : {1, 100, 1000}) {
    const Image4 a = analytic_gaussian(xt, t, 0.3, 0.0, s);
    const Image4 b = analytic_point_mass(xt, t, Image4(3, 3, 0.3), s);
    for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-9);
    const Image4 c = analytic_gaussian(xt, t, 0.3, 1e-9, s);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      EXPECT_NEAR(c.values[i], b.values[i], 1e-9 * std::max(1.0, std::abs(b.values[i])));
    }
  }
}

TEST(Gaussian, StandardNormalData) {
  const auto s = make_linear_schedule(1000);
  const Image4 xt = noise_image(3, 3, 6);
  const Image4 e = analytic_gaussian(xt, 321, 0.0, 1.0, s);
  for (std::size_t i = 0; i < e.values.size(); ++i) {
    EXPECT_NEAR(e.values[i], std::sqrt(1.0 - s.alpha_bar(321)) * xt.values[i], 1e-14);
  }
}

// E[x0 | x_t] by quadrature of prior × likelihood, independent of the closed form.
double posterior_mean_quadrature(double xt, double ab, double mu, double sd) {
  const int n = 200000;
  const double lo = mu - 12 * sd, hi = mu + 12 * sd, h = (hi - lo) / n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x0 = lo + i * h;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    const double prior = std::exp(-0.5 * (x0 - mu) * (x0 - mu) / (sd * sd));
    const double r = xt - std::sqrt(ab) * x0;
    const double like = std::exp(-0.5 * r * r / (1.0 - ab));
    num += w * x0 * prior * like;
    den += w * prior * like;
  }
  return num / den;
}

TEST(Gaussian, PosteriorMeanMatchesQuadrature) {
  const auto s = make_linear_schedule(1000);
  Rng rng(7);
  for (int probe = 0; probe < 20; ++probe) {
    const int t = 1 + static_cast<int>(rng.below(1000));
    const double mu = rng.normal() * 0.5, sd = 0.05 + rng.uniform();
    const double ab = s.alpha_bar(t);
    const double xt = std::sqrt(ab) * mu + rng.normal();
    const double eps = analytic_gaussian(Image4(1, 1, xt), t, mu, sd, s).values[0];
    const double closed = (xt - std::sqrt(1.0 - ab) * eps) / std::sqrt(ab);
    EXPECT_NEAR(closed, posterior_mean_quadrature(xt, ab, mu, sd), 1e-6) << "t=" << t;
  }
}

TEST(Gaussian, OnMeanInput) {
  const auto s = make_linear_schedule(1000);
  const double ab = s.alpha_bar(500);
  const double e = analytic_gaussian(Image4(1, 1, std::sqrt(ab) * 0.4), 500, 0.4, 0.3, s).values[0];
  EXPECT_NEAR(e, 0.0, 1e-15);
}

TEST(Denoise, ChecksInputs) {
  const auto s = make_linear_schedule(100);
  const PointMassDenoiser d(Image4(2, 2, 0.0), s);
  Image4 x(2, 2, 0.1);
  EXPECT_NO_THROW(denoise(d, x, Image4(2, 2), 5));
  try {
    denoise(d, x, Image4(3, 2), 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
  x.values[3] = std::numeric_limits<double>::quiet_NaN();
  try {
    denoise(d, x, Image4(2, 2), 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteInput);
  }
}

TEST(Denoise, PointMassOptimality) {
  const auto s = make_linear_schedule(1000);
  const Image4 x0 = noise_image(4, 4, 9);
  const PointMassDenoiser d(x0, s);
  double mse = 0.0;
  for (int t = 1; t <= 1000; t += 37) {
    const Image4 eps = noise_image(4, 4, 1000 + t);
    const Image4 e = denoise(d, forward_sample(x0, t, eps, s), Image4(4, 4), t);
    for (std::size_t i = 0; i < e.values.size(); ++i) mse += (e.values[i] - eps.values[i]) * (e.values[i] - eps.values[i]);
  }
  EXPECT_LT(mse, 1e-18);
}

}  // namespace
}  // namespace rgbdfill
