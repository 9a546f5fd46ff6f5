// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rgbdfill/core.hpp"
#include "rgbdfill/parallel.hpp"

namespace rgbdfill {

inline constexpr double kPsnrCap = 99.0;
inline constexpr int kSsimWindow = 7;

/// 10·log10(1/MSE) over paired values with peak 1.0; kPsnrCap for MSE 0.
/// Throws kEmptyMask on empty input.
double psnr_values(std::span<const double> pred, std::span<const double> gt);

/// RGB PSNR, peak 1.0, over pixels valid in `mask` (empty span = every pixel). Throws
/// kEmptyMask when nothing is selected.
double psnr(const RgbdFrame& pred, const RgbdFrame& gt, std::span<const std::uint8_t> mask = {});

/// Mean SSIM over RGB channels and all 7×7 window positions (uniform window,
/// population statistics, C1 = 0.01², C2 = 0.03²). Throws kTooSmall.
double ssim(const RgbdFrame& pred, const RgbdFrame& gt);

/// Single-channel SSIM on row-major planes.
double ssim_plane(std::span<const double> a, std::span<const double> b, int width, int height);

/// Mean squared depth error over pixels valid in both frames (and in `mask`
/// when given). Throws kEmptyMask.
double depth_mse(const RgbdFrame& pred, const RgbdFrame& gt, std::span<const std::uint8_t> mask = {});

struct PointSample {
  std::vector<Vec3> points;
};

/// Area-weighted face choice, uniform barycentric position. Throws kZeroArea.
PointSample sample_points(const TriangleMesh& mesh, std::size_t count, std::uint64_t seed);

/// Static 3-d tree for exact nearest-neighbor queries.
class KdTree {
 public:
  explicit KdTree(std::span<const Vec3> points);
  /// Squared distance to the nearest point; ties in position are irrelevant.
  double nearest_sq(const Vec3& q) const;
  std::size_t size() const { return pts_.size(); }

 private:
  struct Node {
    std::uint32_t begin, end;  // leaf range in pts_
    int axis;                  // -1 for leaves
    double split;
    std::int32_t left, right;
  };
  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const Vec3& q, double& best) const;

  std::vector<Vec3> pts_;
  std::vector<Node> nodes_;
};

double nearest_sq_brute(std::span<const Vec3> points, const Vec3& q);

/// Squared nearest-neighbor distance from each query to `targets`.
std::vector<double> nearest_sq_all(std::span<const Vec3> queries, std::span<const Vec3> targets,
                                   Exec exec = Exec::kParallel);

/// mean_a min_b ‖a − b‖² + mean_b min_a ‖a − b‖².
double chamfer(const PointSample& a, const PointSample& b);

/// Fraction of gt points with a pred point within `threshold`.
double completeness(const PointSample& gt, const PointSample& pred, double threshold);

}  // namespace rgbdfill
