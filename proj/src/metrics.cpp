// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#include "rgbdfill/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rgbdfill/random.hpp"

namespace rgbdfill {
namespace {

void check_same(const RgbdFrame& a, const RgbdFrame& b, std::span<const std::uint8_t> mask) {
  if (a.width() != b.width() || a.height() != b.height()) fail(ErrorCode::kShapeMismatch, "frame sizes differ");
  if (!mask.empty() && mask.size() != a.size()) fail(ErrorCode::kShapeMismatch, "mask size differs from frame");
}

}  // namespace

double psnr_values(std::span<const double> pred, std::span<const double> gt) {
  if (pred.size() != gt.size()) fail(ErrorCode::kShapeMismatch, "psnr inputs differ in size");
  if (pred.empty()) fail(ErrorCode::kEmptyMask, "psnr over zero pixels");
  double sse = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sse += (pred[i] - gt[i]) * (pred[i] - gt[i]);
  const double mse = sse / static_cast<double>(pred.size());
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double psnr(const RgbdFrame& pred, const RgbdFrame& gt, std::span<const std::uint8_t> mask) {
  check_same(pred, gt, mask);
  std::vector<double> a, b;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!mask.empty() && !mask[i]) continue;
    const RgbdPixel& p = pred.pixels()[i];
    const RgbdPixel& g = gt.pixels()[i];
    a.insert(a.end(), {p.r, p.g, p.b});
    b.insert(b.end(), {g.r, g.g, g.b});
  }
  return psnr_values(a, b);
}

double ssim_plane(std::span<const double> a, std::span<const double> b, int width, int height) {
  if (width < kSsimWindow || height < kSsimWindow)
    fail(ErrorCode::kTooSmall, "image smaller than the 7x7 SSIM window");
  if (a.size() != b.size() || a.size() != static_cast<std::size_t>(width) * height)
    fail(ErrorCode::kShapeMismatch, "ssim plane sizes");
  constexpr double kC1 = 0.01 * 0.01;
  constexpr double kC2 = 0.03 * 0.03;
  constexpr double kInvN = 1.0 / (kSsimWindow * kSsimWindow);
  double total = 0.0;
  for (int y0 = 0; y0 + kSsimWindow <= height; ++y0) {
    for (int x0 = 0; x0 + kSsimWindow <= width; ++x0) {
      double sa = 0.0, sb = 0.0;
      for (int y = y0; y < y0 + kSsimWindow; ++y)
        for (int x = x0; x < x0 + kSsimWindow; ++x) {
          sa += a[static_cast<std::size_t>(y) * width + x];
          sb += b[static_cast<std::size_t>(y) * width + x];
        }
      const double ma = sa * kInvN;
      const double mb = sb * kInvN;
      double vaa = 0.0, vbb = 0.0, vab = 0.0;
      for (int y = y0; y < y0 + kSsimWindow; ++y)
        for (int x = x0; x < x0 + kSsimWindow; ++x) {
          const double da = a[static_cast<std::size_t>(y) * width + x] - ma;
          const double db = b[static_cast<std::size_t>(y) * width + x] - mb;
          vaa += da * da;
          vbb += db * db;
          vab += da * db;
        }
      vaa *= kInvN;
      vbb *= kInvN;
      vab *= kInvN;
      total += ((2.0 * ma * mb + kC1) * (2.0 * vab + kC2)) / ((ma * ma + mb * mb + kC1) * (vaa + vbb + kC2));
    }
  }
  const int positions = (width - kSsimWindow + 1) * (height - kSsimWindow + 1);
  return total / positions;
}

double ssim(const RgbdFrame& pred, const RgbdFrame& gt) {
  check_same(pred, gt, {});
  std::vector<double> a(pred.size()), b(pred.size());
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const RgbdPixel& p = pred.pixels()[i];
      const RgbdPixel& g = gt.pixels()[i];
      a[i] = c == 0 ? p.r : (c == 1 ? p.g : p.b);
      b[i] = c == 0 ? g.r : (c == 1 ? g.g : g.b);
    }
    sum += ssim_plane(a, b, pred.width(), pred.height());
  }
  return sum / 3.0;
}

double depth_mse(const RgbdFrame& pred, const RgbdFrame& gt, std::span<const std::uint8_t> mask) {
  check_same(pred, gt, mask);
  double sse = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!mask.empty() && !mask[i]) continue;
    const RgbdPixel& p = pred.pixels()[i];
    const RgbdPixel& g = gt.pixels()[i];
    if (!p.valid() || !g.valid()) continue;
    const double d = static_cast<double>(p.d) - g.d;
    sse += d * d;
    ++n;
  }
  if (n == 0) fail(ErrorCode::kEmptyMask, "depth_mse over zero jointly valid pixels");
  return sse / static_cast<double>(n);
}

PointSample sample_points(const TriangleMesh& mesh, std::size_t count, std::uint64_t seed) {
  mesh.validate();
  std::vector<double> cdf(mesh.faces.size());
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
    const Face& f = mesh.faces[i];
    const Vec3& a = mesh.vertices[f[0]];
    total += 0.5 * (mesh.vertices[f[1]] - a).cross(mesh.vertices[f[2]] - a).norm();
    cdf[i] = total;
  }
  if (!(total > 0.0)) fail(ErrorCode::kZeroArea, "mesh has no face with positive area");
  PointSample out;
  out.points.reserve(count);
  Rng rng(seed);
  for (std::size_t n = 0; n < count; ++n) {
    const double r = rng.uniform() * total;
    std::size_t fi = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
    fi = std::min(fi, cdf.size() - 1);
    double s = rng.uniform();
    double t = rng.uniform();
    if (s + t > 1.0) {
      s = 1.0 - s;
      t = 1.0 - t;
    }
    const Face& f = mesh.faces[fi];
    const Vec3& a = mesh.vertices[f[0]];
    out.points.push_back(a + s * (mesh.vertices[f[1]] - a) + t * (mesh.vertices[f[2]] - a));
  }
  return out;
}

KdTree::KdTree(std::span<const Vec3> points) : pts_(points.begin(), points.end()) {
  if (!pts_.empty()) build(0, static_cast<std::uint32_t>(pts_.size()));
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  constexpr std::uint32_t kLeaf = 8;
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({begin, end, -1, 0.0, -1, -1});
  if (end - begin <= kLeaf) return id;
  Vec3 lo = pts_[begin], hi = pts_[begin];
  for (std::uint32_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(pts_[i]);
    hi = hi.cwiseMax(pts_[i]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(pts_.begin() + begin, pts_.begin() + mid, pts_.begin() + end,
                   [axis](const Vec3& a, const Vec3& b) { return a[axis] < b[axis]; });
  const double split = pts_[mid][axis];
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::search(std::int32_t node, const Vec3& q, double& best) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (std::uint32_t i = n.begin; i < n.end; ++i) best = std::min(best, (pts_[i] - q).squaredNorm());
    return;
  }
  const double diff = q[n.axis] - n.split;
  const std::int32_t near = diff < 0.0 ? n.left : n.right;
  const std::int32_t far = diff < 0.0 ? n.right : n.left;
  search(near, q, best);
  if (diff * diff <= best) search(far, q, best);
}

double KdTree::nearest_sq(const Vec3& q) const {
  if (pts_.empty()) fail(ErrorCode::kEmptyMask, "nearest neighbor in an empty set");
  double best = std::numeric_limits<double>::infinity();
  search(0, q, best);
  return best;
}

double nearest_sq_brute(std::span<const Vec3> points, const Vec3& q) {
  if (points.empty()) fail(ErrorCode::kEmptyMask, "nearest neighbor in an empty set");
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& p : points) best = std::min(best, (p - q).squaredNorm());
  return best;
}

std::vector<double> nearest_sq_all(std::span<const Vec3> queries, std::span<const Vec3> targets, Exec exec) {
  const KdTree tree(targets);
  std::vector<double> out(queries.size());
  const auto n = static_cast<std::int64_t>(queries.size());
  if (exec == Exec::kSerial) {
    for (std::int64_t i = 0; i < n; ++i) out[i] = tree.nearest_sq(queries[i]);
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) out[i] = tree.nearest_sq(queries[i]);
  }
  return out;
}

double chamfer(const PointSample& a, const PointSample& b) {
  if (a.points.empty() || b.points.empty()) fail(ErrorCode::kEmptyMask, "chamfer of an empty point set");
  const auto ab = nearest_sq_all(a.points, b.points);
  const auto ba = nearest_sq_all(b.points, a.points);
  return std::accumulate(ab.begin(), ab.end(), 0.0) / static_cast<double>(ab.size()) +
         std::accumulate(ba.begin(), ba.end(), 0.0) / static_cast<double>(ba.size());
}

double completeness(const PointSample& gt, const PointSample& pred, double threshold) {
  if (gt.points.empty() || pred.points.empty()) fail(ErrorCode::kEmptyMask, "completeness of an empty point set");
  if (!(threshold > 0.0)) fail(ErrorCode::kInvalidConfig, "completeness threshold must be > 0");
  const auto d = nearest_sq_all(gt.points, pred.points);
  const double t2 = threshold * threshold;
  const auto hits = std::count_if(d.begin(), d.end(), [t2](double x) { return x <= t2; });
  return static_cast<double>(hits) / static_cast<double>(d.size());
}

}  // namespace rgbdfill
