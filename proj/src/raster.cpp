// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#include "rgbdfill/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <omp.h>

namespace rgbdfill {

void RenderChunkConfig::validate() const {
  if (chunk_size < 1) fail(ErrorCode::kInvalidConfig, "chunk_size must be >= 1");
}

namespace {

// Pixel-unit slack on edge tests so pixel centers lying exactly on a mesh
// boundary stay covered after rounding.
constexpr double kEdgeSlack = 1e-7;

struct ClipVertex {
  Vec3 p;  // camera space
  Color c;
};

struct ScreenTriangle {
  double u[3], v[3];
  double inv_z[3];
  Color c_over_z[3];
  double inv_area;
  double inv_len[3];  // 1 / |edge i|, edge i runs from vertex i to i+1
  int x0, x1, y0, y1;
  std::uint32_t face;
};

void clip_near(const ClipVertex (&in)[3], std::vector<ClipVertex>& out) {
  out.clear();
  for (int i = 0; i < 3; ++i) {
    const ClipVertex& a = in[i];
    const ClipVertex& b = in[(i + 1) % 3];
    const bool a_in = a.p.z() > kNearPlane;
    const bool b_in = b.p.z() > kNearPlane;
    if (a_in) out.push_back(a);
    if (a_in != b_in) {
      const double s = (kNearPlane - a.p.z()) / (b.p.z() - a.p.z());
      out.push_back({a.p + s * (b.p - a.p), a.c + s * (b.c - a.c)});
    }
  }
}

void setup_triangles(const TriangleMesh& mesh, const CameraIntrinsics& k, const CameraPose& pose,
                     std::vector<ScreenTriangle>& tris) {
  const Mat3 rt = pose.rotation.transpose();
  std::vector<Vec3> cam(mesh.vertices.size());
  for (std::size_t i = 0; i < cam.size(); ++i) cam[i] = rt * (mesh.vertices[i] - pose.translation);

  std::vector<ClipVertex> poly;
  poly.reserve(4);
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const Face& f = mesh.faces[fi];
    const ClipVertex in[3] = {{cam[f[0]], mesh.colors[f[0]]}, {cam[f[1]], mesh.colors[f[1]]}, {cam[f[2]], mesh.colors[f[2]]}};
    if (in[0].p.z() <= kNearPlane && in[1].p.z() <= kNearPlane && in[2].p.z() <= kNearPlane) continue;
    clip_near(in, poly);
    for (std::size_t j = 1; j + 1 < poly.size(); ++j) {
      const ClipVertex* v[3] = {&poly[0], &poly[j], &poly[j + 1]};
      ScreenTriangle t{};
      t.face = static_cast<std::uint32_t>(fi);
      for (int i = 0; i < 3; ++i) {
        const double iz = 1.0 / v[i]->p.z();
        t.u[i] = k.fx * v[i]->p.x() * iz + k.cx;
        t.v[i] = k.fy * v[i]->p.y() * iz + k.cy;
        t.inv_z[i] = iz;
        t.c_over_z[i] = v[i]->c * iz;
      }
      const double area = (t.u[1] - t.u[0]) * (t.v[2] - t.v[0]) - (t.v[1] - t.v[0]) * (t.u[2] - t.u[0]);
      if (!(std::abs(area) > 1e-300) || !std::isfinite(area)) continue;
      t.inv_area = 1.0 / area;
      for (int i = 0; i < 3; ++i) {
        const int n = (i + 1) % 3;
        t.inv_len[i] = 1.0 / std::hypot(t.u[n] - t.u[i], t.v[n] - t.v[i]);
      }
      const double umin = std::min({t.u[0], t.u[1], t.u[2]});
      const double umax = std::max({t.u[0], t.u[1], t.u[2]});
      const double vmin = std::min({t.v[0], t.v[1], t.v[2]});
      const double vmax = std::max({t.v[0], t.v[1], t.v[2]});
      t.x0 = static_cast<int>(std::max(std::ceil(umin - 1e-6), 0.0));
      t.y0 = static_cast<int>(std::max(std::ceil(vmin - 1e-6), 0.0));
      t.x1 = static_cast<int>(std::min(std::floor(umax + 1e-6), static_cast<double>(k.width - 1)));
      t.y1 = static_cast<int>(std::min(std::floor(vmax + 1e-6), static_cast<double>(k.height - 1)));
      if (t.x0 > t.x1 || t.y0 > t.y1) continue;
      tris.push_back(t);
    }
  }
}

struct Shade {
  double depth;
  Color color;
};

// Rasterizes rows [row_begin, row_end) of every triangle, in triangle order.
void raster_band(const std::vector<ScreenTriangle>& tris, int width, int row_begin, int row_end,
                 std::vector<double>& zbuf, std::vector<Color>& cbuf) {
  for (const ScreenTriangle& t : tris) {
    const int y0 = std::max(t.y0, row_begin);
    const int y1 = std::min(t.y1, row_end - 1);
    for (int y = y0; y <= y1; ++y) {
      for (int x = t.x0; x <= t.x1; ++x) {
        double b[3];
        bool inside = true;
        for (int i = 0; i < 3; ++i) {
          const int n = (i + 1) % 3;
          const int o = (i + 2) % 3;
          // Edge i is opposite vertex o.
          const double e = (t.u[n] - t.u[i]) * (y - t.v[i]) - (t.v[n] - t.v[i]) * (x - t.u[i]);
          const double signed_e = e * t.inv_area;
          if (signed_e * std::abs(1.0 / t.inv_area) * t.inv_len[i] < -kEdgeSlack) {
            inside = false;
            break;
          }
          b[o] = std::max(signed_e, 0.0);
        }
        if (!inside) continue;
        const double bsum = b[0] + b[1] + b[2];
        if (!(bsum > 0.0)) continue;
        for (double& bi : b) bi /= bsum;
        const double w = b[0] * t.inv_z[0] + b[1] * t.inv_z[1] + b[2] * t.inv_z[2];
        if (!(w > 0.0)) continue;
        const double depth = 1.0 / w;
        if (!(depth > kNearPlane)) continue;
        const std::size_t pi = static_cast<std::size_t>(y) * width + x;
        if (depth < zbuf[pi]) {
          zbuf[pi] = depth;
          cbuf[pi] = (b[0] * t.c_over_z[0] + b[1] * t.c_over_z[1] + b[2] * t.c_over_z[2]) * depth;
        }
      }
    }
  }
}

}  // namespace

RgbdFrame rasterize(const TriangleMesh& mesh, const CameraIntrinsics& k, const CameraPose& pose, Exec exec) {
  k.validate();
  RgbdFrame frame(k.width, k.height);
  if (mesh.faces.empty()) return frame;

  std::vector<ScreenTriangle> tris;
  setup_triangles(mesh, k, pose, tris);

  std::vector<double> zbuf(frame.size(), std::numeric_limits<double>::infinity());
  std::vector<Color> cbuf(frame.size(), Color::Zero());
  if (exec == Exec::kSerial) {
    raster_band(tris, k.width, 0, k.height, zbuf, cbuf);
  } else {
    // Bands own disjoint rows, so each pixel sees triangles in the same order
    // as the serial path.
    const int bands = std::min(k.height, std::max(1, omp_get_max_threads() * 4));
#pragma omp parallel for schedule(dynamic, 1)
    for (int bi = 0; bi < bands; ++bi) {
      const int r0 = k.height * bi / bands;
      const int r1 = k.height * (bi + 1) / bands;
      raster_band(tris, k.width, r0, r1, zbuf, cbuf);
    }
  }

  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (!std::isfinite(zbuf[i])) continue;
    RgbdPixel& p = frame.pixels()[i];
    p.r = static_cast<float>(std::clamp(cbuf[i].x(), 0.0, 1.0));
    p.g = static_cast<float>(std::clamp(cbuf[i].y(), 0.0, 1.0));
    p.b = static_cast<float>(std::clamp(cbuf[i].z(), 0.0, 1.0));
    p.d = static_cast<float>(zbuf[i]);
    if (!(p.d > 0.0F)) p = RgbdPixel{};
  }
  return frame;
}

std::vector<std::size_t> select_chunk(std::span<const CameraPose> known, const CameraPose& target,
                                      const RenderChunkConfig& cfg) {
  cfg.validate();
  if (known.empty()) fail(ErrorCode::kNoObservations, "select_chunk needs at least one known frame");
  std::vector<double> dist(known.size());
  for (std::size_t i = 0; i < known.size(); ++i) dist[i] = (known[i].center() - target.center()).norm();
  std::vector<std::size_t> order(known.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto nearer = [&](std::size_t a, std::size_t b) {
    const double tol = 1e-9 * std::max({dist[a], dist[b], 1e-12});
    if (std::abs(dist[a] - dist[b]) <= tol) return a < b;
    return dist[a] < dist[b];
  };
  std::stable_sort(order.begin(), order.end(), nearer);
  order.resize(std::min(order.size(), static_cast<std::size_t>(cfg.chunk_size)));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace rgbdfill
