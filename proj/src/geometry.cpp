// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#include "rgbdfill/geometry.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace rgbdfill {

void BackprojectConfig::validate() const {
  if (!(max_edge_len > 0.0) || !(min_depth > 0.0) || !(voxel_size > 0.0)) {
    fail(ErrorCode::kInvalidConfig, "backprojection thresholds must be positive");
  }
}

TriangleMesh backproject_frame(const RgbdFrame& frame, const CameraIntrinsics& k, const CameraPose& pose,
                               const BackprojectConfig& cfg, Exec exec) {
  cfg.validate();
  k.validate();
  if (!frame.matches(k)) fail(ErrorCode::kDimMismatch, "frame size differs from intrinsics");
  const int w = frame.width();
  const int h = frame.height();

  // Vertex index of each valid pixel, assigned in row-major order.
  std::vector<std::int64_t> index(frame.size(), -1);
  std::int64_t count = 0;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (frame.pixels()[i].valid()) index[i] = count++;
  }

  TriangleMesh mesh;
  mesh.vertices.resize(static_cast<std::size_t>(count));
  mesh.colors.resize(static_cast<std::size_t>(count));
  const bool parallel = exec == Exec::kParallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (index[i] < 0) continue;
      const RgbdPixel& p = frame.pixels()[i];
      const auto vi = static_cast<std::size_t>(index[i]);
      mesh.vertices[vi] = unproject_pixel(x, y, p.d, k, pose);
      mesh.colors[vi] = Color(p.r, p.g, p.b);
    }
  }

  const double max_sq = cfg.max_edge_len * cfg.max_edge_len;
  auto keep = [&](std::size_t a, std::size_t b, std::size_t c) {
    const auto& px = frame.pixels();
    if (px[a].d < cfg.min_depth || px[b].d < cfg.min_depth || px[c].d < cfg.min_depth) return false;
    const Vec3& va = mesh.vertices[static_cast<std::size_t>(index[a])];
    const Vec3& vb = mesh.vertices[static_cast<std::size_t>(index[b])];
    const Vec3& vc = mesh.vertices[static_cast<std::size_t>(index[c])];
    return (va - vb).squaredNorm() <= max_sq && (vb - vc).squaredNorm() <= max_sq && (vc - va).squaredNorm() <= max_sq;
  };

  // Faces per block row, concatenated in row order so the result does not
  // depend on scheduling.
  std::vector<std::vector<Face>> rows(static_cast<std::size_t>(std::max(h - 1, 0)));
#pragma omp parallel for schedule(static) if (parallel)
  for (int y = 0; y < h - 1; ++y) {
    auto& out = rows[static_cast<std::size_t>(y)];
    for (int x = 0; x < w - 1; ++x) {
      const std::size_t p00 = static_cast<std::size_t>(y) * w + x;
      const std::size_t p10 = p00 + 1;
      const std::size_t p01 = p00 + static_cast<std::size_t>(w);
      const std::size_t p11 = p01 + 1;
      auto id = [&](std::size_t p) { return static_cast<std::uint32_t>(index[p]); };
      if (index[p00] >= 0 && index[p10] >= 0 && index[p01] >= 0 && keep(p00, p10, p01)) {
        out.push_back({id(p00), id(p10), id(p01)});
      }
      if (index[p10] >= 0 && index[p11] >= 0 && index[p01] >= 0 && keep(p10, p11, p01)) {
        out.push_back({id(p10), id(p11), id(p01)});
      }
    }
  }
  for (auto& r : rows) mesh.faces.insert(mesh.faces.end(), r.begin(), r.end());
  return mesh;
}

TriangleMesh transform_mesh(const TriangleMesh& mesh, const RigidTransform& g) {
  g.validate();
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v = g.apply(v);
  return out;
}

TriangleMesh fuse_meshes(const TriangleMesh& a, const TriangleMesh& b) {
  TriangleMesh out = a;
  const auto offset = static_cast<std::uint32_t>(a.vertices.size());
  out.vertices.insert(out.vertices.end(), b.vertices.begin(), b.vertices.end());
  out.colors.insert(out.colors.end(), b.colors.begin(), b.colors.end());
  out.faces.reserve(a.faces.size() + b.faces.size());
  for (const Face& f : b.faces) out.faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
  return out;
}

namespace {

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<std::uint64_t>(k.y) * 0xc2b2ae3d27d4eb4fULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667b19e3779f9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

TriangleMesh voxel_pool(const TriangleMesh& mesh, double voxel_size, const RigidTransform& frame) {
  if (!(voxel_size > 0.0)) fail(ErrorCode::kInvalidConfig, "voxel_size must be positive");
  const Mat3 rt = frame.rotation.transpose();

  std::unordered_map<CellKey, std::uint32_t, CellHash> cells;
  cells.reserve(mesh.vertices.size());
  std::vector<std::uint32_t> remap(mesh.vertices.size());
  std::vector<Vec3> pos_sum;
  std::vector<Color> col_sum;
  std::vector<std::uint32_t> members;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3 local = rt * (mesh.vertices[i] - frame.translation);
    const CellKey key{static_cast<std::int64_t>(std::floor(local.x() / voxel_size)),
                      static_cast<std::int64_t>(std::floor(local.y() / voxel_size)),
                      static_cast<std::int64_t>(std::floor(local.z() / voxel_size))};
    auto [it, inserted] = cells.try_emplace(key, static_cast<std::uint32_t>(pos_sum.size()));
    if (inserted) {
      pos_sum.push_back(Vec3::Zero());
      col_sum.push_back(Color::Zero());
      members.push_back(0);
    }
    const std::uint32_t c = it->second;
    pos_sum[c] += mesh.vertices[i];
    col_sum[c] += mesh.colors[i];
    ++members[c];
    remap[i] = c;
  }

  TriangleMesh out;
  out.vertices.resize(pos_sum.size());
  out.colors.resize(pos_sum.size());
  for (std::size_t c = 0; c < pos_sum.size(); ++c) {
    const double n = members[c];
    out.vertices[c] = members[c] == 1 ? pos_sum[c] : Vec3(pos_sum[c] / n);
    out.colors[c] = members[c] == 1 ? col_sum[c] : Color(col_sum[c] / n);
  }
  out.faces.reserve(mesh.faces.size());
  for (const Face& f : mesh.faces) {
    const Face g{remap[f[0]], remap[f[1]], remap[f[2]]};
    if (g[0] != g[1] && g[1] != g[2] && g[0] != g[2]) out.faces.push_back(g);
  }
  return out;
}

}  // namespace rgbdfill
