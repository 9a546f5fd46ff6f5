// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rgbdfill/core.hpp"
#include "rgbdfill/parallel.hpp"

namespace rgbdfill {

/// Geometry nearer than this camera depth is clipped away.
inline constexpr double kNearPlane = 1e-6;

struct RenderChunkConfig {
  int chunk_size = 7;
  void validate() const;
};

/// Z-buffered perspective rasterization. Coverage is tested at pixel centers
/// (edges inclusive), both triangle orientations are drawn, and color and depth
/// are interpolated perspective-correctly. Uncovered pixels come out invalid.
/// Overlapping triangles at equal depth resolve to the lower face index.
RgbdFrame rasterize(const TriangleMesh& mesh, const CameraIntrinsics& k, const CameraPose& pose,
                    Exec exec = Exec::kParallel);

/// Indices (ascending) of the `chunk_size` known cameras whose centers are
/// nearest the target center. Distances equal to within 1e-9 relative count as
/// ties and go to the lower index.
std::vector<std::size_t> select_chunk(std::span<const CameraPose> known, const CameraPose& target,
                                      const RenderChunkConfig& cfg = {});

}  // namespace rgbdfill
