// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rgbdfill/core.hpp"
#include "rgbdfill/parallel.hpp"

namespace rgbdfill {

struct BackprojectConfig {
  double max_edge_len = 0.1;  ///< meters; longer 3D edges drop the face
  double min_depth = 0.1;     ///< meters; faces touching nearer vertices are dropped
  double voxel_size = 0.02;   ///< meters

  void validate() const;
};

/// Lifts every valid pixel to a world-space vertex and triangulates the pixel
/// grid: each 2x2 block yields (p00,p10,p01) and (p10,p11,p01) when all three
/// corners are valid and the face passes the depth and edge filters.
/// Vertices are emitted in row-major pixel order.
TriangleMesh backproject_frame(const RgbdFrame& frame, const CameraIntrinsics& k, const CameraPose& pose,
                               const BackprojectConfig& cfg = {}, Exec exec = Exec::kParallel);

/// Applies a rigid motion to vertex positions. Throws kInvalidTransform.
TriangleMesh transform_mesh(const TriangleMesh& mesh, const RigidTransform& g);

/// Concatenation; b's face indices are offset by a's vertex count.
TriangleMesh fuse_meshes(const TriangleMesh& a, const TriangleMesh& b);

/// Merges vertices sharing a cubic cell of the grid attached to `frame`
/// (cell = floor(frameᵀ-local coordinate / voxel_size)). Each cell keeps the
/// centroid and mean color of its members, in order of first appearance.
/// Collapsed faces are removed. Throws kInvalidConfig when voxel_size <= 0.
TriangleMesh voxel_pool(const TriangleMesh& mesh, double voxel_size,
                        const RigidTransform& frame = RigidTransform::identity());

}  // namespace rgbdfill
