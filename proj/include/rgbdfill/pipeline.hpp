// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rgbdfill/core.hpp"
#include "rgbdfill/denoiser.hpp"
#include "rgbdfill/diffusion.hpp"
#include "rgbdfill/geometry.hpp"
#include "rgbdfill/raster.hpp"

namespace rgbdfill {

inline constexpr double kMinGeneratedDepth = 1e-4;

struct SynthesisConfig {
  SamplerConfig sampler;
  BackprojectConfig backproject;
  RenderChunkConfig chunk;
  double depth_max = 8.0;  ///< meters; depth maps to [-1, 1] over [0, depth_max]
  std::uint64_t seed = 0;

  void validate() const;
};

struct Trajectory {
  CameraIntrinsics intrinsics;
  std::vector<CameraPose> poses;
};

struct PosedFrame {
  RgbdFrame frame;
  CameraPose pose;
};

struct NormalizedFrame {
  Image4 image;
  Mask mask;
};

/// rgb' = 2·rgb − 1, d' = 2·clamp(d, 0, depth_max)/depth_max − 1; invalid
/// pixels become zero in all channels with mask 0.
NormalizedFrame normalize_frame(const RgbdFrame& frame, double depth_max);

/// Inverse of normalize_frame with rgb clamped to [0, 1] and depth to
/// [kMinGeneratedDepth, depth_max]. Throws kNonFiniteInput.
RgbdFrame denormalize_frame(const Image4& x, double depth_max);

using DenoiserSource = std::function<const Denoiser&(std::size_t view)>;

/// Called after view j has been generated and fused.
using StepObserver = std::function<void(std::size_t view, const RgbdFrame& generated, const TriangleMesh& mesh)>;

struct SynthesisResult {
  TriangleMesh mesh;
  std::vector<RgbdFrame> generated;  ///< one per trajectory pose
};

/// Incremental view inpainting. For each trajectory pose: render the chunk of
/// nearest known frames, inpaint the unseen pixels, back-project the result
/// and fuse it into the scene. Generated frames join the known set. The
/// voxel grid is anchored to the first input pose.
SynthesisResult synthesize(std::span<const PosedFrame> inputs, const CameraIntrinsics& k, const Trajectory& traj,
                           const DenoiserSource& denoiser, const NoiseSchedule& sched, const SynthesisConfig& cfg,
                           const StepObserver& observer = {});

SynthesisResult synthesize(std::span<const PosedFrame> inputs, const CameraIntrinsics& k, const Trajectory& traj,
                           const Denoiser& denoiser, const NoiseSchedule& sched, const SynthesisConfig& cfg,
                           const StepObserver& observer = {});

/// Pooled fusion of the back-projected inputs (the mesh before any view is
/// generated).
TriangleMesh fuse_inputs(std::span<const PosedFrame> inputs, const CameraIntrinsics& k, const SynthesisConfig& cfg);

/// Every `stride`-th element starting at 0, where stride = round(1/fraction).
std::vector<std::size_t> uniform_subsample(std::size_t count, double fraction);

}  // namespace rgbdfill
