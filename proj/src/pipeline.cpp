// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#include "rgbdfill/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rgbdfill/random.hpp"

namespace rgbdfill {

void SynthesisConfig::validate() const {
  if (!(depth_max > 0.0) || !std::isfinite(depth_max)) fail(ErrorCode::kInvalidConfig, "depth_max must be > 0");
  if (sampler.steps < 1) fail(ErrorCode::kInvalidConfig, "sampler steps must be >= 1");
  backproject.validate();
  chunk.validate();
}

NormalizedFrame normalize_frame(const RgbdFrame& frame, double depth_max) {
  if (!(depth_max > 0.0)) fail(ErrorCode::kInvalidConfig, "depth_max must be > 0");
  NormalizedFrame out{Image4(frame.width(), frame.height()), Mask(frame.size(), 0)};
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const RgbdPixel& p = frame.pixels()[i];
    if (!p.valid()) continue;
    out.mask[i] = 1;
    double* v = &out.image.values[i * 4];
    v[0] = 2.0 * p.r - 1.0;
    v[1] = 2.0 * p.g - 1.0;
    v[2] = 2.0 * p.b - 1.0;
    v[3] = 2.0 * std::clamp(static_cast<double>(p.d), 0.0, depth_max) / depth_max - 1.0;
  }
  return out;
}

RgbdFrame denormalize_frame(const Image4& x, double depth_max) {
  if (!(depth_max > 0.0)) fail(ErrorCode::kInvalidConfig, "depth_max must be > 0");
  RgbdFrame frame(x.width, x.height);
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const double* v = &x.values[i * 4];
    for (int c = 0; c < 4; ++c)
      if (!std::isfinite(v[c])) fail(ErrorCode::kNonFiniteInput, "normalized frame has a non-finite value");
    RgbdPixel& p = frame.pixels()[i];
    p.r = static_cast<float>(std::clamp((v[0] + 1.0) * 0.5, 0.0, 1.0));
    p.g = static_cast<float>(std::clamp((v[1] + 1.0) * 0.5, 0.0, 1.0));
    p.b = static_cast<float>(std::clamp((v[2] + 1.0) * 0.5, 0.0, 1.0));
    p.d = static_cast<float>(std::clamp((v[3] + 1.0) * 0.5 * depth_max, kMinGeneratedDepth, depth_max));
  }
  return frame;
}

namespace {

void check_inputs(std::span<const PosedFrame> inputs, const CameraIntrinsics& k) {
  k.validate();
  if (inputs.empty()) fail(ErrorCode::kNoObservations, "synthesis needs at least one input frame");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!inputs[i].frame.matches(k))
      fail(ErrorCode::kDimMismatch, "input frame " + std::to_string(i) + " does not match the intrinsics");
    inputs[i].pose.validate(1e-6);
  }
}

}  // namespace

TriangleMesh fuse_inputs(std::span<const PosedFrame> inputs, const CameraIntrinsics& k, const SynthesisConfig& cfg) {
  cfg.validate();
  check_inputs(inputs, k);
  TriangleMesh fused;
  for (const auto& in : inputs) fused = fuse_meshes(fused, backproject_frame(in.frame, k, in.pose, cfg.backproject));
  return voxel_pool(fused, cfg.backproject.voxel_size, inputs.front().pose);
}

SynthesisResult synthesize(std::span<const PosedFrame> inputs, const CameraIntrinsics& k, const Trajectory& traj,
                           const DenoiserSource& denoiser, const NoiseSchedule& sched, const SynthesisConfig& cfg,
                           const StepObserver& observer) {
  cfg.validate();
  check_inputs(inputs, k);
  if (!(traj.intrinsics == k)) fail(ErrorCode::kDimMismatch, "trajectory intrinsics differ from the scene");
  for (const auto& pose : traj.poses) pose.validate(1e-6);

  const CameraPose& anchor = inputs.front().pose;
  std::vector<CameraPose> known_poses;
  std::vector<TriangleMesh> known_meshes;
  for (const auto& in : inputs) {
    known_poses.push_back(in.pose);
    known_meshes.push_back(backproject_frame(in.frame, k, in.pose, cfg.backproject));
  }

  SynthesisResult result;
  TriangleMesh fused;
  for (const auto& m : known_meshes) fused = fuse_meshes(fused, m);
  result.mesh = voxel_pool(fused, cfg.backproject.voxel_size, anchor);

  for (std::size_t j = 0; j < traj.poses.size(); ++j) {
    const CameraPose& target = traj.poses[j];
    TriangleMesh chunk;
    for (std::size_t idx : select_chunk(known_poses, target, cfg.chunk)) chunk = fuse_meshes(chunk, known_meshes[idx]);
    const RgbdFrame render = rasterize(chunk, k, target);
    const NormalizedFrame cond = normalize_frame(render, cfg.depth_max);
    const Image4 x0 = inpaint_sample(denoiser(j), cond.image, cond.mask, sched, cfg.sampler, derive_seed(cfg.seed, j));
    RgbdFrame generated = denormalize_frame(x0, cfg.depth_max);

    TriangleMesh piece = backproject_frame(generated, k, target, cfg.backproject);
    result.mesh = voxel_pool(fuse_meshes(result.mesh, piece), cfg.backproject.voxel_size, anchor);
    known_poses.push_back(target);
    known_meshes.push_back(std::move(piece));
    if (observer) observer(j, generated, result.mesh);
    result.generated.push_back(std::move(generated));
  }
  return result;
}

SynthesisResult synthesize(std::span<const PosedFrame> inputs, const CameraIntrinsics& k, const Trajectory& traj,
                           const Denoiser& denoiser, const NoiseSchedule& sched, const SynthesisConfig& cfg,
                           const StepObserver& observer) {
  return synthesize(inputs, k, traj, [&](std::size_t) -> const Denoiser& { return denoiser; }, sched, cfg, observer);
}

std::vector<std::size_t> uniform_subsample(std::size_t count, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) fail(ErrorCode::kInvalidConfig, "view fraction must lie in (0, 1]");
  const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / fraction)));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count; i += stride) out.push_back(i);
  return out;
}

}  // namespace rgbdfill
