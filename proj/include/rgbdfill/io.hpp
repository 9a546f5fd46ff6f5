// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rgbdfill/core.hpp"
#include "rgbdfill/pipeline.hpp"

namespace rgbdfill {

inline constexpr std::uint32_t kRgbdVersion = 1;
inline constexpr std::size_t kRgbdHeaderBytes = 16;

/// 'RGBD', u32 version, u32 width, u32 height (little-endian), then
/// height·width·4 float32 LE in row-major R,G,B,D order.
std::vector<std::uint8_t> encode_rgbd(const RgbdFrame& frame);
/// Throws kMalformedFile on bad magic, version, size or trailing bytes.
RgbdFrame decode_rgbd(std::span<const std::uint8_t> bytes);

void write_rgbd(const RgbdFrame& frame, const std::filesystem::path& path);
RgbdFrame read_rgbd(const std::filesystem::path& path);

struct ManifestFrame {
  std::string file;  ///< relative to the manifest; empty in trajectory files
  CameraPose pose;   ///< camera-to-world
};

struct SceneManifest {
  CameraIntrinsics intrinsics;
  std::vector<ManifestFrame> frames;
};

/// Parses a manifest document. Throws kMalformedFile, kInvalidIntrinsics or
/// kNonRigid (rotation block not orthonormal with det +1 within 1e-6).
SceneManifest parse_manifest(const std::string& text);
std::string format_manifest(const SceneManifest& manifest);

struct Scene {
  SceneManifest manifest;
  std::vector<PosedFrame> frames;
};

/// Reads the manifest and every frame it lists. Throws kMissingFile or
/// kDimMismatch in addition to the parse errors.
Scene read_scene(const std::filesystem::path& manifest_path);

/// Writes frame_NNN.rgbd files and scene.json into `dir`.
void write_scene(const std::filesystem::path& dir, const CameraIntrinsics& k, std::span<const PosedFrame> frames);

Trajectory read_trajectory(const std::filesystem::path& path);
void write_trajectory(const Trajectory& traj, const std::filesystem::path& path);

/// ASCII PLY with float xyz, uchar rgb (round(c·255)) and triangle faces.
std::string format_ply(const TriangleMesh& mesh);
void write_ply(const TriangleMesh& mesh, const std::filesystem::path& path);
/// Reads files produced by write_ply. Colors come back as byte/255.
TriangleMesh read_ply(const std::filesystem::path& path);

struct MetricRow {
  std::string scene;
  double view_fraction = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  double depth_mse = 0.0;
  double chamfer = 0.0;
  double completeness = 0.0;
};

std::string format_metrics_csv(std::span<const MetricRow> rows);
void write_metrics_csv(std::span<const MetricRow> rows, const std::filesystem::path& path);

void write_text(const std::string& text, const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

}  // namespace rgbdfill
