// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "rgbdfill/core.hpp"
#include "rgbdfill/pipeline.hpp"

namespace rgbdfill {

enum class Texture { kChecker, kGradient, kStripes };

Texture parse_texture(std::string_view name);  ///< throws kDegenerateSpec
std::string_view to_string(Texture t);

/// Axis-aligned box room [0,x]×[0,y]×[0,z] (z up) seen by a ring of cameras
/// looking inward at `look_at`.
struct SyntheticSceneSpec {
  Vec3 room_size{0.93, 0.89, 0.71};
  Texture texture = Texture::kChecker;
  double tile_size = 0.11;  ///< texture period, meters
  double quad_size = 0.04;  ///< wall tessellation, meters
  int camera_count = 20;
  double ring_radius = 0.21;
  double camera_height = 0.33;
  Vec3 look_at{0.465, 0.445, 0.33};
  double ring_phase = 0.0;  ///< radians, angle of the first camera
  CameraIntrinsics intrinsics{15.0, 15.0, 7.5, 7.5, 16, 16};

  /// Throws kDegenerateSpec.
  void validate() const;
};

struct SyntheticScene {
  TriangleMesh mesh;
  CameraIntrinsics intrinsics;
  std::vector<PosedFrame> frames;
};

/// Builds the room mesh (flat-colored tiles; `seed` only changes colors and
/// pattern phase) and renders one frame per ring camera.
SyntheticScene gen_synthetic_scene(const SyntheticSceneSpec& spec, std::uint64_t seed);

TriangleMesh make_room_mesh(const SyntheticSceneSpec& spec, std::uint64_t seed);
std::vector<CameraPose> ring_poses(const SyntheticSceneSpec& spec);

}  // namespace rgbdfill
