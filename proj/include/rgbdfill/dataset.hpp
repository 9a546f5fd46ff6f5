// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "rgbdfill/pipeline.hpp"
#include "rgbdfill/tiny_net.hpp"

namespace rgbdfill {

struct DatasetConfig {
  double depth_max = 8.0;
  BackprojectConfig backproject;
  /// For frame i, the frames i ± offset (cyclic) are rendered into view i,
  /// one side at a time and both together.
  std::vector<int> neighbor_offsets{1, 2, 3, 4};
  /// Also add each frame once without a render, to be masked at random.
  bool add_unconditioned = true;
};

/// Training pairs built the way synthesis builds its conditions: a clean
/// frame and the normalized render of neighboring back-projections.
std::vector<TrainSample> make_training_samples(std::span<const PosedFrame> frames, const CameraIntrinsics& k,
                                               const DatasetConfig& cfg);

}  // namespace rgbdfill
