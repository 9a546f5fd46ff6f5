// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#include "rgbdfill/dataset.hpp"

#include <set>

namespace rgbdfill {

std::vector<TrainSample> make_training_samples(std::span<const PosedFrame> frames, const CameraIntrinsics& k,
                                               const DatasetConfig& cfg) {
  cfg.backproject.validate();
  const auto n = static_cast<long long>(frames.size());
  std::vector<TriangleMesh> meshes;
  for (const auto& f : frames) {
    if (!f.frame.matches(k)) fail(ErrorCode::kDimMismatch, "training frame does not match the intrinsics");
    meshes.push_back(backproject_frame(f.frame, k, f.pose, cfg.backproject));
  }
  std::vector<TrainSample> out;
  for (long long i = 0; i < n; ++i) {
    const Image4 x0 = normalize_frame(frames[i].frame, cfg.depth_max).image;
    const auto render = [&](std::initializer_list<long long> offsets) {
      std::set<long long> used;
      TriangleMesh chunk;
      for (long long o : offsets) {
        const long long j = ((i + o) % n + n) % n;
        if (j == i || !used.insert(j).second) continue;
        chunk = fuse_meshes(chunk, meshes[j]);
      }
      if (used.empty()) return;
      out.push_back({x0, normalize_frame(rasterize(chunk, k, frames[i].pose), cfg.depth_max).image});
    };
    for (int o : cfg.neighbor_offsets) {
      render({o});
      render({-o});
      render({-o, o});
    }
    if (cfg.add_unconditioned) out.push_back({x0, {}});
  }
  return out;
}

}  // namespace rgbdfill
