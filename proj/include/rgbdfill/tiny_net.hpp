// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rgbdfill/denoiser.hpp"
#include "rgbdfill/random.hpp"

namespace rgbdfill {

/// A small UNet: 8-channel input (x_t ⊕ condition), two stride-2 stages,
/// a bottleneck, two upsampling stages with skip concatenation, 4-channel
/// output. Residual blocks use single-group (layer-style) normalization, SiLU
/// and an additive sinusoidal timestep embedding.
struct TinyNetConfig {
  int resolution = 16;
  std::array<int, 3> widths{24, 32, 48};
  int time_dim = 32;
  int time_hidden = 64;

  void validate() const;
  bool operator==(const TinyNetConfig&) const = default;
};

struct ParamSlot {
  std::string name;
  std::vector<int> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
  bool operator==(const ParamSlot&) const = default;
};

/// All weights in one flat vector, addressed through named slots.
class TinyNetParams {
 public:
  static TinyNetParams zeros(const TinyNetConfig& config);
  /// Fan-in scaled normal init. The weights reading the condition channels
  /// start at zero, so a condition that is never shown during training keeps
  /// the network blind to it.
  static TinyNetParams random(const TinyNetConfig& config, std::uint64_t seed);

  const TinyNetConfig& config() const { return config_; }
  const std::vector<ParamSlot>& slots() const { return slots_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  std::span<double> slot(std::string_view name);
  bool all_finite() const;
  bool operator==(const TinyNetParams&) const = default;

 private:
  TinyNetConfig config_;
  std::vector<ParamSlot> slots_;
  std::vector<double> values_;
};

/// Slot table for `config`, in checkpoint order.
std::vector<ParamSlot> tiny_net_layout(const TinyNetConfig& config);

/// Checkpoint: "RGBDNET1", a textual manifest (config, then one line per
/// tensor: name, shape, offset), "end", then little-endian float64 values.
void save_checkpoint(const TinyNetParams& params, const std::filesystem::path& path);
/// Throws kMalformedFile / kMissingFile.
TinyNetParams load_checkpoint(const std::filesystem::path& path);

/// Deterministic forward pass. Throws kShapeMismatch when the image size is
/// not the configured resolution.
Image4 tiny_net_forward(const Image4& x_t, const Image4& cond, int t, const TinyNetParams& params);

/// Training loss mean((ε̂ − eps)²) for one example. When `grad` is non-empty
/// the parameter gradient is added into it.
double tiny_net_loss(const TinyNetParams& params, const Image4& x_t, const Image4& cond, int t, const Image4& eps,
                     std::span<double> grad = {});

class TinyNetDenoiser final : public Denoiser {
 public:
  explicit TinyNetDenoiser(TinyNetParams params) : params_(std::move(params)) {}
  Image4 predict(const Image4& x_t, const Image4& cond, int t) const override;
  const TinyNetParams& params() const { return params_; }

 private:
  TinyNetParams params_;
};

struct TrainConfig {
  double lr_initial = 2e-3;
  double lr_final = 1e-5;  ///< cosine-annealed from lr_initial
  int batch_size = 16;
  int epochs = 1;
  int steps = 0;  ///< optimizer steps; when 0, epochs · ceil(dataset / batch)
  double cond_dropout = 0.1;
  double grad_clip = 1.0;  ///< global gradient-norm clip; 0 disables
  std::uint64_t seed = 0;
  TinyNetConfig net;

  void validate() const;
};

/// A clean normalized frame and, optionally, the partial observation to
/// condition on (zeros where unknown). Without one, a random visibility mask
/// of the frame itself is used.
struct TrainSample {
  Image4 x0;
  Image4 cond;
};

struct TrainResult {
  TinyNetParams params;
  std::vector<double> loss_history;  ///< batch loss per optimizer step
};

/// Adam with cosine-annealed learning rate on the simplified objective:
/// t ~ U{1..T}, ε ~ N(0, I), condition replaced by the null image with
/// probability cond_dropout. Deterministic for a fixed seed. Throws
/// kTrainingDiverged on a non-finite loss.
TrainResult train(std::span<const TrainSample> dataset, const TrainConfig& cfg, const NoiseSchedule& sched,
                  const TinyNetParams* init = nullptr);

/// Random visibility pattern (half-planes, rectangles, or nothing visible).
Mask random_visibility_mask(int width, int height, Rng& rng);

/// Max relative error |g − fd| / max(|g|, |fd|, 1e-6) between an analytic
/// gradient and central differences over `count` randomly chosen coordinates.
double grad_check(const std::function<double(std::span<const double>)>& loss, std::span<const double> params,
                  std::span<const double> analytic, std::size_t count, std::uint64_t seed, double step = 1e-4);

/// grad_check on the training loss of the network for one example.
double grad_check(const TinyNetParams& params, const Image4& x_t, const Image4& cond, int t, const Image4& eps,
                  std::size_t count = 128, std::uint64_t seed = 0);

}  // namespace rgbdfill
