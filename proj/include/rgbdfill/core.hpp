// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "rgbdfill/error.hpp"

namespace rgbdfill {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Color = Eigen::Vector3d;

/// Pinhole intrinsics. Integer pixel coordinates address pixel centers.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  /// Throws kInvalidIntrinsics unless fx, fy > 0 and the principal point is inside the image.
  void validate() const;
  bool operator==(const CameraIntrinsics&) const = default;
};

/// Rigid motion x -> rotation * x + translation. Camera poses are stored
/// camera-to-world; the camera looks along +Z with image x right and y down.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }
  /// Builds from a row-major 4x4 homogeneous matrix; the bottom row is ignored.
  static RigidTransform from_matrix(const Mat4& m);
  /// Camera at `eye` looking at `target`, with image-up roughly along `up`.
  static RigidTransform look_at(const Vec3& eye, const Vec3& target, const Vec3& up);

  Mat4 matrix() const;
  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  RigidTransform inverse() const;
  /// (this ∘ other)(x) = this(other(x)).
  RigidTransform operator*(const RigidTransform& other) const;
  const Vec3& center() const { return translation; }

  /// True when rotationᵀ·rotation = I and det = +1 within `tol`.
  bool is_rigid(double tol = 1e-9) const;
  /// Throws kInvalidTransform when !is_rigid(tol).
  void validate(double tol = 1e-9) const;
};

using CameraPose = RigidTransform;

struct RgbdPixel {
  float r = 0.0F;
  float g = 0.0F;
  float b = 0.0F;
  float d = 0.0F;
  bool valid() const { return d > 0.0F; }
  bool operator==(const RgbdPixel&) const = default;
};

/// Row-major RGB + metric depth image. A pixel is valid iff d > 0; invalid
/// pixels are all zeros.
class RgbdFrame {
 public:
  RgbdFrame() = default;
  RgbdFrame(int width, int height) : width_(width), height_(height), pixels_(static_cast<std::size_t>(width) * height) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }

  RgbdPixel& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  const RgbdPixel& at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  std::vector<RgbdPixel>& pixels() { return pixels_; }
  const std::vector<RgbdPixel>& pixels() const { return pixels_; }

  std::size_t valid_count() const;
  /// 1 where the pixel is valid.
  std::vector<std::uint8_t> mask() const;
  bool matches(const CameraIntrinsics& k) const { return width_ == k.width && height_ == k.height; }
  bool operator==(const RgbdFrame&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<RgbdPixel> pixels_;
};

using Face = std::array<std::uint32_t, 3>;

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Color> colors;
  std::vector<Face> faces;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }
  bool empty() const { return vertices.empty(); }
  /// Throws kShapeMismatch on out-of-range or repeated face indices or a color count mismatch.
  void validate() const;
};

struct Projection {
  double u;
  double v;
  double z;
};

/// World point to pixel coordinates and camera depth. Throws kBehindCamera when z <= 1e-9.
Projection project_point(const Vec3& p, const CameraIntrinsics& k, const CameraPose& pose);

/// Pixel (u, v) at depth d to world. Throws kInvalidDepth when d <= 0.
Vec3 unproject_pixel(double u, double v, double d, const CameraIntrinsics& k, const CameraPose& pose);

}  // namespace rgbdfill
