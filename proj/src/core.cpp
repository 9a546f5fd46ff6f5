// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#include "rgbdfill/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rgbdfill {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || width <= 0 || height <= 0 || !(cx >= 0.0) || !(cx < width) || !(cy >= 0.0) ||
      !(cy < height)) {
    fail(ErrorCode::kInvalidIntrinsics, "fx=" + std::to_string(fx) + " fy=" + std::to_string(fy) +
                                            " cx=" + std::to_string(cx) + " cy=" + std::to_string(cy));
  }
}

RigidTransform RigidTransform::from_matrix(const Mat4& m) {
  RigidTransform t;
  t.rotation = m.topLeftCorner<3, 3>();
  t.translation = m.topRightCorner<3, 1>();
  return t;
}

RigidTransform RigidTransform::look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 z = (target - eye).normalized();
  // Image y points down, so the camera x axis is forward × up.
  Vec3 x = z.cross(up);
  if (x.norm() < 1e-12) x = z.unitOrthogonal();
  x.normalize();
  const Vec3 y = z.cross(x);
  RigidTransform t;
  t.rotation.col(0) = x;
  t.rotation.col(1) = y;
  t.rotation.col(2) = z;
  t.translation = eye;
  return t;
}

Mat4 RigidTransform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform t;
  t.rotation = rotation.transpose();
  t.translation = -(t.rotation * translation);
  return t;
}

RigidTransform RigidTransform::operator*(const RigidTransform& other) const {
  RigidTransform t;
  t.rotation = rotation * other.rotation;
  t.translation = rotation * other.translation + translation;
  return t;
}

bool RigidTransform::is_rigid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

void RigidTransform::validate(double tol) const {
  if (!is_rigid(tol)) fail(ErrorCode::kInvalidTransform, "rotation is not orthonormal with det +1");
}

std::size_t RgbdFrame::valid_count() const {
  return static_cast<std::size_t>(std::count_if(pixels_.begin(), pixels_.end(), [](const RgbdPixel& p) { return p.valid(); }));
}

std::vector<std::uint8_t> RgbdFrame::mask() const {
  std::vector<std::uint8_t> m(pixels_.size());
  std::transform(pixels_.begin(), pixels_.end(), m.begin(), [](const RgbdPixel& p) { return p.valid() ? 1 : 0; });
  return m;
}

void TriangleMesh::validate() const {
  if (colors.size() != vertices.size()) fail(ErrorCode::kShapeMismatch, "colors and vertices differ in length");
  const auto n = vertices.size();
  for (const Face& f : faces) {
    if (f[0] >= n || f[1] >= n || f[2] >= n) fail(ErrorCode::kShapeMismatch, "face index out of range");
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) fail(ErrorCode::kShapeMismatch, "face repeats a vertex");
  }
}

Projection project_point(const Vec3& p, const CameraIntrinsics& k, const CameraPose& pose) {
  const Vec3 pc = pose.rotation.transpose() * (p - pose.translation);
  if (!(pc.z() > 1e-9)) fail(ErrorCode::kBehindCamera, "camera-space z=" + std::to_string(pc.z()));
  return {k.fx * pc.x() / pc.z() + k.cx, k.fy * pc.y() / pc.z() + k.cy, pc.z()};
}

Vec3 unproject_pixel(double u, double v, double d, const CameraIntrinsics& k, const CameraPose& pose) {
  if (!(d > 0.0)) fail(ErrorCode::kInvalidDepth, "depth=" + std::to_string(d));
  const Vec3 pc((u - k.cx) / k.fx * d, (v - k.cy) / k.fy * d, d);
  return pose.rotation * pc + pose.translation;
}

}  // namespace rgbdfill
