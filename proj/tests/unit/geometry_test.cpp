// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "rgbdfill/geometry.hpp"
#include "rgbdfill/random.hpp"
#include "rgbdfill/raster.hpp"

namespace rgbdfill {
namespace {

RigidTransform random_rigid(Rng& rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  RigidTransform g;
  g.rotation = q.toRotationMatrix();
  g.translation = Vec3(rng.normal(), rng.normal(), rng.normal());
  return g;
}

RgbdFrame constant_frame(int w, int h, float d) {
  RgbdFrame f(w, h);
  for (auto& p : f.pixels()) p = {0.25F, 0.5F, 0.75F, d};
  return f;
}

// Smooth random surface with a few holes.
RgbdFrame random_frame(int w, int h, Rng& rng) {
  RgbdFrame f(w, h);
  const double a = rng.uniform(), b = rng.uniform();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (rng.uniform() < 0.05) continue;
      f.at(x, y) = {static_cast<float>(rng.uniform()), static_cast<float>(rng.uniform()),
                    static_cast<float>(rng.uniform()), static_cast<float>(1.0 + 0.1 * a * x / w + 0.1 * b * y / h)};
    }
  }
  return f;
}

TriangleMesh triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
  TriangleMesh m;
  m.vertices = {a, b, c};
  m.colors = {Color(1, 0, 0), Color(0, 1, 0), Color(0, 0, 1)};
  m.faces = {{0, 1, 2}};
  return m;
}

TEST(Backproject, AllInvalidGivesEmptyMesh) {
  const CameraIntrinsics k{100, 100, 1, 1, 4, 4};
  const auto m = backproject_frame(RgbdFrame(4, 4), k, CameraPose::identity());
  EXPECT_EQ(m.vertex_count(), 0u);
  EXPECT_EQ(m.face_count(), 0u);
}

TEST(Backproject, TwoByTwoConstantDepth) {
  const CameraIntrinsics k{100, 100, 0.5, 0.5, 2, 2};
  const auto m = backproject_frame(constant_frame(2, 2, 1.0F), k, CameraPose::identity());
  EXPECT_EQ(m.vertex_count(), 4u);
  ASSERT_EQ(m.face_count(), 2u);
  EXPECT_NEAR((m.vertices[0] - m.vertices[1]).norm(), 0.01, 1e-12);
  EXPECT_EQ(m.faces[0], (Face{0, 1, 2}));
  EXPECT_EQ(m.faces[1], (Face{1, 3, 2}));
  EXPECT_NO_THROW(m.validate());
}

TEST(Backproject, NearDepthFiltered) {
  const CameraIntrinsics k{100, 100, 0.5, 0.5, 2, 2};
  const auto m = backproject_frame(constant_frame(2, 2, 0.05F), k, CameraPose::identity());
  EXPECT_EQ(m.vertex_count(), 4u);
  EXPECT_EQ(m.face_count(), 0u);
}

TEST(Backproject, LongEdgesFiltered) {
  const CameraIntrinsics k{10, 10, 0.5, 0.5, 2, 2};
  // Pixel spacing at depth 2 with fx = 10 is 0.2 m.
  const auto m = backproject_frame(constant_frame(2, 2, 2.0F), k, CameraPose::identity());
  EXPECT_EQ(m.face_count(), 0u);
  BackprojectConfig loose;
  loose.max_edge_len = 0.5;
  EXPECT_EQ(backproject_frame(constant_frame(2, 2, 2.0F), k, CameraPose::identity(), loose).face_count(), 2u);
}

TEST(Backproject, SizeMismatch) {
  const CameraIntrinsics k{100, 100, 0.5, 0.5, 2, 2};
  EXPECT_THROW(backproject_frame(RgbdFrame(3, 2), k, CameraPose::identity()), Error);
}

TEST(Backproject, SerialAndParallelIdentical) {
  Rng rng(5);
  const CameraIntrinsics k{60, 60, 31.5, 23.5, 64, 48};
  const RgbdFrame f = random_frame(64, 48, rng);
  const CameraPose p = random_rigid(rng);
  const auto a = backproject_frame(f, k, p, {}, Exec::kSerial);
  const auto b = backproject_frame(f, k, p, {}, Exec::kParallel);
  EXPECT_EQ(a.vertices, b.vertices);
  EXPECT_EQ(a.colors, b.colors);
  EXPECT_EQ(a.faces, b.faces);
}

TEST(Backproject, Se3Equivariance) {
  Rng rng(9);
  const CameraIntrinsics k{20, 20, 7.5, 7.5, 16, 16};
  for (int trial = 0; trial < 10; ++trial) {
    const RgbdFrame f = random_frame(16, 16, rng);
    const CameraPose p = random_rigid(rng);
    const RigidTransform g = random_rigid(rng);
    const auto a = transform_mesh(backproject_frame(f, k, p), g);
    const auto b = backproject_frame(f, k, g * p);
    ASSERT_EQ(a.vertex_count(), b.vertex_count());
    EXPECT_EQ(a.faces, b.faces);
    for (std::size_t i = 0; i < a.vertex_count(); ++i) EXPECT_LT((a.vertices[i] - b.vertices[i]).norm(), 1e-9);
  }
}

TEST(Backproject, RasterRoundTrip) {
  Rng rng(21);
  const CameraIntrinsics k{20, 20, 7.5, 7.5, 16, 16};
  for (int trial = 0; trial < 5; ++trial) {
    const RgbdFrame f = random_frame(16, 16, rng);
    const CameraPose p = random_rigid(rng);
    const auto mesh = backproject_frame(f, k, p);
    const RgbdFrame r = rasterize(mesh, k, p);
    // Pixels touching at least one kept face come back.
    std::vector<bool> covered(f.size(), false);
    for (int y = 0; y + 1 < 16; ++y) {
      for (int x = 0; x + 1 < 16; ++x) {
        const int i = y * 16 + x;
        const bool v00 = f.pixels()[i].valid(), v10 = f.pixels()[i + 1].valid();
        const bool v01 = f.pixels()[i + 16].valid(), v11 = f.pixels()[i + 17].valid();
        if (v00 && v10 && v01) covered[i] = covered[i + 1] = covered[i + 16] = true;
        if (v10 && v11 && v01) covered[i + 1] = covered[i + 17] = covered[i + 16] = true;
      }
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!covered[i]) continue;
      const auto& a = f.pixels()[i];
      const auto& b = r.pixels()[i];
      ASSERT_TRUE(b.valid()) << i;
      EXPECT_EQ(a.r, b.r);
      EXPECT_EQ(a.g, b.g);
      EXPECT_EQ(a.b, b.b);
      EXPECT_LT(std::abs(a.d - b.d), 1e-3);
    }
  }
}

TEST(TransformMesh, Examples) {
  const auto m = triangle(Vec3(0, 0, 2), Vec3(1, 0, 2), Vec3(0, 1, 2));
  const auto same = transform_mesh(m, RigidTransform::identity());
  EXPECT_EQ(same.vertices, m.vertices);
  RigidTransform t;
  t.translation = Vec3(1, 0, 0);
  EXPECT_EQ(transform_mesh(m, t).vertices[0], Vec3(1, 0, 2));
  Rng rng(1);
  const RigidTransform g = random_rigid(rng);
  const auto back = transform_mesh(transform_mesh(m, g), g.inverse());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LT((back.vertices[i] - m.vertices[i]).norm(), 1e-9);
}

TEST(TransformMesh, RejectsNonRigid) {
  RigidTransform g;
  g.rotation(1, 0) = 0.5;
  try {
    transform_mesh(triangle(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY()), g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidTransform);
  }
}

TEST(FuseMeshes, Examples) {
  const auto m1 = triangle(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY());
  const auto m2 = triangle(Vec3::UnitZ(), Vec3(1, 0, 1), Vec3(0, 1, 1));
  const TriangleMesh empty;
  EXPECT_EQ(fuse_meshes(empty, m1).vertices, m1.vertices);
  EXPECT_EQ(fuse_meshes(empty, m1).faces, m1.faces);
  EXPECT_EQ(fuse_meshes(m1, empty).faces, m1.faces);
  const auto f = fuse_meshes(m1, m2);
  EXPECT_EQ(f.vertex_count(), 6u);
  ASSERT_EQ(f.face_count(), 2u);
  EXPECT_EQ(f.faces[1], (Face{3, 4, 5}));
}

TEST(FuseMeshes, Associative) {
  const auto a = triangle(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY());
  const auto b = triangle(Vec3::UnitZ(), Vec3(1, 0, 1), Vec3(0, 1, 1));
  const auto c = triangle(Vec3(2, 0, 0), Vec3(3, 0, 0), Vec3(2, 1, 0));
  const auto l = fuse_meshes(fuse_meshes(a, b), c);
  const auto r = fuse_meshes(a, fuse_meshes(b, c));
  EXPECT_EQ(l.vertices, r.vertices);
  EXPECT_EQ(l.colors, r.colors);
  EXPECT_EQ(l.faces, r.faces);
}

TEST(VoxelPool, SameCellMerges) {
  TriangleMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(0.005, 0, 0)};
  m.colors = {Color(1, 0, 0), Color(0, 0, 1)};
  const auto p = voxel_pool(m, 0.02);
  ASSERT_EQ(p.vertex_count(), 1u);
  EXPECT_NEAR(p.vertices[0].x(), 0.0025, 1e-15);
  EXPECT_EQ(p.colors[0], Color(0.5, 0, 0.5));
}

TEST(VoxelPool, DifferentCellsKept) {
  TriangleMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(0.03, 0, 0)};
  m.colors = {Color(1, 0, 0), Color(0, 0, 1)};
  const auto p = voxel_pool(m, 0.02);
  EXPECT_EQ(p.vertices, m.vertices);
}

TEST(VoxelPool, CollapsedFacesRemoved) {
  const auto m = triangle(Vec3::Zero(), Vec3(0.001, 0, 0), Vec3(0, 0.5, 0));
  EXPECT_EQ(voxel_pool(m, 0.02).face_count(), 0u);
  EXPECT_THROW(voxel_pool(m, 0.0), Error);
}

TEST(VoxelPool, IdempotentProperty) {
  Rng rng(17);
  const CameraIntrinsics k{20, 20, 15.5, 15.5, 32, 32};
  for (int trial = 0; trial < 5; ++trial) {
    const RigidTransform anchor = random_rigid(rng);
    const auto once = voxel_pool(backproject_frame(random_frame(32, 32, rng), k, random_rigid(rng)), 0.02, anchor);
    const auto twice = voxel_pool(once, 0.02, anchor);
    ASSERT_EQ(once.vertex_count(), twice.vertex_count());
    for (std::size_t i = 0; i < once.vertex_count(); ++i) {
      EXPECT_LT((once.vertices[i] - twice.vertices[i]).cwiseAbs().maxCoeff(), 1e-12);
    }
    EXPECT_EQ(once.faces, twice.faces);
  }
}

TEST(VoxelPool, AnchoredGridMovesWithFrame) {
  Rng rng(23);
  const CameraIntrinsics k{20, 20, 15.5, 15.5, 32, 32};
  const auto mesh = backproject_frame(random_frame(32, 32, rng), k, random_rigid(rng));
  const RigidTransform anchor = random_rigid(rng);
  const RigidTransform g = random_rigid(rng);
  const auto a = transform_mesh(voxel_pool(mesh, 0.02, anchor), g);
  const auto b = voxel_pool(transform_mesh(mesh, g), 0.02, g * anchor);
  ASSERT_EQ(a.vertex_count(), b.vertex_count());
  for (std::size_t i = 0; i < a.vertex_count(); ++i) EXPECT_LT((a.vertices[i] - b.vertices[i]).norm(), 1e-9);
}

}  // namespace
}  // namespace rgbdfill
