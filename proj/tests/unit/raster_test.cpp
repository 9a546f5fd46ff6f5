// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rgbdfill/geometry.hpp"
#include "rgbdfill/random.hpp"
#include "rgbdfill/raster.hpp"

namespace rgbdfill {
namespace {

const CameraIntrinsics kK{16, 16, 15.5, 15.5, 32, 32};

RigidTransform random_rigid(Rng& rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  RigidTransform g;
  g.rotation = q.toRotationMatrix();
  g.translation = Vec3(rng.normal(), rng.normal(), rng.normal());
  return g;
}

// Triangle parallel to the image plane at depth z, given in pixel coordinates.
void add_flat_triangle(TriangleMesh& m, const double (&uv)[3][2], double z, const Color& c) {
  const auto base = static_cast<std::uint32_t>(m.vertices.size());
  for (const auto& p : uv) {
    m.vertices.push_back(unproject_pixel(p[0], p[1], z, kK, CameraPose::identity()));
    m.colors.push_back(c);
  }
  m.faces.push_back({base, base + 1, base + 2});
}

bool inside(const double (&t)[3][2], double x, double y) {
  auto edge = [&](int i) {
    const auto& a = t[i];
    const auto& b = t[(i + 1) % 3];
    return (b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0]);
  };
  const double e0 = edge(0), e1 = edge(1), e2 = edge(2);
  return (e0 >= 0 && e1 >= 0 && e2 >= 0) || (e0 <= 0 && e1 <= 0 && e2 <= 0);
}

TEST(Rasterize, EmptyMeshAllInvalid) {
  const RgbdFrame f = rasterize(TriangleMesh{}, kK, CameraPose::identity());
  EXPECT_EQ(f.width(), 32);
  EXPECT_EQ(f.height(), 32);
  EXPECT_EQ(f.valid_count(), 0u);
}

TEST(Rasterize, FullFrustumTriangle) {
  TriangleMesh m;
  const double uv[3][2] = {{-40, -40}, {120, -40}, {-40, 120}};
  add_flat_triangle(m, uv, 2.0, Color(1, 0, 0));
  const RgbdFrame f = rasterize(m, kK, CameraPose::identity());
  for (const auto& p : f.pixels()) {
    EXPECT_EQ(p.r, 1.0F);
    EXPECT_EQ(p.g, 0.0F);
    EXPECT_EQ(p.b, 0.0F);
    EXPECT_FLOAT_EQ(p.d, 2.0F);
  }
}

TEST(Rasterize, BehindCameraNotDrawn) {
  TriangleMesh m;
  m.vertices = {Vec3(-1, -1, -2), Vec3(1, -1, -2), Vec3(0, 1, -2)};
  m.colors.assign(3, Color(1, 1, 1));
  m.faces = {{0, 1, 2}};
  EXPECT_EQ(rasterize(m, kK, CameraPose::identity()).valid_count(), 0u);
}

TEST(Rasterize, ZBufferAgainstBruteForce) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    double a[3][2], b[3][2];
    for (auto& p : a) p[0] = rng.uniform() * 40 - 4, p[1] = rng.uniform() * 40 - 4;
    for (auto& p : b) p[0] = rng.uniform() * 40 - 4, p[1] = rng.uniform() * 40 - 4;
    const double za = 1.0 + rng.uniform(), zb = 1.0 + rng.uniform();
    TriangleMesh m;
    add_flat_triangle(m, a, za, Color(1, 0, 0));
    add_flat_triangle(m, b, zb, Color(0, 0, 1));
    const RgbdFrame f = rasterize(m, kK, CameraPose::identity());
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) {
        const bool ia = inside(a, x, y), ib = inside(b, x, y);
        const auto& p = f.at(x, y);
        ASSERT_EQ(p.valid(), ia || ib) << trial << " " << x << "," << y;
        if (!p.valid()) continue;
        const bool red = ia && (!ib || za < zb);
        EXPECT_EQ(p.r, red ? 1.0F : 0.0F) << trial << " " << x << "," << y;
        EXPECT_EQ(p.b, red ? 0.0F : 1.0F);
      }
    }
  }
}

TEST(Rasterize, SerialAndParallelIdentical) {
  Rng rng(8);
  TriangleMesh m;
  for (int i = 0; i < 200; ++i) {
    double t[3][2];
    for (auto& p : t) p[0] = rng.uniform() * 36 - 2, p[1] = rng.uniform() * 36 - 2;
    add_flat_triangle(m, t, 1.0 + rng.uniform(), Color(rng.uniform(), rng.uniform(), rng.uniform()));
  }
  const CameraPose pose = CameraPose::identity();
  EXPECT_EQ(rasterize(m, kK, pose, Exec::kSerial), rasterize(m, kK, pose, Exec::kParallel));
}

TEST(Rasterize, Se3Invariance) {
  Rng rng(12);
  RgbdFrame f(32, 32);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      f.at(x, y) = {static_cast<float>(rng.uniform()), static_cast<float>(rng.uniform()),
                    static_cast<float>(rng.uniform()), static_cast<float>(1.0 + 0.01 * x)};
    }
  }
  const CameraPose pose = random_rigid(rng);
  const TriangleMesh mesh = backproject_frame(f, kK, pose);
  for (int trial = 0; trial < 5; ++trial) {
    const RigidTransform g = random_rigid(rng);
    const RgbdFrame a = rasterize(mesh, kK, pose);
    const RgbdFrame b = rasterize(transform_mesh(mesh, g), kK, g * pose);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto& p = a.pixels()[i];
      const auto& q = b.pixels()[i];
      ASSERT_EQ(p.valid(), q.valid()) << i;
      EXPECT_EQ(p.r, q.r);
      EXPECT_EQ(p.g, q.g);
      EXPECT_EQ(p.b, q.b);
      EXPECT_LT(std::abs(p.d - q.d), 1e-6);
    }
  }
}

TEST(SelectChunk, FewerThanChunk) {
  std::vector<CameraPose> known(3);
  for (int i = 0; i < 3; ++i) known[i].translation = Vec3(i, 0, 0);
  EXPECT_EQ(select_chunk(known, CameraPose::identity()), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(SelectChunk, NearestTwo) {
  std::vector<CameraPose> known(3);
  known[0].translation = Vec3(3, 0, 0);
  known[1].translation = Vec3(0, 1, 0);
  known[2].translation = Vec3(0, 0, 2);
  EXPECT_EQ(select_chunk(known, CameraPose::identity(), {2}), (std::vector<std::size_t>{1, 2}));
}

TEST(SelectChunk, TieGoesToLowerIndex) {
  std::vector<CameraPose> known(3);
  known[0].translation = Vec3(5, 0, 0);
  known[1].translation = Vec3(0, 1, 0);
  known[2].translation = Vec3(-1, 0, 0);
  EXPECT_EQ(select_chunk(known, CameraPose::identity(), {1}), (std::vector<std::size_t>{1}));
  EXPECT_THROW(select_chunk(known, CameraPose::identity(), {0}), Error);
}

}  // namespace
}  // namespace rgbdfill
