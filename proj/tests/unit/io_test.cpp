// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <sstream>

#include "rgbdfill/io.hpp"
#include "rgbdfill/random.hpp"

namespace rgbdfill {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rgbdfill_unit" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

RgbdFrame random_frame(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  RgbdFrame f(w, h);
  for (auto& p : f.pixels()) {
    p = {static_cast<float>(rng.uniform()), static_cast<float>(rng.uniform()), static_cast<float>(rng.uniform()),
         static_cast<float>(rng.uniform() * 4)};
  }
  return f;
}

TEST(Rgbd, OnePixelLayout) {
  RgbdFrame f(1, 1);
  f.at(0, 0) = {0.5F, 0.25F, 1.0F, 2.0F};
  const auto bytes = encode_rgbd(f);
  ASSERT_EQ(bytes.size(), kRgbdHeaderBytes + 4 * sizeof(float));
  EXPECT_EQ(std::memcmp(bytes.data(), "RGBD", 4), 0);
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 1);
  EXPECT_EQ(bytes[12], 1);
  float vals[4];
  std::memcpy(vals, bytes.data() + 16, 16);
  EXPECT_EQ(vals[0], 0.5F);
  EXPECT_EQ(vals[3], 2.0F);
  EXPECT_EQ(decode_rgbd(bytes), f);
}

TEST(Rgbd, FileRoundTripBitwise) {
  const fs::path dir = fresh_dir("rgbd");
  const RgbdFrame f = random_frame(13, 7, 1);
  write_rgbd(f, dir / "a.rgbd");
  EXPECT_EQ(read_rgbd(dir / "a.rgbd"), f);
}

TEST(Rgbd, Malformed) {
  auto bytes = encode_rgbd(random_frame(3, 2, 2));
  const auto truncated = std::vector<std::uint8_t>(bytes.begin(), bytes.end() - 1);
  EXPECT_EQ(code_of([&] { decode_rgbd(truncated); }), ErrorCode::kMalformedFile);
  auto longer = bytes;
  longer.push_back(0);
  EXPECT_EQ(code_of([&] { decode_rgbd(longer); }), ErrorCode::kMalformedFile);
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_EQ(code_of([&] { decode_rgbd(magic); }), ErrorCode::kMalformedFile);
  auto version = bytes;
  version[4] = 2;
  EXPECT_EQ(code_of([&] { decode_rgbd(version); }), ErrorCode::kMalformedFile);
  EXPECT_EQ(code_of([&] { decode_rgbd(std::vector<std::uint8_t>(5, 0)); }), ErrorCode::kMalformedFile);
  EXPECT_EQ(code_of([] { read_rgbd(fresh_dir("missing") / "none.rgbd"); }), ErrorCode::kMissingFile);
}

const char* kManifest = R"({
  "intrinsics": {"fx": 2, "fy": 2, "cx": 1, "cy": 0.5, "width": 3, "height": 2},
  "frames": [%s]
})";

std::string manifest_with(const std::string& frames) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, kManifest, frames.c_str());
  return buf;
}

TEST(Manifest, ParseAndFormat) {
  const auto m = parse_manifest(manifest_with(""));
  EXPECT_EQ(m.intrinsics, (CameraIntrinsics{2, 2, 1, 0.5, 3, 2}));
  EXPECT_TRUE(m.frames.empty());
  const auto n = parse_manifest(
      manifest_with(R"({"file": "a.rgbd", "extrinsic": [0,-1,0,1, 1,0,0,2, 0,0,1,3, 0,0,0,1]})"));
  ASSERT_EQ(n.frames.size(), 1u);
  EXPECT_EQ(n.frames[0].file, "a.rgbd");
  EXPECT_EQ(n.frames[0].pose.translation, Vec3(1, 2, 3));
  EXPECT_EQ(n.frames[0].pose.rotation(0, 1), -1.0);
  const auto again = parse_manifest(format_manifest(n));
  EXPECT_EQ(again.frames[0].pose.rotation, n.frames[0].pose.rotation);
  EXPECT_EQ(format_manifest(again), format_manifest(n));
}

TEST(Manifest, Errors) {
  EXPECT_EQ(code_of([] { parse_manifest("{"); }), ErrorCode::kMalformedFile);
  EXPECT_EQ(code_of([] { parse_manifest(R"({"frames": []})"); }), ErrorCode::kMalformedFile);
  EXPECT_EQ(code_of([] { parse_manifest(manifest_with(R"({"extrinsic": [1,0,0]})")); }), ErrorCode::kMalformedFile);
  EXPECT_EQ(code_of([] {
              parse_manifest(manifest_with(R"({"extrinsic": [-1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1]})"));
            }),
            ErrorCode::kNonRigid);
  EXPECT_EQ(code_of([] {
              parse_manifest(manifest_with(R"({"extrinsic": [1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,1,1]})"));
            }),
            ErrorCode::kNonRigid);
  EXPECT_EQ(code_of([] {
              parse_manifest(R"({"intrinsics": {"fx": -2, "fy": 2, "cx": 1, "cy": 0.5, "width": 3, "height": 2},
                                 "frames": []})");
            }),
            ErrorCode::kInvalidIntrinsics);
}

TEST(Scene, WriteReadRoundTrip) {
  const fs::path dir = fresh_dir("scene");
  const CameraIntrinsics k{4, 4, 2, 1.5, 5, 4};
  std::vector<PosedFrame> frames;
  for (int i = 0; i < 3; ++i) {
    CameraPose p;
    p.rotation = Eigen::AngleAxisd(0.3 * i, Vec3::UnitZ()).toRotationMatrix();
    p.translation = Vec3(i, 0.5, -1);
    frames.push_back({random_frame(5, 4, 10 + i), p});
  }
  write_scene(dir, k, frames);
  EXPECT_TRUE(fs::exists(dir / "frame_002.rgbd"));
  const Scene s = read_scene(dir / "scene.json");
  EXPECT_EQ(s.manifest.intrinsics, k);
  ASSERT_EQ(s.frames.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(s.frames[i].frame, frames[i].frame);
    EXPECT_EQ(s.frames[i].pose.rotation, frames[i].pose.rotation);
    EXPECT_EQ(s.frames[i].pose.translation, frames[i].pose.translation);
  }
}

TEST(Scene, DimMismatchAndMissingFile) {
  const fs::path dir = fresh_dir("scene_bad");
  const CameraIntrinsics k{4, 4, 2, 1.5, 5, 4};
  write_scene(dir, k, std::vector<PosedFrame>{{random_frame(5, 4, 1), CameraPose::identity()}});
  write_rgbd(random_frame(4, 4, 2), dir / "frame_000.rgbd");
  EXPECT_EQ(code_of([&] { read_scene(dir / "scene.json"); }), ErrorCode::kDimMismatch);
  fs::remove(dir / "frame_000.rgbd");
  EXPECT_EQ(code_of([&] { read_scene(dir / "scene.json"); }), ErrorCode::kMissingFile);
  EXPECT_EQ(code_of([&] { read_scene(dir / "nothing.json"); }), ErrorCode::kMissingFile);
}

TEST(Trajectory, RoundTrip) {
  const fs::path dir = fresh_dir("traj");
  Trajectory t;
  t.intrinsics = {4, 4, 2, 1.5, 5, 4};
  t.poses.push_back(CameraPose::identity());
  CameraPose p;
  p.rotation = Eigen::AngleAxisd(1.1, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  p.translation = Vec3(0.1, 0.2, 0.3);
  t.poses.push_back(p);
  write_trajectory(t, dir / "t.json");
  const Trajectory r = read_trajectory(dir / "t.json");
  EXPECT_EQ(r.intrinsics, t.intrinsics);
  ASSERT_EQ(r.poses.size(), 2u);
  EXPECT_EQ(r.poses[1].rotation, p.rotation);
  EXPECT_EQ(r.poses[1].translation, p.translation);
}

TEST(Ply, Examples) {
  const std::string empty = format_ply(TriangleMesh{});
  EXPECT_NE(empty.find("element vertex 0\n"), std::string::npos);
  EXPECT_NE(empty.find("element face 0\n"), std::string::npos);

  TriangleMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0.5)};
  m.colors = {Color(1, 0, 0), Color(0, 1, 0), Color(0, 0, 1)};
  m.faces = {{0, 1, 2}};
  const std::string text = format_ply(m);
  EXPECT_NE(text.find("\n3 0 1 2\n"), std::string::npos);
  EXPECT_NE(text.find("0 0 0 255 0 0\n"), std::string::npos);
  std::istringstream is(text);
  std::string line;
  int lines = 0;
  bool body = false;
  while (std::getline(is, line)) {
    if (body) ++lines;
    if (line == "end_header") body = true;
  }
  EXPECT_EQ(lines, 4);

  const fs::path dir = fresh_dir("ply");
  write_ply(m, dir / "m.ply");
  const TriangleMesh r = read_ply(dir / "m.ply");
  EXPECT_EQ(r.vertices, m.vertices);
  EXPECT_EQ(r.colors, m.colors);
  EXPECT_EQ(r.faces, m.faces);
}

TEST(MetricsCsv, Format) {
  const MetricRow row{"room", 0.2, 99.0, 1.0, 0.0, 0.0, 1.0};
  const std::string csv = format_metrics_csv(std::vector<MetricRow>{row});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "scene,view_fraction,psnr,ssim,depth_mse,chamfer,completeness");
  EXPECT_NE(csv.find("room,0.20000000000000001,99,1,0,0,1\n"), std::string::npos);
}

}  // namespace
}  // namespace rgbdfill
