// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#include "rgbdfill/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

namespace rgbdfill {
namespace {

using nlohmann::json;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
  return v;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::kMissingFile, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void write_bytes(std::span<const std::uint8_t> bytes, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::kIo, "cannot write " + path.string());
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) fail(ErrorCode::kIo, "write failed for " + path.string());
}

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) fail(ErrorCode::kMalformedFile, std::string("missing number '") + key + "'");
  return j.at(key).get<double>();
}

int integer(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer())
    fail(ErrorCode::kMalformedFile, std::string("missing integer '") + key + "'");
  return j.at(key).get<int>();
}

}  // namespace

std::vector<std::uint8_t> encode_rgbd(const RgbdFrame& frame) {
  std::vector<std::uint8_t> out{'R', 'G', 'B', 'D'};
  out.reserve(kRgbdHeaderBytes + frame.size() * 16);
  put_u32(out, kRgbdVersion);
  put_u32(out, static_cast<std::uint32_t>(frame.width()));
  put_u32(out, static_cast<std::uint32_t>(frame.height()));
  for (const RgbdPixel& p : frame.pixels())
    for (float v : {p.r, p.g, p.b, p.d}) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

RgbdFrame decode_rgbd(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kRgbdHeaderBytes) fail(ErrorCode::kMalformedFile, "rgbd header truncated");
  if (bytes[0] != 'R' || bytes[1] != 'G' || bytes[2] != 'B' || bytes[3] != 'D')
    fail(ErrorCode::kMalformedFile, "bad rgbd magic");
  if (get_u32(bytes, 4) != kRgbdVersion) fail(ErrorCode::kMalformedFile, "unsupported rgbd version");
  const std::uint64_t w = get_u32(bytes, 8);
  const std::uint64_t h = get_u32(bytes, 12);
  if (w > (1u << 20) || h > (1u << 20)) fail(ErrorCode::kMalformedFile, "rgbd dimensions out of range");
  const std::uint64_t expect = kRgbdHeaderBytes + w * h * 16;
  if (bytes.size() != expect) fail(ErrorCode::kMalformedFile, "rgbd payload size does not match the header");
  RgbdFrame frame(static_cast<int>(w), static_cast<int>(h));
  std::size_t at = kRgbdHeaderBytes;
  for (RgbdPixel& p : frame.pixels()) {
    for (float* v : {&p.r, &p.g, &p.b, &p.d}) {
      *v = std::bit_cast<float>(get_u32(bytes, at));
      at += 4;
    }
  }
  return frame;
}

void write_rgbd(const RgbdFrame& frame, const std::filesystem::path& path) { write_bytes(encode_rgbd(frame), path); }

RgbdFrame read_rgbd(const std::filesystem::path& path) {
  try {
    return decode_rgbd(read_bytes(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kMalformedFile) fail(ErrorCode::kMalformedFile, path.string() + ": " + e.what());
    throw;
  }
}

SceneManifest parse_manifest(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedFile, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("intrinsics") || !doc.at("intrinsics").is_object())
    fail(ErrorCode::kMalformedFile, "manifest needs an 'intrinsics' object");
  const json& in = doc.at("intrinsics");
  SceneManifest m;
  m.intrinsics = {number(in, "fx"), number(in, "fy"), number(in, "cx"),
                  number(in, "cy"), integer(in, "width"), integer(in, "height")};
  m.intrinsics.validate();
  if (!doc.contains("frames") || !doc.at("frames").is_array())
    fail(ErrorCode::kMalformedFile, "manifest needs a 'frames' array");
  for (const json& f : doc.at("frames")) {
    if (!f.is_object()) fail(ErrorCode::kMalformedFile, "frame entries must be objects");
    ManifestFrame mf;
    if (f.contains("file")) {
      if (!f.at("file").is_string()) fail(ErrorCode::kMalformedFile, "'file' must be a string");
      mf.file = f.at("file").get<std::string>();
    }
    if (!f.contains("extrinsic") || !f.at("extrinsic").is_array() || f.at("extrinsic").size() != 16)
      fail(ErrorCode::kMalformedFile, "'extrinsic' must hold 16 numbers");
    Mat4 e;
    for (int i = 0; i < 16; ++i) {
      const json& v = f.at("extrinsic")[static_cast<std::size_t>(i)];
      if (!v.is_number()) fail(ErrorCode::kMalformedFile, "'extrinsic' must hold 16 numbers");
      e(i / 4, i % 4) = v.get<double>();
    }
    if (!e.allFinite()) fail(ErrorCode::kMalformedFile, "non-finite extrinsic");
    mf.pose = RigidTransform::from_matrix(e);
    if (!mf.pose.is_rigid(1e-6) || (e.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > 1e-6)
      fail(ErrorCode::kNonRigid, "extrinsic of frame " + std::to_string(m.frames.size()) + " is not a rigid motion");
    m.frames.push_back(std::move(mf));
  }
  return m;
}

std::string format_manifest(const SceneManifest& m) {
  json doc;
  doc["intrinsics"] = {{"fx", m.intrinsics.fx},       {"fy", m.intrinsics.fy},
                       {"cx", m.intrinsics.cx},       {"cy", m.intrinsics.cy},
                       {"width", m.intrinsics.width}, {"height", m.intrinsics.height}};
  doc["frames"] = json::array();
  for (const auto& f : m.frames) {
    json e = json::array();
    const Mat4 mat = f.pose.matrix();
    for (int i = 0; i < 16; ++i) e.push_back(mat(i / 4, i % 4));
    json entry;
    if (!f.file.empty()) entry["file"] = f.file;
    entry["extrinsic"] = e;
    doc["frames"].push_back(entry);
  }
  return doc.dump(2) + "\n";
}

Scene read_scene(const std::filesystem::path& manifest_path) {
  Scene scene;
  scene.manifest = parse_manifest(read_text(manifest_path));
  const auto dir = manifest_path.parent_path();
  for (const auto& f : scene.manifest.frames) {
    if (f.file.empty()) fail(ErrorCode::kMalformedFile, "scene frame without a file");
    const auto path = dir / f.file;
    if (!std::filesystem::exists(path)) fail(ErrorCode::kMissingFile, "missing frame file " + path.string());
    RgbdFrame frame = read_rgbd(path);
    if (!frame.matches(scene.manifest.intrinsics))
      fail(ErrorCode::kDimMismatch, path.string() + " does not match the intrinsics size");
    scene.frames.push_back({std::move(frame), f.pose});
  }
  return scene;
}

void write_scene(const std::filesystem::path& dir, const CameraIntrinsics& k, std::span<const PosedFrame> frames) {
  std::filesystem::create_directories(dir);
  SceneManifest m{k, {}};
  for (std::size_t i = 0; i < frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.rgbd", i);
    write_rgbd(frames[i].frame, dir / name);
    m.frames.push_back({name, frames[i].pose});
  }
  write_text(format_manifest(m), dir / "scene.json");
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  const SceneManifest m = parse_manifest(read_text(path));
  Trajectory t{m.intrinsics, {}};
  for (const auto& f : m.frames) t.poses.push_back(f.pose);
  return t;
}

void write_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  SceneManifest m{traj.intrinsics, {}};
  for (const auto& p : traj.poses) m.frames.push_back({"", p});
  write_text(format_manifest(m), path);
}

std::string format_ply(const TriangleMesh& mesh) {
  mesh.validate();
  std::string out;
  out += "ply\nformat ascii 1.0\n";
  out += "element vertex " + std::to_string(mesh.vertices.size()) + "\n";
  out += "property float x\nproperty float y\nproperty float z\n";
  out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out += "element face " + std::to_string(mesh.faces.size()) + "\n";
  out += "property list uchar int vertex_indices\nend_header\n";
  char line[160];
  const auto byte = [](double c) { return static_cast<int>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0)); };
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    const Color& c = mesh.colors[i];
    std::snprintf(line, sizeof line, "%.9g %.9g %.9g %d %d %d\n", static_cast<float>(v.x()), static_cast<float>(v.y()),
                  static_cast<float>(v.z()), byte(c.x()), byte(c.y()), byte(c.z()));
    out += line;
  }
  for (const Face& f : mesh.faces) {
    std::snprintf(line, sizeof line, "3 %u %u %u\n", f[0], f[1], f[2]);
    out += line;
  }
  return out;
}

void write_ply(const TriangleMesh& mesh, const std::filesystem::path& path) { write_text(format_ply(mesh), path); }

TriangleMesh read_ply(const std::filesystem::path& path) {
  std::istringstream is(read_text(path));
  const auto bad = [&](const std::string& why) { fail(ErrorCode::kMalformedFile, path.string() + ": " + why); };
  std::string line;
  std::size_t nv = 0, nf = 0;
  if (!std::getline(is, line) || line != "ply") bad("missing 'ply'");
  while (std::getline(is, line) && line != "end_header") {
    std::istringstream ls(line);
    std::string a, b;
    ls >> a >> b;
    if (a == "element" && b == "vertex") ls >> nv;
    if (a == "element" && b == "face") ls >> nf;
    if (a == "format" && b != "ascii") bad("only ASCII PLY is supported");
  }
  if (line != "end_header") bad("missing end_header");
  TriangleMesh mesh;
  for (std::size_t i = 0; i < nv; ++i) {
    double x, y, z;
    int r, g, b;
    if (!(is >> x >> y >> z >> r >> g >> b)) bad("truncated vertex list");
    mesh.vertices.emplace_back(x, y, z);
    mesh.colors.emplace_back(r / 255.0, g / 255.0, b / 255.0);
  }
  for (std::size_t i = 0; i < nf; ++i) {
    int n;
    std::uint32_t a, b, c;
    if (!(is >> n >> a >> b >> c) || n != 3) bad("bad face entry");
    mesh.faces.push_back({a, b, c});
  }
  mesh.validate();
  return mesh;
}

std::string format_metrics_csv(std::span<const MetricRow> rows) {
  std::string out = "scene,view_fraction,psnr,ssim,depth_mse,chamfer,completeness\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.view_fraction, r.psnr, r.ssim,
                  r.depth_mse, r.chamfer, r.completeness);
    out += r.scene;
    out += buf;
  }
  return out;
}

void write_metrics_csv(std::span<const MetricRow> rows, const std::filesystem::path& path) {
  write_text(format_metrics_csv(rows), path);
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  write_bytes(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()), path);
}

std::string read_text(const std::filesystem::path& path) {
  const auto b = read_bytes(path);
  return {b.begin(), b.end()};
}

}  // namespace rgbdfill
