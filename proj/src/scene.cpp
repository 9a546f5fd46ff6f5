// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#include "rgbdfill/scene.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rgbdfill/random.hpp"
#include "rgbdfill/raster.hpp"

namespace rgbdfill {

Texture parse_texture(std::string_view name) {
  if (name == "checker") return Texture::kChecker;
  if (name == "gradient") return Texture::kGradient;
  if (name == "stripes") return Texture::kStripes;
  fail(ErrorCode::kDegenerateSpec, "unknown texture '" + std::string(name) + "'");
}

std::string_view to_string(Texture t) {
  switch (t) {
    case Texture::kChecker: return "checker";
    case Texture::kGradient: return "gradient";
    case Texture::kStripes: return "stripes";
  }
  return "?";
}

void SyntheticSceneSpec::validate() const {
  if (!(room_size.minCoeff() > 0.0) || !room_size.allFinite())
    fail(ErrorCode::kDegenerateSpec, "room dimensions must be positive");
  if (!(tile_size > 0.0) || !(quad_size > 0.0)) fail(ErrorCode::kDegenerateSpec, "tile and quad sizes must be > 0");
  if (camera_count < 1) fail(ErrorCode::kDegenerateSpec, "camera_count must be >= 1");
  if (!(ring_radius >= 0.0)) fail(ErrorCode::kDegenerateSpec, "ring_radius must be >= 0");
  if (ring_radius == 0.0 && camera_count > 1)
    fail(ErrorCode::kDegenerateSpec, "cameras at one point need a positive ring radius");
  try {
    intrinsics.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kDegenerateSpec, e.what());
  }
  if (!look_at.allFinite()) fail(ErrorCode::kDegenerateSpec, "look_at must be finite");
}

namespace {

struct Palette {
  Color a, b;
  double phase_u, phase_v;
};

Color texture_color(Texture tex, const Palette& p, double tile, double u, double v) {
  const auto iu = static_cast<long long>(std::floor(u / tile + p.phase_u));
  const auto iv = static_cast<long long>(std::floor(v / tile + p.phase_v));
  switch (tex) {
    case Texture::kChecker: return ((iu + iv) & 1) ? p.a : p.b;
    case Texture::kStripes: return (iu & 1) ? p.a : p.b;
    case Texture::kGradient: {
      const double s = 0.5 + 0.5 * std::sin(u / tile + 2.0 * std::numbers::pi * p.phase_u);
      return p.a + s * (p.b - p.a);
    }
  }
  return p.a;
}

// Adds a rectangle origin + [0,1]·eu + [0,1]·ev, split into flat-colored
// quads of roughly `quad` meters.
void add_wall(TriangleMesh& mesh, const Vec3& origin, const Vec3& eu, const Vec3& ev, double quad, Texture tex,
              const Palette& pal, double tile) {
  const int nu = std::max(1, static_cast<int>(std::ceil(eu.norm() / quad)));
  const int nv = std::max(1, static_cast<int>(std::ceil(ev.norm() / quad)));
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nu; ++i) {
      const double u0 = static_cast<double>(i) / nu, u1 = static_cast<double>(i + 1) / nu;
      const double v0 = static_cast<double>(j) / nv, v1 = static_cast<double>(j + 1) / nv;
      const Color c = texture_color(tex, pal, tile, 0.5 * (u0 + u1) * eu.norm(), 0.5 * (v0 + v1) * ev.norm());
      const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
      for (const auto& [u, v] : {std::pair{u0, v0}, std::pair{u1, v0}, std::pair{u0, v1}, std::pair{u1, v1}}) {
        mesh.vertices.push_back(origin + u * eu + v * ev);
        mesh.colors.push_back(c);
      }
      mesh.faces.push_back({base, base + 1, base + 2});
      mesh.faces.push_back({base + 1, base + 3, base + 2});
    }
  }
}

}  // namespace

TriangleMesh make_room_mesh(const SyntheticSceneSpec& spec, std::uint64_t seed) {
  spec.validate();
  const double x = spec.room_size.x(), y = spec.room_size.y(), z = spec.room_size.z();
  TriangleMesh mesh;
  Rng rng(derive_seed(seed, 0x726f6f6d));
  const auto random_color = [&] { return Color(rng.uniform(), rng.uniform(), rng.uniform()); };
  struct Wall {
    Vec3 o, eu, ev;
  };
  const Wall walls[] = {
      {{0, 0, 0}, {x, 0, 0}, {0, 0, z}},  // y = 0
      {{x, y, 0}, {-x, 0, 0}, {0, 0, z}}, // y = max
      {{0, y, 0}, {0, -y, 0}, {0, 0, z}}, // x = 0
      {{x, 0, 0}, {0, y, 0}, {0, 0, z}},  // x = max
      {{0, 0, 0}, {0, y, 0}, {x, 0, 0}},  // floor
      {{0, 0, z}, {x, 0, 0}, {0, y, 0}},  // ceiling
  };
  for (const Wall& w : walls) {
    Palette pal{random_color(), random_color(), rng.uniform(), rng.uniform()};
    add_wall(mesh, w.o, w.eu, w.ev, spec.quad_size, spec.texture, pal, spec.tile_size);
  }
  return mesh;
}

std::vector<CameraPose> ring_poses(const SyntheticSceneSpec& spec) {
  spec.validate();
  const Vec3 center(spec.look_at.x(), spec.look_at.y(), spec.camera_height);
  std::vector<CameraPose> poses;
  for (int i = 0; i < spec.camera_count; ++i) {
    const double a = spec.ring_phase + 2.0 * std::numbers::pi * i / spec.camera_count;
    const Vec3 eye = center + spec.ring_radius * Vec3(std::cos(a), std::sin(a), 0.0);
    // Inward: looking through the ring center at the far wall.
    Vec3 target = spec.look_at;
    if ((target - eye).norm() < 1e-9) target = eye - Vec3(std::cos(a), std::sin(a), 0.0);
    poses.push_back(RigidTransform::look_at(eye, target, Vec3::UnitZ()));
  }
  return poses;
}

SyntheticScene gen_synthetic_scene(const SyntheticSceneSpec& spec, std::uint64_t seed) {
  SyntheticScene scene{make_room_mesh(spec, seed), spec.intrinsics, {}};
  for (const CameraPose& pose : ring_poses(spec)) scene.frames.push_back({rasterize(scene.mesh, spec.intrinsics, pose), pose});
  return scene;
}

}  // namespace rgbdfill
