// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#include "rgbdfill/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rgbdfill/dataset.hpp"
#include "rgbdfill/io.hpp"
#include "rgbdfill/metrics.hpp"
#include "rgbdfill/pipeline.hpp"
#include "rgbdfill/scene.hpp"
#include "rgbdfill/selftest.hpp"
#include "rgbdfill/tiny_net.hpp"

namespace rgbdfill::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// JSON config files: top-level keys are option names, nested objects are
/// subcommand sections, e.g. {"seed": 3, "train": {"train-steps": 500}}.
class JsonConfig final : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& res = opt->results();
        j[name] = res.size() == 1 ? json(res.front()) : json(res);
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      const json child = json::parse(to_config(sub, default_also, false, ""));
      if (!child.empty()) j[sub->get_name()] = child;
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void collect(const json& j, std::vector<std::string> parents, std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto p = parents;
        p.push_back(key);
        collect(value, p, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const json& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

struct Globals {
  std::uint64_t seed = 0;
  int steps = 50;
  double eta = 0.0;
  double guidance_beta = 1.0;
  double depth_max = 8.0;
  double voxel = 0.02;
  int chunk = 7;
};

SynthesisConfig synthesis_config(const Globals& g) {
  SynthesisConfig cfg;
  cfg.sampler.steps = g.steps;
  cfg.sampler.eta = g.eta;
  cfg.sampler.guidance_beta = g.guidance_beta;
  cfg.backproject.voxel_size = g.voxel;
  cfg.chunk.chunk_size = g.chunk;
  cfg.depth_max = g.depth_max;
  cfg.seed = g.seed;
  cfg.validate();
  return cfg;
}

NoiseSchedule default_schedule() { return make_linear_schedule(1000); }

fs::path manifest_path(const fs::path& p) { return fs::is_directory(p) ? p / "scene.json" : p; }

fs::path mesh_in(const fs::path& dir) {
  for (const char* name : {"mesh.ply", "gt_mesh.ply"})
    if (fs::exists(dir / name)) return dir / name;
  fail(ErrorCode::kMissingFile, "no mesh.ply or gt_mesh.ply in " + dir.string());
}

bool same_pose(const CameraPose& a, const CameraPose& b) {
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff() <= 1e-9;
}

std::size_t find_pose(std::span<const PosedFrame> frames, const CameraPose& pose) {
  for (std::size_t i = 0; i < frames.size(); ++i)
    if (same_pose(frames[i].pose, pose)) return i;
  return frames.size();
}

/// Point-mass oracle per trajectory view, targeting the scene frame taken
/// from the same pose.
class OracleSource {
 public:
  OracleSource(std::span<const PosedFrame> scene, const Trajectory& traj, double depth_max,
               const NoiseSchedule& sched) {
    for (const auto& pose : traj.poses) {
      const std::size_t i = find_pose(scene, pose);
      if (i == scene.size()) fail(ErrorCode::kNoObservations, "oracle needs a scene frame at every trajectory pose");
      views_.emplace_back(normalize_frame(scene[i].frame, depth_max).image, sched);
    }
  }
  const Denoiser& operator()(std::size_t j) const { return views_.at(j); }

 private:
  std::vector<PointMassDenoiser> views_;
};

struct Evaluation {
  MetricRow row;
  std::size_t matched = 0;
};

Evaluation evaluate(std::span<const PosedFrame> pred, const TriangleMesh& pred_mesh, std::span<const PosedFrame> gt,
                    const TriangleMesh& gt_mesh, std::size_t points, std::uint64_t seed) {
  Evaluation ev;
  double psnr_sum = 0.0, ssim_sum = 0.0, depth_sum = 0.0;
  std::size_t depth_n = 0;
  for (const auto& p : pred) {
    const std::size_t i = find_pose(gt, p.pose);
    if (i == gt.size()) continue;
    const RgbdFrame& g = gt[i].frame;
    const auto mask = g.mask();
    if (std::count(mask.begin(), mask.end(), 1) == 0) continue;
    ++ev.matched;
    psnr_sum += psnr(p.frame, g, mask);
    ssim_sum += ssim(p.frame, g);
    try {
      depth_sum += depth_mse(p.frame, g);
      ++depth_n;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyMask) throw;
    }
  }
  const double nan = std::nan("");
  ev.row.psnr = ev.matched ? psnr_sum / static_cast<double>(ev.matched) : nan;
  ev.row.ssim = ev.matched ? ssim_sum / static_cast<double>(ev.matched) : nan;
  ev.row.depth_mse = depth_n ? depth_sum / static_cast<double>(depth_n) : nan;
  const PointSample gs = sample_points(gt_mesh, points, seed);
  const PointSample ps = sample_points(pred_mesh, points, seed);
  ev.row.chamfer = chamfer(gs, ps);
  ev.row.completeness = completeness(gs, ps, 0.1);
  return ev;
}

std::vector<PosedFrame> select(std::span<const PosedFrame> frames, double fraction) {
  std::vector<PosedFrame> out;
  for (std::size_t i : uniform_subsample(frames.size(), fraction)) out.push_back(frames[i]);
  return out;
}

std::string beta_label(const std::string& name, double beta) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "[beta=%g]", beta);
  return name + buf;
}

// ------------------------------------------------------------------ commands

struct GenArgs {
  std::string out;
  int views = 20;
  std::string texture = "checker";
  int resolution = 16;
  std::vector<double> room;
  double ring_radius = -1.0;
  double camera_height = -1.0;
};

int cmd_gen(const Globals& g, const GenArgs& a, std::ostream& out) {
  SyntheticSceneSpec spec;
  spec.camera_count = a.views;
  spec.texture = parse_texture(a.texture);
  if (!a.room.empty()) {
    if (a.room.size() != 3) fail(ErrorCode::kDegenerateSpec, "--room takes three sizes");
    spec.room_size = Vec3(a.room[0], a.room[1], a.room[2]);
  }
  if (a.ring_radius >= 0.0) spec.ring_radius = a.ring_radius;
  if (a.camera_height >= 0.0) spec.camera_height = a.camera_height;
  spec.look_at = Vec3(spec.room_size.x() / 2, spec.room_size.y() / 2, spec.camera_height);
  const double r = a.resolution;
  spec.intrinsics = {15.0 / 16.0 * r, 15.0 / 16.0 * r, (r - 1) / 2, (r - 1) / 2, a.resolution, a.resolution};
  const SyntheticScene scene = gen_synthetic_scene(spec, g.seed);
  const fs::path dir = a.out;
  write_scene(dir, scene.intrinsics, scene.frames);
  write_ply(scene.mesh, dir / "gt_mesh.ply");
  Trajectory traj{scene.intrinsics, {}};
  for (const auto& f : scene.frames) traj.poses.push_back(f.pose);
  write_trajectory(traj, dir / "trajectory.json");
  out << "wrote " << scene.frames.size() << " frames and gt_mesh.ply to " << dir.string() << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::vector<std::string> data;
  std::string out;
  int train_steps = 2000;
  int batch = 16;
  double lr = 2e-3;
  double lr_final = 1e-5;
  double dropout = 0.1;
  double grad_clip = 1.0;
  std::string loss_log;
};

int cmd_train(const Globals& g, const TrainArgs& a, std::ostream& out) {
  DatasetConfig dc;
  dc.depth_max = g.depth_max;
  dc.backproject.voxel_size = g.voxel;
  std::vector<TrainSample> samples;
  int resolution = 0;
  for (const auto& d : a.data) {
    const Scene scene = read_scene(manifest_path(d));
    const auto& k = scene.manifest.intrinsics;
    if (k.width != k.height) fail(ErrorCode::kDimMismatch, "training frames must be square");
    if (resolution != 0 && resolution != k.width) fail(ErrorCode::kDimMismatch, "training scenes differ in size");
    resolution = k.width;
    auto s = make_training_samples(scene.frames, k, dc);
    samples.insert(samples.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  if (samples.empty()) fail(ErrorCode::kNoObservations, "no training frames");
  TrainConfig tc;
  tc.steps = a.train_steps;
  tc.batch_size = a.batch;
  tc.lr_initial = a.lr;
  tc.lr_final = a.lr_final;
  tc.cond_dropout = a.dropout;
  tc.grad_clip = a.grad_clip;
  tc.seed = g.seed;
  tc.net.resolution = resolution;
  const TrainResult res = train(samples, tc, default_schedule());
  save_checkpoint(res.params, a.out);
  if (!a.loss_log.empty()) {
    std::string csv = "step,loss\n";
    char buf[64];
    for (std::size_t i = 0; i < res.loss_history.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, res.loss_history[i]);
      csv += buf;
    }
    write_text(csv, a.loss_log);
  }
  out << "trained on " << samples.size() << " samples, final loss " << res.loss_history.back() << "\n";
  return kExitOk;
}

struct SynthArgs {
  std::string scene;
  std::string trajectory;
  std::string checkpoint;
  bool oracle = false;
  double fraction = 1.0;
  std::string out;
};

struct DenoiserChoice {
  std::unique_ptr<TinyNetDenoiser> net;
  std::unique_ptr<OracleSource> oracle;
  DenoiserSource source;
};

DenoiserChoice pick_denoiser(const std::string& checkpoint, bool oracle, std::span<const PosedFrame> scene,
                             const Trajectory& traj, double depth_max, const NoiseSchedule& sched) {
  DenoiserChoice c;
  if (oracle == !checkpoint.empty()) fail(ErrorCode::kInvalidConfig, "give exactly one of --checkpoint or --oracle");
  if (oracle) {
    c.oracle = std::make_unique<OracleSource>(scene, traj, depth_max, sched);
    const OracleSource* o = c.oracle.get();
    c.source = [o](std::size_t j) -> const Denoiser& { return (*o)(j); };
  } else {
    c.net = std::make_unique<TinyNetDenoiser>(load_checkpoint(checkpoint));
    const TinyNetDenoiser* n = c.net.get();
    c.source = [n](std::size_t) -> const Denoiser& { return *n; };
  }
  return c;
}

int cmd_synthesize(const Globals& g, const SynthArgs& a, std::ostream& out) {
  const SynthesisConfig cfg = synthesis_config(g);
  const Scene scene = read_scene(manifest_path(a.scene));
  const Trajectory traj = read_trajectory(a.trajectory);
  const NoiseSchedule sched = default_schedule();
  const DenoiserChoice d = pick_denoiser(a.checkpoint, a.oracle, scene.frames, traj, cfg.depth_max, sched);
  const auto inputs = select(scene.frames, a.fraction);
  const SynthesisResult res = synthesize(inputs, scene.manifest.intrinsics, traj, d.source, sched, cfg);
  const fs::path dir = a.out;
  std::vector<PosedFrame> generated;
  for (std::size_t j = 0; j < res.generated.size(); ++j) generated.push_back({res.generated[j], traj.poses[j]});
  write_scene(dir, scene.manifest.intrinsics, generated);
  write_ply(res.mesh, dir / "mesh.ply");
  write_ply(fuse_inputs(inputs, scene.manifest.intrinsics, cfg), dir / "input_mesh.ply");
  out << "synthesized " << generated.size() << " views from " << inputs.size() << " inputs; mesh has "
      << res.mesh.vertices.size() << " vertices, " << res.mesh.faces.size() << " faces\n";
  return kExitOk;
}

struct EvalArgs {
  std::string pred;
  std::string gt;
  std::string out;
  std::string name = "scene";
  double fraction = 1.0;
  std::size_t points = 10000;
};

int cmd_eval(const Globals& g, const EvalArgs& a, std::ostream& out) {
  const fs::path pred_dir = fs::is_directory(a.pred) ? fs::path(a.pred) : fs::path(a.pred).parent_path();
  const fs::path gt_dir = fs::is_directory(a.gt) ? fs::path(a.gt) : fs::path(a.gt).parent_path();
  const Scene pred = read_scene(manifest_path(a.pred));
  const Scene gt = read_scene(manifest_path(a.gt));
  Evaluation ev = evaluate(pred.frames, read_ply(mesh_in(pred_dir)), gt.frames, read_ply(mesh_in(gt_dir)), a.points,
                           g.seed);
  ev.row.scene = a.name;
  ev.row.view_fraction = a.fraction;
  const std::vector<MetricRow> rows{ev.row};
  if (a.out.empty()) {
    out << format_metrics_csv(rows);
  } else {
    write_metrics_csv(rows, a.out);
    out << "matched " << ev.matched << " frames; wrote " << a.out << "\n";
  }
  return kExitOk;
}

struct SweepArgs {
  std::string scene;
  std::string trajectory;
  std::string checkpoint;
  bool oracle = false;
  std::vector<double> fractions{0.05, 0.10, 0.20, 0.50};
  std::vector<double> betas{0.0, 0.5, 1.0, 2.0, 5.0};
  std::string out;
  std::string name = "scene";
  std::size_t points = 10000;
};

int cmd_sweep(const Globals& g, const SweepArgs& a, std::ostream& out) {
  const fs::path dir = fs::is_directory(a.scene) ? fs::path(a.scene) : fs::path(a.scene).parent_path();
  const Scene scene = read_scene(manifest_path(a.scene));
  const TriangleMesh gt_mesh = read_ply(mesh_in(dir));
  Trajectory traj{scene.manifest.intrinsics, {}};
  if (a.trajectory.empty()) {
    for (const auto& f : scene.frames) traj.poses.push_back(f.pose);
  } else {
    traj = read_trajectory(a.trajectory);
  }
  const NoiseSchedule sched = default_schedule();
  const DenoiserChoice d = pick_denoiser(a.checkpoint, a.oracle, scene.frames, traj, g.depth_max, sched);
  std::vector<MetricRow> rows;
  for (double fraction : a.fractions) {
    const auto inputs = select(scene.frames, fraction);
    for (double beta : a.betas) {
      Globals run = g;
      run.guidance_beta = beta;
      const SynthesisConfig cfg = synthesis_config(run);
      const SynthesisResult res = synthesize(inputs, scene.manifest.intrinsics, traj, d.source, sched, cfg);
      std::vector<PosedFrame> generated;
      for (std::size_t j = 0; j < res.generated.size(); ++j) generated.push_back({res.generated[j], traj.poses[j]});
      Evaluation ev = evaluate(generated, res.mesh, scene.frames, gt_mesh, a.points, g.seed);
      ev.row.scene = beta_label(a.name, beta);
      ev.row.view_fraction = fraction;
      rows.push_back(ev.row);
      out << "fraction " << fraction << " beta " << beta << ": psnr " << ev.row.psnr << ", chamfer " << ev.row.chamfer
          << ", completeness " << ev.row.completeness << "\n";
    }
  }
  if (a.out.empty()) {
    out << format_metrics_csv(rows);
  } else {
    write_metrics_csv(rows, a.out);
  }
  return kExitOk;
}

struct SelftestArgs {
  std::vector<int> criteria;
  int train_steps = selftest::Options{}.train_steps;
  std::string work;
};

int cmd_selftest(const SelftestArgs& a, std::ostream& out) {
  selftest::Options opt;
  opt.train_steps = a.train_steps;
  opt.work_dir = a.work;
  opt.log = &out;
  std::vector<int> ids = a.criteria;
  if (ids.empty())
    for (int i = 1; i <= selftest::kCriterionCount; ++i) ids.push_back(i);
  bool all = true;
  for (int id : ids) {
    const selftest::Result r = selftest::run(id, opt);
    out << selftest::format(r) << "\n" << std::flush;
    all &= r.pass;
  }
  return all ? kExitOk : kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"rgbdfill: scene completion from sparse RGBD views by incremental diffusion inpainting", "rgbdfill"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with option values; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--steps", g.steps, "DDIM inference steps")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--eta", g.eta, "DDIM stochasticity")->capture_default_str()->check(CLI::NonNegativeNumber);
  app.add_option("--guidance-beta", g.guidance_beta, "Classifier-free guidance factor")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app.add_option("--depth-max", g.depth_max, "Depth mapped to +1 in diffusion space (m)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--voxel", g.voxel, "Voxel pooling size (m)")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--chunk", g.chunk, "Known frames rendered per view")->capture_default_str()->check(CLI::PositiveNumber);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic box-room scene");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--views", gen.views, "Ring cameras")->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--texture", gen.texture, "checker, gradient or stripes")->capture_default_str();
  gen_cmd->add_option("--resolution", gen.resolution, "Frame width and height")->capture_default_str();
  gen_cmd->add_option("--room", gen.room, "Room size x y z (m)")->expected(3);
  gen_cmd->add_option("--ring-radius", gen.ring_radius, "Camera ring radius (m)");
  gen_cmd->add_option("--camera-height", gen.camera_height, "Camera height (m)");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train the toy denoiser on scene frames");
  train_cmd->add_option("--data", tr.data, "Scene directories or manifests")->required();
  train_cmd->add_option("--out", tr.out, "Checkpoint path")->required();
  train_cmd->add_option("--train-steps", tr.train_steps, "Optimizer steps")->capture_default_str();
  train_cmd->add_option("--batch", tr.batch, "Batch size")->capture_default_str();
  train_cmd->add_option("--lr", tr.lr, "Initial learning rate")->capture_default_str();
  train_cmd->add_option("--lr-final", tr.lr_final, "Final learning rate")->capture_default_str();
  train_cmd->add_option("--dropout", tr.dropout, "Condition dropout probability")->capture_default_str();
  train_cmd->add_option("--grad-clip", tr.grad_clip, "Gradient norm clip (0 = off)")->capture_default_str();
  train_cmd->add_option("--loss-log", tr.loss_log, "Write per-step loss CSV here");

  SynthArgs sy;
  auto* synth_cmd = app.add_subcommand("synthesize", "Complete a scene along a trajectory");
  synth_cmd->add_option("--scene", sy.scene, "Scene directory or manifest")->required();
  synth_cmd->add_option("--trajectory", sy.trajectory, "Trajectory manifest")->required();
  synth_cmd->add_option("--checkpoint", sy.checkpoint, "Trained denoiser");
  synth_cmd->add_flag("--oracle", sy.oracle, "Use scene frames at the trajectory poses as a point-mass oracle");
  synth_cmd->add_option("--fraction", sy.fraction, "Fraction of scene frames used as inputs")->capture_default_str();
  synth_cmd->add_option("--out", sy.out, "Output directory")->required();

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Compare predicted frames and mesh with ground truth");
  eval_cmd->add_option("--pred", ev.pred, "Predicted scene directory")->required();
  eval_cmd->add_option("--gt", ev.gt, "Ground-truth scene directory")->required();
  eval_cmd->add_option("--out", ev.out, "CSV path (stdout when omitted)");
  eval_cmd->add_option("--name", ev.name, "Scene label")->capture_default_str();
  eval_cmd->add_option("--fraction", ev.fraction, "View fraction column value")->capture_default_str();
  eval_cmd->add_option("--points", ev.points, "Surface samples per mesh")->capture_default_str();

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Synthesize and evaluate over view fractions and guidance factors");
  sweep_cmd->add_option("--scene", sw.scene, "Ground-truth scene directory")->required();
  sweep_cmd->add_option("--trajectory", sw.trajectory, "Trajectory manifest (default: all scene poses)");
  sweep_cmd->add_option("--checkpoint", sw.checkpoint, "Trained denoiser");
  sweep_cmd->add_flag("--oracle", sw.oracle, "Point-mass oracle from the scene frames");
  sweep_cmd->add_option("--fractions", sw.fractions, "Input view fractions")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--betas", sw.betas, "Guidance factors")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--out", sw.out, "CSV path (stdout when omitted)");
  sweep_cmd->add_option("--name", sw.name, "Scene label")->capture_default_str();
  sweep_cmd->add_option("--points", sw.points, "Surface samples per mesh")->capture_default_str();

  SelftestArgs st;
  auto* self_cmd = app.add_subcommand("selftest", "Run the acceptance checks");
  self_cmd->add_option("--criteria", st.criteria, "Criterion ids (default: all)")->delimiter(',');
  self_cmd->add_option("--train-steps", st.train_steps, "Training steps for the end-to-end check")
      ->capture_default_str();
  self_cmd->add_option("--work", st.work, "Scratch directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(g, gen, out);
    if (*train_cmd) return cmd_train(g, tr, out);
    if (*synth_cmd) return cmd_synthesize(g, sy, out);
    if (*eval_cmd) return cmd_eval(g, ev, out);
    if (*sweep_cmd) return cmd_sweep(g, sw, out);
    if (*self_cmd) return cmd_selftest(st, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  err << app.help();
  return kExitUsage;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace rgbdfill::cli
