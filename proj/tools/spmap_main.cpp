// Command-line front end: synthesize datasets, run the mapping pipeline,
// evaluate predictions, and benchmark.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "spmap/map/ply_io.h"
#include "spmap/pipeline/benchmark.h"
#include "spmap/pipeline/dataset_io.h"
#include "spmap/pipeline/pipeline.h"
#include "spmap/synth/noise.h"
#include "spmap/synth/renderer.h"
#include "spmap/synth/scene.h"

namespace fs = std::filesystem;
using namespace spmap;

namespace {

void writeTextFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << content;
}

int runSynth(const std::string& scene_path, const std::string& preset,
             int frames, const std::string& out_dir, const NoiseSpec& noise,
             uint64_t noise_seed, double gt_resolution) {
  SceneSpec scene;
  if (!scene_path.empty()) {
    scene = loadSceneSpec(scene_path);
  } else if (preset == "three_object") {
    scene = threeObjectScene(frames);
  } else if (preset == "cluttered_six") {
    scene = clutteredSixScene(frames);
  } else {
    std::cerr << "synth: provide --scene or a valid --preset\n";
    return 1;
  }

  std::vector<Frame> sequence = renderSequence(scene);
  sequence = applyNoise(sequence, noise, noise_seed, scene.classes);
  writeDataset(out_dir, sequence, scene.classes);
  writePointsPly(groundTruthPoints(scene, gt_resolution),
                 (fs::path(out_dir) / "gt_points.ply").string());
  std::cout << "wrote " << sequence.size() << " frames to " << out_dir
            << "\n";
  return 0;
}

int runMap(const std::string& dataset_dir, const std::string& config_path,
           const std::string& out_dir, const PipelineConfig& overrides,
           bool have_overrides, const std::string& gt_path) {
  PipelineConfig config;
  if (!config_path.empty()) {
    config.applyFile(config_path);
  }
  if (have_overrides) {
    config = overrides;
  }
  config.validate();

  DatasetFrameStream stream(dataset_dir);
  const MapSession session =
      runMapping(stream, config, stream.reader().classes());
  const QueryResult query = querySemanticInstance(session);

  fs::create_directories(out_dir);
  writeMeshPly(query.mesh, (fs::path(out_dir) / "mesh.ply").string());
  writePointsPly(pointsFromMesh(query.mesh),
                 (fs::path(out_dir) / "points.ply").string());
  writeTextFile(fs::path(out_dir) / "superpoints.txt",
                query.superpointsText());
  writeTextFile(fs::path(out_dir) / "instances.txt", query.instancesText());

  const BenchmarkReport timing = summarize(session, query);
  writeTextFile(fs::path(out_dir) / "timing.txt", timing.toText());

  std::string gt = gt_path;
  if (gt.empty()) {
    const fs::path candidate = fs::path(dataset_dir) / "gt_points.ply";
    if (fs::exists(candidate)) {
      gt = candidate.string();
    }
  }
  if (!gt.empty()) {
    const MetricsReport metrics = evaluateSession(
        query, readLabeledPly(gt), stream.reader().classes());
    writeTextFile(fs::path(out_dir) / "metrics.txt", metrics.toText());
    std::cout << metrics.toText();
  }
  std::cout << "superpoints: " << session.superpoints().records().size()
            << ", instances: " << query.instances.size()
            << ", mesh vertices: " << query.mesh.vertices.size() << "\n";
  return 0;
}

int runEval(const std::string& pred_path, const std::string& gt_path,
            const std::string& instances_path, const std::string& out_path,
            const std::string& classes_path) {
  const LabeledPoints predictions = readLabeledPly(pred_path);
  const LabeledPoints ground_truth = readLabeledPly(gt_path);

  ClassTable classes;
  if (!classes_path.empty()) {
    std::ifstream in(classes_path);
    if (!in) {
      throw std::runtime_error("cannot open " + classes_path);
    }
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream tokens(line);
      int id = 0;
      std::string name, kind;
      if (tokens >> id >> name >> kind && id != 0) {
        classes.add(static_cast<ClassId>(id), name,
                    kind == "thing" ? ClassKind::kThing : ClassKind::kStuff);
      }
    }
  } else {
    // Without a class table every labeled class counts as a thing.
    std::set<ClassId> seen(ground_truth.semantic_ids.begin(),
                           ground_truth.semantic_ids.end());
    for (const ClassId id : seen) {
      if (id != 0) {
        classes.add(id, "class" + std::to_string(id), ClassKind::kThing);
      }
    }
  }

  std::vector<PredictedInstanceInfo> info;
  if (!instances_path.empty()) {
    std::ifstream in(instances_path);
    if (!in) {
      throw std::runtime_error("cannot open " + instances_path);
    }
    uint32_t id = 0, category = 0;
    double confidence = 0.0;
    size_t members = 0;
    while (in >> id >> category >> confidence >> members) {
      info.push_back(PredictedInstanceInfo{
          id, static_cast<ClassId>(category), confidence});
    }
  }

  const MetricsReport report =
      evaluatePredictions(predictions, info, ground_truth, classes, {});
  std::cout << report.toText();
  if (!out_path.empty()) {
    writeTextFile(out_path, report.toText());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental panoptic 2D-to-3D superpoint mapping"};
  app.require_subcommand(1);

  // --- synth ---------------------------------------------------------------
  auto* synth = app.add_subcommand(
      "synth", "Render a synthetic RGB-D dataset with exact ground truth");
  std::string synth_scene, synth_preset = "three_object", synth_out;
  int synth_frames = 60;
  double gt_resolution = 0.02;
  NoiseSpec noise;
  uint64_t noise_seed = 1;
  synth->add_option("--scene", synth_scene, "scene description file");
  synth->add_option("--preset", synth_preset,
                    "three_object | cluttered_six (when no --scene)");
  synth->add_option("--frames", synth_frames, "trajectory length for presets");
  synth->add_option("--out", synth_out, "output dataset directory")
      ->required();
  synth->add_option("--gt-resolution", gt_resolution,
                    "ground-truth sample spacing (m)");
  synth->add_option("--noise-pose-rot", noise.pose_drift_rot_deg,
                    "per-frame rotation drift std (deg)");
  synth->add_option("--noise-pose-trans", noise.pose_drift_trans_m,
                    "per-frame translation drift std (m)");
  synth->add_option("--noise-depth", noise.depth_noise_std,
                    "depth noise std (m)");
  synth->add_option("--noise-mask-boundary", noise.mask_boundary_px,
                    "mask erode/dilate pixels");
  synth->add_option("--noise-mask-misclass", noise.mask_misclass_rate,
                    "instance relabel probability");
  synth->add_option("--noise-seed", noise_seed, "noise RNG seed");

  // --- map -----------------------------------------------------------------
  auto* map_cmd = app.add_subcommand(
      "map", "Run the mapping pipeline on a dataset and export results");
  std::string map_dataset, map_config, map_out, map_gt;
  bool no_semantic_consistency = false;
  bool no_regularization = false;
  bool no_refinement = false;
  map_cmd->add_option("--dataset", map_dataset, "dataset directory")
      ->required();
  map_cmd->add_option("--config", map_config, "pipeline config file");
  map_cmd->add_option("--out", map_out, "output directory")->required();
  map_cmd->add_option("--gt", map_gt,
                      "ground-truth PLY (defaults to <dataset>/gt_points.ply "
                      "when present)");
  map_cmd->add_flag("--no-semantic-consistency", no_semantic_consistency,
                    "disable the semantic merge condition");
  map_cmd->add_flag("--no-regularization", no_regularization,
                    "skip graph-based semantic regularization");
  map_cmd->add_flag("--no-refinement", no_refinement,
                    "skip instance refinement");

  // --- eval ----------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand(
      "eval", "Evaluate predicted labeled points against ground truth");
  std::string eval_pred, eval_gt, eval_instances, eval_out, eval_classes;
  eval_cmd->add_option("--pred", eval_pred, "predicted points.ply")
      ->required();
  eval_cmd->add_option("--gt", eval_gt, "ground-truth PLY")->required();
  eval_cmd->add_option("--instances", eval_instances,
                       "instances.txt with per-instance confidences");
  eval_cmd->add_option("--classes", eval_classes, "classes.txt");
  eval_cmd->add_option("--out", eval_out, "metrics output file");

  // --- bench ---------------------------------------------------------------
  auto* bench_cmd = app.add_subcommand(
      "bench", "Per-stage timing and memory report for one mapping run");
  std::string bench_dataset, bench_config, bench_out;
  bench_cmd->add_option("--dataset", bench_dataset, "dataset directory")
      ->required();
  bench_cmd->add_option("--config", bench_config, "pipeline config file");
  bench_cmd->add_option("--out", bench_out, "timing output file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      return runSynth(synth_scene, synth_preset, synth_frames, synth_out,
                      noise, noise_seed, gt_resolution);
    }
    if (map_cmd->parsed()) {
      PipelineConfig config;
      if (!map_config.empty()) {
        config.applyFile(map_config);
      }
      if (no_semantic_consistency) config.semantic_consistency = false;
      if (no_regularization) config.regularization = false;
      if (no_refinement) config.refinement = false;
      return runMap(map_dataset, "", map_out, config, true, map_gt);
    }
    if (eval_cmd->parsed()) {
      return runEval(eval_pred, eval_gt, eval_instances, eval_out,
                     eval_classes);
    }
    if (bench_cmd->parsed()) {
      PipelineConfig config;
      if (!bench_config.empty()) {
        config.applyFile(bench_config);
      }
      DatasetFrameStream stream(bench_dataset);
      const BenchmarkReport report =
          benchmark(stream, config, stream.reader().classes());
      std::cout << report.toText();
      if (!bench_out.empty()) {
        writeTextFile(bench_out, report.toText());
      }
      return 0;
    }
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
