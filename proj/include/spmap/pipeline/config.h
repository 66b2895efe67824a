#ifndef SPMAP_PIPELINE_CONFIG_H_
#define SPMAP_PIPELINE_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>

#include "spmap/core/frame.h"

namespace spmap {

struct ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every tunable of the mapping pipeline, with the defaults used throughout.
// Parsed from flat `key = value` text; unknown keys are rejected.
struct PipelineConfig {
  // Map geometry.
  double voxel_size = 0.01;
  double truncation = 0.04;
  double observation_weight = 1.0;

  // Geometric segmentation.
  double max_concavity_deg = 10.0;
  double max_step_m = 0.05;
  int min_segment_px = 100;

  // Surface fusion.
  int min_surface_px = 20;

  // Superpoint assignment and merging.
  double min_overlap_ratio = 0.25;
  int min_overlap_voxels = 10;
  int merge_threshold = 3;

  // Superpoint graph.
  double sigma_spatial = 0.05;
  int max_edge_superpoints = 8;

  // Semantic regularization.
  double smoothing_weight = 15.0;    // pairwise penalty scale
  double smoothing_bandwidth = 0.5;  // cross-evidence damping
  double epsilon_prob = 1e-6;
  // Rescale the cross-evidence statistic by its median over edges; raw
  // accumulations grow with sequence length, which otherwise drives the
  // pairwise term to zero.
  bool normalize_pairwise = true;

  // Instance refinement (global defaults; per-class overrides via
  // `theta_detach_<class>` style keys).
  double theta_detach = 0.05;
  double theta_instance = 0.02;
  double theta_node = 0.5;
  std::map<ClassId, double> theta_detach_by_class;
  std::map<ClassId, double> theta_instance_by_class;
  std::map<ClassId, double> theta_node_by_class;

  // Pipeline stages (ablation switches).
  bool semantic_consistency = true;
  bool regularization = true;
  bool refinement = true;

  // Execution.
  int queue_capacity = 4;
  int stage1_threads = 2;
  uint64_t seed = 0;

  // Throws ConfigError when any value is out of its documented range.
  void validate() const;

  // Applies `key = value` lines (# comments allowed) on top of the current
  // values. Unknown keys and malformed values throw ConfigError.
  void applyText(const std::string& text);
  void applyFile(const std::string& path);

  std::string toText() const;
};

}  // namespace spmap

#endif  // SPMAP_PIPELINE_CONFIG_H_
