#ifndef SPMAP_PIPELINE_PIPELINE_H_
#define SPMAP_PIPELINE_PIPELINE_H_

#include <memory>
#include <string>
#include <vector>

#include "spmap/eval/metrics.h"
#include "spmap/graph/semantic_graph.h"
#include "spmap/instance/instance_refiner.h"
#include "spmap/map/label_tsdf_map.h"
#include "spmap/map/mesh_extraction.h"
#include "spmap/map/ply_io.h"
#include "spmap/mrf/energy.h"
#include "spmap/pipeline/config.h"
#include "spmap/pipeline/dataset_io.h"
#include "spmap/superpoint/superpoint_manager.h"

namespace spmap {

struct FrameValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ordered frame source; frame(i) must be pure and callable from worker
// threads.
class FrameStream {
 public:
  virtual ~FrameStream() = default;
  virtual int frameCount() const = 0;
  virtual Frame frame(int index) const = 0;
};

class VectorFrameStream : public FrameStream {
 public:
  explicit VectorFrameStream(std::vector<Frame> frames)
      : frames_(std::move(frames)) {}
  int frameCount() const override { return static_cast<int>(frames_.size()); }
  Frame frame(int index) const override { return frames_.at(index); }

 private:
  std::vector<Frame> frames_;
};

class DatasetFrameStream : public FrameStream {
 public:
  explicit DatasetFrameStream(const std::string& directory)
      : reader_(directory) {}
  int frameCount() const override { return reader_.frameCount(); }
  Frame frame(int index) const override { return reader_.readFrame(index); }
  const DatasetReader& reader() const { return reader_; }

 private:
  DatasetReader reader_;
};

// Wall-clock seconds spent per stage of one frame.
struct FrameStats {
  int frame_index = 0;
  int segments = 0;
  int surfaces = 0;
  int new_superpoints = 0;
  int merges = 0;
  double segmentation_seconds = 0.0;  // stage 1: segmentation + fusion
  double integration_seconds = 0.0;
  double superpoint_seconds = 0.0;
  double graph_seconds = 0.0;
};

// The mutable mapping state: map, superpoints, and graph, built frame by
// frame. Query operations never modify it.
class MapSession {
 public:
  MapSession(const PipelineConfig& config, const ClassTable& classes);

  const PipelineConfig& config() const { return config_; }
  const ClassTable& classes() const { return classes_; }
  const LabelTsdfMap& map() const { return map_; }
  const SuperpointManager& superpoints() const { return superpoints_; }
  const SemanticGraph& graph() const { return graph_; }
  int framesIntegrated() const { return frames_integrated_; }
  const std::vector<FrameStats>& frameStats() const { return frame_stats_; }

  // Runs the per-frame mapping steps on one prepared payload (stage 2) and
  // records frame stats (stage-1 fields are taken from the partial input).
  void integratePayload(const Frame& frame,
                        const std::vector<Surface>& surfaces,
                        FrameStats partial_stats);

 private:
  PipelineConfig config_;
  ClassTable classes_;
  LabelTsdfMap map_;
  SuperpointManager superpoints_;
  SemanticGraph graph_;
  int frames_integrated_ = 0;
  std::vector<FrameStats> frame_stats_;
};

// Runs the full mapping loop: a stage-1 worker pool (decode, geometric
// segmentation, surface fusion) feeds the strictly ordered stage-2 mapping
// thread through a bounded queue.
MapSession runMapping(const FrameStream& stream, const PipelineConfig& config,
                      const ClassTable& classes);

struct QueryResult {
  Labeling semantics;  // superpoint -> class (background when no evidence)
  std::map<SuperpointLabel, uint32_t> instance_of;  // superpoint -> instance
  std::vector<InstanceGroup> instances;
  LabeledMesh mesh;
  double regularization_seconds = 0.0;
  double refinement_seconds = 0.0;
  double mesh_seconds = 0.0;

  std::string superpointsText() const;  // superpoints.txt payload
  std::string instancesText() const;    // instances.txt payload
  std::vector<PredictedInstanceInfo> instanceInfo() const;
};

// Steps (iv)-(vi): semantic regularization, instance refinement, and labeled
// mesh extraction on a snapshot of the session. Throws EmptyMapError when
// nothing was integrated.
QueryResult querySemanticInstance(const MapSession& session);

// Metric suite of the session outputs against ground-truth points.
MetricsReport evaluateSession(const QueryResult& query,
                              const LabeledPoints& ground_truth,
                              const ClassTable& classes,
                              const EvalParams& params = {});

}  // namespace spmap

#endif  // SPMAP_PIPELINE_PIPELINE_H_
