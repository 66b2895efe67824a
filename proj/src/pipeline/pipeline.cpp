#include "spmap/pipeline/pipeline.h"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "spmap/fusion/surface_fusion.h"
#include "spmap/mrf/alpha_beta_swap.h"
#include "spmap/segmentation/depth_segmentation.h"
#include "spmap/segmentation/normal_estimation.h"

namespace spmap {

namespace {

double secondsSince(
    const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

struct StagePayload {
  Frame frame;
  DepthSegmentation segmentation;
  std::vector<Surface> surfaces;
  double seconds = 0.0;
};

// Bounded reorder buffer between the stage-1 workers and the mapping
// thread: workers claim frame indices in order, the consumer pops strictly
// in frame order, and claiming is throttled so at most `capacity` frames are
// in flight past the consumer.
class PayloadQueue {
 public:
  PayloadQueue(int total, int capacity)
      : total_(total), capacity_(capacity) {}

  // Next frame index for a worker, or -1 when all frames are claimed.
  int claim() {
    std::unique_lock<std::mutex> lock(mutex_);
    producer_cv_.wait(lock, [&] {
      return failed_ || next_claim_ >= total_ ||
             next_claim_ < next_pop_ + capacity_;
    });
    if (failed_ || next_claim_ >= total_) {
      return -1;
    }
    return next_claim_++;
  }

  void deliver(int index, StagePayload payload) {
    std::lock_guard<std::mutex> lock(mutex_);
    ready_.emplace(index, std::move(payload));
    consumer_cv_.notify_all();
  }

  void fail(std::exception_ptr error) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!failed_) {
      failed_ = true;
      error_ = error;
    }
    producer_cv_.notify_all();
    consumer_cv_.notify_all();
  }

  // Blocks for the next in-order payload; empty when the stream is done.
  std::optional<StagePayload> pop() {
    std::unique_lock<std::mutex> lock(mutex_);
    consumer_cv_.wait(lock, [&] {
      return failed_ || next_pop_ >= total_ ||
             ready_.count(next_pop_) > 0;
    });
    if (failed_) {
      std::rethrow_exception(error_);
    }
    if (next_pop_ >= total_) {
      return std::nullopt;
    }
    StagePayload payload = std::move(ready_.at(next_pop_));
    ready_.erase(next_pop_);
    ++next_pop_;
    producer_cv_.notify_all();
    return payload;
  }

 private:
  const int total_;
  const int capacity_;
  std::mutex mutex_;
  std::condition_variable producer_cv_;
  std::condition_variable consumer_cv_;
  std::map<int, StagePayload> ready_;
  int next_claim_ = 0;
  int next_pop_ = 0;
  bool failed_ = false;
  std::exception_ptr error_;
};

StagePayload prepareFrame(const FrameStream& stream, int index,
                          const PipelineConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  StagePayload payload;
  payload.frame = stream.frame(index);

  const std::vector<FrameViolation> violations =
      validateFrame(payload.frame);
  if (!violations.empty()) {
    std::string message = "frame " +
                          std::to_string(payload.frame.frame_index) +
                          " failed validation:";
    for (const FrameViolation& violation : violations) {
      message += "\n  " + violation.message;
    }
    throw FrameValidationError(message);
  }

  const NormalImage normals =
      estimateNormals(payload.frame.depth, payload.frame.intrinsics);
  DepthSegmentationParams seg_params;
  seg_params.max_concavity_deg = config.max_concavity_deg;
  seg_params.max_step_m = config.max_step_m;
  seg_params.min_segment_px = config.min_segment_px;
  payload.segmentation = segmentDepth(payload.frame.depth, normals,
                                      payload.frame.intrinsics, seg_params);

  SurfaceFusionParams fusion_params;
  fusion_params.min_surface_px = config.min_surface_px;
  payload.surfaces =
      fuseMasks(payload.frame, payload.segmentation, fusion_params);
  payload.seconds = secondsSince(start);
  return payload;
}

}  // namespace

MapSession::MapSession(const PipelineConfig& config, const ClassTable& classes)
    : config_(config),
      classes_(classes),
      map_(LabelTsdfMap::Config{config.voxel_size, config.truncation, 16,
                                config.observation_weight, 4}),
      superpoints_(SuperpointManager::Params{
          config.min_overlap_ratio, config.min_overlap_voxels,
          config.merge_threshold, config.semantic_consistency}),
      graph_(SemanticGraph::Params{config.sigma_spatial,
                                   config.max_edge_superpoints}) {
  config_.validate();
}

void MapSession::integratePayload(const Frame& frame,
                                  const std::vector<Surface>& surfaces,
                                  FrameStats partial_stats) {
  FrameStats* stats = &partial_stats;
  auto start = std::chrono::steady_clock::now();
  map_.integrateDepth(frame);
  stats->integration_seconds = secondsSince(start);

  start = std::chrono::steady_clock::now();
  for (const Surface& surface : surfaces) {
    const SurfaceAssignmentResult assignment =
        superpoints_.assignSurface(surface, &map_, &graph_);
    superpoints_.updateOverlapMatrix(assignment.significant_overlaps);
    if (assignment.created_new) {
      ++stats->new_superpoints;
    }
  }
  const std::vector<MergeEvent> merges =
      superpoints_.mergeSuperpoints(&map_, &graph_);
  stats->merges = static_cast<int>(merges.size());
  stats->superpoint_seconds = secondsSince(start);

  start = std::chrono::steady_clock::now();
  std::vector<InstanceRaycast> raycasts;
  for (const PanopticInstance& instance : frame.instances) {
    InstanceRaycast raycast;
    raycast.instance_id = instance.instance_id;
    raycast.category = instance.category;
    raycast.panoptic_confidence = panopticConfidence(instance);
    raycast.hits = map_.raycastInstance(frame, instance.instance_id);
    raycasts.push_back(std::move(raycast));
  }
  graph_.accumulateFrame(raycasts, map_);

  // Data association: strongest observations claim their tracks first.
  std::vector<const InstanceRaycast*> ordered;
  for (const InstanceRaycast& raycast : raycasts) {
    if (!raycast.hits.empty()) {
      ordered.push_back(&raycast);
    }
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const InstanceRaycast* a, const InstanceRaycast* b) {
              int total_a = 0, total_b = 0;
              for (const auto& [label, count] : a->hits) total_a += count;
              for (const auto& [label, count] : b->hits) total_b += count;
              if (total_a != total_b) return total_a > total_b;
              return a->instance_id < b->instance_id;
            });
  std::set<GlobalInstanceId> claimed;
  for (const InstanceRaycast* raycast : ordered) {
    const GlobalInstanceId track =
        superpoints_.associateInstanceObservation(raycast->hits, &claimed);
    if (std::getenv("SPMAP_TRACE") != nullptr) {
      std::fprintf(stderr, "frame %d inst %u cat %u -> track %u hits:",
                   frame.frame_index, raycast->instance_id, raycast->category,
                   track);
      for (const auto& [label, count] : raycast->hits) {
        std::fprintf(stderr, " %u:%d", label, count);
      }
      std::fprintf(stderr, "\n");
    }
  }
  stats->graph_seconds = secondsSince(start);

  stats->frame_index = frame.frame_index;
  stats->surfaces = static_cast<int>(surfaces.size());
  ++frames_integrated_;
  frame_stats_.push_back(partial_stats);
}

MapSession runMapping(const FrameStream& stream, const PipelineConfig& config,
                      const ClassTable& classes) {
  MapSession session(config, classes);
  const int total = stream.frameCount();
  if (total == 0) {
    return session;
  }

  const int capacity =
      std::max(config.queue_capacity, config.stage1_threads + 1);
  PayloadQueue queue(total, capacity);

  const int worker_count = std::min(config.stage1_threads, total);
  std::vector<std::thread> workers;
  workers.reserve(worker_count);
  for (int w = 0; w < worker_count; ++w) {
    workers.emplace_back([&] {
      while (true) {
        const int index = queue.claim();
        if (index < 0) {
          return;
        }
        try {
          queue.deliver(index, prepareFrame(stream, index, config));
        } catch (...) {
          queue.fail(std::current_exception());
          return;
        }
      }
    });
  }

  try {
    while (true) {
      std::optional<StagePayload> payload = queue.pop();
      if (!payload.has_value()) {
        break;
      }
      FrameStats stats;
      stats.segments = static_cast<int>(payload->segmentation.segments.size());
      stats.segmentation_seconds = payload->seconds;
      session.integratePayload(payload->frame, payload->surfaces, stats);
    }
  } catch (...) {
    queue.fail(std::current_exception());
    for (std::thread& worker : workers) {
      worker.join();
    }
    throw;
  }
  for (std::thread& worker : workers) {
    worker.join();
  }
  return session;
}

QueryResult querySemanticInstance(const MapSession& session) {
  if (session.framesIntegrated() == 0 || session.map().empty()) {
    throw EmptyMapError("querySemanticInstance: no integrated frames");
  }
  const PipelineConfig& config = session.config();
  const SemanticGraph& graph = session.graph();

  QueryResult result;
  auto start = std::chrono::steady_clock::now();
  if (config.regularization) {
    const EnergyProblem problem = EnergyProblem::fromGraph(
        graph, config.smoothing_weight, config.smoothing_bandwidth,
        config.epsilon_prob, /*include_background_class=*/true,
        config.normalize_pairwise);
    const SwapResult swap = alphaBetaSwap(problem);
    result.semantics = problem.toLabeling(swap.labeling_by_node);
  } else {
    for (const SuperpointLabel label : graph.vertices()) {
      const ClassId category = graph.initialSemantic(label);
      if (category != kBackgroundClass) {
        result.semantics[label] = category;
      }
    }
  }
  // Superpoints without evidence stay pinned to the background class.
  for (const SuperpointLabel label : graph.vertices()) {
    result.semantics.emplace(label, kBackgroundClass);
  }
  result.regularization_seconds = secondsSince(start);

  start = std::chrono::steady_clock::now();
  std::map<SuperpointLabel, ClassId> labeled;
  for (const auto& [label, category] : result.semantics) {
    if (category != kBackgroundClass) {
      labeled.emplace(label, category);
    }
  }
  uint32_t next_instance_id = 1;
  std::vector<InstanceGroup> initial = initialInstances(
      labeled, session.superpoints().records(), &next_instance_id);
  if (config.refinement) {
    InstanceRefinerParams params;
    params.detach_threshold = config.theta_detach;
    params.instance_threshold = config.theta_instance;
    params.node_threshold = config.theta_node;
    params.detach_by_class = config.theta_detach_by_class;
    params.instance_by_class = config.theta_instance_by_class;
    params.node_by_class = config.theta_node_by_class;
    result.instances = refineAllClasses(initial, graph, params,
                                        session.classes(), &next_instance_id);
  } else {
    for (InstanceGroup& instance : initial) {
      instance.confidence = instanceConfidence(instance, graph);
    }
    result.instances = std::move(initial);
  }
  for (const InstanceGroup& instance : result.instances) {
    for (const SuperpointLabel member : instance.members) {
      result.instance_of[member] = instance.id;
    }
  }
  result.refinement_seconds = secondsSince(start);

  start = std::chrono::steady_clock::now();
  SemanticAssignment semantic_assignment;
  for (const auto& [label, category] : result.semantics) {
    semantic_assignment[label] = category;
  }
  InstanceAssignment instance_assignment;
  for (const auto& [label, instance] : result.instance_of) {
    instance_assignment[label] = instance;
  }
  result.mesh = extractLabeledMesh(session.map(), semantic_assignment,
                                   instance_assignment);
  result.mesh_seconds = secondsSince(start);
  return result;
}

std::string QueryResult::superpointsText() const {
  std::ostringstream out;
  for (const auto& [label, category] : semantics) {
    auto it = instance_of.find(label);
    const uint32_t instance = it == instance_of.end() ? 0 : it->second;
    out << label << ' ' << category << ' ' << instance << '\n';
  }
  return out.str();
}

std::string QueryResult::instancesText() const {
  std::ostringstream out;
  char line[128];
  for (const InstanceGroup& instance : instances) {
    std::snprintf(line, sizeof(line), "%u %u %.6f %zu\n", instance.id,
                  instance.category,
                  instance.confidence / (1.0 + instance.confidence),
                  instance.members.size());
    out << line;
  }
  return out.str();
}

std::vector<PredictedInstanceInfo> QueryResult::instanceInfo() const {
  std::vector<PredictedInstanceInfo> info;
  info.reserve(instances.size());
  for (const InstanceGroup& instance : instances) {
    info.push_back(PredictedInstanceInfo{
        instance.id, instance.category,
        instance.confidence / (1.0 + instance.confidence)});
  }
  return info;
}

MetricsReport evaluateSession(const QueryResult& query,
                              const LabeledPoints& ground_truth,
                              const ClassTable& classes,
                              const EvalParams& params) {
  return evaluatePredictions(pointsFromMesh(query.mesh), query.instanceInfo(),
                             ground_truth, classes, params);
}

}  // namespace spmap
