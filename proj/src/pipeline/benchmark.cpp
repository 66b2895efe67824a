#include "spmap/pipeline/benchmark.h"

#include <cstdio>

namespace spmap {

BenchmarkReport summarize(const MapSession& session,
                          const QueryResult& query) {
  BenchmarkReport report;
  report.frames = session.framesIntegrated();

  double segmentation = 0.0, integration = 0.0, superpoint = 0.0,
         graph = 0.0;
  for (const FrameStats& stats : session.frameStats()) {
    segmentation += stats.segmentation_seconds;
    integration += stats.integration_seconds;
    superpoint += stats.superpoint_seconds;
    graph += stats.graph_seconds;
  }
  const double n = std::max(1, report.frames);
  auto perFrame = [&](const std::string& name, double total) {
    report.rows.push_back(BenchmarkReport::StageRow{
        name, 1000.0 * total, 1000.0 * total / n});
  };
  perFrame("geometric_segmentation_fusion", segmentation);
  perFrame("tsdf_integration", integration);
  perFrame("superpoint_update", superpoint);
  perFrame("graph_update", graph);
  report.rows.push_back(BenchmarkReport::StageRow{
      "semantic_regularization", 1000.0 * query.regularization_seconds, 0.0});
  report.rows.push_back(BenchmarkReport::StageRow{
      "instance_refinement", 1000.0 * query.refinement_seconds, 0.0});
  report.rows.push_back(BenchmarkReport::StageRow{
      "mesh_extraction", 1000.0 * query.mesh_seconds, 0.0});

  report.superpoint_count = session.superpoints().records().size();
  report.block_count = session.map().blockCount();
  report.map_bytes = session.map().approxMemoryBytes();
  return report;
}

BenchmarkReport benchmark(const FrameStream& stream,
                          const PipelineConfig& config,
                          const ClassTable& classes) {
  const MapSession session = runMapping(stream, config, classes);
  QueryResult query;
  if (session.framesIntegrated() > 0 && !session.map().empty()) {
    query = querySemanticInstance(session);
  }
  return summarize(session, query);
}

std::string BenchmarkReport::toText() const {
  std::string text;
  char line[160];
  std::snprintf(line, sizeof(line), "frames %d\n", frames);
  text += line;
  for (const StageRow& row : rows) {
    if (row.per_frame_ms > 0.0) {
      std::snprintf(line, sizeof(line), "stage %s total_ms=%.2f per_frame_ms=%.3f\n",
                    row.name.c_str(), row.total_ms, row.per_frame_ms);
    } else {
      std::snprintf(line, sizeof(line), "stage %s total_ms=%.2f once\n",
                    row.name.c_str(), row.total_ms);
    }
    text += line;
  }
  std::snprintf(line, sizeof(line), "superpoints %zu\n", superpoint_count);
  text += line;
  std::snprintf(line, sizeof(line), "map_blocks %zu\n", block_count);
  text += line;
  std::snprintf(line, sizeof(line), "map_bytes %zu\n", map_bytes);
  text += line;
  return text;
}

}  // namespace spmap
