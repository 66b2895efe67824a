#ifndef SPMAP_PIPELINE_BENCHMARK_H_
#define SPMAP_PIPELINE_BENCHMARK_H_

#include <string>
#include <vector>

#include "spmap/pipeline/pipeline.h"

namespace spmap {

// Wall-time and memory summary of one mapping run plus the one-shot query
// stages.
struct BenchmarkReport {
  struct StageRow {
    std::string name;
    double total_ms = 0.0;
    double per_frame_ms = 0.0;  // 0 for one-shot stages
  };
  std::vector<StageRow> rows;
  int frames = 0;
  size_t superpoint_count = 0;
  size_t block_count = 0;
  size_t map_bytes = 0;

  std::string toText() const;
};

BenchmarkReport benchmark(const FrameStream& stream,
                          const PipelineConfig& config,
                          const ClassTable& classes);

// Summarizes an already-executed session + query.
BenchmarkReport summarize(const MapSession& session, const QueryResult& query);

}  // namespace spmap

#endif  // SPMAP_PIPELINE_BENCHMARK_H_
