#include "spmap/fusion/surface_fusion.h"

#include <map>
#include <stdexcept>
#include <utility>

namespace spmap {

double panopticConfidence(const PanopticInstance& instance) {
  switch (instance.kind) {
    case ClassKind::kThing:
      return instance.score;
    case ClassKind::kStuff:
      return 0.5;
    case ClassKind::kBackground:
      break;
  }
  throw std::invalid_argument(
      "panopticConfidence: category is neither thing nor stuff");
}

std::vector<Surface> fuseMasks(const Frame& frame,
                               const DepthSegmentation& segmentation,
                               const SurfaceFusionParams& params) {
  // Ordered by (instance, segment) so surface ids are deterministic.
  std::map<std::pair<InstanceId, uint32_t>, std::vector<PixelCoord>> buckets;

  const int w = frame.depth.width();
  const int h = frame.depth.height();
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (frame.depth(u, v) <= 0.f) {
        continue;
      }
      const InstanceId instance_id = frame.panoptic_mask(u, v);
      const uint32_t segment_id = segmentation.segment_ids(u, v);
      if (instance_id == 0 || segment_id == 0) {
        continue;
      }
      buckets[{instance_id, segment_id}].push_back({u, v});
    }
  }

  std::vector<Surface> surfaces;
  for (auto& [key, pixels] : buckets) {
    if (static_cast<int>(pixels.size()) < params.min_surface_px) {
      continue;
    }
    const PanopticInstance* instance = frame.findInstance(key.first);
    if (instance == nullptr) {
      continue;  // validation reports this; skip rather than crash
    }
    Surface surface;
    surface.surface_id = static_cast<uint32_t>(surfaces.size()) + 1;
    surface.instance_id = key.first;
    surface.segment_id = key.second;
    surface.category = instance->category;
    surface.kind = instance->kind;
    surface.panoptic_confidence = panopticConfidence(*instance);
    surface.point_cloud.reserve(pixels.size());
    for (const PixelCoord& p : pixels) {
      surface.point_cloud.push_back(backproject(
          p.u, p.v, frame.depth(p.u, p.v), frame.intrinsics, frame.pose));
    }
    surface.pixels = std::move(pixels);
    surfaces.push_back(std::move(surface));
  }
  return surfaces;
}

}  // namespace spmap
