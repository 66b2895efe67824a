#ifndef SPMAP_SEGMENTATION_DEPTH_SEGMENTATION_H_
#define SPMAP_SEGMENTATION_DEPTH_SEGMENTATION_H_

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "spmap/core/camera.h"
#include "spmap/core/image.h"
#include "spmap/segmentation/normal_estimation.h"

namespace spmap {

struct DepthSegmentationParams {
  // Concave creases split when the normal angle exceeds this; convex creases
  // always join.
  double max_concavity_deg = 10.0;
  // Adjacent pixels further apart in depth than this never join.
  double max_step_m = 0.05;
  // Segments below this pixel count are discarded (pixels left unassigned).
  int min_segment_px = 100;
};

struct PixelCoord {
  int u = 0;
  int v = 0;
  bool operator==(const PixelCoord&) const = default;
};

// A frame-local convex surface patch extracted from the depth image.
struct GeometricSegment {
  uint32_t segment_id = 0;  // 1-based, frame-local
  std::vector<PixelCoord> pixels;
  Eigen::Vector3f mean_normal = Eigen::Vector3f::Zero();
};

struct DepthSegmentation {
  std::vector<GeometricSegment> segments;
  // 0 = unassigned, otherwise the segment_id covering the pixel.
  Image<uint32_t> segment_ids;
};

// Region growing over the 4-neighborhood: neighbors join when the depth step
// stays below max_step_m and the surface pair is convex or nearly flat.
// Deterministic for identical inputs.
DepthSegmentation segmentDepth(const DepthImage& depth,
                               const NormalImage& normals,
                               const CameraIntrinsics& intrinsics,
                               const DepthSegmentationParams& params);

}  // namespace spmap

#endif  // SPMAP_SEGMENTATION_DEPTH_SEGMENTATION_H_
