#ifndef SPMAP_FUSION_SURFACE_FUSION_H_
#define SPMAP_FUSION_SURFACE_FUSION_H_

#include <cstdint>
#include <vector>

#include "spmap/core/camera.h"
#include "spmap/core/frame.h"
#include "spmap/segmentation/depth_segmentation.h"

namespace spmap {

struct SurfaceFusionParams {
  // Intersections with fewer valid-depth pixels than this are dropped.
  int min_surface_px = 20;
};

// A frame-wise surface patch: the intersection of one panoptic instance mask
// with one geometric segment, the atomic unit of 3D integration.
struct Surface {
  uint32_t surface_id = 0;  // frame-local, 1-based
  InstanceId instance_id = 0;
  uint32_t segment_id = 0;
  ClassId category = 0;
  ClassKind kind = ClassKind::kThing;
  double panoptic_confidence = 0.0;  // in (0, 1]
  std::vector<PixelCoord> pixels;    // valid-depth pixels only
  std::vector<Point3d> point_cloud;  // world frame, one per pixel
};

// Panoptic prediction confidence: the detector score for things, 0.5 for
// stuff. Background and unknown kinds are rejected.
double panopticConfidence(const PanopticInstance& instance);

// Intersects the frame's panoptic mask with the geometric segments. Each
// surface is uniquely associated with one (instance, segment) pair and
// carries its backprojected world-frame point cloud.
std::vector<Surface> fuseMasks(const Frame& frame,
                               const DepthSegmentation& segmentation,
                               const SurfaceFusionParams& params);

}  // namespace spmap

#endif  // SPMAP_FUSION_SURFACE_FUSION_H_
