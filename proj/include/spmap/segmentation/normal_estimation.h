#ifndef SPMAP_SEGMENTATION_NORMAL_ESTIMATION_H_
#define SPMAP_SEGMENTATION_NORMAL_ESTIMATION_H_

#include <Eigen/Core>

#include "spmap/core/camera.h"
#include "spmap/core/image.h"

namespace spmap {

using NormalImage = Image<Eigen::Vector3f>;

// Per-pixel surface normals in the camera frame, oriented toward the camera.
// Computed from central differences of the backprojected depth; the zero
// vector marks pixels where the normal is undefined (invalid depth, image
// border, or invalid neighbors).
NormalImage estimateNormals(const DepthImage& depth,
                            const CameraIntrinsics& intrinsics);

}  // namespace spmap

#endif  // SPMAP_SEGMENTATION_NORMAL_ESTIMATION_H_
