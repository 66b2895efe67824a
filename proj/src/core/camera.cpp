#include "spmap/core/camera.h"

#include <cmath>

namespace spmap {

Point3d backproject(double u, double v, double depth_m,
                    const CameraIntrinsics& intrinsics, const Pose& pose) {
  if (!std::isfinite(depth_m) || depth_m <= 0.0) {
    throw InvalidDepthError("backproject: depth must be finite and > 0");
  }
  const Point3d p_camera((u - intrinsics.cx) * depth_m / intrinsics.fx,
                         (v - intrinsics.cy) * depth_m / intrinsics.fy,
                         depth_m);
  return pose.apply(p_camera);
}

Vector3d pixelRay(double u, double v, const CameraIntrinsics& intrinsics) {
  return Vector3d((u - intrinsics.cx) / intrinsics.fx,
                  (v - intrinsics.cy) / intrinsics.fy, 1.0);
}

std::optional<PixelDepth> projectToPixel(const Point3d& p_world,
                                         const CameraIntrinsics& intrinsics,
                                         const Pose& pose) {
  const Point3d p_camera = pose.applyInverse(p_world);
  if (p_camera.z() <= 0.0) {
    return std::nullopt;
  }
  PixelDepth result;
  result.u = intrinsics.fx * p_camera.x() / p_camera.z() + intrinsics.cx;
  result.v = intrinsics.fy * p_camera.y() / p_camera.z() + intrinsics.cy;
  result.depth = p_camera.z();
  return result;
}

}  // namespace spmap
