#include "spmap/segmentation/normal_estimation.h"

#include <cmath>

namespace spmap {

namespace {

// Central differences across a depth discontinuity produce meaningless
// tangents; neighbors further than this from the center depth invalidate
// the normal.
bool depthCompatible(float center, float neighbor) {
  return std::abs(neighbor - center) <=
         std::max(0.05f, 0.1f * std::abs(center));
}

}  // namespace

NormalImage estimateNormals(const DepthImage& depth,
                            const CameraIntrinsics& intrinsics) {
  const int w = depth.width();
  const int h = depth.height();
  NormalImage normals(w, h, Eigen::Vector3f::Zero());

  auto cameraPoint = [&](int u, int v, float d) -> Eigen::Vector3f {
    return Eigen::Vector3f(
        static_cast<float>((u - intrinsics.cx) * d / intrinsics.fx),
        static_cast<float>((v - intrinsics.cy) * d / intrinsics.fy), d);
  };

  for (int v = 1; v + 1 < h; ++v) {
    for (int u = 1; u + 1 < w; ++u) {
      const float d = depth(u, v);
      if (d <= 0.f || !std::isfinite(d)) {
        continue;
      }
      const float d_left = depth(u - 1, v);
      const float d_right = depth(u + 1, v);
      const float d_up = depth(u, v - 1);
      const float d_down = depth(u, v + 1);
      if (d_left <= 0.f || d_right <= 0.f || d_up <= 0.f || d_down <= 0.f) {
        continue;
      }
      if (!depthCompatible(d, d_left) || !depthCompatible(d, d_right) ||
          !depthCompatible(d, d_up) || !depthCompatible(d, d_down)) {
        continue;
      }

      const Eigen::Vector3f tangent_u =
          cameraPoint(u + 1, v, d_right) - cameraPoint(u - 1, v, d_left);
      const Eigen::Vector3f tangent_v =
          cameraPoint(u, v + 1, d_down) - cameraPoint(u, v - 1, d_up);
      Eigen::Vector3f normal = tangent_u.cross(tangent_v);
      const float norm = normal.norm();
      if (norm < 1e-12f) {
        continue;
      }
      normal /= norm;
      // Orient toward the camera: against the viewing ray of this pixel.
      const Eigen::Vector3f ray = cameraPoint(u, v, d);
      if (normal.dot(ray) > 0.f) {
        normal = -normal;
      }
      normals(u, v) = normal;
    }
  }
  return normals;
}

}  // namespace spmap
