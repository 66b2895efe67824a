#include "spmap/segmentation/depth_segmentation.h"

#include <cmath>
#include <deque>
#include <numbers>

namespace spmap {

namespace {

struct PairTester {
  const DepthImage& depth;
  const NormalImage& normals;
  const CameraIntrinsics& intrinsics;
  double max_step_m;
  double cos_max_concavity;

  Eigen::Vector3f cameraPoint(int u, int v) const {
    const float d = depth(u, v);
    return Eigen::Vector3f(
        static_cast<float>((u - intrinsics.cx) * d / intrinsics.fx),
        static_cast<float>((v - intrinsics.cy) * d / intrinsics.fy), d);
  }

  // True when pixels a and b may share a segment.
  bool joinable(const PixelCoord& a, const PixelCoord& b) const {
    const float da = depth(a.u, a.v);
    const float db = depth(b.u, b.v);
    if (std::abs(da - db) > max_step_m) {
      return false;
    }
    const Eigen::Vector3f& na = normals(a.u, a.v);
    const Eigen::Vector3f& nb = normals(b.u, b.v);
    // Normals undefined at borders and discontinuities; the step test alone
    // decides there.
    if (na.isZero() || nb.isZero()) {
      return true;
    }
    if (na.dot(nb) >= cos_max_concavity) {
      return true;  // near-flat pair
    }
    // Convexity: the normals open away from each other along the crease.
    const Eigen::Vector3f pa = cameraPoint(a.u, a.v);
    const Eigen::Vector3f pb = cameraPoint(b.u, b.v);
    return (na - nb).dot(pa - pb) > 0.f;
  }
};

}  // namespace

DepthSegmentation segmentDepth(const DepthImage& depth,
                               const NormalImage& normals,
                               const CameraIntrinsics& intrinsics,
                               const DepthSegmentationParams& params) {
  const int w = depth.width();
  const int h = depth.height();
  DepthSegmentation result;
  result.segment_ids = Image<uint32_t>(w, h, 0u);

  const PairTester tester{
      depth, normals, intrinsics, params.max_step_m,
      std::cos(params.max_concavity_deg * std::numbers::pi / 180.0)};

  Image<uint32_t> component(w, h, 0u);
  std::vector<std::vector<PixelCoord>> components;  // index = component id - 1

  constexpr int du[4] = {1, -1, 0, 0};
  constexpr int dv[4] = {0, 0, 1, -1};

  // Scanline seeding keeps growth order, and thus output, deterministic.
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (component(u, v) != 0 || depth(u, v) <= 0.f) {
        continue;
      }
      const uint32_t id = static_cast<uint32_t>(components.size()) + 1;
      components.emplace_back();
      std::vector<PixelCoord>& pixels = components.back();

      std::deque<PixelCoord> queue;
      component(u, v) = id;
      queue.push_back({u, v});
      while (!queue.empty()) {
        const PixelCoord p = queue.front();
        queue.pop_front();
        pixels.push_back(p);
        for (int k = 0; k < 4; ++k) {
          const PixelCoord q{p.u + du[k], p.v + dv[k]};
          if (!depth.contains(q.u, q.v) || component(q.u, q.v) != 0 ||
              depth(q.u, q.v) <= 0.f) {
            continue;
          }
          // q joins only if it is compatible with every already-assigned
          // neighbor of this segment, so any adjacent in-segment pair has
          // passed the test directly.
          bool ok = true;
          for (int m = 0; m < 4 && ok; ++m) {
            const PixelCoord r{q.u + du[m], q.v + dv[m]};
            if (depth.contains(r.u, r.v) && component(r.u, r.v) == id) {
              ok = tester.joinable(r, q);
            }
          }
          if (ok) {
            component(q.u, q.v) = id;
            queue.push_back(q);
          }
        }
      }
    }
  }

  // Drop undersized components and renumber survivors compactly.
  std::vector<uint32_t> remap(components.size() + 1, 0u);
  for (size_t i = 0; i < components.size(); ++i) {
    if (static_cast<int>(components[i].size()) >= params.min_segment_px) {
      remap[i + 1] = static_cast<uint32_t>(result.segments.size()) + 1;
      GeometricSegment segment;
      segment.segment_id = remap[i + 1];
      segment.pixels = std::move(components[i]);
      Eigen::Vector3f normal_sum = Eigen::Vector3f::Zero();
      for (const PixelCoord& p : segment.pixels) {
        result.segment_ids(p.u, p.v) = segment.segment_id;
        normal_sum += normals(p.u, p.v);
      }
      const float norm = normal_sum.norm();
      if (norm > 1e-12f) {
        segment.mean_normal = normal_sum / norm;
      }
      result.segments.push_back(std::move(segment));
    }
  }
  return result;
}

}  // namespace spmap
