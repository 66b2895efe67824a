#include "spmap/synth/renderer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

namespace spmap {

namespace {

constexpr double kRayEpsilon = 1e-9;

// Nearest positive hit parameter of a ray with one primitive, in the ray
// parameterization p = origin + t * direction (t equals camera depth when
// direction has unit z in the camera frame).
std::optional<double> intersectPrimitive(const ScenePrimitive& primitive,
                                         const Point3d& origin,
                                         const Vector3d& direction) {
  // Work in the primitive's local frame; rigid transforms preserve t.
  const Point3d o = primitive.pose.applyInverse(origin);
  const Vector3d d = primitive.pose.rotation().transpose() * direction;

  switch (primitive.shape) {
    case ScenePrimitive::Shape::kBox: {
      const Eigen::Vector3d half = primitive.size / 2.0;
      double t_near = -std::numeric_limits<double>::infinity();
      double t_far = std::numeric_limits<double>::infinity();
      for (int axis = 0; axis < 3; ++axis) {
        if (std::abs(d[axis]) < 1e-15) {
          if (std::abs(o[axis]) > half[axis]) {
            return std::nullopt;
          }
          continue;
        }
        double t0 = (-half[axis] - o[axis]) / d[axis];
        double t1 = (half[axis] - o[axis]) / d[axis];
        if (t0 > t1) {
          std::swap(t0, t1);
        }
        t_near = std::max(t_near, t0);
        t_far = std::min(t_far, t1);
      }
      if (t_near > t_far || t_far < kRayEpsilon) {
        return std::nullopt;
      }
      return t_near > kRayEpsilon ? t_near : t_far;
    }
    case ScenePrimitive::Shape::kSphere: {
      const double radius = primitive.size.x();
      const double a = d.squaredNorm();
      const double b = 2.0 * o.dot(d);
      const double c = o.squaredNorm() - radius * radius;
      const double discriminant = b * b - 4.0 * a * c;
      if (discriminant < 0.0) {
        return std::nullopt;
      }
      const double sqrt_disc = std::sqrt(discriminant);
      const double t0 = (-b - sqrt_disc) / (2.0 * a);
      const double t1 = (-b + sqrt_disc) / (2.0 * a);
      if (t0 > kRayEpsilon) return t0;
      if (t1 > kRayEpsilon) return t1;
      return std::nullopt;
    }
    case ScenePrimitive::Shape::kCylinder: {
      const double radius = primitive.size.x();
      const double half_height = primitive.size.z() / 2.0;
      std::optional<double> best;
      auto consider = [&](double t) {
        if (t > kRayEpsilon && (!best.has_value() || t < *best)) {
          best = t;
        }
      };
      // Lateral surface.
      const double a = d.x() * d.x() + d.y() * d.y();
      if (a > 1e-15) {
        const double b = 2.0 * (o.x() * d.x() + o.y() * d.y());
        const double c = o.x() * o.x() + o.y() * o.y() - radius * radius;
        const double discriminant = b * b - 4.0 * a * c;
        if (discriminant >= 0.0) {
          const double sqrt_disc = std::sqrt(discriminant);
          for (const double t :
               {(-b - sqrt_disc) / (2.0 * a), (-b + sqrt_disc) / (2.0 * a)}) {
            if (std::abs(o.z() + t * d.z()) <= half_height) {
              consider(t);
            }
          }
        }
      }
      // Caps.
      if (std::abs(d.z()) > 1e-15) {
        for (const double cap_z : {-half_height, half_height}) {
          const double t = (cap_z - o.z()) / d.z();
          const double x = o.x() + t * d.x();
          const double y = o.y() + t * d.y();
          if (x * x + y * y <= radius * radius) {
            consider(t);
          }
        }
      }
      return best;
    }
  }
  return std::nullopt;
}

enum class RoomFace { kFloor, kCeiling, kWall };

// Exit point of a ray from inside the room shell: the nearest face hit.
std::optional<std::pair<double, RoomFace>> intersectRoom(
    const RoomShell& room, const Point3d& origin, const Vector3d& direction) {
  std::optional<std::pair<double, RoomFace>> best;
  auto consider = [&](double t, RoomFace face) {
    if (t > kRayEpsilon && (!best.has_value() || t < best->first)) {
      best = {t, face};
    }
  };
  for (int axis = 0; axis < 3; ++axis) {
    if (std::abs(direction[axis]) < 1e-15) {
      continue;
    }
    for (const bool high : {false, true}) {
      // Faces with class 0 are open (no geometry there).
      if (axis == 2 && ((high && room.ceiling_class == 0) ||
                        (!high && room.floor_class == 0))) {
        continue;
      }
      if (axis != 2 && room.wall_class == 0) {
        continue;
      }
      const double plane = high ? room.max[axis] : room.min[axis];
      const double t = (plane - origin[axis]) / direction[axis];
      if (t <= kRayEpsilon) {
        continue;
      }
      const Point3d hit = origin + t * direction;
      bool inside = true;
      for (int other = 0; other < 3; ++other) {
        if (other == axis) {
          continue;
        }
        if (hit[other] < room.min[other] - 1e-9 ||
            hit[other] > room.max[other] + 1e-9) {
          inside = false;
          break;
        }
      }
      if (!inside) {
        continue;
      }
      RoomFace face = RoomFace::kWall;
      if (axis == 2) {
        face = high ? RoomFace::kCeiling : RoomFace::kFloor;
      }
      consider(t, face);
    }
  }
  return best;
}

double thingScore(const SceneSpec& scene, int frame_index,
                  uint32_t instance_id) {
  // Seeded per (frame, instance) so scores do not depend on visibility
  // order.
  std::seed_seq seq{scene.seed, static_cast<uint64_t>(frame_index) + 1,
                    static_cast<uint64_t>(instance_id) + 1};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> dist(scene.score_min,
                                              scene.score_max);
  return dist(rng);
}

}  // namespace

Frame renderFrame(const SceneSpec& scene, const Pose& pose, int frame_index) {
  const CameraIntrinsics& intrinsics = scene.intrinsics;
  Frame frame;
  frame.frame_index = frame_index;
  frame.pose = pose;
  frame.intrinsics = intrinsics;
  frame.depth = DepthImage(intrinsics.width, intrinsics.height, 0.f);
  frame.panoptic_mask = MaskImage(intrinsics.width, intrinsics.height, 0);

  // Scene instance -> frame-local id, in first-hit scan order.
  std::map<uint32_t, InstanceId> local_ids;
  std::map<uint32_t, std::pair<ClassId, ClassKind>> instance_class;

  const Point3d origin = pose.translation();
  for (int v = 0; v < intrinsics.height; ++v) {
    for (int u = 0; u < intrinsics.width; ++u) {
      // Camera-frame ray with unit z, so the hit parameter is the depth.
      const Vector3d direction =
          pose.rotation() * pixelRay(u, v, intrinsics);

      double best_t = std::numeric_limits<double>::infinity();
      ClassId category = kBackgroundClass;
      uint32_t scene_instance = 0;
      for (const ScenePrimitive& primitive : scene.objects) {
        const std::optional<double> t =
            intersectPrimitive(primitive, origin, direction);
        if (t.has_value() && *t < best_t) {
          best_t = *t;
          category = primitive.category;
          scene_instance = primitive.instance_id;
        }
      }
      if (scene.room.has_value()) {
        const auto room_hit = intersectRoom(*scene.room, origin, direction);
        if (room_hit.has_value() && room_hit->first < best_t) {
          best_t = room_hit->first;
          switch (room_hit->second) {
            case RoomFace::kFloor:
              category = scene.room->floor_class;
              scene_instance = scene.room->floor_instance;
              break;
            case RoomFace::kCeiling:
              category = scene.room->ceiling_class;
              scene_instance = scene.room->ceiling_instance;
              break;
            case RoomFace::kWall:
              category = scene.room->wall_class;
              scene_instance = scene.room->wall_instance;
              break;
          }
        }
      }
      if (!std::isfinite(best_t)) {
        continue;  // empty scene direction: invalid depth
      }

      frame.depth(u, v) = static_cast<float>(best_t);
      if (scene_instance == 0) {
        continue;
      }
      auto it = local_ids.find(scene_instance);
      if (it == local_ids.end()) {
        const InstanceId local =
            static_cast<InstanceId>(local_ids.size() + 1);
        it = local_ids.emplace(scene_instance, local).first;
        instance_class[scene_instance] = {
            category, scene.classes.kind(category)};
      }
      frame.panoptic_mask(u, v) = it->second;
    }
  }

  for (const auto& [scene_instance, local_id] : local_ids) {
    const auto& [category, kind] = instance_class[scene_instance];
    PanopticInstance instance;
    instance.instance_id = local_id;
    instance.category = category;
    instance.kind = kind;
    instance.score = kind == ClassKind::kThing
                         ? thingScore(scene, frame_index, scene_instance)
                         : 0.0;
    frame.instances.push_back(instance);
  }
  return frame;
}

std::vector<Frame> renderSequence(const SceneSpec& scene) {
  std::vector<Frame> frames;
  frames.reserve(scene.trajectory.size());
  for (size_t i = 0; i < scene.trajectory.size(); ++i) {
    frames.push_back(
        renderFrame(scene, scene.trajectory[i], static_cast<int>(i)));
  }
  return frames;
}

namespace {

void addPoint(LabeledPoints* out, const Point3d& p, ClassId category,
              uint32_t instance) {
  out->positions.push_back(p.cast<float>());
  out->semantic_ids.push_back(category);
  out->instance_ids.push_back(instance);
  out->superpoint_ids.push_back(0);
}

void sampleBox(LabeledPoints* out, const ScenePrimitive& primitive,
               double resolution) {
  const Eigen::Vector3d half = primitive.size / 2.0;
  // Six faces; grid at cell centers.
  for (int axis = 0; axis < 3; ++axis) {
    const int a1 = (axis + 1) % 3;
    const int a2 = (axis + 2) % 3;
    const int n1 = std::max(1, static_cast<int>(
                                   std::round(primitive.size[a1] / resolution)));
    const int n2 = std::max(1, static_cast<int>(
                                   std::round(primitive.size[a2] / resolution)));
    for (const double sign : {-1.0, 1.0}) {
      for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
          Point3d local;
          local[axis] = sign * half[axis];
          local[a1] = -half[a1] + (i + 0.5) * primitive.size[a1] / n1;
          local[a2] = -half[a2] + (j + 0.5) * primitive.size[a2] / n2;
          addPoint(out, primitive.pose.apply(local), primitive.category,
                   primitive.instance_id);
        }
      }
    }
  }
}

void sampleSphere(LabeledPoints* out, const ScenePrimitive& primitive,
                  double resolution) {
  const double radius = primitive.size.x();
  const double area = 4.0 * std::numbers::pi * radius * radius;
  const int n = std::max(
      1, static_cast<int>(std::round(area / (resolution * resolution))));
  // Fibonacci sphere: near-uniform area per sample.
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r_xy = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    const Point3d local(radius * r_xy * std::cos(phi),
                        radius * r_xy * std::sin(phi), radius * z);
    addPoint(out, primitive.pose.apply(local), primitive.category,
             primitive.instance_id);
  }
}

void sampleCylinder(LabeledPoints* out, const ScenePrimitive& primitive,
                    double resolution) {
  const double radius = primitive.size.x();
  const double height = primitive.size.z();
  const int n_around = std::max(
      3, static_cast<int>(std::round(2.0 * std::numbers::pi * radius /
                                     resolution)));
  const int n_height =
      std::max(1, static_cast<int>(std::round(height / resolution)));
  for (int i = 0; i < n_around; ++i) {
    const double phi = 2.0 * std::numbers::pi * (i + 0.5) / n_around;
    for (int j = 0; j < n_height; ++j) {
      const double z = -height / 2.0 + (j + 0.5) * height / n_height;
      const Point3d local(radius * std::cos(phi), radius * std::sin(phi), z);
      addPoint(out, primitive.pose.apply(local), primitive.category,
               primitive.instance_id);
    }
  }
  // Caps as polar grids.
  const int n_radial =
      std::max(1, static_cast<int>(std::round(radius / resolution)));
  for (const double sign : {-1.0, 1.0}) {
    for (int i = 0; i < n_radial; ++i) {
      const double r = (i + 0.5) * radius / n_radial;
      const int n_ring = std::max(
          1, static_cast<int>(std::round(2.0 * std::numbers::pi * r /
                                         resolution)));
      for (int j = 0; j < n_ring; ++j) {
        const double phi = 2.0 * std::numbers::pi * (j + 0.5) / n_ring;
        const Point3d local(r * std::cos(phi), r * std::sin(phi),
                            sign * height / 2.0);
        addPoint(out, primitive.pose.apply(local), primitive.category,
                 primitive.instance_id);
      }
    }
  }
}

void sampleRoom(LabeledPoints* out, const RoomShell& room, double resolution) {
  const Eigen::Vector3d extent = room.max - room.min;
  for (int axis = 0; axis < 3; ++axis) {
    const int a1 = (axis + 1) % 3;
    const int a2 = (axis + 2) % 3;
    const int n1 =
        std::max(1, static_cast<int>(std::round(extent[a1] / resolution)));
    const int n2 =
        std::max(1, static_cast<int>(std::round(extent[a2] / resolution)));
    for (const bool high : {false, true}) {
      ClassId category = room.wall_class;
      uint32_t instance = room.wall_instance;
      if (axis == 2) {
        category = high ? room.ceiling_class : room.floor_class;
        instance = high ? room.ceiling_instance : room.floor_instance;
      }
      if (instance == 0) {
        continue;
      }
      for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
          Point3d p;
          p[axis] = high ? room.max[axis] : room.min[axis];
          p[a1] = room.min[a1] + (i + 0.5) * extent[a1] / n1;
          p[a2] = room.min[a2] + (j + 0.5) * extent[a2] / n2;
          addPoint(out, p, category, instance);
        }
      }
    }
  }
}

}  // namespace

LabeledPoints groundTruthPoints(const SceneSpec& scene, double resolution) {
  if (resolution <= 0.0) {
    throw std::invalid_argument("groundTruthPoints: resolution must be > 0");
  }
  LabeledPoints points;
  for (const ScenePrimitive& primitive : scene.objects) {
    switch (primitive.shape) {
      case ScenePrimitive::Shape::kBox:
        sampleBox(&points, primitive, resolution);
        break;
      case ScenePrimitive::Shape::kSphere:
        sampleSphere(&points, primitive, resolution);
        break;
      case ScenePrimitive::Shape::kCylinder:
        sampleCylinder(&points, primitive, resolution);
        break;
    }
  }
  if (scene.room.has_value()) {
    sampleRoom(&points, *scene.room, resolution);
  }
  return points;
}

}  // namespace spmap
