#ifndef SPMAP_SYNTH_SCENE_H_
#define SPMAP_SYNTH_SCENE_H_

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "spmap/core/camera.h"
#include "spmap/core/frame.h"

namespace spmap {

struct SceneParseError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Analytic primitive in its own local frame: box centered at the origin with
// full extents size, sphere of radius size.x(), z-axis cylinder with radius
// size.x() and height size.z().
struct ScenePrimitive {
  enum class Shape { kBox, kSphere, kCylinder };
  Shape shape = Shape::kBox;
  ClassId category = 0;
  uint32_t instance_id = 0;
  Pose pose;
  Eigen::Vector3d size = Eigen::Vector3d::Ones();
};

// Axis-aligned room shell seen from the inside. Faces are stuff: floor
// (z min), ceiling (z max), and the four walls as one instance.
struct RoomShell {
  Eigen::Vector3d min = Eigen::Vector3d::Zero();
  Eigen::Vector3d max = Eigen::Vector3d::Ones();
  ClassId floor_class = 0;
  ClassId ceiling_class = 0;
  ClassId wall_class = 0;
  uint32_t floor_instance = 0;
  uint32_t ceiling_instance = 0;
  uint32_t wall_instance = 0;
};

struct SceneSpec {
  ClassTable classes;
  std::optional<RoomShell> room;
  std::vector<ScenePrimitive> objects;
  std::vector<Pose> trajectory;  // camera-to-world
  CameraIntrinsics intrinsics;
  // Synthetic thing detection scores are drawn uniformly from this interval.
  double score_min = 0.6;
  double score_max = 0.95;
  uint64_t seed = 0;
};

// Camera pose at eye looking at target, world +z up, image +y down.
Pose lookAt(const Point3d& eye, const Point3d& target);

// Circular trajectory around (center), at the given radius and eye height,
// always looking at the center.
std::vector<Pose> orbitTrajectory(const Point3d& center, double radius,
                                  double height, int frames,
                                  double start_deg = 0.0,
                                  double sweep_deg = 360.0);

// Line-oriented scene description (class/camera/room/box/sphere/cylinder/
// orbit/scores/seed directives); see README for the format.
SceneSpec parseSceneSpec(const std::string& text);
SceneSpec loadSceneSpec(const std::string& path);

// Built-in scenes used by the test suites and the CLI presets.
SceneSpec threeObjectScene(int frames = 60);
SceneSpec clutteredSixScene(int frames = 60);

}  // namespace spmap

#endif  // SPMAP_SYNTH_SCENE_H_
