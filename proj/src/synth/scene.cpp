#include "spmap/synth/scene.h"

#include <Eigen/Geometry>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace spmap {

Pose lookAt(const Point3d& eye, const Point3d& target) {
  const Point3d up(0.0, 0.0, 1.0);
  Point3d forward = target - eye;
  const double norm = forward.norm();
  if (norm < 1e-12) {
    throw std::invalid_argument("lookAt: eye and target coincide");
  }
  forward /= norm;
  Point3d x_axis = forward.cross(up);
  if (x_axis.norm() < 1e-9) {
    // Looking straight up/down; pick an arbitrary horizontal right vector.
    x_axis = Point3d(1.0, 0.0, 0.0);
  }
  x_axis.normalize();
  const Point3d y_axis = forward.cross(x_axis).normalized();
  Eigen::Matrix3d rotation;
  rotation.col(0) = x_axis;
  rotation.col(1) = y_axis;
  rotation.col(2) = forward;
  return Pose(rotation, eye);
}

std::vector<Pose> orbitTrajectory(const Point3d& center, double radius,
                                  double height, int frames, double start_deg,
                                  double sweep_deg) {
  std::vector<Pose> trajectory;
  trajectory.reserve(frames);
  for (int i = 0; i < frames; ++i) {
    const double angle =
        (start_deg + sweep_deg * i / std::max(1, frames)) *
        std::numbers::pi / 180.0;
    const Point3d eye(center.x() + radius * std::cos(angle),
                      center.y() + radius * std::sin(angle),
                      center.z() + height);
    trajectory.push_back(lookAt(eye, center));
  }
  return trajectory;
}

namespace {

ClassKind parseKind(const std::string& word, int line_no) {
  if (word == "thing") return ClassKind::kThing;
  if (word == "stuff") return ClassKind::kStuff;
  if (word == "background") return ClassKind::kBackground;
  throw SceneParseError("scene line " + std::to_string(line_no) +
                        ": unknown class kind '" + word + "'");
}

Pose yawPose(const Point3d& center, double yaw_deg) {
  const double yaw = yaw_deg * std::numbers::pi / 180.0;
  return Pose(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ())
                  .toRotationMatrix(),
              center);
}

}  // namespace

SceneSpec parseSceneSpec(const std::string& text) {
  SceneSpec spec;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) {
      line.resize(hash);
    }
    std::istringstream tokens(line);
    std::string directive;
    if (!(tokens >> directive)) {
      continue;
    }
    auto fail = [&](const std::string& what) -> SceneParseError {
      return SceneParseError("scene line " + std::to_string(line_no) + ": " +
                             what);
    };

    if (directive == "class") {
      int id = 0;
      std::string name, kind;
      if (!(tokens >> id >> name >> kind)) {
        throw fail("expected: class <id> <name> <thing|stuff>");
      }
      spec.classes.add(static_cast<ClassId>(id), name,
                       parseKind(kind, line_no));
    } else if (directive == "camera") {
      if (!(tokens >> spec.intrinsics.fx >> spec.intrinsics.fy >>
            spec.intrinsics.cx >> spec.intrinsics.cy >>
            spec.intrinsics.width >> spec.intrinsics.height)) {
        throw fail("expected: camera <fx> <fy> <cx> <cy> <width> <height>");
      }
    } else if (directive == "room") {
      RoomShell room;
      int floor_class = 0, ceiling_class = 0, wall_class = 0;
      if (!(tokens >> room.min.x() >> room.min.y() >> room.min.z() >>
            room.max.x() >> room.max.y() >> room.max.z() >> floor_class >>
            ceiling_class >> wall_class)) {
        throw fail("expected: room <min xyz> <max xyz> <floor> <ceil> <wall>");
      }
      room.floor_class = static_cast<ClassId>(floor_class);
      room.ceiling_class = static_cast<ClassId>(ceiling_class);
      room.wall_class = static_cast<ClassId>(wall_class);
      // Fixed instance ids for the shell faces, clear of object ids.
      // Class 0 removes a face entirely (open-top rooms render invalid
      // depth upward, like sensor max-range dropout).
      room.floor_instance = room.floor_class != 0 ? 9001 : 0;
      room.ceiling_instance = room.ceiling_class != 0 ? 9002 : 0;
      room.wall_instance = room.wall_class != 0 ? 9003 : 0;
      spec.room = room;
    } else if (directive == "box") {
      int category = 0, instance = 0;
      Point3d center;
      Eigen::Vector3d size;
      double yaw = 0.0;
      if (!(tokens >> category >> instance >> center.x() >> center.y() >>
            center.z() >> size.x() >> size.y() >> size.z() >> yaw)) {
        throw fail("expected: box <class> <inst> <cx cy cz> <sx sy sz> <yaw>");
      }
      spec.objects.push_back(
          ScenePrimitive{ScenePrimitive::Shape::kBox,
                         static_cast<ClassId>(category),
                         static_cast<uint32_t>(instance), yawPose(center, yaw),
                         size});
    } else if (directive == "sphere") {
      int category = 0, instance = 0;
      Point3d center;
      double radius = 0.0;
      if (!(tokens >> category >> instance >> center.x() >> center.y() >>
            center.z() >> radius)) {
        throw fail("expected: sphere <class> <inst> <cx cy cz> <radius>");
      }
      spec.objects.push_back(ScenePrimitive{
          ScenePrimitive::Shape::kSphere, static_cast<ClassId>(category),
          static_cast<uint32_t>(instance), yawPose(center, 0.0),
          Eigen::Vector3d(radius, radius, radius)});
    } else if (directive == "cylinder") {
      int category = 0, instance = 0;
      Point3d center;
      double radius = 0.0, height = 0.0;
      if (!(tokens >> category >> instance >> center.x() >> center.y() >>
            center.z() >> radius >> height)) {
        throw fail("expected: cylinder <class> <inst> <cx cy cz> <r> <h>");
      }
      spec.objects.push_back(ScenePrimitive{
          ScenePrimitive::Shape::kCylinder, static_cast<ClassId>(category),
          static_cast<uint32_t>(instance), yawPose(center, 0.0),
          Eigen::Vector3d(radius, radius, height)});
    } else if (directive == "orbit") {
      Point3d center;
      double radius = 0.0, height = 0.0;
      int frames = 0;
      double start_deg = 0.0, sweep_deg = 360.0;
      if (!(tokens >> center.x() >> center.y() >> center.z() >> radius >>
            height >> frames)) {
        throw fail("expected: orbit <cx cy cz> <radius> <height> <frames>");
      }
      tokens >> start_deg >> sweep_deg;
      const std::vector<Pose> orbit = orbitTrajectory(
          center, radius, height, frames, start_deg, sweep_deg);
      spec.trajectory.insert(spec.trajectory.end(), orbit.begin(),
                             orbit.end());
    } else if (directive == "scores") {
      if (!(tokens >> spec.score_min >> spec.score_max)) {
        throw fail("expected: scores <min> <max>");
      }
    } else if (directive == "seed") {
      if (!(tokens >> spec.seed)) {
        throw fail("expected: seed <n>");
      }
    } else {
      throw fail("unknown directive '" + directive + "'");
    }
  }
  if (!spec.intrinsics.valid()) {
    throw SceneParseError("scene: missing or invalid camera directive");
  }
  if (spec.trajectory.empty()) {
    throw SceneParseError("scene: no trajectory (add an orbit directive)");
  }
  return spec;
}

SceneSpec loadSceneSpec(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw SceneParseError("cannot open scene file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parseSceneSpec(buffer.str());
}

SceneSpec threeObjectScene(int frames) {
  // Open-top room, floating objects, and a two-ring orbit: every labeled
  // surface is observable, so a clean run can reach the metric ceiling.
  const int high_ring = (2 * frames) / 3;
  const int low_ring = frames - high_ring;
  std::ostringstream scene;
  scene << "class 1 floor stuff\n"
        << "class 3 wall stuff\n"
        << "class 10 chair thing\n"
        << "class 11 table thing\n"
        << "class 12 bag thing\n"
        << "camera 160 160 120 90 240 180\n"
        << "room -1.6 -1.6 0 1.6 1.6 1.0 1 0 3\n"
        << "box 10 101 -0.45 0.0 0.55 0.4 0.4 0.4 15\n"
        << "sphere 11 102 0.45 -0.3 0.55 0.26\n"
        << "cylinder 12 103 0.15 0.55 0.55 0.2 0.45\n"
        << "orbit 0 0 0.45 1.05 0.4 " << high_ring << " 0 360\n"
        << "orbit 0 0 0.55 1.15 -0.33 " << low_ring << " 9 360\n"
        << "seed 7\n";
  return parseSceneSpec(scene.str());
}

SceneSpec clutteredSixScene(int frames) {
  const int high_ring = (2 * frames) / 3;
  const int low_ring = frames - high_ring;
  std::ostringstream scene;
  scene << "class 1 floor stuff\n"
        << "class 3 wall stuff\n"
        << "class 10 chair thing\n"
        << "class 11 table thing\n"
        << "class 12 bag thing\n"
        << "camera 160 160 120 90 240 180\n"
        << "room -1.8 -1.8 0 1.8 1.8 1.1 1 0 3\n"
        // Two nearly touching boxes of different classes: their facing
        // surfaces share contact voxels, so only the semantic merge
        // condition keeps their superpoints apart.
        << "box 10 101 -0.75 0.0 0.40 0.36 0.36 0.36 0\n"
        << "box 11 102 -0.365 0.0 0.44 0.4 0.36 0.48 0\n"
        << "box 10 103 0.8 0.25 0.4 0.36 0.36 0.36 40\n"
        << "sphere 12 104 0.05 0.75 0.45 0.22\n"
        << "cylinder 11 105 -0.6 0.85 0.5 0.18 0.5\n"
        << "sphere 10 106 0.85 -0.75 0.45 0.2\n"
        << "orbit 0 0 0.45 1.1 0.45 " << high_ring << " 0 360\n"
        << "orbit 0 0 0.55 1.2 -0.33 " << low_ring << " 9 360\n"
        << "seed 11\n";
  return parseSceneSpec(scene.str());
}

}  // namespace spmap
