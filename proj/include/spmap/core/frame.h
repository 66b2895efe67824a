#ifndef SPMAP_CORE_FRAME_H_
#define SPMAP_CORE_FRAME_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spmap/core/camera.h"
#include "spmap/core/image.h"

namespace spmap {

using ClassId = uint16_t;
using InstanceId = uint16_t;  // frame-local panoptic instance id

// Semantic class 0 is the reserved background class; it is neither thing
// nor stuff and is merge-compatible with every other class.
constexpr ClassId kBackgroundClass = 0;

enum class ClassKind : uint8_t { kBackground, kThing, kStuff };

struct ClassInfo {
  ClassId id = 0;
  std::string name;
  ClassKind kind = ClassKind::kBackground;
};

// The configured semantic class set, partitioned into things, stuff, and the
// background class 0.
class ClassTable {
 public:
  ClassTable();

  void add(ClassId id, const std::string& name, ClassKind kind);
  bool contains(ClassId id) const { return classes_.count(id) > 0; }
  ClassKind kind(ClassId id) const;
  const std::string& name(ClassId id) const;
  bool isThing(ClassId id) const { return kind(id) == ClassKind::kThing; }
  bool isStuff(ClassId id) const { return kind(id) == ClassKind::kStuff; }

  const std::map<ClassId, ClassInfo>& classes() const { return classes_; }

 private:
  std::map<ClassId, ClassInfo> classes_;
};

struct PanopticInstance {
  InstanceId instance_id = 0;  // frame-local, nonzero
  ClassId category = 0;
  ClassKind kind = ClassKind::kThing;
  double score = 0.0;  // in (0, 1) for things, ignored for stuff
};

// One RGB-D observation: the unit of ingestion.
struct Frame {
  DepthImage depth;  // meters, 0 = invalid pixel
  std::optional<ColorImage> color;
  MaskImage panoptic_mask;  // frame-local instance ids, 0 = unlabeled
  std::vector<PanopticInstance> instances;
  Pose pose;  // camera-to-world
  CameraIntrinsics intrinsics;
  int frame_index = 0;

  const PanopticInstance* findInstance(InstanceId id) const;
};

enum class ViolationKind {
  kSizeMismatch,
  kBadIntrinsics,
  kBadPose,
  kNonFiniteDepth,
  kNegativeDepth,
  kUnknownInstanceId,
  kDuplicateInstanceId,
  kBadScore,
};

struct FrameViolation {
  ViolationKind kind;
  std::string message;
  // Populated where meaningful.
  int u = -1;
  int v = -1;
  InstanceId instance_id = 0;
};

// Checks every Frame invariant; returns one violation per failure and never
// throws.
std::vector<FrameViolation> validateFrame(const Frame& frame);

}  // namespace spmap

#endif  // SPMAP_CORE_FRAME_H_
