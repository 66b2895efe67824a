#include "spmap/core/frame.h"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace spmap {

ClassTable::ClassTable() {
  classes_[kBackgroundClass] =
      ClassInfo{kBackgroundClass, "background", ClassKind::kBackground};
}

void ClassTable::add(ClassId id, const std::string& name, ClassKind kind) {
  if (id == kBackgroundClass) {
    if (kind != ClassKind::kBackground) {
      throw std::invalid_argument(
          "ClassTable: class 0 is reserved for the background");
    }
    return;
  }
  auto [it, inserted] = classes_.emplace(id, ClassInfo{id, name, kind});
  if (!inserted && it->second.kind != kind) {
    throw std::invalid_argument("ClassTable: conflicting kind for class " +
                                std::to_string(id));
  }
}

ClassKind ClassTable::kind(ClassId id) const {
  auto it = classes_.find(id);
  if (it == classes_.end()) {
    throw std::out_of_range("ClassTable: unknown class " + std::to_string(id));
  }
  return it->second.kind;
}

const std::string& ClassTable::name(ClassId id) const {
  auto it = classes_.find(id);
  if (it == classes_.end()) {
    throw std::out_of_range("ClassTable: unknown class " + std::to_string(id));
  }
  return it->second.name;
}

const PanopticInstance* Frame::findInstance(InstanceId id) const {
  for (const PanopticInstance& instance : instances) {
    if (instance.instance_id == id) {
      return &instance;
    }
  }
  return nullptr;
}

namespace {

void addViolation(std::vector<FrameViolation>* out, ViolationKind kind,
                  const std::string& message) {
  out->push_back(FrameViolation{kind, message});
}

}  // namespace

std::vector<FrameViolation> validateFrame(const Frame& frame) {
  std::vector<FrameViolation> violations;

  const int w = frame.depth.width();
  const int h = frame.depth.height();
  if (frame.panoptic_mask.width() != w || frame.panoptic_mask.height() != h) {
    addViolation(&violations, ViolationKind::kSizeMismatch,
                 "panoptic_mask size differs from depth");
  }
  if (frame.color.has_value() &&
      (frame.color->width() != w || frame.color->height() != h)) {
    addViolation(&violations, ViolationKind::kSizeMismatch,
                 "color size differs from depth");
  }
  if (!frame.intrinsics.valid()) {
    addViolation(&violations, ViolationKind::kBadIntrinsics,
                 "intrinsics out of range");
  } else if (frame.intrinsics.width != w || frame.intrinsics.height != h) {
    addViolation(&violations, ViolationKind::kSizeMismatch,
                 "intrinsics size differs from depth image");
  }
  if (!frame.pose.valid()) {
    addViolation(&violations, ViolationKind::kBadPose,
                 "pose rotation is not a proper rotation matrix");
  }

  // Depth values must be finite and >= 0; report the first offending pixel
  // of each kind.
  bool saw_non_finite = false;
  bool saw_negative = false;
  for (int v = 0; v < h && !(saw_non_finite && saw_negative); ++v) {
    for (int u = 0; u < w; ++u) {
      const float d = frame.depth(u, v);
      if (!saw_non_finite && !std::isfinite(d)) {
        std::ostringstream msg;
        msg << "non-finite depth at pixel (" << u << ", " << v << ")";
        FrameViolation violation{ViolationKind::kNonFiniteDepth, msg.str()};
        violation.u = u;
        violation.v = v;
        violations.push_back(violation);
        saw_non_finite = true;
      } else if (!saw_negative && std::isfinite(d) && d < 0.f) {
        std::ostringstream msg;
        msg << "negative depth at pixel (" << u << ", " << v << ")";
        FrameViolation violation{ViolationKind::kNegativeDepth, msg.str()};
        violation.u = u;
        violation.v = v;
        violations.push_back(violation);
        saw_negative = true;
      }
    }
  }

  std::set<InstanceId> declared;
  for (const PanopticInstance& instance : frame.instances) {
    if (!declared.insert(instance.instance_id).second) {
      FrameViolation violation{
          ViolationKind::kDuplicateInstanceId,
          "duplicate instance id " + std::to_string(instance.instance_id)};
      violation.instance_id = instance.instance_id;
      violations.push_back(violation);
    }
    if (instance.kind == ClassKind::kThing &&
        !(instance.score > 0.0 && instance.score < 1.0)) {
      FrameViolation violation{
          ViolationKind::kBadScore,
          "thing instance " + std::to_string(instance.instance_id) +
              " has score outside (0, 1)"};
      violation.instance_id = instance.instance_id;
      violations.push_back(violation);
    }
  }

  std::set<InstanceId> reported_unknown;
  if (frame.panoptic_mask.width() == w && frame.panoptic_mask.height() == h) {
    for (int v = 0; v < h; ++v) {
      for (int u = 0; u < w; ++u) {
        const InstanceId id = frame.panoptic_mask(u, v);
        if (id != 0 && declared.count(id) == 0 &&
            reported_unknown.insert(id).second) {
          FrameViolation violation{
              ViolationKind::kUnknownInstanceId,
              "mask instance id " + std::to_string(id) +
                  " has no PanopticInstance entry"};
          violation.instance_id = id;
          violation.u = u;
          violation.v = v;
          violations.push_back(violation);
        }
      }
    }
  }

  return violations;
}

}  // namespace spmap
