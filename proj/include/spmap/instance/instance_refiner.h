#ifndef SPMAP_INSTANCE_INSTANCE_REFINER_H_
#define SPMAP_INSTANCE_INSTANCE_REFINER_H_

#include <cstdint>
#include <map>
#include <vector>

#include "spmap/graph/semantic_graph.h"
#include "spmap/superpoint/superpoint_manager.h"

namespace spmap {

// One semantic-instance: a set of same-class superpoints.
struct InstanceGroup {
  uint32_t id = 0;
  ClassId category = kBackgroundClass;
  std::vector<SuperpointLabel> members;  // ascending, non-empty
  double confidence = 0.0;               // strongest internal edge
};

struct InstanceRefinerParams {
  double detach_threshold = 0.05;    // vs. the instance confidence
  double instance_threshold = 0.02;  // attach test vs. neighbor instance
  double node_threshold = 0.5;      // attach test vs. the node's best edge
  // Per-class overrides, falling back to the defaults above.
  std::map<ClassId, double> detach_by_class;
  std::map<ClassId, double> instance_by_class;
  std::map<ClassId, double> node_by_class;

  double detachFor(ClassId c) const;
  double instanceFor(ClassId c) const;
  double nodeFor(ClassId c) const;
};

// Strongest class-C edge between two members of the instance; 0 for
// singletons.
double instanceConfidence(const InstanceGroup& instance,
                          const SemanticGraph& graph);

// Groups each class's superpoints by their strongest data-association track
// (vote-less superpoints become singletons). Instance ids are minted from
// *next_instance_id in deterministic order.
std::vector<InstanceGroup> initialInstances(
    const std::map<SuperpointLabel, ClassId>& semantics,
    const std::map<SuperpointLabel, SuperpointRecord>& records,
    uint32_t* next_instance_id);

// Detach-and-reattach refinement of one class's instances: weakly connected
// members are detached, then reattached (strongest first) to a neighboring
// instance passing both confidence tests, or to a fresh instance.
std::vector<InstanceGroup> refineClass(
    ClassId category, const std::vector<InstanceGroup>& instances,
    const SemanticGraph& graph, const InstanceRefinerParams& params,
    uint32_t* next_instance_id);

// Runs refineClass over every thing class present (ascending class order);
// stuff and unknown classes pass through with confidences filled in, since
// they carry no countable instances to refine.
std::vector<InstanceGroup> refineAllClasses(
    const std::vector<InstanceGroup>& instances, const SemanticGraph& graph,
    const InstanceRefinerParams& params, const ClassTable& classes,
    uint32_t* next_instance_id);

}  // namespace spmap

#endif  // SPMAP_INSTANCE_INSTANCE_REFINER_H_
