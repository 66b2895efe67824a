#ifndef SPMAP_SUPERPOINT_SUPERPOINT_MANAGER_H_
#define SPMAP_SUPERPOINT_SUPERPOINT_MANAGER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "spmap/fusion/surface_fusion.h"
#include "spmap/graph/semantic_graph.h"
#include "spmap/map/label_tsdf_map.h"

namespace spmap {

struct EmptySurfaceError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

using GlobalInstanceId = uint32_t;  // persistent data-association track id

// Bookkeeping for one live superpoint.
struct SuperpointRecord {
  SuperpointLabel label = 0;
  uint64_t point_count = 0;  // points voted into the map
  // Observation counts per persistent instance track.
  std::map<GlobalInstanceId, uint64_t> instance_votes;

  // Track with the maximum observation count; ties toward the smallest id.
  std::optional<GlobalInstanceId> topInstance() const;
};

struct SurfaceAssignmentResult {
  SuperpointLabel label = 0;
  bool created_new = false;
  // Superpoints whose overlap passed the significance threshold, ascending.
  std::vector<SuperpointLabel> significant_overlaps;
};

struct MergeEvent {
  SuperpointLabel survivor = 0;
  SuperpointLabel absorbed = 0;
  ClassId survivor_class = kBackgroundClass;
  ClassId absorbed_class = kBackgroundClass;
  int overlap_count = 0;
};

// Assigns frame surfaces to global superpoints by voxel overlap, maintains
// the pairwise overlap matrix, and merges superpoints that are spatially
// connected and semantically consistent.
class SuperpointManager {
 public:
  struct Params {
    double min_overlap_ratio = 0.25;
    int min_overlap_voxels = 10;
    int merge_threshold = 3;  // merge requires strictly more co-observations
    // Merge condition 2: equal semantics or one side background. Disabled
    // for ablation runs.
    bool semantic_consistency = true;
  };

  explicit SuperpointManager(const Params& params) : params_(params) {}

  const Params& params() const { return params_; }

  // Counts the surface's points per current voxel label, assigns the surface
  // to the strongest candidate past the threshold (or mints a fresh label),
  // and casts one vote per point for the assigned label.
  SurfaceAssignmentResult assignSurface(const Surface& surface,
                                        LabelTsdfMap* map,
                                        SemanticGraph* graph);

  // Increments the overlap matrix for every unordered pair in the
  // significant-overlap set of one surface.
  void updateOverlapMatrix(const std::vector<SuperpointLabel>& significant);

  // Repeats merge passes until no pair is both spatially connected and
  // semantically consistent; applies vote renames, graph folds, and record
  // folds. Returns the events of this call (also appended to the audit log).
  std::vector<MergeEvent> mergeSuperpoints(LabelTsdfMap* map,
                                           SemanticGraph* graph);

  // Data association: matches one frame instance's raycast hits against the
  // existing tracks (excluding ids already claimed this frame) or mints a new
  // track, then adds hit-weighted observation counts.
  GlobalInstanceId associateInstanceObservation(
      const std::map<SuperpointLabel, int>& hits,
      std::set<GlobalInstanceId>* claimed_this_frame);

  const std::map<SuperpointLabel, SuperpointRecord>& records() const {
    return records_;
  }
  const std::map<SuperpointPair, int>& overlapMatrix() const {
    return overlap_matrix_;
  }
  const std::vector<MergeEvent>& auditLog() const { return audit_log_; }
  uint64_t totalOverlapMass() const;
  SuperpointLabel peekNextLabel() const { return next_label_; }

 private:
  SuperpointLabel mintLabel() { return next_label_++; }

  Params params_;
  SuperpointLabel next_label_ = 1;
  GlobalInstanceId next_instance_ = 1;
  std::map<SuperpointLabel, SuperpointRecord> records_;
  std::map<SuperpointPair, int> overlap_matrix_;
  std::vector<MergeEvent> audit_log_;
};

}  // namespace spmap

#endif  // SPMAP_SUPERPOINT_SUPERPOINT_MANAGER_H_
