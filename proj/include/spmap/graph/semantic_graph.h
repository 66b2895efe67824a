#ifndef SPMAP_GRAPH_SEMANTIC_GRAPH_H_
#define SPMAP_GRAPH_SEMANTIC_GRAPH_H_

#include <iosfwd>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "spmap/core/frame.h"
#include "spmap/map/label_tsdf_map.h"

namespace spmap {

struct MissingVertexError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ClassConfidenceMap = std::map<ClassId, double>;
using SuperpointPair = std::pair<SuperpointLabel, SuperpointLabel>;

// Per-instance raycast result paired with the panoptic confidence of the
// observing instance.
struct InstanceRaycast {
  InstanceId instance_id = 0;
  ClassId category = 0;
  double panoptic_confidence = 0.0;
  std::map<SuperpointLabel, int> hits;  // superpoint -> ray hit count
};

// Superpoint graph: vertices carry per-class semantic confidences, edges
// carry per-class spatial-panoptic confidences. Both grow monotonically as
// frames are accumulated and fold under superpoint merges.
class SemanticGraph {
 public:
  struct Params {
    double sigma_spatial = 0.05;  // meters
    // Edge updates per instance consider at most this many superpoints,
    // keeping the pairwise update quadratic blowup bounded.
    int max_edge_superpoints = 8;
  };

  explicit SemanticGraph(const Params& params) : params_(params) {}

  const Params& params() const { return params_; }

  void ensureVertex(SuperpointLabel label) { vertices_.insert(label); }
  bool hasVertex(SuperpointLabel label) const {
    return vertices_.count(label) > 0;
  }

  // exp(-max(0, d - voxel_size) / sigma): 1 for touching superpoints,
  // decaying with separation.
  static double spatialConfidenceFromDistance(double distance_m,
                                              double voxel_size,
                                              double sigma_spatial);

  double spatialConfidence(SuperpointLabel a, SuperpointLabel b,
                           const LabelTsdfMap& map) const;

  // Applies the node update P += P_o * N and, for every pair of superpoints
  // hit by one instance, the edge update P += P_o * P_spatial * min(N1, N2).
  void accumulateFrame(const std::vector<InstanceRaycast>& raycasts,
                       const LabelTsdfMap& map);

  // Semantic argmax of a vertex; background when there is no evidence, ties
  // toward the smallest class id.
  ClassId initialSemantic(SuperpointLabel label) const;

  // Sums absorbed's confidences into survivor and re-keys incident edges;
  // the (survivor, absorbed) edge is dropped with its mass audited.
  void foldVertices(SuperpointLabel survivor, SuperpointLabel absorbed);

  void addNodeConfidence(SuperpointLabel label, ClassId category,
                         double confidence);
  void addEdgeConfidence(SuperpointLabel a, SuperpointLabel b,
                         ClassId category, double confidence);

  const ClassConfidenceMap* nodeConfidence(SuperpointLabel label) const;
  const ClassConfidenceMap* edgeConfidence(SuperpointLabel a,
                                           SuperpointLabel b) const;
  double edgeClassConfidence(SuperpointLabel a, SuperpointLabel b,
                             ClassId category) const;

  const std::set<SuperpointLabel>& vertices() const { return vertices_; }
  const std::map<SuperpointPair, ClassConfidenceMap>& edges() const {
    return edges_;
  }

  double totalNodeMass() const;
  double totalEdgeMass() const;
  // Mass of self-edges deleted by foldVertices, kept for audit checks.
  double droppedSelfEdgeMass() const { return dropped_self_edge_mass_; }

  // Line-oriented dump (sorted) for debugging and test fixtures.
  void dumpText(std::ostream& out) const;

 private:
  static SuperpointPair makeKey(SuperpointLabel a, SuperpointLabel b);

  Params params_;
  std::set<SuperpointLabel> vertices_;
  std::map<SuperpointLabel, ClassConfidenceMap> node_confidence_;
  std::map<SuperpointPair, ClassConfidenceMap> edges_;
  double dropped_self_edge_mass_ = 0.0;
};

}  // namespace spmap

#endif  // SPMAP_GRAPH_SEMANTIC_GRAPH_H_
