#ifndef SPMAP_MRF_ENERGY_H_
#define SPMAP_MRF_ENERGY_H_

#include <map>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "spmap/core/frame.h"
#include "spmap/graph/semantic_graph.h"
#include "spmap/map/label_tsdf_map.h"

namespace spmap {

struct ZeroEvidenceError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Final class per superpoint.
using Labeling = std::map<SuperpointLabel, ClassId>;

// Multi-label MRF over superpoints: unary potentials from normalized class
// evidence, pairwise potentials penalizing class changes across edges with
// little cross-evidence.
class EnergyProblem {
 public:
  struct Node {
    SuperpointLabel label = 0;
    ClassConfidenceMap evidence;  // per-class accumulated confidence
  };

  struct Edge {
    size_t node_a = 0;  // indices into nodes(); node_a < node_b label order
    size_t node_b = 0;
    double total_confidence = 0.0;  // class-summed edge confidence
  };

  EnergyProblem(std::vector<Node> nodes, std::vector<Edge> edges,
                std::vector<ClassId> class_set, double smoothing_weight,
                double smoothing_bandwidth, double epsilon_prob = 1e-6,
                double pairwise_scale = 1.0);

  // Builds the optimization problem from a graph snapshot. Vertices without
  // evidence are excluded (they stay pinned to the background class). With
  // normalize_pairwise, the cross-evidence statistic is divided by its
  // median over edges so the smoothing bandwidth acts on a scale-free
  // quantity regardless of accumulation length.
  static EnergyProblem fromGraph(const SemanticGraph& graph,
                                 double smoothing_weight,
                                 double smoothing_bandwidth,
                                 double epsilon_prob = 1e-6,
                                 bool include_background_class = true,
                                 bool normalize_pairwise = false);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<ClassId>& classSet() const { return class_set_; }
  double smoothingWeight() const { return smoothing_weight_; }
  double smoothingBandwidth() const { return smoothing_bandwidth_; }

  // Negative log of the node's (floored, renormalized) class probability.
  // Throws ZeroEvidenceError for nodes without evidence.
  double unaryPotential(size_t node_index, ClassId category) const;

  // Zero for equal classes; otherwise the smoothing penalty damped by the
  // cross-evidence statistic of this edge with class_a at the lower-label
  // node and class_b at the higher-label node.
  double binaryPotential(size_t edge_index, ClassId class_a,
                         ClassId class_b) const;

  // Evidence argmax per node: the initial guess the optimizer starts from.
  std::vector<ClassId> initialLabelingByNode() const;

  double totalEnergy(const std::vector<ClassId>& labeling_by_node) const;

  Labeling toLabeling(const std::vector<ClassId>& labeling_by_node) const;

 private:
  void buildLogProbs();

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<ClassId> class_set_;  // ascending
  double smoothing_weight_;
  double smoothing_bandwidth_;
  double epsilon_prob_;
  double pairwise_scale_;
  // Per node: class -> -log(probability); classes outside a node's table get
  // the floor probability value.
  std::vector<std::map<ClassId, double>> log_probs_;
  std::vector<double> floor_log_prob_;
};

}  // namespace spmap

#endif  // SPMAP_MRF_ENERGY_H_
