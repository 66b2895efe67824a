#ifndef SPMAP_MRF_MAX_FLOW_H_
#define SPMAP_MRF_MAX_FLOW_H_

#include <cstddef>
#include <vector>

namespace spmap {

// Directed flow network with non-negative capacities solved by BFS
// augmenting paths (Edmonds-Karp).
class FlowNetwork {
 public:
  explicit FlowNetwork(int node_count);

  int nodeCount() const { return static_cast<int>(adjacency_.size()); }

  // Adds the edge from -> to with the given capacity (and a paired reverse
  // edge, default capacity 0). Parallel edges are allowed.
  void addEdge(int from, int to, double capacity, double reverse_capacity = 0.0);

  struct Result {
    double flow = 0.0;
    // True for nodes on the source side of the minimum cut.
    std::vector<bool> source_side;
  };

  // Computes the maximum flow / minimum cut between source and sink.
  // The network keeps its residual state afterwards; run on a fresh copy to
  // re-solve.
  Result maxFlowMinCut(int source, int sink);

 private:
  struct Edge {
    int to = 0;
    double capacity = 0.0;
  };

  std::vector<Edge> edges_;  // paired: edge i's reverse is i ^ 1
  std::vector<std::vector<int>> adjacency_;
};

}  // namespace spmap

#endif  // SPMAP_MRF_MAX_FLOW_H_
