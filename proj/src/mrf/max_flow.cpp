#include "spmap/mrf/max_flow.h"

#include <deque>
#include <limits>
#include <stdexcept>

namespace spmap {

FlowNetwork::FlowNetwork(int node_count) : adjacency_(node_count) {}

void FlowNetwork::addEdge(int from, int to, double capacity,
                          double reverse_capacity) {
  if (capacity < 0.0 || reverse_capacity < 0.0) {
    throw std::invalid_argument("FlowNetwork: negative capacity");
  }
  adjacency_[from].push_back(static_cast<int>(edges_.size()));
  edges_.push_back(Edge{to, capacity});
  adjacency_[to].push_back(static_cast<int>(edges_.size()));
  edges_.push_back(Edge{from, reverse_capacity});
}

FlowNetwork::Result FlowNetwork::maxFlowMinCut(int source, int sink) {
  Result result;
  result.source_side.assign(adjacency_.size(), false);

  std::vector<int> parent_edge(adjacency_.size(), -1);
  while (true) {
    // BFS for the shortest augmenting path in the residual graph.
    std::fill(parent_edge.begin(), parent_edge.end(), -1);
    std::deque<int> queue{source};
    parent_edge[source] = -2;
    while (!queue.empty() && parent_edge[sink] == -1) {
      const int node = queue.front();
      queue.pop_front();
      for (const int edge_index : adjacency_[node]) {
        const Edge& edge = edges_[edge_index];
        if (edge.capacity > 0.0 && parent_edge[edge.to] == -1) {
          parent_edge[edge.to] = edge_index;
          queue.push_back(edge.to);
        }
      }
    }
    if (parent_edge[sink] == -1) {
      break;
    }

    double bottleneck = std::numeric_limits<double>::infinity();
    for (int node = sink; node != source;) {
      const Edge& edge = edges_[parent_edge[node]];
      bottleneck = std::min(bottleneck, edge.capacity);
      node = edges_[parent_edge[node] ^ 1].to;
    }
    for (int node = sink; node != source;) {
      const int edge_index = parent_edge[node];
      edges_[edge_index].capacity -= bottleneck;
      edges_[edge_index ^ 1].capacity += bottleneck;
      node = edges_[edge_index ^ 1].to;
    }
    result.flow += bottleneck;
  }

  // Nodes reachable in the residual graph form the source side.
  std::deque<int> queue{source};
  result.source_side[source] = true;
  while (!queue.empty()) {
    const int node = queue.front();
    queue.pop_front();
    for (const int edge_index : adjacency_[node]) {
      const Edge& edge = edges_[edge_index];
      if (edge.capacity > 0.0 && !result.source_side[edge.to]) {
        result.source_side[edge.to] = true;
        queue.push_back(edge.to);
      }
    }
  }
  return result;
}

}  // namespace spmap
