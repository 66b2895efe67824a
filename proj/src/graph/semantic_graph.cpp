#include "spmap/graph/semantic_graph.h"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace spmap {

SuperpointPair SemanticGraph::makeKey(SuperpointLabel a, SuperpointLabel b) {
  return a < b ? SuperpointPair{a, b} : SuperpointPair{b, a};
}

double SemanticGraph::spatialConfidenceFromDistance(double distance_m,
                                                    double voxel_size,
                                                    double sigma_spatial) {
  return std::exp(-std::max(0.0, distance_m - voxel_size) / sigma_spatial);
}

double SemanticGraph::spatialConfidence(SuperpointLabel a, SuperpointLabel b,
                                        const LabelTsdfMap& map) const {
  const double distance = map.approxSuperpointDistance(a, b);
  if (!std::isfinite(distance)) {
    return 0.0;
  }
  return spatialConfidenceFromDistance(distance, map.config().voxel_size,
                                       params_.sigma_spatial);
}

void SemanticGraph::addNodeConfidence(SuperpointLabel label, ClassId category,
                                      double confidence) {
  vertices_.insert(label);
  node_confidence_[label][category] += confidence;
}

void SemanticGraph::addEdgeConfidence(SuperpointLabel a, SuperpointLabel b,
                                      ClassId category, double confidence) {
  if (a == b) {
    return;
  }
  edges_[makeKey(a, b)][category] += confidence;
}

void SemanticGraph::accumulateFrame(const std::vector<InstanceRaycast>& raycasts,
                                    const LabelTsdfMap& map) {
  for (const InstanceRaycast& raycast : raycasts) {
    for (const auto& [label, hit_count] : raycast.hits) {
      addNodeConfidence(label, raycast.category,
                        raycast.panoptic_confidence * hit_count);
    }
    if (raycast.hits.size() < 2) {
      continue;
    }
    // Pairwise edge updates over the superpoints hit by this instance,
    // capped to the most-hit ones.
    std::vector<std::pair<SuperpointLabel, int>> hit_list(
        raycast.hits.begin(), raycast.hits.end());
    std::sort(hit_list.begin(), hit_list.end(),
              [](const auto& lhs, const auto& rhs) {
                if (lhs.second != rhs.second) return lhs.second > rhs.second;
                return lhs.first < rhs.first;
              });
    if (static_cast<int>(hit_list.size()) > params_.max_edge_superpoints) {
      hit_list.resize(params_.max_edge_superpoints);
    }
    for (size_t i = 0; i < hit_list.size(); ++i) {
      for (size_t j = i + 1; j < hit_list.size(); ++j) {
        const auto& [label_a, hits_a] = hit_list[i];
        const auto& [label_b, hits_b] = hit_list[j];
        const double spatial = spatialConfidence(label_a, label_b, map);
        if (spatial <= 0.0) {
          continue;
        }
        addEdgeConfidence(label_a, label_b, raycast.category,
                          raycast.panoptic_confidence * spatial *
                              std::min(hits_a, hits_b));
      }
    }
  }
}

ClassId SemanticGraph::initialSemantic(SuperpointLabel label) const {
  auto it = node_confidence_.find(label);
  if (it == node_confidence_.end()) {
    return kBackgroundClass;
  }
  ClassId best_class = kBackgroundClass;
  double best_confidence = 0.0;
  for (const auto& [category, confidence] : it->second) {
    // map iteration is class-ascending, so strict > favors smaller ids.
    if (confidence > best_confidence) {
      best_confidence = confidence;
      best_class = category;
    }
  }
  return best_class;
}

void SemanticGraph::foldVertices(SuperpointLabel survivor,
                                 SuperpointLabel absorbed) {
  if (!hasVertex(survivor) || !hasVertex(absorbed)) {
    throw MissingVertexError("foldVertices: unknown vertex");
  }
  if (survivor == absorbed) {
    throw std::invalid_argument("foldVertices: vertices must differ");
  }

  auto node_it = node_confidence_.find(absorbed);
  if (node_it != node_confidence_.end()) {
    ClassConfidenceMap& target = node_confidence_[survivor];
    for (const auto& [category, confidence] : node_it->second) {
      target[category] += confidence;
    }
    node_confidence_.erase(node_it);
  }

  // Re-key incident edges; (survivor, absorbed) would become a self-edge.
  std::vector<std::pair<SuperpointPair, ClassConfidenceMap>> rekeyed;
  for (auto it = edges_.begin(); it != edges_.end();) {
    if (it->first.first == absorbed || it->first.second == absorbed) {
      const SuperpointLabel other =
          it->first.first == absorbed ? it->first.second : it->first.first;
      if (other == survivor) {
        for (const auto& [category, confidence] : it->second) {
          dropped_self_edge_mass_ += confidence;
        }
      } else {
        rekeyed.emplace_back(makeKey(survivor, other), std::move(it->second));
      }
      it = edges_.erase(it);
    } else {
      ++it;
    }
  }
  for (auto& [key, confidences] : rekeyed) {
    ClassConfidenceMap& target = edges_[key];
    for (const auto& [category, confidence] : confidences) {
      target[category] += confidence;
    }
  }

  vertices_.erase(absorbed);
}

const ClassConfidenceMap* SemanticGraph::nodeConfidence(
    SuperpointLabel label) const {
  auto it = node_confidence_.find(label);
  return it == node_confidence_.end() ? nullptr : &it->second;
}

const ClassConfidenceMap* SemanticGraph::edgeConfidence(
    SuperpointLabel a, SuperpointLabel b) const {
  auto it = edges_.find(makeKey(a, b));
  return it == edges_.end() ? nullptr : &it->second;
}

double SemanticGraph::edgeClassConfidence(SuperpointLabel a, SuperpointLabel b,
                                          ClassId category) const {
  const ClassConfidenceMap* confidences = edgeConfidence(a, b);
  if (confidences == nullptr) {
    return 0.0;
  }
  auto it = confidences->find(category);
  return it == confidences->end() ? 0.0 : it->second;
}

double SemanticGraph::totalNodeMass() const {
  double mass = 0.0;
  for (const auto& [label, confidences] : node_confidence_) {
    for (const auto& [category, confidence] : confidences) {
      mass += confidence;
    }
  }
  return mass;
}

double SemanticGraph::totalEdgeMass() const {
  double mass = 0.0;
  for (const auto& [key, confidences] : edges_) {
    for (const auto& [category, confidence] : confidences) {
      mass += confidence;
    }
  }
  return mass;
}

void SemanticGraph::dumpText(std::ostream& out) const {
  for (const SuperpointLabel label : vertices_) {
    out << "v " << label;
    auto it = node_confidence_.find(label);
    if (it != node_confidence_.end()) {
      for (const auto& [category, confidence] : it->second) {
        out << ' ' << category << ':' << confidence;
      }
    }
    out << '\n';
  }
  for (const auto& [key, confidences] : edges_) {
    out << "e " << key.first << ' ' << key.second;
    for (const auto& [category, confidence] : confidences) {
      out << ' ' << category << ':' << confidence;
    }
    out << '\n';
  }
}

}  // namespace spmap
