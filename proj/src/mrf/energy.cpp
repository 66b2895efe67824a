#include "spmap/mrf/energy.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace spmap {

EnergyProblem::EnergyProblem(std::vector<Node> nodes, std::vector<Edge> edges,
                             std::vector<ClassId> class_set,
                             double smoothing_weight,
                             double smoothing_bandwidth, double epsilon_prob,
                             double pairwise_scale)
    : nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      class_set_(std::move(class_set)),
      smoothing_weight_(smoothing_weight),
      smoothing_bandwidth_(smoothing_bandwidth),
      epsilon_prob_(epsilon_prob),
      pairwise_scale_(pairwise_scale) {
  if (smoothing_weight_ <= 0.0 || smoothing_bandwidth_ <= 0.0 ||
      pairwise_scale_ <= 0.0) {
    throw std::invalid_argument(
        "EnergyProblem: smoothing weight, bandwidth, and scale must be > 0");
  }
  std::sort(class_set_.begin(), class_set_.end());
  class_set_.erase(std::unique(class_set_.begin(), class_set_.end()),
                   class_set_.end());
  buildLogProbs();
}

void EnergyProblem::buildLogProbs() {
  log_probs_.resize(nodes_.size());
  floor_log_prob_.resize(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    double total = 0.0;
    for (const ClassId category : class_set_) {
      auto it = nodes_[i].evidence.find(category);
      if (it != nodes_[i].evidence.end()) {
        total += it->second;
      }
    }
    if (total <= 0.0) {
      // Left empty; unaryPotential reports the contract violation.
      floor_log_prob_[i] = 0.0;
      continue;
    }
    // Floor the probabilities at epsilon and renormalize so the logs stay
    // finite for unobserved classes.
    double normalizer = 0.0;
    std::map<ClassId, double> probs;
    for (const ClassId category : class_set_) {
      auto it = nodes_[i].evidence.find(category);
      const double raw =
          it == nodes_[i].evidence.end() ? 0.0 : it->second / total;
      const double floored = std::max(raw, epsilon_prob_);
      probs[category] = floored;
      normalizer += floored;
    }
    for (auto& [category, prob] : probs) {
      log_probs_[i][category] = -std::log(prob / normalizer);
    }
    floor_log_prob_[i] = -std::log(epsilon_prob_ / normalizer);
  }
}

EnergyProblem EnergyProblem::fromGraph(const SemanticGraph& graph,
                                       double smoothing_weight,
                                       double smoothing_bandwidth,
                                       double epsilon_prob,
                                       bool include_background_class,
                                       bool normalize_pairwise) {
  std::vector<Node> nodes;
  std::set<ClassId> classes;
  std::unordered_map<SuperpointLabel, size_t> index_of;
  for (const SuperpointLabel label : graph.vertices()) {
    const ClassConfidenceMap* evidence = graph.nodeConfidence(label);
    if (evidence == nullptr) {
      continue;
    }
    double total = 0.0;
    for (const auto& [category, confidence] : *evidence) {
      total += confidence;
      if (confidence > 0.0) {
        classes.insert(category);
      }
    }
    if (total <= 0.0) {
      continue;  // zero-evidence superpoints stay pinned to background
    }
    index_of[label] = nodes.size();
    nodes.push_back(Node{label, *evidence});
  }
  if (include_background_class) {
    classes.insert(kBackgroundClass);
  }

  std::vector<Edge> edges;
  for (const auto& [key, confidences] : graph.edges()) {
    auto it_a = index_of.find(key.first);
    auto it_b = index_of.find(key.second);
    if (it_a == index_of.end() || it_b == index_of.end()) {
      continue;
    }
    double total = 0.0;
    for (const auto& [category, confidence] : confidences) {
      total += confidence;
    }
    if (total <= 0.0) {
      continue;
    }
    edges.push_back(Edge{it_a->second, it_b->second, total});
  }

  double pairwise_scale = 1.0;
  if (normalize_pairwise && !edges.empty()) {
    // Median cross-evidence statistic at the per-node argmax classes; the
    // median edge then lands at exp(-1) damping under the default bandwidth.
    auto argmaxEvidence = [](const Node& node) {
      ClassId best_class = kBackgroundClass;
      double best = 0.0;
      for (const auto& [category, confidence] : node.evidence) {
        if (confidence > best) {
          best = confidence;
          best_class = category;
        }
      }
      return std::pair<ClassId, double>(best_class, best);
    };
    std::vector<double> stats;
    stats.reserve(edges.size());
    for (const Edge& edge : edges) {
      const double a = argmaxEvidence(nodes[edge.node_a]).second;
      const double b = argmaxEvidence(nodes[edge.node_b]).second;
      if (a > 0.0 && b > 0.0 && edge.total_confidence > 0.0) {
        stats.push_back(a * b / edge.total_confidence);
      }
    }
    if (!stats.empty()) {
      std::sort(stats.begin(), stats.end());
      const double median = stats[stats.size() / 2];
      if (median > 0.0) {
        pairwise_scale =
            median / (2.0 * smoothing_bandwidth * smoothing_bandwidth);
      }
    }
  }
  return EnergyProblem(std::move(nodes), std::move(edges),
                       {classes.begin(), classes.end()}, smoothing_weight,
                       smoothing_bandwidth, epsilon_prob, pairwise_scale);
}

double EnergyProblem::unaryPotential(size_t node_index,
                                     ClassId category) const {
  const auto& log_prob = log_probs_.at(node_index);
  if (log_prob.empty()) {
    throw ZeroEvidenceError("unaryPotential: node has zero total confidence");
  }
  auto it = log_prob.find(category);
  return it == log_prob.end() ? floor_log_prob_[node_index] : it->second;
}

double EnergyProblem::binaryPotential(size_t edge_index, ClassId class_a,
                                      ClassId class_b) const {
  if (class_a == class_b) {
    return 0.0;
  }
  const Edge& edge = edges_.at(edge_index);
  if (edge.total_confidence <= 0.0) {
    return 0.0;  // never co-observed: the statistic is undefined
  }
  auto evidence = [](const Node& node, ClassId category) {
    auto it = node.evidence.find(category);
    return it == node.evidence.end() ? 0.0 : it->second;
  };
  const double cross = evidence(nodes_[edge.node_a], class_a) *
                       evidence(nodes_[edge.node_b], class_b) /
                       edge.total_confidence / pairwise_scale_;
  return smoothing_weight_ *
         std::exp(-cross /
                  (2.0 * smoothing_bandwidth_ * smoothing_bandwidth_));
}

std::vector<ClassId> EnergyProblem::initialLabelingByNode() const {
  std::vector<ClassId> labeling(nodes_.size(), kBackgroundClass);
  for (size_t i = 0; i < nodes_.size(); ++i) {
    ClassId best_class = kBackgroundClass;
    double best_confidence = 0.0;
    for (const auto& [category, confidence] : nodes_[i].evidence) {
      if (confidence > best_confidence) {
        best_confidence = confidence;
        best_class = category;
      }
    }
    labeling[i] = best_class;
  }
  return labeling;
}

double EnergyProblem::totalEnergy(
    const std::vector<ClassId>& labeling_by_node) const {
  double energy = 0.0;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    energy += unaryPotential(i, labeling_by_node[i]);
  }
  for (size_t e = 0; e < edges_.size(); ++e) {
    energy += binaryPotential(e, labeling_by_node[edges_[e].node_a],
                              labeling_by_node[edges_[e].node_b]);
  }
  return energy;
}

Labeling EnergyProblem::toLabeling(
    const std::vector<ClassId>& labeling_by_node) const {
  Labeling labeling;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    labeling[nodes_[i].label] = labeling_by_node[i];
  }
  return labeling;
}

}  // namespace spmap
