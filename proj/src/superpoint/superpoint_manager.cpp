#include "spmap/superpoint/superpoint_manager.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace spmap {

std::optional<GlobalInstanceId> SuperpointRecord::topInstance() const {
  std::optional<GlobalInstanceId> best;
  uint64_t best_count = 0;
  for (const auto& [instance, count] : instance_votes) {
    if (count > best_count) {  // ascending keys: ties keep the smallest id
      best_count = count;
      best = instance;
    }
  }
  return best;
}

SurfaceAssignmentResult SuperpointManager::assignSurface(
    const Surface& surface, LabelTsdfMap* map, SemanticGraph* graph) {
  if (surface.point_cloud.empty()) {
    throw EmptySurfaceError("assignSurface: surface has no points");
  }

  std::map<SuperpointLabel, int> overlap;
  for (const Point3d& point : surface.point_cloud) {
    const std::optional<SuperpointLabel> label = map->labelAtPoint(point);
    if (label.has_value()) {
      ++overlap[*label];
    }
  }

  const double threshold =
      std::max(static_cast<double>(params_.min_overlap_voxels),
               params_.min_overlap_ratio *
                   static_cast<double>(surface.point_cloud.size()));

  SurfaceAssignmentResult result;
  int best_count = 0;
  for (const auto& [label, count] : overlap) {
    if (static_cast<double>(count) >= threshold) {
      result.significant_overlaps.push_back(label);
      if (count > best_count) {  // ties keep the smallest label
        best_count = count;
        result.label = label;
      }
    }
  }

  if (result.label == 0) {
    result.label = mintLabel();
    result.created_new = true;
    records_[result.label].label = result.label;
    graph->ensureVertex(result.label);
  }

  for (const Point3d& point : surface.point_cloud) {
    map->castVote(point, result.label);
  }
  records_[result.label].point_count += surface.point_cloud.size();
  return result;
}

void SuperpointManager::updateOverlapMatrix(
    const std::vector<SuperpointLabel>& significant) {
  for (size_t i = 0; i < significant.size(); ++i) {
    for (size_t j = i + 1; j < significant.size(); ++j) {
      const SuperpointLabel a = std::min(significant[i], significant[j]);
      const SuperpointLabel b = std::max(significant[i], significant[j]);
      if (a != b) {
        ++overlap_matrix_[{a, b}];
      }
    }
  }
}

std::vector<MergeEvent> SuperpointManager::mergeSuperpoints(
    LabelTsdfMap* map, SemanticGraph* graph) {
  std::vector<MergeEvent> events;

  while (true) {
    // One pass: collect pairs meeting both conditions under the current
    // semantics, union them, apply, and rescan (folding the matrix can push
    // new pairs over the threshold).
    std::unordered_map<SuperpointLabel, SuperpointLabel> parent;
    auto find = [&](SuperpointLabel l) {
      SuperpointLabel root = l;
      while (parent.count(root) > 0 && parent[root] != root) {
        root = parent[root];
      }
      return root;
    };

    std::vector<MergeEvent> pass_events;
    for (const auto& [pair, count] : overlap_matrix_) {
      if (count <= params_.merge_threshold) {
        continue;
      }
      const SuperpointLabel root_a = find(pair.first);
      const SuperpointLabel root_b = find(pair.second);
      if (root_a == root_b) {
        continue;
      }
      const ClassId class_a = graph->initialSemantic(root_a);
      const ClassId class_b = graph->initialSemantic(root_b);
      if (params_.semantic_consistency && class_a != class_b &&
          class_a != kBackgroundClass && class_b != kBackgroundClass) {
        continue;
      }
      const SuperpointLabel survivor = std::min(root_a, root_b);
      const SuperpointLabel absorbed = std::max(root_a, root_b);
      parent[absorbed] = survivor;
      parent[survivor] = survivor;
      pass_events.push_back(MergeEvent{
          survivor, absorbed, survivor == root_a ? class_a : class_b,
          survivor == root_a ? class_b : class_a, count});

      // Fold graph state immediately so later pairs in this pass see the
      // merged semantics.
      graph->foldVertices(survivor, absorbed);
      records_[survivor].point_count += records_[absorbed].point_count;
      for (const auto& [instance, votes] : records_[absorbed].instance_votes) {
        records_[survivor].instance_votes[instance] += votes;
      }
      records_.erase(absorbed);
    }

    if (pass_events.empty()) {
      break;
    }

    // Batched vote rename: every absorbed label maps to its final root.
    std::unordered_map<SuperpointLabel, SuperpointLabel> remap;
    for (const MergeEvent& event : pass_events) {
      const SuperpointLabel root = find(event.absorbed);
      remap[event.absorbed] = root;
    }
    map->applyVoteRemap(remap);

    // Fold the overlap matrix through the remap.
    std::map<SuperpointPair, int> folded;
    for (const auto& [pair, count] : overlap_matrix_) {
      SuperpointLabel a = pair.first;
      SuperpointLabel b = pair.second;
      auto it_a = remap.find(a);
      if (it_a != remap.end()) a = it_a->second;
      auto it_b = remap.find(b);
      if (it_b != remap.end()) b = it_b->second;
      if (a == b) {
        continue;
      }
      folded[{std::min(a, b), std::max(a, b)}] += count;
    }
    overlap_matrix_ = std::move(folded);

    events.insert(events.end(), pass_events.begin(), pass_events.end());
  }

  audit_log_.insert(audit_log_.end(), events.begin(), events.end());
  return events;
}

GlobalInstanceId SuperpointManager::associateInstanceObservation(
    const std::map<SuperpointLabel, int>& hits,
    std::set<GlobalInstanceId>* claimed_this_frame) {
  // Vote for the tracks currently preferred by the hit superpoints,
  // weighted by hit count.
  std::map<GlobalInstanceId, uint64_t> candidate_weight;
  for (const auto& [label, hit_count] : hits) {
    auto record_it = records_.find(label);
    if (record_it == records_.end()) {
      continue;
    }
    const std::optional<GlobalInstanceId> top =
        record_it->second.topInstance();
    if (top.has_value() &&
        (claimed_this_frame == nullptr ||
         claimed_this_frame->count(*top) == 0)) {
      candidate_weight[*top] += static_cast<uint64_t>(hit_count);
    }
  }

  GlobalInstanceId chosen = 0;
  uint64_t best_weight = 0;
  for (const auto& [instance, weight] : candidate_weight) {
    if (weight > best_weight) {  // ascending keys: ties keep the smallest id
      best_weight = weight;
      chosen = instance;
    }
  }
  if (chosen == 0) {
    chosen = next_instance_++;
  }
  if (claimed_this_frame != nullptr) {
    claimed_this_frame->insert(chosen);
  }

  for (const auto& [label, hit_count] : hits) {
    auto record_it = records_.find(label);
    if (record_it != records_.end()) {
      record_it->second.instance_votes[chosen] +=
          static_cast<uint64_t>(hit_count);
    }
  }
  return chosen;
}

uint64_t SuperpointManager::totalOverlapMass() const {
  uint64_t mass = 0;
  for (const auto& [pair, count] : overlap_matrix_) {
    mass += static_cast<uint64_t>(count);
  }
  return mass;
}

}  // namespace spmap
