#include "spmap/instance/instance_refiner.h"

#include <algorithm>
#include <set>

namespace spmap {

namespace {

double lookupOr(const std::map<ClassId, double>& overrides, ClassId c,
                double fallback) {
  auto it = overrides.find(c);
  return it == overrides.end() ? fallback : it->second;
}

}  // namespace

double InstanceRefinerParams::detachFor(ClassId c) const {
  return lookupOr(detach_by_class, c, detach_threshold);
}
double InstanceRefinerParams::instanceFor(ClassId c) const {
  return lookupOr(instance_by_class, c, instance_threshold);
}
double InstanceRefinerParams::nodeFor(ClassId c) const {
  return lookupOr(node_by_class, c, node_threshold);
}

double instanceConfidence(const InstanceGroup& instance,
                          const SemanticGraph& graph) {
  double best = 0.0;
  for (size_t i = 0; i < instance.members.size(); ++i) {
    for (size_t j = i + 1; j < instance.members.size(); ++j) {
      best = std::max(best, graph.edgeClassConfidence(instance.members[i],
                                                      instance.members[j],
                                                      instance.category));
    }
  }
  return best;
}

std::vector<InstanceGroup> initialInstances(
    const std::map<SuperpointLabel, ClassId>& semantics,
    const std::map<SuperpointLabel, SuperpointRecord>& records,
    uint32_t* next_instance_id) {
  // (class, track) -> members; track-less superpoints become singletons.
  std::map<std::pair<ClassId, GlobalInstanceId>, std::vector<SuperpointLabel>>
      groups;
  std::vector<SuperpointLabel> singletons;
  for (const auto& [label, category] : semantics) {
    auto record_it = records.find(label);
    std::optional<GlobalInstanceId> track;
    if (record_it != records.end()) {
      track = record_it->second.topInstance();
    }
    if (track.has_value()) {
      groups[{category, *track}].push_back(label);
    } else {
      singletons.push_back(label);
    }
  }

  std::vector<InstanceGroup> instances;
  for (auto& [key, members] : groups) {
    InstanceGroup instance;
    instance.id = (*next_instance_id)++;
    instance.category = key.first;
    std::sort(members.begin(), members.end());
    instance.members = std::move(members);
    instances.push_back(std::move(instance));
  }
  for (const SuperpointLabel label : singletons) {
    InstanceGroup instance;
    instance.id = (*next_instance_id)++;
    instance.category = semantics.at(label);
    instance.members = {label};
    instances.push_back(std::move(instance));
  }
  return instances;
}

namespace {

// Strongest class-C edge between node and the members of the instance
// (excluding node itself).
double nodeToInstanceConfidence(SuperpointLabel node,
                                const InstanceGroup& instance,
                                ClassId category,
                                const SemanticGraph& graph) {
  double best = 0.0;
  for (const SuperpointLabel member : instance.members) {
    if (member == node) {
      continue;
    }
    best = std::max(best, graph.edgeClassConfidence(node, member, category));
  }
  return best;
}

// Splits an instance into connected components under positive class-C edges;
// the component holding the smallest member keeps the instance id.
void splitDisconnected(std::vector<InstanceGroup>* instances, ClassId category,
                       const SemanticGraph& graph,
                       uint32_t* next_instance_id) {
  std::vector<InstanceGroup> extra;
  for (InstanceGroup& instance : *instances) {
    if (instance.members.size() < 2) {
      continue;
    }
    std::set<SuperpointLabel> remaining(instance.members.begin(),
                                        instance.members.end());
    std::vector<std::vector<SuperpointLabel>> components;
    while (!remaining.empty()) {
      std::vector<SuperpointLabel> component{*remaining.begin()};
      remaining.erase(remaining.begin());
      for (size_t i = 0; i < component.size(); ++i) {
        for (auto it = remaining.begin(); it != remaining.end();) {
          if (graph.edgeClassConfidence(component[i], *it, category) > 0.0) {
            component.push_back(*it);
            it = remaining.erase(it);
          } else {
            ++it;
          }
        }
      }
      std::sort(component.begin(), component.end());
      components.push_back(std::move(component));
    }
    if (components.size() < 2) {
      continue;
    }
    std::sort(components.begin(), components.end());
    instance.members = components.front();
    for (size_t i = 1; i < components.size(); ++i) {
      InstanceGroup split;
      split.id = (*next_instance_id)++;
      split.category = category;
      split.members = std::move(components[i]);
      extra.push_back(std::move(split));
    }
  }
  instances->insert(instances->end(), extra.begin(), extra.end());
}

}  // namespace

std::vector<InstanceGroup> refineClass(ClassId category,
                                       const std::vector<InstanceGroup>& input,
                                       const SemanticGraph& graph,
                                       const InstanceRefinerParams& params,
                                       uint32_t* next_instance_id) {
  const double theta_detach = params.detachFor(category);
  const double theta_instance = params.instanceFor(category);
  const double theta_node = params.nodeFor(category);

  std::vector<InstanceGroup> instances;
  for (const InstanceGroup& instance : input) {
    if (instance.category == category) {
      instances.push_back(instance);
    }
  }
  std::sort(instances.begin(), instances.end(),
            [](const InstanceGroup& a, const InstanceGroup& b) {
              return a.id < b.id;
            });

  // Detach phase, evaluated entirely against the initial configuration.
  std::vector<SuperpointLabel> detached;
  for (InstanceGroup& instance : instances) {
    const double instance_confidence_value =
        instanceConfidence(instance, graph);
    std::vector<SuperpointLabel> kept;
    for (const SuperpointLabel member : instance.members) {
      const double member_confidence =
          nodeToInstanceConfidence(member, instance, category, graph);
      // Members with no positive link into their own instance (singletons
      // included) are always loose; they re-enter through the attach tests.
      if (member_confidence <= 0.0 ||
          member_confidence < theta_detach * instance_confidence_value) {
        detached.push_back(member);
      } else {
        kept.push_back(member);
      }
    }
    instance.members = std::move(kept);
  }
  std::erase_if(instances, [](const InstanceGroup& instance) {
    return instance.members.empty();
  });

  // Detaching a cut vertex can leave an instance in disconnected pieces.
  splitDisconnected(&instances, category, graph, next_instance_id);

  // The node's strongest class edge overall, for ordering and the second
  // attach test.
  auto bestEdge = [&](SuperpointLabel node) {
    double best = 0.0;
    for (const InstanceGroup& instance : instances) {
      best = std::max(
          best, nodeToInstanceConfidence(node, instance, category, graph));
    }
    for (const SuperpointLabel other : detached) {
      if (other != node) {
        best = std::max(best, graph.edgeClassConfidence(node, other, category));
      }
    }
    return best;
  };
  std::vector<std::pair<double, SuperpointLabel>> order;
  order.reserve(detached.size());
  for (const SuperpointLabel node : detached) {
    order.emplace_back(bestEdge(node), node);
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  for (const auto& [node_best_edge, node] : order) {
    int chosen_index = -1;
    double chosen_confidence = 0.0;
    for (size_t c = 0; c < instances.size(); ++c) {
      const InstanceGroup& candidate = instances[c];
      const double link =
          nodeToInstanceConfidence(node, candidate, category, graph);
      if (link <= 0.0) {
        continue;  // not a spatial-panoptic neighbor
      }
      if (link > theta_instance * instanceConfidence(candidate, graph) &&
          link > theta_node * node_best_edge) {
        // Instances are id-ascending, so the first hit wins equal links.
        if (link > chosen_confidence) {
          chosen_index = static_cast<int>(c);
          chosen_confidence = link;
        }
      }
    }
    if (chosen_index >= 0) {
      InstanceGroup& target = instances[chosen_index];
      target.members.insert(
          std::upper_bound(target.members.begin(), target.members.end(), node),
          node);
    } else {
      InstanceGroup fresh;
      fresh.id = (*next_instance_id)++;
      fresh.category = category;
      fresh.members = {node};
      instances.push_back(std::move(fresh));
    }
  }

  for (InstanceGroup& instance : instances) {
    instance.confidence = instanceConfidence(instance, graph);
  }
  std::sort(instances.begin(), instances.end(),
            [](const InstanceGroup& a, const InstanceGroup& b) {
              return a.id < b.id;
            });
  return instances;
}

std::vector<InstanceGroup> refineAllClasses(
    const std::vector<InstanceGroup>& instances, const SemanticGraph& graph,
    const InstanceRefinerParams& params, const ClassTable& classes,
    uint32_t* next_instance_id) {
  std::set<ClassId> categories;
  for (const InstanceGroup& instance : instances) {
    categories.insert(instance.category);
  }
  std::vector<InstanceGroup> refined;
  for (const ClassId category : categories) {
    if (classes.contains(category) && classes.isThing(category)) {
      std::vector<InstanceGroup> per_class =
          refineClass(category, instances, graph, params, next_instance_id);
      refined.insert(refined.end(), per_class.begin(), per_class.end());
    } else {
      for (const InstanceGroup& instance : instances) {
        if (instance.category == category) {
          InstanceGroup copy = instance;
          copy.confidence = instanceConfidence(copy, graph);
          refined.push_back(std::move(copy));
        }
      }
    }
  }
  return refined;
}

}  // namespace spmap
