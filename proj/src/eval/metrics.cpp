#include "spmap/eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>

#include "spmap/core/grid_index.h"

namespace spmap {

double instanceIoU(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty() && b.empty()) {
    return 0.0;
  }
  size_t intersection = 0;
  size_t ia = 0;
  size_t ib = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] < b[ib]) {
      ++ia;
    } else if (b[ib] < a[ia]) {
      ++ib;
    } else {
      ++intersection;
      ++ia;
      ++ib;
    }
  }
  const size_t unions = a.size() + b.size() - intersection;
  return unions == 0 ? 0.0
                     : static_cast<double>(intersection) /
                           static_cast<double>(unions);
}

namespace {

struct GtInstance {
  uint32_t id = 0;
  ClassId category = kBackgroundClass;
  std::vector<int> points;  // GT point indices, ascending
};

struct PredInstance {
  uint32_t id = 0;
  ClassId category = kBackgroundClass;
  double confidence = 1.0;
  std::vector<int> points;  // transferred GT point indices, ascending
};

// Nearest predicted point within the radius, per ground-truth point.
std::vector<int> transferNearest(const LabeledPoints& predictions,
                                 const LabeledPoints& ground_truth,
                                 double radius) {
  std::unordered_map<GridIndex, std::vector<int>, GridIndexHash> grid;
  const double cell = std::max(radius, 1e-6);
  auto cellOf = [&](const Eigen::Vector3f& p) {
    return GridIndex{static_cast<int32_t>(std::floor(p.x() / cell)),
                     static_cast<int32_t>(std::floor(p.y() / cell)),
                     static_cast<int32_t>(std::floor(p.z() / cell))};
  };
  for (int i = 0; i < static_cast<int>(predictions.size()); ++i) {
    grid[cellOf(predictions.positions[i])].push_back(i);
  }

  std::vector<int> nearest(ground_truth.size(), -1);
  const float radius_sq = static_cast<float>(radius * radius);
  for (int g = 0; g < static_cast<int>(ground_truth.size()); ++g) {
    const Eigen::Vector3f& p = ground_truth.positions[g];
    const GridIndex center = cellOf(p);
    float best_sq = radius_sq;
    int best = -1;
    for (int dz = -1; dz <= 1; ++dz) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          auto it = grid.find(
              GridIndex{center.x + dx, center.y + dy, center.z + dz});
          if (it == grid.end()) {
            continue;
          }
          for (const int pi : it->second) {
            const float d_sq =
                (predictions.positions[pi] - p).squaredNorm();
            if (d_sq < best_sq ||
                (d_sq == best_sq && best >= 0 && pi < best)) {
              best_sq = d_sq;
              best = pi;
            }
          }
        }
      }
    }
    nearest[g] = best;
  }
  return nearest;
}

struct Matching {
  std::vector<int> matched_gt;  // per pred (ranked order): gt index or -1
  std::vector<double> ious;
  int true_positives = 0;
};

// Greedy one-to-one matching in rank order at the given IoU threshold.
Matching greedyMatch(const std::vector<const PredInstance*>& ranked,
                     const std::vector<const GtInstance*>& gts,
                     double iou_threshold, bool strict_greater) {
  Matching matching;
  matching.matched_gt.assign(ranked.size(), -1);
  matching.ious.assign(ranked.size(), 0.0);
  std::vector<bool> taken(gts.size(), false);
  for (size_t r = 0; r < ranked.size(); ++r) {
    double best_iou = 0.0;
    int best_gt = -1;
    for (size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) {
        continue;
      }
      const double iou = instanceIoU(ranked[r]->points, gts[g]->points);
      if (iou > best_iou) {
        best_iou = iou;
        best_gt = static_cast<int>(g);
      }
    }
    const bool accept = strict_greater ? best_iou > iou_threshold
                                       : best_iou >= iou_threshold;
    if (best_gt >= 0 && accept) {
      taken[best_gt] = true;
      matching.matched_gt[r] = best_gt;
      matching.ious[r] = best_iou;
      ++matching.true_positives;
    }
  }
  return matching;
}

// Area under the interpolated precision-recall curve (all-point
// interpolation).
double averagePrecision(const std::vector<bool>& tp_flags, int gt_count) {
  if (gt_count == 0) {
    return 0.0;
  }
  std::vector<double> precision;
  std::vector<double> recall;
  int tp = 0;
  int fp = 0;
  for (const bool flag : tp_flags) {
    flag ? ++tp : ++fp;
    precision.push_back(static_cast<double>(tp) / (tp + fp));
    recall.push_back(static_cast<double>(tp) / gt_count);
  }
  // Precision envelope from the right.
  for (int i = static_cast<int>(precision.size()) - 2; i >= 0; --i) {
    precision[i] = std::max(precision[i], precision[i + 1]);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (size_t i = 0; i < precision.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

struct PqResult {
  double pq = 0.0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

PqResult panopticQuality(const std::vector<const PredInstance*>& ranked,
                         const std::vector<const GtInstance*>& gts,
                         double iou_threshold) {
  // Strictly-greater matching is unique for thresholds >= 0.5.
  const Matching matching = greedyMatch(ranked, gts, iou_threshold, true);
  PqResult result;
  double iou_sum = 0.0;
  for (size_t r = 0; r < ranked.size(); ++r) {
    if (matching.matched_gt[r] >= 0) {
      ++result.tp;
      iou_sum += matching.ious[r];
    } else {
      ++result.fp;
    }
  }
  result.fn = static_cast<int>(gts.size()) - result.tp;
  const double denom = result.tp + 0.5 * result.fp + 0.5 * result.fn;
  result.pq = denom > 0.0 ? iou_sum / denom : 0.0;
  return result;
}

}  // namespace

MetricsReport evaluatePredictions(
    const LabeledPoints& predictions,
    const std::vector<PredictedInstanceInfo>& instance_info,
    const LabeledPoints& ground_truth, const ClassTable& classes,
    const EvalParams& params) {
  const std::vector<int> nearest =
      transferNearest(predictions, ground_truth, params.transfer_radius);

  // Ground-truth instances on GT point indices.
  std::map<uint32_t, GtInstance> gt_instances;
  for (int g = 0; g < static_cast<int>(ground_truth.size()); ++g) {
    const uint32_t id = ground_truth.instance_ids[g];
    if (id == 0) {
      continue;
    }
    GtInstance& instance = gt_instances[id];
    instance.id = id;
    instance.category = ground_truth.semantic_ids[g];
    instance.points.push_back(g);
  }

  // Predicted instances: ids present in the prediction cloud, with points
  // transferred onto GT indices (possibly empty).
  std::map<uint32_t, PredInstance> pred_instances;
  for (size_t i = 0; i < predictions.size(); ++i) {
    const uint32_t id = predictions.instance_ids[i];
    if (id == 0) {
      continue;
    }
    PredInstance& instance = pred_instances[id];
    instance.id = id;
    instance.category = predictions.semantic_ids[i];
  }
  for (int g = 0; g < static_cast<int>(ground_truth.size()); ++g) {
    if (nearest[g] < 0) {
      continue;
    }
    const uint32_t id = predictions.instance_ids[nearest[g]];
    if (id == 0) {
      continue;
    }
    pred_instances[id].points.push_back(g);
  }
  for (const PredictedInstanceInfo& info : instance_info) {
    auto it = pred_instances.find(info.id);
    if (it != pred_instances.end()) {
      it->second.category = info.category;
      it->second.confidence = info.confidence;
    }
  }

  // Superpoint partition restricted to GT points.
  std::map<uint32_t, std::vector<int>> superpoint_points;
  for (int g = 0; g < static_cast<int>(ground_truth.size()); ++g) {
    if (nearest[g] < 0) {
      continue;
    }
    const uint32_t superpoint = predictions.superpoint_ids[nearest[g]];
    if (superpoint != 0) {
      superpoint_points[superpoint].push_back(g);
    }
  }

  // Classes under evaluation: any with GT instances or predictions.
  std::set<ClassId> categories;
  for (const auto& [id, instance] : gt_instances) {
    categories.insert(instance.category);
  }
  for (const auto& [id, instance] : pred_instances) {
    categories.insert(instance.category);
  }
  categories.erase(kBackgroundClass);

  MetricsReport report;
  double map50_sum = 0.0;
  double map75_sum = 0.0;
  int map_classes = 0;
  double pq50_sum = 0.0;
  double pq75_sum = 0.0;
  int pq_classes = 0;
  double iou_ls_sum = 0.0;
  int iou_ls_instances = 0;

  for (const ClassId category : categories) {
    ClassMetrics metrics;
    metrics.id = category;
    metrics.name = classes.contains(category) ? classes.name(category)
                                              : "unknown";
    metrics.is_thing =
        classes.contains(category) && classes.isThing(category);

    std::vector<const GtInstance*> gts;
    for (const auto& [id, instance] : gt_instances) {
      if (instance.category == category) {
        gts.push_back(&instance);
      }
    }
    std::vector<const PredInstance*> ranked;
    for (const auto& [id, instance] : pred_instances) {
      if (instance.category == category) {
        ranked.push_back(&instance);
      }
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const PredInstance* a, const PredInstance* b) {
                if (a->confidence != b->confidence) {
                  return a->confidence > b->confidence;
                }
                return a->id < b->id;
              });
    metrics.gt_instances = static_cast<int>(gts.size());
    metrics.pred_instances = static_cast<int>(ranked.size());

    // AP and true positives at both thresholds.
    for (const double threshold : {0.50, 0.75}) {
      const Matching matching = greedyMatch(ranked, gts, threshold, false);
      std::vector<bool> tp_flags;
      tp_flags.reserve(ranked.size());
      for (size_t r = 0; r < ranked.size(); ++r) {
        tp_flags.push_back(matching.matched_gt[r] >= 0);
      }
      const double ap = averagePrecision(tp_flags, metrics.gt_instances);
      if (threshold == 0.50) {
        metrics.ap50 = ap;
        metrics.ntp50 = matching.true_positives;
      } else {
        metrics.ap75 = ap;
        metrics.ntp75 = matching.true_positives;
      }
    }

    const PqResult pq50 = panopticQuality(ranked, gts, 0.50);
    const PqResult pq75 = panopticQuality(ranked, gts, 0.75);
    metrics.pq50 = pq50.pq;
    metrics.pq75 = pq75.pq;

    // Superpoint accuracy over this class's GT instances.
    double class_iou_ls = 0.0;
    for (const GtInstance* gt : gts) {
      double per_instance = 0.0;
      for (const auto& [superpoint, points] : superpoint_points) {
        per_instance += instanceIoU(points, gt->points);
      }
      class_iou_ls += per_instance;
      iou_ls_sum += per_instance;
      ++iou_ls_instances;
    }
    metrics.iou_ls =
        gts.empty() ? 0.0 : class_iou_ls / static_cast<double>(gts.size());

    if (metrics.is_thing && metrics.gt_instances > 0) {
      map50_sum += metrics.ap50;
      map75_sum += metrics.ap75;
      ++map_classes;
    }
    if (metrics.is_thing) {
      report.ntp50 += metrics.ntp50;
      report.ntp75 += metrics.ntp75;
    }
    if (pq50.tp + pq50.fp + pq50.fn > 0) {
      pq50_sum += pq50.pq;
      pq75_sum += pq75.pq;
      ++pq_classes;
    }
    report.per_class.push_back(std::move(metrics));
  }

  report.map50 = map_classes > 0 ? map50_sum / map_classes : 0.0;
  report.map75 = map_classes > 0 ? map75_sum / map_classes : 0.0;
  report.pq50 = pq_classes > 0 ? pq50_sum / pq_classes : 0.0;
  report.pq75 = pq_classes > 0 ? pq75_sum / pq_classes : 0.0;
  report.iou_ls =
      iou_ls_instances > 0 ? iou_ls_sum / iou_ls_instances : 0.0;
  return report;
}

std::string MetricsReport::toText() const {
  std::string text;
  char line[256];
  for (const ClassMetrics& m : per_class) {
    std::snprintf(line, sizeof(line),
                  "class %u %s gt=%d pred=%d ap50=%.4f ap75=%.4f ntp50=%d "
                  "ntp75=%d pq50=%.4f pq75=%.4f iou_ls=%.4f\n",
                  m.id, m.name.c_str(), m.gt_instances, m.pred_instances,
                  100.0 * m.ap50, 100.0 * m.ap75, m.ntp50, m.ntp75,
                  100.0 * m.pq50, 100.0 * m.pq75, 100.0 * m.iou_ls);
    text += line;
  }
  std::snprintf(line, sizeof(line),
                "aggregate map50=%.4f map75=%.4f ntp50=%d ntp75=%d "
                "pq50=%.4f pq75=%.4f iou_ls=%.4f\n",
                100.0 * map50, 100.0 * map75, ntp50, ntp75, 100.0 * pq50,
                100.0 * pq75, 100.0 * iou_ls);
  text += line;
  return text;
}

}  // namespace spmap
