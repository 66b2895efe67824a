#ifndef SPMAP_EVAL_METRICS_H_
#define SPMAP_EVAL_METRICS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "spmap/core/frame.h"
#include "spmap/map/ply_io.h"

namespace spmap {

struct EvalParams {
  // Predictions transfer to ground-truth points by nearest neighbor within
  // this radius (meters); unmatched GT points count toward unions only.
  double transfer_radius = 0.03;
};

// Per-instance metadata carried alongside the predicted point cloud. When
// absent, instances are derived from the points with confidence 1.
struct PredictedInstanceInfo {
  uint32_t id = 0;
  ClassId category = kBackgroundClass;
  double confidence = 1.0;  // in [0, 1], ranks predictions for AP
};

struct ClassMetrics {
  ClassId id = kBackgroundClass;
  std::string name;
  bool is_thing = false;
  int gt_instances = 0;
  int pred_instances = 0;
  double ap50 = 0.0;  // fractions in [0, 1]; reported x100 in text output
  double ap75 = 0.0;
  int ntp50 = 0;
  int ntp75 = 0;
  double pq50 = 0.0;
  double pq75 = 0.0;
  double iou_ls = 0.0;
};

struct MetricsReport {
  std::vector<ClassMetrics> per_class;
  // Aggregates: mAP over thing classes with ground truth, class-summed
  // true positives, class-averaged PQ, instance-averaged superpoint IoU.
  double map50 = 0.0;
  double map75 = 0.0;
  int ntp50 = 0;
  int ntp75 = 0;
  double pq50 = 0.0;
  double pq75 = 0.0;
  double iou_ls = 0.0;

  // One record per class plus the aggregate line; percentages x100 with
  // fixed formatting.
  std::string toText() const;
};

// Intersection over union of two sorted point-index sets.
double instanceIoU(const std::vector<int>& a, const std::vector<int>& b);

// Full metric suite: mAP at IoU 0.50/0.75, true-positive counts, panoptic
// quality, and superpoint accuracy, all computed on the ground-truth points
// after nearest-neighbor label transfer.
MetricsReport evaluatePredictions(
    const LabeledPoints& predictions,
    const std::vector<PredictedInstanceInfo>& instance_info,
    const LabeledPoints& ground_truth, const ClassTable& classes,
    const EvalParams& params = {});

}  // namespace spmap

#endif  // SPMAP_EVAL_METRICS_H_
