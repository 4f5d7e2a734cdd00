#pragma once

#include <span>
#include <vector>

#include "ecofusion/core.hpp"

namespace ecofusion {

/// Intersection over union; 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

struct FusionParams {
  double iou_threshold = 0.55;
  int num_sources = 1;
  bool confidence_rescale = true;

  void validate() const;
};

/// Weighted box fusion of per-source detection lists sharing one coordinate frame.
///
/// Per class, detections are pooled and visited by confidence descending (ties: source id,
/// then insertion order). Each joins the first existing cluster whose running fused box has
/// IoU > iou_threshold with it, otherwise opens a new cluster. A cluster's fused box is the
/// confidence-weighted mean of its members, its confidence the member mean, scaled by
/// min(|cluster|, num_sources) / num_sources when rescaling is on. Classes never mix.
///
/// Output is sorted by confidence descending, ties by class then cluster creation order.
/// The fused detection's source is the source of the cluster's seed detection.
std::vector<Detection> weighted_box_fusion(std::span<const std::vector<Detection>> lists,
                                           const FusionParams& params);

}  // namespace ecofusion
