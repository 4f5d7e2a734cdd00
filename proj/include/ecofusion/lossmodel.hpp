#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ecofusion/core.hpp"

namespace ecofusion {

struct LossBreakdown {
  double classification = 0.0;
  double regression = 0.0;
  double total = 0.0;
};

struct LossWeights {
  double lambda_miss = 4.0;
  double lambda_fp = 1.0;
  double epsilon = 1e-7;
  double iou_min = 0.5;

  void validate() const;
};

/// 0.5 x^2 for |x| < 1, |x| - 0.5 otherwise.
double smooth_l1(double x);

struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (prediction, ground truth)
  std::vector<std::size_t> false_positives;
  std::vector<std::size_t> misses;
};

/// Greedy one-to-one matching. Predictions are visited by confidence descending (ties by
/// index); each takes the unmatched same-class ground truth of highest IoU >= iou_min
/// (ties by lower index).
Matching match_detections(std::span<const Detection> preds, std::span<const GroundTruthObject> gts,
                          double iou_min = 0.5);

/// Post-hoc detection loss of a prediction set against ground truth.
///
/// classification = sum over matches of -ln(c) + lambda_miss per miss
///                  + lambda_fp * -ln(1 - c) per false positive
/// regression     = sum over matches of smooth_l1 on the four corner residuals, x residuals
///                  divided by the ground-truth width and y residuals by its height.
/// Confidences are clamped to [eps, 1 - eps].
LossBreakdown detection_loss(std::span<const Detection> preds, std::span<const GroundTruthObject> gts,
                             const LossWeights& weights = {});

/// Per-scene mean: total loss divided by max(1, number of ground-truth objects).
double mean_detection_loss(std::span<const Detection> preds, std::span<const GroundTruthObject> gts,
                           const LossWeights& weights = {});

}  // namespace ecofusion
