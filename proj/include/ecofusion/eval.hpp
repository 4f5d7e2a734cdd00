#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecofusion/core.hpp"

namespace ecofusion {

struct PRPoint {
  double precision = 0.0;
  double recall = 0.0;
  double threshold = 0.0;
};

/// All-points (precision envelope) is the default; 11-point is the older VOC variant.
enum class ApInterpolation { all_points, eleven_point };

/// Pools true/false-positive decisions across images, per class.
///
/// Within an image, detections of a class are visited by confidence descending and each
/// takes the unmatched ground truth of highest IoU >= iou_min, so a second detection on an
/// already matched object is a false positive.
class ApAccumulator {
 public:
  explicit ApAccumulator(double iou_min = 0.5) : iou_min_(iou_min) {}

  void add_image(std::span<const Detection> detections, std::span<const GroundTruthObject> gts);

  /// nullopt when the class has neither ground truth nor detections; 0 when it has
  /// detections but no ground truth.
  std::optional<double> average_precision(int cls,
                                          ApInterpolation interp = ApInterpolation::all_points) const;
  std::vector<PRPoint> pr_curve(int cls) const;

  /// Per-class APs for ids 0..num_object_classes()-1.
  std::vector<std::optional<double>> per_class(ApInterpolation interp = ApInterpolation::all_points) const;

 private:
  struct Record {
    double confidence;
    bool tp;
  };
  double iou_min_;
  std::map<int, std::vector<Record>> records_;
  std::map<int, long long> positives_;
};

/// Single-image AP for one class.
std::optional<double> average_precision(std::span<const Detection> detections,
                                        std::span<const GroundTruthObject> gts, int cls,
                                        double iou_min = 0.5,
                                        ApInterpolation interp = ApInterpolation::all_points);

/// Mean over defined class APs; throws when none is defined.
double mean_ap(std::span<const std::optional<double>> aps);

// ---------------------------------------------------------------------------
// Experiment aggregation

struct SceneOutcome {
  ContextLabel label = ContextLabel::city;
  double loss = 0.0;
  double energy_j = 0.0;
  double latency_s = 0.0;
  std::vector<Detection> detections;
  std::vector<GroundTruthObject> ground_truth;
};

struct ScenarioRow {
  std::string label;  // context label name, or "Overall"
  std::size_t scenes = 0;
  double mean_loss = 0.0;
  double mean_energy_j = 0.0;
  double mean_latency_s = 0.0;
  std::optional<double> map;  // mAP@0.5 pooled over the row's scenes
};

/// One row per label present (label order), then "Overall": unweighted means over scenes.
std::vector<ScenarioRow> scenario_report(std::span<const SceneOutcome> outcomes);

/// Pooled mAP@0.5 over a set of scenes; nullopt when no class is defined.
std::optional<double> pooled_map(std::span<const SceneOutcome> outcomes);

}  // namespace ecofusion
