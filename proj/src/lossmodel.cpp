#include "ecofusion/lossmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ecofusion/boxops.hpp"

namespace ecofusion {

void LossWeights::validate() const {
  if (lambda_miss < 0.0 || lambda_fp < 0.0) throw ConfigError("loss weights must be non-negative");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw ConfigError("loss epsilon must lie in (0, 0.5)");
  if (!(iou_min > 0.0 && iou_min < 1.0)) throw ConfigError("loss iou_min must lie in (0, 1)");
}

double smooth_l1(double x) {
  const double a = std::abs(x);
  return a < 1.0 ? 0.5 * x * x : a - 0.5;
}

Matching match_detections(std::span<const Detection> preds, std::span<const GroundTruthObject> gts,
                          double iou_min) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return preds[a].confidence > preds[b].confidence;
  });

  Matching m;
  std::vector<bool> taken(gts.size(), false);
  for (auto p : order) {
    double best = -1.0;
    std::size_t best_gt = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g] || gts[g].cls != preds[p].cls) continue;
      const double v = iou(preds[p].box, gts[g].box);
      if (v >= iou_min && v > best) {
        best = v;
        best_gt = g;
      }
    }
    if (best_gt < gts.size()) {
      taken[best_gt] = true;
      m.matches.emplace_back(p, best_gt);
    } else {
      m.false_positives.push_back(p);
    }
  }
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (!taken[g]) m.misses.push_back(g);
  }
  return m;
}

LossBreakdown detection_loss(std::span<const Detection> preds, std::span<const GroundTruthObject> gts,
                             const LossWeights& weights) {
  const auto m = match_detections(preds, gts, weights.iou_min);
  const auto clamp = [&](double c) { return std::clamp(c, weights.epsilon, 1.0 - weights.epsilon); };

  LossBreakdown out;
  for (const auto& [p, g] : m.matches) {
    const auto& pb = preds[p].box;
    const auto& gb = gts[g].box;
    out.classification += -std::log(clamp(preds[p].confidence));
    const double w = gb.width();
    const double h = gb.height();
    out.regression += smooth_l1((pb.x1 - gb.x1) / w) + smooth_l1((pb.y1 - gb.y1) / h) +
                      smooth_l1((pb.x2 - gb.x2) / w) + smooth_l1((pb.y2 - gb.y2) / h);
  }
  out.classification += weights.lambda_miss * static_cast<double>(m.misses.size());
  for (auto p : m.false_positives) {
    out.classification += weights.lambda_fp * -std::log(1.0 - clamp(preds[p].confidence));
  }
  out.total = out.classification + out.regression;
  return out;
}

double mean_detection_loss(std::span<const Detection> preds, std::span<const GroundTruthObject> gts,
                           const LossWeights& weights) {
  const auto n = std::max<std::size_t>(1, gts.size());
  return detection_loss(preds, gts, weights).total / static_cast<double>(n);
}

}  // namespace ecofusion
