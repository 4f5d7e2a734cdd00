// Independent reference implementations used as test oracles. They are written for
// clarity, not speed, and deliberately avoid calling the library kernels they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "ecofusion/core.hpp"

namespace oracle {

using ecofusion::BoundingBox;
using ecofusion::Detection;
using ecofusion::GroundTruthObject;

inline double overlap_1d(double a1, double a2, double b1, double b2) {
  const double lo = a1 > b1 ? a1 : b1;
  const double hi = a2 < b2 ? a2 : b2;
  return hi > lo ? hi - lo : 0.0;
}

inline double iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = overlap_1d(a.x1, a.x2, b.x1, b.x2) * overlap_1d(a.y1, a.y2, b.y1, b.y2);
  if (inter == 0.0) return 0.0;
  const double area_a = (a.x2 - a.x1) * (a.y2 - a.y1);
  const double area_b = (b.x2 - b.x1) * (b.y2 - b.y1);
  return inter / (area_a + area_b - inter);
}

// Greedy clustering with members kept explicitly and the fused box recomputed from scratch.
inline std::vector<Detection> wbf(const std::vector<std::vector<Detection>>& lists, double thr,
                                  int num_sources, bool rescale) {
  struct Item {
    Detection d;
    std::size_t order;
  };
  std::vector<Item> items;
  for (const auto& l : lists) {
    for (const auto& d : l) items.push_back({d, items.size()});
  }
  // selection sort by (confidence desc, source asc, insertion)
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::size_t best = i;
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      const auto& a = items[j];
      const auto& b = items[best];
      bool before = false;
      if (a.d.confidence != b.d.confidence) {
        before = a.d.confidence > b.d.confidence;
      } else if (a.d.source != b.d.source) {
        before = a.d.source < b.d.source;
      } else {
        before = a.order < b.order;
      }
      if (before) best = j;
    }
    std::swap(items[i], items[best]);
  }

  auto fuse = [](const std::vector<Detection>& members) {
    double w = 0, x1 = 0, y1 = 0, x2 = 0, y2 = 0;
    for (const auto& m : members) {
      w += m.confidence;
      x1 += m.confidence * m.box.x1;
      y1 += m.confidence * m.box.y1;
      x2 += m.confidence * m.box.x2;
      y2 += m.confidence * m.box.y2;
    }
    if (w == 0) return members.front().box;
    return BoundingBox{x1 / w, y1 / w, x2 / w, y2 / w};
  };

  std::vector<std::vector<Detection>> clusters;
  for (const auto& it : items) {
    bool placed = false;
    for (auto& c : clusters) {
      if (c.front().cls == it.d.cls && oracle::iou(fuse(c), it.d.box) > thr) {
        c.push_back(it.d);
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({it.d});
  }

  std::vector<Detection> out;
  for (const auto& c : clusters) {
    double s = 0;
    for (const auto& m : c) s += m.confidence;
    double conf = s / static_cast<double>(c.size());
    if (rescale) {
      const int k = std::min<int>(static_cast<int>(c.size()), num_sources);
      conf = conf * k / num_sources;
    }
    out.push_back(Detection{c.front().cls, fuse(c), conf, c.front().source});
  }
  return out;
}

// TP flags for detections in confidence-descending order (stable), highest-IoU unmatched gt.
inline std::vector<std::pair<double, bool>> tp_flags(const std::vector<Detection>& dets,
                                                     const std::vector<GroundTruthObject>& gts, int cls,
                                                     double iou_min) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dets[i].cls == cls) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].confidence > dets[b].confidence; });
  std::vector<bool> used(gts.size(), false);
  std::vector<std::pair<double, bool>> out;
  for (auto i : idx) {
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gts[g].cls != cls || used[g]) continue;
      const double v = oracle::iou(dets[i].box, gts[g].box);
      if (v >= iou_min && (best < 0 || v > best_iou)) {
        best = static_cast<int>(g);
        best_iou = v;
      }
    }
    if (best >= 0) used[static_cast<std::size_t>(best)] = true;
    out.emplace_back(dets[i].confidence, best >= 0);
  }
  return out;
}

// All-points AP as a sum over true positives of (1/npos) * best precision at any rank >= it.
inline std::optional<double> ap(const std::vector<Detection>& dets, const std::vector<GroundTruthObject>& gts,
                                int cls, double iou_min = 0.5) {
  int npos = 0;
  for (const auto& g : gts) npos += g.cls == cls;
  const auto flags = tp_flags(dets, gts, cls, iou_min);
  if (npos == 0) return flags.empty() ? std::nullopt : std::optional<double>(0.0);
  std::vector<double> precision;
  int tp = 0;
  for (std::size_t k = 0; k < flags.size(); ++k) {
    tp += flags[k].second;
    precision.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
  }
  double total = 0.0;
  for (std::size_t k = 0; k < flags.size(); ++k) {
    if (!flags[k].second) continue;
    double best = 0.0;
    for (std::size_t j = k; j < flags.size(); ++j) best = std::max(best, precision[j]);
    total += best / npos;
  }
  return total;
}

inline std::optional<double> map(const std::vector<Detection>& dets, const std::vector<GroundTruthObject>& gts,
                                 int num_classes) {
  double s = 0;
  int n = 0;
  for (int c = 0; c < num_classes; ++c) {
    if (auto a = ap(dets, gts, c)) {
      s += *a;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return s / n;
}

inline double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace oracle
