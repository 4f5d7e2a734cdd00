#include "ecofusion/eval.hpp"

#include <algorithm>
#include <numeric>

#include "ecofusion/boxops.hpp"

namespace ecofusion {

void ApAccumulator::add_image(std::span<const Detection> detections,
                              std::span<const GroundTruthObject> gts) {
  for (const auto& g : gts) ++positives_[g.cls];

  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].confidence > detections[b].confidence;
  });

  std::vector<bool> used(gts.size(), false);
  for (auto i : order) {
    const auto& d = detections[i];
    double best = -1.0;
    std::size_t best_gt = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (used[g] || gts[g].cls != d.cls) continue;
      const double v = iou(d.box, gts[g].box);
      if (v >= iou_min_ && v > best) {
        best = v;
        best_gt = g;
      }
    }
    const bool tp = best_gt < gts.size();
    if (tp) used[best_gt] = true;
    records_[d.cls].push_back(Record{d.confidence, tp});
  }
}

std::vector<PRPoint> ApAccumulator::pr_curve(int cls) const {
  std::vector<PRPoint> curve;
  auto it = records_.find(cls);
  if (it == records_.end()) return curve;
  auto recs = it->second;
  std::stable_sort(recs.begin(), recs.end(),
                   [](const Record& a, const Record& b) { return a.confidence > b.confidence; });
  const auto pit = positives_.find(cls);
  const double npos = pit == positives_.end() ? 0.0 : static_cast<double>(pit->second);
  long long tp = 0;
  long long fp = 0;
  for (const auto& r : recs) {
    (r.tp ? tp : fp) += 1;
    const double prec = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double rec = npos > 0.0 ? static_cast<double>(tp) / npos : 0.0;
    curve.push_back(PRPoint{prec, rec, r.confidence});
  }
  return curve;
}

std::optional<double> ApAccumulator::average_precision(int cls, ApInterpolation interp) const {
  const auto pit = positives_.find(cls);
  const long long npos = pit == positives_.end() ? 0 : pit->second;
  const auto rit = records_.find(cls);
  const bool has_dets = rit != records_.end() && !rit->second.empty();
  if (npos == 0) return has_dets ? std::optional<double>(0.0) : std::nullopt;
  if (!has_dets) return 0.0;

  const auto curve = pr_curve(cls);
  if (interp == ApInterpolation::eleven_point) {
    double ap = 0.0;
    for (int t = 0; t <= 10; ++t) {
      const double thr = t / 10.0;
      double p = 0.0;
      for (const auto& pt : curve) {
        if (pt.recall >= thr) p = std::max(p, pt.precision);
      }
      ap += p / 11.0;
    }
    return ap;
  }

  // all-points: area under the monotone precision envelope
  std::vector<double> mrec{0.0};
  std::vector<double> mpre{0.0};
  for (const auto& pt : curve) {
    mrec.push_back(pt.recall);
    mpre.push_back(pt.precision);
  }
  mrec.push_back(1.0);
  mpre.push_back(0.0);
  for (std::size_t i = mpre.size() - 1; i > 0; --i) mpre[i - 1] = std::max(mpre[i - 1], mpre[i]);
  double ap = 0.0;
  for (std::size_t i = 1; i < mrec.size(); ++i) {
    if (mrec[i] != mrec[i - 1]) ap += (mrec[i] - mrec[i - 1]) * mpre[i];
  }
  return ap;
}

std::vector<std::optional<double>> ApAccumulator::per_class(ApInterpolation interp) const {
  std::vector<std::optional<double>> out;
  for (int c = 0; c < num_object_classes(); ++c) out.push_back(average_precision(c, interp));
  return out;
}

std::optional<double> average_precision(std::span<const Detection> detections,
                                        std::span<const GroundTruthObject> gts, int cls,
                                        double iou_min, ApInterpolation interp) {
  ApAccumulator acc(iou_min);
  acc.add_image(detections, gts);
  return acc.average_precision(cls, interp);
}

double mean_ap(std::span<const std::optional<double>> aps) {
  double sum = 0.0;
  int n = 0;
  for (const auto& ap : aps) {
    if (ap) {
      sum += *ap;
      ++n;
    }
  }
  if (n == 0) throw Error("mAP undefined: no class has ground truth or detections");
  return sum / n;
}

std::optional<double> pooled_map(std::span<const SceneOutcome> outcomes) {
  ApAccumulator acc;
  for (const auto& o : outcomes) acc.add_image(o.detections, o.ground_truth);
  const auto aps = acc.per_class();
  if (std::none_of(aps.begin(), aps.end(), [](const auto& a) { return a.has_value(); })) return std::nullopt;
  return mean_ap(aps);
}

std::vector<ScenarioRow> scenario_report(std::span<const SceneOutcome> outcomes) {
  if (outcomes.empty()) throw Error("scenario report needs at least one result");

  const auto summarize = [](std::string name, const std::vector<const SceneOutcome*>& group) {
    ScenarioRow row;
    row.label = std::move(name);
    row.scenes = group.size();
    std::vector<SceneOutcome> copy;
    for (const auto* o : group) {
      row.mean_loss += o->loss;
      row.mean_energy_j += o->energy_j;
      row.mean_latency_s += o->latency_s;
    }
    const double n = static_cast<double>(group.size());
    row.mean_loss /= n;
    row.mean_energy_j /= n;
    row.mean_latency_s /= n;
    ApAccumulator acc;
    for (const auto* o : group) acc.add_image(o->detections, o->ground_truth);
    const auto aps = acc.per_class();
    if (std::any_of(aps.begin(), aps.end(), [](const auto& a) { return a.has_value(); })) row.map = mean_ap(aps);
    return row;
  };

  std::vector<ScenarioRow> rows;
  for (auto label : kAllLabels) {
    std::vector<const SceneOutcome*> group;
    for (const auto& o : outcomes) {
      if (o.label == label) group.push_back(&o);
    }
    if (!group.empty()) rows.push_back(summarize(std::string(to_string(label)), group));
  }
  std::vector<const SceneOutcome*> all;
  for (const auto& o : outcomes) all.push_back(&o);
  rows.push_back(summarize("Overall", all));
  return rows;
}

}  // namespace ecofusion
