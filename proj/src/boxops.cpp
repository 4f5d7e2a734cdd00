#include "ecofusion/boxops.hpp"

#include <algorithm>
#include <numeric>

namespace ecofusion {

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

void FusionParams::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw ConfigError("fusion iou_threshold must lie in (0, 1)");
  }
  if (num_sources < 1) throw ConfigError("fusion num_sources must be positive");
}

namespace {

struct Cluster {
  int cls = 0;
  std::string source;
  BoundingBox fused;
  double weighted[4] = {0, 0, 0, 0};
  double weight_sum = 0.0;
  double conf_sum = 0.0;
  int members = 0;

  void add(const Detection& d) {
    const double w = d.confidence;
    weighted[0] += w * d.box.x1;
    weighted[1] += w * d.box.y1;
    weighted[2] += w * d.box.x2;
    weighted[3] += w * d.box.y2;
    weight_sum += w;
    conf_sum += d.confidence;
    ++members;
    if (weight_sum > 0.0) {
      fused = {weighted[0] / weight_sum, weighted[1] / weight_sum, weighted[2] / weight_sum,
               weighted[3] / weight_sum};
    }
    // all-zero confidences: keep the seed box
  }
};

}  // namespace

std::vector<Detection> weighted_box_fusion(std::span<const std::vector<Detection>> lists,
                                           const FusionParams& params) {
  params.validate();

  std::vector<const Detection*> pool;
  for (const auto& list : lists) {
    for (const auto& d : list) pool.push_back(&d);
  }
  // pool order is insertion order; stable sort keeps it for full ties
  std::stable_sort(pool.begin(), pool.end(), [](const Detection* a, const Detection* b) {
    if (a->confidence != b->confidence) return a->confidence > b->confidence;
    return a->source < b->source;
  });

  std::vector<Cluster> clusters;
  for (const Detection* d : pool) {
    Cluster* target = nullptr;
    for (auto& c : clusters) {
      if (c.cls == d->cls && iou(c.fused, d->box) > params.iou_threshold) {
        target = &c;
        break;
      }
    }
    if (!target) {
      clusters.push_back(Cluster{d->cls, d->source, d->box});
      target = &clusters.back();
    }
    target->add(*d);
  }

  std::vector<Detection> out;
  out.reserve(clusters.size());
  for (const auto& c : clusters) {
    double conf = c.conf_sum / c.members;
    if (params.confidence_rescale) {
      conf *= static_cast<double>(std::min(c.members, params.num_sources)) / params.num_sources;
    }
    out.push_back(Detection{c.cls, c.fused, conf, c.source});
  }
  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (out[a].confidence != out[b].confidence) return out[a].confidence > out[b].confidence;
    return out[a].cls < out[b].cls;
  });
  std::vector<Detection> sorted;
  sorted.reserve(out.size());
  for (auto i : order) sorted.push_back(std::move(out[i]));
  return sorted;
}

}  // namespace ecofusion
