#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ecofusion/lossmodel.hpp"

using namespace ecofusion;

namespace {

Detection det(int cls, BoundingBox b, double conf) { return Detection{cls, b, conf, "x"}; }
GroundTruthObject gt(int cls, BoundingBox b) { return GroundTruthObject{cls, b}; }

}  // namespace

TEST(SmoothL1, Examples) {
  EXPECT_EQ(smooth_l1(0.0), 0.0);
  EXPECT_EQ(smooth_l1(0.5), 0.125);
  EXPECT_EQ(smooth_l1(2.0), 1.5);
  EXPECT_EQ(smooth_l1(-2.0), 1.5);
  EXPECT_EQ(smooth_l1(1.0), 0.5);
}

TEST(Matching, Examples) {
  const std::vector<GroundTruthObject> one = {gt(0, {0, 0, 10, 10})};
  auto m = match_detections(std::vector<Detection>{det(0, {0, 0, 10, 8}, 0.7)}, one, 0.5);
  EXPECT_EQ(m.matches.size(), 1u);
  EXPECT_TRUE(m.false_positives.empty());
  EXPECT_TRUE(m.misses.empty());

  m = match_detections(std::vector<Detection>{}, std::vector<GroundTruthObject>{gt(0, {0, 0, 1, 1}), gt(1, {0, 0, 1, 1})},
                       0.5);
  EXPECT_EQ(m.misses.size(), 2u);

  // IoU 0.6 at conf 0.9 and IoU 0.7 at conf 0.5: the confident one wins the gt
  const std::vector<Detection> two = {det(0, {0, 0, 10, 6}, 0.9), det(0, {0, 0, 10, 7}, 0.5)};
  m = match_detections(two, one, 0.5);
  ASSERT_EQ(m.matches.size(), 1u);
  EXPECT_EQ(m.matches[0].first, 0u);
  ASSERT_EQ(m.false_positives.size(), 1u);
  EXPECT_EQ(m.false_positives[0], 1u);
}

TEST(Matching, PrefersHighestIouAndSameClass) {
  const std::vector<GroundTruthObject> gts = {gt(0, {0, 0, 10, 10}), gt(0, {0, 0, 10, 12}), gt(1, {0, 0, 10, 11})};
  const std::vector<Detection> d = {det(0, {0, 0, 10, 11.9}, 0.8)};
  const auto m = match_detections(d, gts, 0.5);
  ASSERT_EQ(m.matches.size(), 1u);
  EXPECT_EQ(m.matches[0].second, 1u);
  EXPECT_EQ(m.misses, (std::vector<std::size_t>{0, 2}));
}

TEST(DetectionLoss, Examples) {
  const LossWeights w;
  const std::vector<GroundTruthObject> g1 = {gt(0, {0, 0, 10, 10})};

  auto perfect = detection_loss(std::vector<Detection>{det(0, {0, 0, 10, 10}, 1.0)}, g1, w);
  EXPECT_LE(perfect.total, 1e-6);
  EXPECT_GT(perfect.total, 0.0);

  const std::vector<GroundTruthObject> g2 = {gt(0, {0, 0, 10, 10}), gt(3, {20, 20, 30, 30})};
  EXPECT_EQ(detection_loss(std::vector<Detection>{}, g2, w).total, 8.0);

  // residuals (0.1, 0, 0, 0): x1 shifted by a tenth of the width
  const auto r = detection_loss(std::vector<Detection>{det(0, {1, 0, 10, 10}, 0.5)}, g1, w);
  const double cls = -std::log(0.5);
  const double reg = 0.5 * 0.1 * 0.1;
  EXPECT_NEAR(r.classification, cls, 1e-15);
  EXPECT_NEAR(r.regression, reg, 1e-15);
  EXPECT_EQ(r.total, r.classification + r.regression);
  EXPECT_NEAR(r.classification, 0.6931, 5e-5);
  EXPECT_NEAR(r.regression, 0.005, 1e-12);
  EXPECT_NEAR(r.total, 0.6981, 5e-5);
}

TEST(DetectionLoss, ClampingKeepsLogsFinite) {
  const LossWeights w;
  const std::vector<GroundTruthObject> g1 = {gt(0, {0, 0, 10, 10})};
  const auto zero_conf = detection_loss(std::vector<Detection>{det(0, {0, 0, 10, 10}, 0.0)}, g1, w);
  EXPECT_NEAR(zero_conf.total, -std::log(1e-7), 1e-9);
  const auto fp_one = detection_loss(std::vector<Detection>{det(1, {50, 50, 60, 60}, 1.0)}, {}, w);
  EXPECT_NEAR(fp_one.total, -std::log(1e-7), 1e-9);
}

TEST(DetectionLoss, MeanNormalizesByObjects) {
  const LossWeights w;
  const std::vector<GroundTruthObject> g2 = {gt(0, {0, 0, 10, 10}), gt(3, {20, 20, 30, 30})};
  EXPECT_EQ(mean_detection_loss(std::vector<Detection>{}, g2, w), 4.0);
  const auto fp = det(0, {0, 0, 10, 10}, 0.5);
  EXPECT_NEAR(mean_detection_loss(std::vector<Detection>{fp}, std::vector<GroundTruthObject>{}, w), std::log(2.0), 1e-15);
}

TEST(DetectionLoss, NonNegativeAndComponentsSum) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  const LossWeights w;
  for (int t = 0; t < 500; ++t) {
    std::vector<GroundTruthObject> gts;
    std::vector<Detection> dets;
    for (int i = 0; i < 4; ++i) {
      const double x = 30 * u(rng), y = 30 * u(rng);
      gts.push_back(gt(static_cast<int>(u(rng) * 2), {x, y, x + 10 + 10 * u(rng), y + 10 + 10 * u(rng)}));
      dets.push_back(det(static_cast<int>(u(rng) * 2), {x + u(rng), y, x + 12, y + 12}, u(rng)));
    }
    const auto l = detection_loss(dets, gts, w);
    EXPECT_GE(l.classification, 0.0);
    EXPECT_GE(l.regression, 0.0);
    EXPECT_EQ(l.total, l.classification + l.regression);
  }
}

TEST(LossWeights, Validation) {
  LossWeights w;
  w.epsilon = 0;
  EXPECT_THROW(w.validate(), ConfigError);
  w = LossWeights{};
  w.lambda_miss = -1;
  EXPECT_THROW(w.validate(), ConfigError);
  w = LossWeights{};
  w.iou_min = 1.0;
  EXPECT_THROW(w.validate(), ConfigError);
}
