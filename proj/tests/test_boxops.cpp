#include <gtest/gtest.h>

#include <random>

#include "ecofusion/boxops.hpp"
#include "oracles.hpp"

using namespace ecofusion;

namespace {

Detection det(int cls, double x1, double y1, double x2, double y2, double conf, std::string src = "a") {
  return Detection{cls, BoundingBox{x1, y1, x2, y2}, conf, std::move(src)};
}

FusionParams params(int n, bool rescale = true) {
  FusionParams p;
  p.num_sources = n;
  p.confidence_rescale = rescale;
  return p;
}

}  // namespace

TEST(Iou, Examples) {
  EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
  EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {20, 20, 30, 30}), 0.0);
  EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {10, 0, 20, 10}), 0.0);  // touching edge
  EXPECT_NEAR(iou({0, 0, 10, 10}, {5, 0, 15, 10}), 50.0 / 150.0, 1e-15);
  EXPECT_NEAR(iou({0, 0, 10, 10}, {0, 0, 10, 12}), 100.0 / 120.0, 1e-15);
}

TEST(Iou, SymmetricBoundedAndMatchesOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 100);
  for (int i = 0; i < 2000; ++i) {
    const double ax = u(rng), ay = u(rng), bx = u(rng), by = u(rng);
    const BoundingBox a{ax, ay, ax + 1 + u(rng), ay + 1 + u(rng)};
    const BoundingBox b{bx, by, bx + 1 + u(rng), by + 1 + u(rng)};
    const double v = iou(a, b);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_DOUBLE_EQ(v, iou(b, a));
    EXPECT_NEAR(v, oracle::iou(a, b), 1e-12);
  }
}

TEST(Wbf, HandExampleMergesWeighted) {
  const std::vector<std::vector<Detection>> lists = {{det(0, 0, 0, 10, 10, 0.9, "a")},
                                                     {det(0, 0, 0, 10, 12, 0.3, "b")}};
  for (int n : {1, 2, 3}) {
    const auto out = weighted_box_fusion(lists, params(n));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].box.y2, 10.5);
    EXPECT_EQ(out[0].box.x2, 10.0);
    EXPECT_NEAR(out[0].confidence, 0.6 * std::min(2, n) / n, 1e-15);
    EXPECT_EQ(out[0].source, "a");
  }
}

TEST(Wbf, SingleListPassesThroughWithoutOverlap) {
  const std::vector<std::vector<Detection>> lists = {{det(0, 0, 0, 10, 10, 0.8), det(1, 50, 50, 60, 60, 0.4)}};
  const auto out = weighted_box_fusion(lists, params(1));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], lists[0][0]);
  EXPECT_EQ(out[1], lists[0][1]);
}

TEST(Wbf, ClassesNeverMix) {
  const std::vector<std::vector<Detection>> lists = {{det(0, 0, 0, 10, 10, 0.9)}, {det(1, 0, 0, 10, 10, 0.8, "b")}};
  EXPECT_EQ(weighted_box_fusion(lists, params(2)).size(), 2u);
}

TEST(Wbf, ThresholdIsStrict) {
  // IoU exactly 0.5 against threshold 0.5 stays separate
  FusionParams p = params(2);
  p.iou_threshold = 0.5;
  const std::vector<std::vector<Detection>> lists = {{det(0, 0, 0, 10, 10, 0.9)},
                                                     {det(0, 0, 0, 10, 20, 0.5, "b")}};
  EXPECT_EQ(weighted_box_fusion(lists, p).size(), 2u);
}

TEST(Wbf, EmptyInputAndValidation) {
  EXPECT_TRUE(weighted_box_fusion(std::vector<std::vector<Detection>>{}, params(1)).empty());
  FusionParams bad;
  bad.iou_threshold = 1.0;
  EXPECT_THROW(weighted_box_fusion(std::vector<std::vector<Detection>>{}, bad), ConfigError);
  bad = FusionParams{};
  bad.num_sources = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Wbf, RescaleOffKeepsMeanConfidence) {
  const std::vector<std::vector<Detection>> lists = {{det(2, 0, 0, 10, 10, 0.9)}, {}};
  const auto out = weighted_box_fusion(lists, params(2, false));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].confidence, 0.9);
}

TEST(Wbf, OutputSortedAndConfidenceBounded) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 300; ++t) {
    std::vector<std::vector<Detection>> lists(3);
    for (auto& l : lists) {
      for (int i = 0; i < 5; ++i) {
        const double x = 40 * u(rng), y = 40 * u(rng);
        l.push_back(det(static_cast<int>(u(rng) * 3), x, y, x + 10 + 10 * u(rng), y + 10 + 10 * u(rng), u(rng)));
      }
    }
    const auto out = weighted_box_fusion(lists, params(3));
    double total = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      EXPECT_GE(out[i].confidence, 0.0);
      EXPECT_LE(out[i].confidence, 1.0);
      if (i) {
        EXPECT_GE(out[i - 1].confidence, out[i].confidence);
      }
      total += out[i].confidence;
    }
    EXPECT_LE(out.size(), 15u);
    (void)total;
  }
}

TEST(Wbf, MatchesOracleOnSmallRandomInputs) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 2000; ++t) {
    const int nsrc = 1 + static_cast<int>(u(rng) * 3);
    std::vector<std::vector<Detection>> lists(static_cast<std::size_t>(nsrc));
    const int nbox = 1 + static_cast<int>(u(rng) * 4);
    for (int i = 0; i < nbox; ++i) {
      const double x = 10 * u(rng), y = 10 * u(rng);
      auto& l = lists[static_cast<std::size_t>(u(rng) * nsrc)];
      l.push_back(det(static_cast<int>(u(rng) * 2), x, y, x + 5 + 10 * u(rng), y + 5 + 10 * u(rng),
                      std::round(u(rng) * 10) / 10, "s" + std::to_string(&l - lists.data())));
    }
    const auto got = weighted_box_fusion(lists, params(nsrc));
    auto want = oracle::wbf(lists, 0.55, nsrc, true);
    ASSERT_EQ(got.size(), want.size());
    for (const auto& g : got) {
      const bool found = std::any_of(want.begin(), want.end(), [&](const Detection& w) {
        return w.cls == g.cls && w.source == g.source && std::abs(w.confidence - g.confidence) < 1e-12 &&
               std::abs(w.box.x1 - g.box.x1) < 1e-9 && std::abs(w.box.y2 - g.box.y2) < 1e-9 &&
               std::abs(w.box.x2 - g.box.x2) < 1e-9 && std::abs(w.box.y1 - g.box.y1) < 1e-9;
      });
      EXPECT_TRUE(found) << "case " << t;
    }
  }
}
