#include <gtest/gtest.h>

#include "t2veval/error.hpp"
#include "t2veval/video_ops.hpp"

using namespace t2veval;

TEST(InceptionScore, IdenticalDistributionsGiveOne) {
  std::vector<std::vector<double>> s(6, std::vector<double>{0.2, 0.3, 0.5});
  EXPECT_NEAR(inception_score(s), 1.0, 1e-12);
}

TEST(InceptionScore, DistinctOneHotSamplesGiveK) {
  for (int k = 1; k <= 8; ++k) {
    std::vector<std::vector<double>> s;
    for (int i = 0; i < k; ++i) {
      std::vector<double> p(k, 0.0);
      p[i] = 1.0;
      s.push_back(p);
    }
    EXPECT_NEAR(inception_score(s), k, 1e-9);
  }
}

TEST(InceptionScore, SplitsAverageChunkScores) {
  // Two chunks: {e0, e1} scores 2, {e0, e0} scores 1.
  std::vector<std::vector<double>> s{{1, 0}, {0, 1}, {1, 0}, {1, 0}};
  EXPECT_NEAR(inception_score(s, 2), 1.5, 1e-12);
}

TEST(InceptionScore, RejectsNonProbabilityRows) {
  std::vector<std::vector<double>> bad{{0.5, 0.6}};
  EXPECT_THROW(inception_score(bad), Error);
  std::vector<std::vector<double>> ragged{{1.0}, {0.5, 0.5}};
  EXPECT_THROW(inception_score(ragged), Error);
}

TEST(Kl, HandComputed) {
  const std::vector<double> p{0.5, 0.5, 0.0}, q{0.25, 0.25, 0.5};
  EXPECT_NEAR(kl_divergence(p, q), std::log(2.0), 1e-12);
}

TEST(Warp, ZeroFlowOnIdenticalFramesIsZero) {
  Image a(6, 5, {10, 20, 30});
  a.set(2, 2, {200, 100, 0});
  EXPECT_EQ(warping_mse(a, a, FlowField(6, 5)), 0.0);
}

TEST(Warp, IntegerShiftIsExactAwayFromBorder) {
  Image a(12, 10), b(12, 10);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 12; ++x) a.set(x, y, {static_cast<std::uint8_t>(x * 20), static_cast<std::uint8_t>(y * 20), 5});
  // b is a moved right by 2; the two leftmost columns are outside the margin.
  for (int y = 0; y < 10; ++y)
    for (int x = 2; x < 12; ++x) b.set(x, y, {a.at(x - 2, y, 0), a.at(x - 2, y, 1), a.at(x - 2, y, 2)});
  EXPECT_NEAR(warping_mse(a, b, FlowField(12, 10, 2.f, 0.f), 3), 0.0, 1e-12);
  EXPECT_GT(warping_mse(a, b, FlowField(12, 10), 3), 0.0);
}

TEST(Warp, BilinearHalfPixel) {
  FloatImage f{2, 1, 1, {0.0, 10.0}};
  EXPECT_DOUBLE_EQ(sample_bilinear(f, 0.5, 0.0, 0), 5.0);
  EXPECT_DOUBLE_EQ(sample_bilinear(f, 7.0, 0.0, 0), 10.0);
}

TEST(Flow, MeanMagnitude) {
  EXPECT_DOUBLE_EQ(mean_flow_magnitude(FlowField(4, 4, 3.f, 4.f)), 5.0);
}
