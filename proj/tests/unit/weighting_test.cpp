#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "deepagg/channel_weighting.hpp"
#include "deepagg/error.hpp"
#include "deepagg/spatial_weighting.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace deepagg;

namespace {

SpatialMap from_grid(const oracle::Grid& g) {
  SpatialMap m(g.size(), g[0].size());
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g[0].size(); ++j) m.at(i, j) = g[i][j];
  return m;
}

FeatureTensor single_channel(std::size_t h, std::size_t w, std::vector<float> v) {
  return FeatureTensor(1, h, w, std::move(v));
}

}  // namespace

TEST(ResponseMap, ZeroTensorGivesZeroMap) {
  const auto s = response_map(FeatureTensor(3, 2, 2));
  for (double v : s.values()) EXPECT_EQ(v, 0.0);
}

TEST(ResponseMap, SingleChannelIsIdentity) {
  const auto t = single_channel(2, 2, {1.5f, 2.0f, -3.0f, 0.25f});
  const auto s = response_map(t);
  for (std::size_t n = 0; n < 4; ++n) EXPECT_EQ(s.values()[n], static_cast<double>(t.values()[n]));
}

TEST(ResponseMap, MatchesLoopOracle) {
  std::mt19937_64 rng(11);
  const auto t = testgen::random_tensor(rng, 3, 4, 5);
  const auto expect = oracle::response(t);
  const auto s = response_map(t);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(s.at(i, j), expect[i][j], 1e-12);
}

TEST(SelectCenter, FullSelectionIsGridCenter) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = testgen::between(rng, 1, 9), w = testgen::between(rng, 1, 9);
    const auto t = testgen::random_tensor(rng, 2, h, w);
    const auto c = select_center(response_map(t), AlphaFraction(1.0));
    EXPECT_EQ(c, grid_center(h, w));
    EXPECT_EQ(c.i, (static_cast<double>(h) + 1) / 2);
    EXPECT_EQ(c.j, (static_cast<double>(w) + 1) / 2);
  }
}

TEST(SelectCenter, UniqueMaximumIsSelectedAlone) {
  SpatialMap s(3, 3, 0.0);
  s.at(0, 2) = 5.0;
  EXPECT_EQ(select_center(s, AlphaFraction(0.1)), (GridPoint{1.0, 3.0}));
}

TEST(SelectCenter, TopThreeOfDescendingGrid) {
  const SpatialMap s(3, 3, std::vector<double>{9, 8, 7, 6, 5, 4, 3, 2, 1});
  EXPECT_EQ(select_center(s, AlphaFraction(1.0 / 3.0)), (GridPoint{1.0, 2.0}));
}

TEST(SelectCenter, TiesKeepRowMajorOrder) {
  const SpatialMap s(2, 2, std::vector<double>{1, 1, 1, 1});
  EXPECT_EQ(select_center(s, AlphaFraction(0.25)), (GridPoint{1.0, 1.0}));
  EXPECT_EQ(select_center(s, AlphaFraction(0.5)), (GridPoint{1.0, 1.5}));
}

TEST(SelectCenter, MatchesSortOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto h = testgen::between(rng, 1, 8), w = testgen::between(rng, 1, 8);
    // Coarse values so ties are common.
    std::uniform_int_distribution<int> coarse(0, 3);
    std::vector<float> v(h * w);
    for (auto& x : v) x = static_cast<float>(coarse(rng));
    const auto t = single_channel(h, w, v);
    const double alpha = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
    const auto [ci, cj] = oracle::center(oracle::response(t), alpha);
    const auto c = select_center(response_map(t), AlphaFraction(alpha));
    EXPECT_DOUBLE_EQ(c.i, ci);
    EXPECT_DOUBLE_EQ(c.j, cj);
  }
}

TEST(AlphaFraction, RejectsOutOfRange) {
  EXPECT_THROW(AlphaFraction(0.0), Error);
  EXPECT_THROW(AlphaFraction(1.5), Error);
  EXPECT_THROW(AlphaFraction(std::nan("")), Error);
  EXPECT_NO_THROW(AlphaFraction(1.0));
}

TEST(TopCount, RoundsHalfAwayAndAtLeastOne) {
  EXPECT_EQ(top_count(AlphaFraction(0.1), 25), 3u);  // 2.5
  EXPECT_EQ(top_count(AlphaFraction(0.01), 25), 1u);
  EXPECT_EQ(top_count(AlphaFraction(1.0), 49), 49u);
}

TEST(DefaultSigma, EdgeRule) {
  EXPECT_DOUBLE_EQ(default_sigma(10, 10), 2.5);
  EXPECT_DOUBLE_EQ(default_sigma(6, 8), 2.0);
  EXPECT_DOUBLE_EQ(default_sigma(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(default_sigma(1, 1, SigmaRule::Corner), 0.5);
}

TEST(DefaultSigma, CornerRule) {
  EXPECT_DOUBLE_EQ(default_sigma(6, 8, SigmaRule::Corner), 0.5 * std::hypot(3.0, 4.0));
}

TEST(GaussianMap, PeakAtIntegerCenter) {
  const auto g = gaussian_map(5, 5, {{3.0, 3.0}, 2.0});
  EXPECT_DOUBLE_EQ(g.at(2, 2), 1.0 / (2.0 * std::numbers::pi * 4.0));
}

TEST(GaussianMap, KnownOffCenterValue) {
  // Cell (4,5) relative to center (3,3), sigma 2: d^2 = 5.
  const auto g = gaussian_map(5, 5, {{3.0, 3.0}, 2.0});
  const double expect = std::exp(-5.0 / 8.0) / (8.0 * std::numbers::pi);
  EXPECT_NEAR(g.at(3, 4), expect, 1e-15);
  EXPECT_NEAR(g.at(3, 4), 0.0212974, 1e-7);
}

TEST(GaussianMap, RadiallySymmetricAndDecaying) {
  const auto g = gaussian_map(7, 7, {{4.0, 4.0}, 1.75});
  EXPECT_DOUBLE_EQ(g.at(1, 3), g.at(3, 1));
  EXPECT_DOUBLE_EQ(g.at(0, 0), g.at(6, 6));
  EXPECT_GT(g.at(3, 3), g.at(3, 4));
  EXPECT_GT(g.at(3, 4), g.at(3, 5));
  EXPECT_GT(g.at(3, 5), g.at(3, 6));
}

TEST(GaussianMap, RejectsNonPositiveSigma) {
  try {
    gaussian_map(2, 2, {{1.0, 1.0}, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(AdaptiveGaussian, AlphaOneEqualsCentered) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = testgen::random_tensor(rng, 3, testgen::between(rng, 1, 8),
                                          testgen::between(rng, 1, 8));
    EXPECT_EQ(testgen::vec(adaptive_gaussian(t, AlphaFraction(1.0)).values()),
              testgen::vec(centered_gaussian(t.height(), t.width()).values()));
  }
}

TEST(AdaptiveGaussian, PeaksAtHotCell) {
  std::vector<float> v(20, 0.0f);
  v[1 * 5 + 3] = 10.0f;
  const auto m = adaptive_gaussian(single_channel(4, 5, v), AlphaFraction(0.05));
  std::size_t best = 0;
  for (std::size_t n = 1; n < m.values().size(); ++n)
    if (m.values()[n] > m.values()[best]) best = n;
  EXPECT_EQ(best, 1u * 5 + 3);
}

TEST(AdaptiveGaussian, MatchesCompositionOracle) {
  std::mt19937_64 rng(13);
  const auto t = testgen::random_tensor(rng, 4, 5, 6);
  const auto [ci, cj] = oracle::center(oracle::response(t), 0.1);
  const auto expect = oracle::gaussian_grid(5, 6, ci, cj, 6.0 / 4.0);
  const auto m = adaptive_gaussian(t, AlphaFraction(0.1));
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(m.at(i, j), expect[i][j], 1e-15);
}

TEST(WeightedSums, OnesMapIsPlainSum) {
  const FeatureTensor t(2, 1, 3, std::vector<float>{1, 2, 3, -1, 0.5f, 4});
  const auto om = weighted_channel_sums(t, SpatialMap(1, 3, 1.0));
  EXPECT_DOUBLE_EQ(om[0], 6.0);
  EXPECT_DOUBLE_EQ(om[1], 3.5);
}

TEST(WeightedSums, ZeroTensorAndMismatch) {
  const auto om = weighted_channel_sums(FeatureTensor(3, 2, 2), SpatialMap(2, 2, 0.7));
  for (double v : om) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(weighted_channel_sums(FeatureTensor(3, 2, 2), SpatialMap(2, 3, 1.0)), Error);
}

TEST(WeightedSums, MatchesTripleLoopOracle) {
  std::mt19937_64 rng(17);
  const auto t = testgen::random_tensor(rng, 3, 4, 5, -1.0f, 1.0f);
  oracle::Grid g(4, std::vector<double>(5));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& row : g)
    for (auto& v : row) v = u(rng);
  const auto expect = oracle::omega(t, g);
  const auto om = weighted_channel_sums(t, from_grid(g));
  for (std::size_t k = 0; k < 3; ++k)
    EXPECT_LE(std::abs(om[k] - expect[k]), 1e-9 * std::max(1.0, std::abs(expect[k])));
}

TEST(ElementItems, HandValues) {
  EXPECT_EQ(element_value_items({0.0, 0.0}, 2, 2), (ChannelVector{0.0, 0.0}));
  EXPECT_EQ(element_value_items({6.0}, 2, 3), (ChannelVector{1.0}));
  EXPECT_EQ(element_value_items({2.0, -6.0}, 2, 1), (ChannelVector{1.0, 9.0}));
}

TEST(EChannel, EqualItemsGiveLogK) {
  for (std::size_t k : {1u, 2u, 7u, 512u}) {
    for (double v : {0.0, 1e-9, 0.3, 42.0}) {
      const auto w = echannel_weights(ChannelVector(k, v));
      for (double x : w) EXPECT_NEAR(x, std::log(static_cast<double>(k)), 1e-12);
    }
  }
}

TEST(EChannel, TwoChannelHandValues) {
  const auto w = echannel_weights({1.0, 3.0}, Epsilon(1e-6));
  EXPECT_NEAR(w[0], std::log(4.000002 / 1.000001), 1e-12);
  EXPECT_NEAR(w[1], std::log(4.000002 / 3.000001), 1e-12);
  EXPECT_NEAR(w[0], 1.386294, 1e-6);
  EXPECT_NEAR(w[1], 0.287682, 1e-6);
}

TEST(EChannel, AntiMonotoneInItems) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    ChannelVector b(testgen::between(rng, 2, 32));
    for (auto& v : b) v = u(rng);
    const auto w = echannel_weights(b);
    for (std::size_t a = 0; a < b.size(); ++a)
      for (std::size_t c = 0; c < b.size(); ++c)
        if (b[a] < b[c]) EXPECT_GT(w[a], w[c]);
  }
}

TEST(EChannel, RejectsNegativeItemsAndBadEpsilon) {
  EXPECT_THROW(echannel_weights({1.0, -0.1}), Error);
  EXPECT_THROW(Epsilon(0.0), Error);
  EXPECT_THROW(Epsilon(-1.0), Error);
}

TEST(Sparsity, CountsNonzeroCells) {
  const FeatureTensor t(3, 2, 2, std::vector<float>{0, 0, 0, 0, 1, 2, 3, 4, 0, 0, 7, 0});
  EXPECT_EQ(sparsity_items(t), (ChannelVector{0.0, 1.0, 0.25}));
}

TEST(SChannel, HandValuesAndIdentity) {
  const auto w = schannel_weights({0.0, 1.0}, Epsilon(1e-6));
  EXPECT_NEAR(w[0], std::log(1.000002 / 1e-6), 1e-9);
  EXPECT_NEAR(w[1], std::log(1.000002 / 1.000001), 1e-15);
  EXPECT_NEAR(w[0], 13.8155, 1e-4);
  EXPECT_NEAR(w[1], 1.0e-6, 1e-9);
  for (double x : schannel_weights(ChannelVector(5, 0.4))) EXPECT_NEAR(x, std::log(5.0), 1e-12);
}

TEST(SChannel, AntiMonotoneInSparsity) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    ChannelVector q(testgen::between(rng, 2, 16));
    for (auto& v : q) v = u(rng);
    const auto w = schannel_weights(q);
    for (std::size_t a = 0; a < q.size(); ++a)
      for (std::size_t c = 0; c < q.size(); ++c)
        if (q[a] < q[c]) EXPECT_GT(w[a], w[c]);
  }
}
