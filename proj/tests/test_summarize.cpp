#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "sccs/summarize.hpp"
#include "support/oracles.hpp"

using namespace sccs;
using namespace sccs::summarize;

namespace {

Matrix identity(std::size_t d) {
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

FrameBuffer constant_frame(std::size_t w, std::size_t h, std::uint8_t v) {
  return {w, h, std::vector<std::uint8_t>(w * h, v)};
}

FrameBuffer checkerboard(std::size_t w, std::size_t h, std::uint8_t lo, std::uint8_t hi) {
  FrameBuffer f{w, h, std::vector<std::uint8_t>(w * h)};
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) f.pixels[y * w + x] = (x + y) % 2 == 0 ? hi : lo;
  return f;
}

double sq(std::span<const float> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

TEST(Attention, UniformWhenWeightsAreZero) {
  const auto e = EmbeddingMatrix::from_rows({{1, 2}, {3, 4}, {-1, 0}});
  const auto a = attention_weights(e, std::vector<double>{1, 1}, Matrix(2, 2));
  for (double x : a) EXPECT_DOUBLE_EQ(x, 1.0 / 3.0);
}

TEST(Attention, HandEvaluatedSoftmax) {
  const auto e = EmbeddingMatrix::from_rows({{1, 0}, {0, 1}});
  const auto a = attention_weights(e, std::vector<double>{1, 0}, identity(2));
  const double ee = std::exp(1.0);
  EXPECT_NEAR(a[0], ee / (ee + 1), 1e-15);
  EXPECT_NEAR(a[1], 1 / (ee + 1), 1e-15);
  EXPECT_NEAR(a[0], 0.731, 5e-4);
}

TEST(Attention, ShiftInvarianceAndLargeScores) {
  // Adding c along a direction every row shares adds the same constant to every beta.
  const auto base = EmbeddingMatrix::from_rows({{0.2, -0.5, 1.0}, {0.7, 0.1, 1.0}, {-0.3, 0.9, 1.0}});
  const std::vector<double> s{1.0, 2.0, 0.0};
  const auto a = attention_weights(base, s, identity(3));
  for (double c : {5.0, 800.0}) {
    auto shifted = s;
    shifted[2] = c;
    const auto b = attention_weights(base, shifted, identity(3));
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  }
  EXPECT_NEAR(std::accumulate(a.begin(), a.end(), 0.0), 1.0, 1e-12);
}

TEST(Attention, DimMismatch) {
  const auto e = EmbeddingMatrix::from_rows({{1, 0}});
  EXPECT_THROW(attention_weights(e, std::vector<double>{1, 0, 0}, identity(2)), Error);
  EXPECT_THROW(attention_weights(e, std::vector<double>{1, 0}, identity(3)), Error);
}

TEST(AttentionContext, ConvexCombinations) {
  const auto e = EmbeddingMatrix::from_rows({{1, 2}, {3, 6}, {0.1f, 0.7f}});
  const std::vector<double> one_hot{0, 0, 1};
  const auto r = attention_context(e, one_hot);
  EXPECT_EQ(r[0], static_cast<double>(0.1f));
  EXPECT_EQ(r[1], static_cast<double>(0.7f));
  const auto mid = attention_context(e.slice(0, 2), std::vector<double>{0.5, 0.5});
  EXPECT_DOUBLE_EQ(mid[0], 2.0);
  EXPECT_DOUBLE_EQ(mid[1], 4.0);
  try {
    attention_context(e, std::vector<double>{0.5, 0.5, 0.1});
    FAIL();
  } catch (const Error& ex) {
    EXPECT_EQ(ex.code(), ErrorCode::WeightSumViolation);
  }
}

TEST(KeyframesAttention, Ranking) {
  // Rows 0-2 cluster around the mean direction; row 3 points away.
  const auto e = EmbeddingMatrix::from_rows({{0.2, 1, 0}, {1, 1, 0}, {0, 1, 0.2}, {0, -1, 1}});
  AttentionParams p{identity(3), {}};
  const auto top = select_keyframes_attention(e, p, 4);
  EXPECT_EQ(top.front(), 1u);
  EXPECT_EQ(top.back(), 3u);

  AttentionParams zero{Matrix(3, 3), {}};
  EXPECT_EQ(select_keyframes_attention(e, zero, 2), (std::vector<std::size_t>{0, 1}));
  try {
    select_keyframes_attention(e, p, 5);
    FAIL();
  } catch (const Error& ex) {
    EXPECT_EQ(ex.code(), ErrorCode::TopKTooLarge);
  }
}

TEST(Histogram, Counts) {
  const auto c = grayscale_histogram(constant_frame(4, 3, 128), 16);
  ASSERT_EQ(c.size(), 16u);
  EXPECT_EQ(c[8], 12u);
  const auto h = grayscale_histogram(checkerboard(4, 4, 0, 255), 2);
  EXPECT_EQ(h[0], 8u);
  EXPECT_EQ(h[1], 8u);
  std::mt19937_64 rng(3);
  for (std::size_t bins : {1u, 2u, 4u, 16u, 64u, 256u}) {
    FrameBuffer f{7, 5, std::vector<std::uint8_t>(35)};
    for (auto& p : f.pixels) p = static_cast<std::uint8_t>(rng());
    const auto counts = grayscale_histogram(f, bins);
    EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::size_t{0}), 35u);
  }
  for (std::size_t bad : {0u, 3u, 100u, 512u}) {
    try {
      grayscale_histogram(constant_frame(2, 2, 0), bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::BadBinCount);
    }
  }
}

TEST(Laplacian, HandConvolutions) {
  EXPECT_EQ(laplacian_variance(constant_frame(5, 4, 90)), 0.0);
  FrameBuffer dot = constant_frame(3, 3, 0);
  dot.pixels[4] = 255;
  EXPECT_EQ(laplacian_variance(dot), 0.0);
  EXPECT_DOUBLE_EQ(laplacian_variance(checkerboard(4, 4, 0, 255)), 1020.0 * 1020.0);
  try {
    laplacian_variance(constant_frame(2, 5, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FrameTooSmall);
  }
}

TEST(Laplacian, ConstantOffsetInvariance) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    FrameBuffer f{6, 5, std::vector<std::uint8_t>(30)};
    for (auto& p : f.pixels) p = static_cast<std::uint8_t>(rng() % 200);
    auto g = f;
    for (auto& p : g.pixels) p = static_cast<std::uint8_t>(p + 55);
    EXPECT_DOUBLE_EQ(laplacian_variance(f), laplacian_variance(g));
  }
}

TEST(KMeans, Examples) {
  const auto pts = EmbeddingMatrix::from_rows({{0, 0}, {0, 1}, {10, 0}, {10, 1}});
  const auto all = kmeans(pts, 4, 1, 50);
  EXPECT_EQ(all.objective, 0.0);

  const auto one = kmeans(pts, 1, 1, 50);
  EXPECT_DOUBLE_EQ(one.centroids(0, 0), 5.0);
  EXPECT_DOUBLE_EQ(one.centroids(0, 1), 0.5);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto two = kmeans(pts, 2, seed, 50);
    EXPECT_DOUBLE_EQ(two.objective, 1.0);  // 4 * 0.5^2
    EXPECT_EQ(two.assignments[0], two.assignments[1]);
    EXPECT_EQ(two.assignments[2], two.assignments[3]);
    EXPECT_NE(two.assignments[0], two.assignments[2]);
  }
  try {
    kmeans(pts, 5, 0, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::KTooLarge);
  }
}

TEST(KMeans, InvariantsOnRandomData) {
  std::mt19937_64 rng(123);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 40;
    const std::size_t d = 1 + rng() % 4;
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    for (auto& r : rows)
      for (double& x : r) x = gauss(rng);
    const auto pts = EmbeddingMatrix::from_rows(rows);
    const std::size_t k = 1 + rng() % std::min<std::size_t>(n, 6);
    const std::size_t iters = 1 + rng() % 8;
    const auto r = kmeans(pts, k, trial, iters);

    for (std::size_t i = 1; i < r.objective_history.size(); ++i) {
      EXPECT_LE(r.objective_history[i], r.objective_history[i - 1] + 1e-12);
    }
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double own = sq(pts.row(i), r.centroids.row(r.assignments[i]));
      objective += own;
      for (std::size_t c = 0; c < k; ++c) EXPECT_LE(own, sq(pts.row(i), r.centroids.row(c)) + 1e-12);
    }
    EXPECT_NEAR(objective, r.objective, 1e-9);

    const auto again = kmeans(pts, k, trial, iters);
    EXPECT_EQ(again.centroids, r.centroids);
    EXPECT_EQ(again.assignments, r.assignments);
  }
}

TEST(KMeans, DuplicatePointsStillSeedDistinctCentres) {
  const auto pts = EmbeddingMatrix::from_rows({{1, 1}, {1, 1}, {1, 1}});
  const auto r = kmeans(pts, 3, 9, 10);
  EXPECT_EQ(r.objective, 0.0);
}

TEST(KeyframesUnsupervised, Examples) {
  std::vector<FrameBuffer> same(4, checkerboard(4, 4, 10, 200));
  EXPECT_EQ(select_keyframes_unsupervised(same, 1, 0), (std::vector<std::size_t>{0}));

  // Same histogram, different sharpness.
  FrameBuffer blurred{4, 4, {0, 255, 0, 255, 255, 0, 255, 0, 0, 0, 255, 255, 0, 0, 255, 255}};
  std::vector<FrameBuffer> pair{blurred, checkerboard(4, 4, 0, 255)};
  EXPECT_EQ(select_keyframes_unsupervised(pair, 1, 0), (std::vector<std::size_t>{1}));

  std::vector<FrameBuffer> groups{constant_frame(4, 4, 10), checkerboard(4, 4, 5, 20), constant_frame(4, 4, 240),
                                  checkerboard(4, 4, 230, 250), constant_frame(4, 4, 12)};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto picks = select_keyframes_unsupervised(groups, 2, seed);
    ASSERT_EQ(picks.size(), 2u);
    EXPECT_EQ(picks, (std::vector<std::size_t>{1, 3}));
  }
}

TEST(SentencesCentroid, Examples) {
  const text::SentenceSet single({"only"}, EmbeddingMatrix::from_rows({{1, 0}}));
  EXPECT_EQ(select_sentences_centroid(single, SegmentPartition{{{0, 1}}}, 3),
            (std::vector<std::vector<std::size_t>>{{0}}));

  const text::SentenceSet dup({"a", "b", "c"}, EmbeddingMatrix::from_rows({{1, 0}, {0.99, 0.01}, {0, 1}}));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = select_sentences_centroid(dup, SegmentPartition{{{0, 3}}}, 2, seed);
    ASSERT_EQ(r.size(), 1u);
    ASSERT_EQ(r[0].size(), 2u);
    EXPECT_LT(r[0][0], 2u);
    EXPECT_EQ(r[0][1], 2u);
  }

  const text::SentenceSet same({"a", "b", "c", "d"}, EmbeddingMatrix::from_rows({{1, 2}, {1, 2}, {1, 2}, {1, 2}}));
  const auto r = select_sentences_centroid(same, SegmentPartition{{{0, 2}, {2, 4}}}, 1);
  EXPECT_EQ(r, (std::vector<std::vector<std::size_t>>{{0}, {2}}));
}
