#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fedpref/similarity.hpp"
#include "support/oracles.hpp"

namespace fedpref {
namespace {

TEST(TopR, KeepsLargestMagnitudes) {
  std::vector<double> v{3.0, -1.0, 2.0};
  EXPECT_EQ(top_r(v, 0.5), (std::vector<double>{3.0, 0.0, 2.0}));
  EXPECT_EQ(top_r(v, 1.0), v);
  std::vector<double> z{0.0, 0.0, 0.0};
  EXPECT_EQ(top_r(z, 0.5), z);
}

TEST(TopR, CountAndTies) {
  EXPECT_EQ(top_r_count(3, 0.5), 2u);
  EXPECT_EQ(top_r_count(10, 0.3), 3u);
  EXPECT_EQ(top_r_count(4, 0.01), 1u);
  EXPECT_EQ(top_r_count(4, 1.0), 4u);
  std::vector<double> v{1.0, -1.0, 1.0, 0.5};
  EXPECT_EQ(top_r(v, 0.5), (std::vector<double>{1.0, -1.0, 0.0, 0.0}));
}

TEST(CosSim, BasicCases) {
  EXPECT_EQ(cos_sim(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
  EXPECT_NEAR(cos_sim(std::vector<double>{1, 2}, std::vector<double>{2, 4}), 1.0, 1e-15);
  EXPECT_EQ(cos_sim(std::vector<double>{1, 0}, std::vector<double>{-1, 0}), -1.0);
  EXPECT_EQ(cos_sim(std::vector<double>{0, 0}, std::vector<double>{1, 0}), 0.0);
}

TEST(ModelSim, SelfSimilarityIsOne) {
  ParamDelta a({{1.0, -2.0}, {0.5, 0.5, 3.0}});
  EXPECT_NEAR(model_sim(a, a, 0.5), 1.0, 1e-15);
  EXPECT_NEAR(model_sim(a, a, 1.0), 1.0, 1e-15);
}

TEST(ModelSim, AveragesOverLayers) {
  ParamDelta a({{1.0, 0.0}, {1.0, 0.0}});
  ParamDelta b({{2.0, 0.0}, {0.0, 1.0}});
  EXPECT_DOUBLE_EQ(model_sim(a, b, 1.0), 0.5);
}

TEST(ModelSim, ZeroLayers) {
  ParamDelta a({{0.0, 0.0}, {1.0, 0.0}});
  ParamDelta b({{0.0, 0.0}, {1.0, 0.0}});
  ParamDelta c({{1.0, 0.0}, {1.0, 0.0}});
  EXPECT_DOUBLE_EQ(model_sim(a, b, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(model_sim(a, c, 1.0), 0.5);
}

TEST(ModelSim, FullRetentionMatchesDirectCosine) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    auto a = oracle::random_delta(rng, {3, 5, 2});
    auto b = oracle::random_delta(rng, {3, 5, 2});
    EXPECT_NEAR(model_sim(a, b, 1.0), oracle::layer_cosine(a, b), 1e-14);
  }
}

TEST(ModelSim, SymmetricAndScaleInvariant) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 100; ++t) {
    auto a = oracle::random_delta(rng, {4, 4});
    auto b = oracle::random_delta(rng, {4, 4});
    EXPECT_EQ(model_sim(a, b, 0.5), model_sim(b, a, 0.5));
    EXPECT_NEAR(model_sim(scale(a, 3.5), b, 0.5), model_sim(a, b, 0.5), 1e-12);
    double s = model_sim(a, b, 0.3);
    EXPECT_LE(std::abs(s), 1.0);
  }
}

TEST(ModelSim, SparsificationIsIdempotent) {
  ParamDelta a({{5.0, -4.0, 0.1, 0.2}});
  ParamDelta sparse({{5.0, -4.0, 0.0, 0.0}});
  ParamDelta b({{1.0, 1.0, -3.0, 0.5}});
  EXPECT_EQ(model_sim(a, b, 0.5), model_sim(sparse, b, 0.5));
}

TEST(SimilarityMatrix, SingleClient) {
  std::vector<ParamDelta> d{ParamDelta({{1.0, 2.0}})};
  auto s = similarity_matrix(d, 0.5);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_DOUBLE_EQ(s(0, 0), 1.0);
}

TEST(SimilarityMatrix, Antiparallel) {
  ParamDelta d({{1.0, -2.0}, {0.5}});
  std::vector<ParamDelta> ds{d, scale(d, -1.0)};
  auto s = similarity_matrix(ds, 1.0);
  EXPECT_DOUBLE_EQ(s(0, 1), -1.0);
  EXPECT_DOUBLE_EQ(s(1, 0), -1.0);
}

TEST(SimilarityMatrix, MatchesPairwiseRecomputation) {
  std::mt19937_64 rng(13);
  std::vector<ParamDelta> ds;
  for (int i = 0; i < 4; ++i) ds.push_back(oracle::random_delta(rng, {4, 4}));
  auto s = similarity_matrix(ds, 0.5);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_EQ(s(i, j), model_sim(ds[i], ds[j], 0.5));
      EXPECT_EQ(s(i, j), s(j, i));
    }
  }
}

TEST(SimilarityMatrix, SetClamps) {
  SimilarityMatrix s(2);
  s.set(0, 1, 1.0 + 1e-15);
  EXPECT_EQ(s(1, 0), 1.0);
}

}  // namespace
}  // namespace fedpref
