#include "specboot/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace specboot {
namespace {

TEST(StreamRngTest, DeterministicAndStreamsDisjoint) {
  StreamRng a(derive_stream(42, StreamTag::kRows, 1));
  StreamRng b(derive_stream(42, StreamTag::kRows, 1));
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());

  StreamRng c(derive_stream(42, StreamTag::kRows, 2));
  StreamRng d(derive_stream(42, StreamTag::kProjection, 1));
  StreamRng e(derive_stream(43, StreamTag::kRows, 1));
  StreamRng f(derive_stream(42, StreamTag::kRows, 1));
  bool c_differs = false, d_differs = false, e_differs = false;
  for (int i = 0; i < 16; ++i) {
    std::uint64_t x = f.next_u64();
    c_differs |= c.next_u64() != x;
    d_differs |= d.next_u64() != x;
    e_differs |= e.next_u64() != x;
  }
  EXPECT_TRUE(c_differs);
  EXPECT_TRUE(d_differs);
  EXPECT_TRUE(e_differs);
}

TEST(StreamRngTest, UniformRangeAndMoments) {
  StreamRng rng(derive_stream(7, StreamTag::kGeneric, 0));
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = rng.next_uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
  }
  double mean = sum / n;
  double var = sum2 / n - mean * mean;
  // 5 sigma bands for mean 1/2, variance 1/12.
  EXPECT_NEAR(mean, 0.5, 5.0 / std::sqrt(12.0 * n));
  EXPECT_NEAR(var, 1.0 / 12.0, 0.005);
}

TEST(StreamRngTest, NextBelowIsInRangeAndRoughlyUniform) {
  StreamRng rng(derive_stream(9, StreamTag::kGeneric, 3));
  std::vector<int> counts(10, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    std::uint64_t v = rng.next_below(10);
    ASSERT_LT(v, 10u);
    counts[static_cast<std::size_t>(v)]++;
  }
  for (int c : counts) EXPECT_NEAR(c, n / 10, 5 * std::sqrt(n * 0.1 * 0.9));
}

TEST(StreamRngTest, NormalMoments) {
  StreamRng rng(derive_stream(11, StreamTag::kGeneric, 1));
  const int n = 400000;
  double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.next_normal();
    sum += x;
    sum2 += x * x;
    sum4 += x * x * x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 5.0 / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(sum2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(sum4 / n, 3.0, 5.0 * std::sqrt(96.0 / n));
}

TEST(StreamRngTest, ChiSquaredTwentyMoments) {
  StreamRng rng(derive_stream(13, StreamTag::kGeneric, 2));
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.next_chisq(20.0);
    sum += x;
    sum2 += x * x;
  }
  double mean = sum / n;
  double var = sum2 / n - mean * mean;
  EXPECT_NEAR(mean, 20.0, 5.0 * std::sqrt(40.0 / n));
  EXPECT_NEAR(var, 40.0, 2.0);
}

TEST(StreamRngTest, RademacherIsBalanced) {
  StreamRng rng(derive_stream(17, StreamTag::kGeneric, 5));
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.next_rademacher();
    ASSERT_TRUE(x == 1.0 || x == -1.0);
    sum += x;
  }
  EXPECT_NEAR(sum / n, 0.0, 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST(StreamRngTest, NextBelowRejectsZero) {
  StreamRng rng(1);
  EXPECT_THROW(rng.next_below(0), DomainError);
}

}  // namespace
}  // namespace specboot
