#include "specboot/measure.hpp"

#include <gtest/gtest.h>

#include "specboot/errors.hpp"

namespace specboot {
namespace {

TEST(DiscreteMeasureTest, SortsAndMergesDuplicates) {
  DiscreteMeasure mu({2.0, 1.0, 2.0}, {0.25, 0.5, 0.25});
  ASSERT_EQ(mu.size(), 2u);
  EXPECT_DOUBLE_EQ(mu.points()[0], 1.0);
  EXPECT_DOUBLE_EQ(mu.points()[1], 2.0);
  EXPECT_DOUBLE_EQ(mu.weights()[0], 0.5);
  EXPECT_DOUBLE_EQ(mu.weights()[1], 0.5);
  EXPECT_DOUBLE_EQ(mu.total_mass(), 1.0);
  EXPECT_TRUE(mu.is_probability());
}

TEST(DiscreteMeasureTest, MomentsAndBounds) {
  DiscreteMeasure mu({1.0, 3.0}, {0.75, 0.25});
  EXPECT_DOUBLE_EQ(mu.moment(0), 1.0);
  EXPECT_DOUBLE_EQ(mu.mean(), 1.5);
  EXPECT_DOUBLE_EQ(mu.moment(2), 0.75 + 0.25 * 9.0);
  EXPECT_DOUBLE_EQ(mu.min_point(), 1.0);
  EXPECT_DOUBLE_EQ(mu.max_point(), 3.0);
  EXPECT_DOUBLE_EQ(mu.mass_at(3.0), 0.25);
  EXPECT_DOUBLE_EQ(mu.mass_at(2.0), 0.0);
}

TEST(DiscreteMeasureTest, RejectsBadInput) {
  EXPECT_THROW(DiscreteMeasure({1.0}, {1.0, 2.0}), DomainError);
  EXPECT_THROW(DiscreteMeasure({1.0}, {-0.1}), DomainError);
  EXPECT_THROW(DiscreteMeasure::from_sample({}), DomainError);
}

}  // namespace
}  // namespace specboot
