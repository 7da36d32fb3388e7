#pragma once

#include <vector>

namespace specboot {

/// Weighted point masses on the real line. Points are kept strictly
/// increasing; exactly equal points are merged with summed weight.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  /// Sorts the (point, weight) pairs, merges duplicates, validates
  /// nonnegative finite weights, and records the total mass.
  DiscreteMeasure(std::vector<double> points, std::vector<double> weights);

  static DiscreteMeasure dirac(double x) { return DiscreteMeasure({x}, {1.0}); }

  /// Uniform weights 1/size on the given values.
  static DiscreteMeasure from_sample(const std::vector<double>& values);

  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  double total_mass() const { return total_mass_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  double min_point() const;
  double max_point() const;

  /// Raw moment of order k (k = 0 gives total mass).
  double moment(int k) const;
  double mean() const { return moment(1); }

  /// Mass placed exactly at x.
  double mass_at(double x) const;

  bool is_probability(double tol = 1e-12) const;

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
  double total_mass_ = 0.0;
};

}  // namespace specboot
