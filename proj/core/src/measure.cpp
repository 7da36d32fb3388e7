#include "specboot/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "specboot/errors.hpp"

namespace specboot {

DiscreteMeasure::DiscreteMeasure(std::vector<double> points, std::vector<double> weights) {
  if (points.size() != weights.size())
    throw DomainError("DiscreteMeasure: points/weights length mismatch");
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

  points_.reserve(points.size());
  weights_.reserve(points.size());
  for (std::size_t idx : order) {
    double x = points[idx];
    double w = weights[idx];
    if (!std::isfinite(x) || !std::isfinite(w))
      throw DomainError("DiscreteMeasure: non-finite point or weight");
    if (w < 0.0) throw DomainError("DiscreteMeasure: negative weight");
    if (!points_.empty() && points_.back() == x) {
      weights_.back() += w;
    } else {
      points_.push_back(x);
      weights_.push_back(w);
    }
  }
  total_mass_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

DiscreteMeasure DiscreteMeasure::from_sample(const std::vector<double>& values) {
  if (values.empty()) throw DomainError("DiscreteMeasure::from_sample: empty sample");
  std::vector<double> w(values.size(), 1.0 / static_cast<double>(values.size()));
  return DiscreteMeasure(values, std::move(w));
}

double DiscreteMeasure::min_point() const {
  if (points_.empty()) throw DomainError("DiscreteMeasure: empty measure has no support");
  return points_.front();
}

double DiscreteMeasure::max_point() const {
  if (points_.empty()) throw DomainError("DiscreteMeasure: empty measure has no support");
  return points_.back();
}

double DiscreteMeasure::moment(int k) const {
  if (k < 0) throw DomainError("DiscreteMeasure::moment: negative order");
  double s = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    s += weights_[i] * std::pow(points_[i], k);
  }
  return s;
}

double DiscreteMeasure::mass_at(double x) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), x);
  if (it != points_.end() && *it == x) {
    return weights_[static_cast<std::size_t>(it - points_.begin())];
  }
  return 0.0;
}

bool DiscreteMeasure::is_probability(double tol) const {
  return !points_.empty() && std::abs(total_mass_ - 1.0) <= tol;
}

}  // namespace specboot
