#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "hpboost/cost.hpp"

namespace hpboost {

/// Square matrix of finite nonnegative integer distances.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t size, std::vector<Cost> entries);
  static DistanceMatrix uniform(std::size_t size, Cost distance = 1);

  std::size_t size() const noexcept { return size_; }
  Cost operator()(std::size_t a, std::size_t b) const noexcept { return d_[a * size_ + b]; }
  Cost max_entry() const noexcept;
  Cost min_positive_entry() const noexcept;
  const std::vector<Cost>& entries() const noexcept { return d_; }

  /// Zero diagonal, symmetry and triangle inequality.
  bool is_metric(std::string* why = nullptr) const;

 private:
  std::size_t size_ = 0;
  std::vector<Cost> d_;
};

/// Plain-text matrix: first line the size n, then n rows of n distances.
DistanceMatrix read_distance_matrix(std::istream& in);
DistanceMatrix load_distance_matrix(const std::string& path);

/// A finite metric space on points 0..n-1; axioms are checked at construction.
class Metric {
 public:
  explicit Metric(DistanceMatrix d);
  std::size_t size() const noexcept { return d_.size(); }
  Cost operator()(std::size_t a, std::size_t b) const noexcept { return d_(a, b); }
  const DistanceMatrix& matrix() const noexcept { return d_; }

  /// Points on a line at the given integer coordinates.
  static Metric line(const std::vector<Cost>& coordinates);

 private:
  DistanceMatrix d_;
};

/// Copies M_1..M_copies of a metric glued at a shared base point s. Within
/// copy i distances are scaled by i; across copies i != j,
/// d'(u_i, v_j) = d'(s, u_i) + d'(s, v_j).
struct ScaledMetric {
  Metric metric;
  std::size_t base_point = 0;   // original index of s
  std::size_t original_size = 0;
  std::size_t copies = 0;

  /// Index in the scaled metric of original point u in copy i (1-based copy).
  /// The shared point s maps to index 0 in every copy.
  std::size_t point(std::size_t copy, std::size_t u) const;
};

ScaledMetric scaled_metric(const Metric& metric, std::size_t base_point, std::size_t copies);

}  // namespace hpboost
