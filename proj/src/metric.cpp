#include "hpboost/metric.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace hpboost {

DistanceMatrix::DistanceMatrix(std::size_t size, std::vector<Cost> entries)
    : size_(size), d_(std::move(entries)) {
  if (d_.size() != size_ * size_) throw std::invalid_argument("distance matrix: wrong entry count");
  for (Cost c : d_) {
    if (c < 0 || is_infinite(c)) {
      throw std::invalid_argument("distance matrix: entries must be finite and nonnegative");
    }
  }
}

DistanceMatrix DistanceMatrix::uniform(std::size_t size, Cost distance) {
  std::vector<Cost> e(size * size, distance);
  for (std::size_t i = 0; i < size; ++i) e[i * size + i] = 0;
  return DistanceMatrix(size, std::move(e));
}

Cost DistanceMatrix::max_entry() const noexcept {
  return d_.empty() ? 0 : *std::max_element(d_.begin(), d_.end());
}

Cost DistanceMatrix::min_positive_entry() const noexcept {
  Cost best = 0;
  for (Cost c : d_) {
    if (c > 0 && (best == 0 || c < best)) best = c;
  }
  return best;
}

bool DistanceMatrix::is_metric(std::string* why) const {
  auto fail = [&](std::string msg) {
    if (why != nullptr) *why = std::move(msg);
    return false;
  };
  for (std::size_t a = 0; a < size_; ++a) {
    if ((*this)(a, a) != 0) return fail("nonzero self distance at " + std::to_string(a));
    for (std::size_t b = 0; b < size_; ++b) {
      if ((*this)(a, b) != (*this)(b, a)) return fail("asymmetric pair");
      if (a != b && (*this)(a, b) == 0) return fail("distinct points at distance zero");
      for (std::size_t c = 0; c < size_; ++c) {
        if ((*this)(a, c) > (*this)(a, b) + (*this)(b, c)) {
          return fail("triangle inequality violated at (" + std::to_string(a) + "," +
                      std::to_string(b) + "," + std::to_string(c) + ")");
        }
      }
    }
  }
  return true;
}

DistanceMatrix read_distance_matrix(std::istream& in) {
  long long n = 0;
  if (!(in >> n) || n <= 0) throw std::invalid_argument("matrix file: bad size line");
  const auto size = static_cast<std::size_t>(n);
  std::vector<Cost> e(size * size);
  for (auto& v : e) {
    if (!(in >> v)) throw std::invalid_argument("matrix file: too few entries");
  }
  Cost extra = 0;
  if (in >> extra) throw std::invalid_argument("matrix file: trailing entries");
  return DistanceMatrix(size, std::move(e));
}

DistanceMatrix load_distance_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open matrix file " + path);
  return read_distance_matrix(in);
}

Metric::Metric(DistanceMatrix d) : d_(std::move(d)) {
  std::string why;
  if (!d_.is_metric(&why)) throw std::invalid_argument("not a metric: " + why);
}

Metric Metric::line(const std::vector<Cost>& coordinates) {
  const std::size_t n = coordinates.size();
  std::vector<Cost> e(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      e[a * n + b] = coordinates[a] > coordinates[b] ? coordinates[a] - coordinates[b]
                                                     : coordinates[b] - coordinates[a];
    }
  }
  return Metric(DistanceMatrix(n, std::move(e)));
}

std::size_t ScaledMetric::point(std::size_t copy, std::size_t u) const {
  if (copy < 1 || copy > copies || u >= original_size) {
    throw std::out_of_range("scaled metric: no such point");
  }
  if (u == base_point) return 0;
  std::size_t rank = u < base_point ? u : u - 1;
  return 1 + (copy - 1) * (original_size - 1) + rank;
}

ScaledMetric scaled_metric(const Metric& metric, std::size_t base_point, std::size_t copies) {
  const std::size_t n = metric.size();
  if (base_point >= n) throw std::invalid_argument("scaled metric: base point outside metric");
  if (copies == 0) throw std::invalid_argument("scaled metric: need at least one copy");
  const std::size_t total = 1 + copies * (n - 1);
  // (copy, original) for every scaled index; copy 0 marks the shared point.
  std::vector<std::pair<std::size_t, std::size_t>> origin(total, {0, base_point});
  for (std::size_t i = 1; i <= copies; ++i) {
    for (std::size_t u = 0; u < n; ++u) {
      if (u == base_point) continue;
      std::size_t rank = u < base_point ? u : u - 1;
      origin[1 + (i - 1) * (n - 1) + rank] = {i, u};
    }
  }
  auto to_base = [&](std::size_t idx) -> Cost {
    auto [copy, u] = origin[idx];
    return copy == 0 ? 0 : static_cast<Cost>(copy) * metric(base_point, u);
  };
  std::vector<Cost> e(total * total);
  for (std::size_t a = 0; a < total; ++a) {
    for (std::size_t b = 0; b < total; ++b) {
      auto [ca, ua] = origin[a];
      auto [cb, ub] = origin[b];
      Cost d = 0;
      if (a == b) {
        d = 0;
      } else if (ca == 0 || cb == 0 || ca == cb) {
        std::size_t copy = ca == 0 ? cb : ca;
        d = static_cast<Cost>(copy) * metric(ua, ub);
      } else {
        d = to_base(a) + to_base(b);
      }
      e[a * total + b] = d;
    }
  }
  // Metric's constructor re-verifies the axioms; failure here is a bug.
  return ScaledMetric{Metric(DistanceMatrix(total, std::move(e))), base_point, n, copies};
}

}  // namespace hpboost
