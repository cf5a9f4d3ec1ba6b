#include "hpboost/generators.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace hpboost {

PagingStream parse_paging_stream(const std::string& name) {
  if (name == "uniform") return PagingStream::kUniform;
  if (name == "round_robin") return PagingStream::kRoundRobin;
  if (name == "nasty") return PagingStream::kNasty;
  throw std::invalid_argument("unknown paging stream '" + name + "'");
}

std::string to_string(PagingStream kind) {
  switch (kind) {
    case PagingStream::kUniform: return "uniform";
    case PagingStream::kRoundRobin: return "round_robin";
    case PagingStream::kNasty: return "nasty";
  }
  return "?";
}

std::vector<PageId> paging_universe(std::size_t k) {
  std::vector<PageId> u(k + 1);
  std::iota(u.begin(), u.end(), PageId{1});
  return u;
}

std::vector<PageId> paging_initial_cache(std::size_t k) {
  std::vector<PageId> c(k);
  std::iota(c.begin(), c.end(), PageId{1});
  return c;
}

std::vector<PageId> paging_stream(PagingStream kind, std::size_t k, std::size_t length,
                                  RandomTape& tape) {
  if (k == 0) throw std::invalid_argument("paging stream: k must be positive");
  const auto universe = paging_universe(k);
  std::vector<PageId> out;
  out.reserve(length);
  switch (kind) {
    case PagingStream::kUniform:
      while (out.size() < length) out.push_back(universe[tape.uniform(universe.size())]);
      break;
    case PagingStream::kRoundRobin:
      for (std::size_t i = 0; i < length; ++i) out.push_back(universe[i % universe.size()]);
      break;
    case PagingStream::kNasty: {
      // The initial cache is 1..k, so page k+1 is the first one left out.
      PageId left_out = static_cast<PageId>(k + 1);
      while (out.size() < length) {
        std::vector<PageId> others;
        for (PageId p : universe) {
          if (p != left_out) others.push_back(p);
        }
        const PageId next_left_out = others[tape.uniform(others.size())];
        std::vector<PageId> phase{left_out};
        for (PageId p : others) {
          if (p != next_left_out) phase.push_back(p);
        }
        for (std::size_t i = phase.size() - 1; i > 1; --i) {
          std::swap(phase[i], phase[1 + tape.uniform(i)]);
        }
        for (PageId p : phase) {
          if (out.size() < length) out.push_back(p);
        }
        left_out = next_left_out;
      }
      break;
    }
  }
  return out;
}

DistanceMatrix random_metric_matrix(std::size_t n, Cost max_distance, RandomTape& tape) {
  if (max_distance < 1) throw std::invalid_argument("random metric: max distance must be >= 1");
  std::vector<Cost> e(n * n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      Cost d = 1 + static_cast<Cost>(tape.uniform(static_cast<std::uint64_t>(max_distance)));
      e[a * n + b] = e[b * n + a] = d;
    }
  }
  for (std::size_t via = 0; via < n; ++via) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        e[a * n + b] = std::min(e[a * n + b], e[a * n + via] + e[via * n + b]);
      }
    }
  }
  return DistanceMatrix(n, std::move(e));
}

std::vector<TaskVector> random_tasks(std::size_t states, std::size_t length, Cost max_task,
                                     unsigned infinite_per_mille, RandomTape& tape) {
  std::vector<TaskVector> out(length, TaskVector(states));
  for (auto& task : out) {
    bool finite_seen = false;
    for (auto& v : task) {
      if (infinite_per_mille > 0 && tape.uniform(1000) < infinite_per_mille) {
        v = kInfiniteCost;
      } else {
        v = static_cast<Cost>(tape.uniform(static_cast<std::uint64_t>(max_task) + 1));
        finite_seen = true;
      }
    }
    if (!finite_seen) task[tape.uniform(states)] = 0;
  }
  return out;
}

std::vector<std::size_t> random_permutation(std::size_t m, RandomTape& tape) {
  std::vector<std::size_t> p(m);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = m; i > 1; --i) std::swap(p[i - 1], p[tape.uniform(i)]);
  return p;
}

}  // namespace hpboost
