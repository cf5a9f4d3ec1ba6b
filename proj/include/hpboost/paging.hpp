#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hpboost/problem.hpp"

namespace hpboost {

using PageId = std::int64_t;

inline constexpr std::int64_t kNoEviction = -1;

struct PagingInstance {
  std::size_t k = 0;
  std::vector<PageId> universe;
  std::vector<PageId> initial_cache;

  /// Throws std::invalid_argument when the cache is not k distinct universe pages.
  void validate() const;
};

/// Demand paging with a cache of k pages. States are sorted cache contents,
/// the answer to a fault is the evicted page and a hit is answered with
/// kNoEviction. Faults cost 1.
class PagingProblem final : public Problem {
 public:
  PagingProblem(std::size_t k, std::vector<PageId> universe);

  std::string name() const override { return "paging"; }
  std::vector<StateHandle> initial_states() const override;
  bool is_initial(const StateHandle& state) const override;
  std::vector<Answer> feasible_answers(const StateHandle& state,
                                       const Request& request) const override;
  bool is_feasible(const StateHandle& state, const Request& request,
                   Answer answer) const override;
  Cost step_cost(const StateHandle& state, const Request& request,
                 Answer answer) const override;
  StateHandle next_state(const StateHandle& state, const Request& request,
                         Answer answer) const override;
  Cost opt_cost(const StateHandle& state, std::span<const Request> requests) const override;
  std::unique_ptr<PrefixOpt> prefix_opt(const StateHandle& state) const override;
  std::optional<Cost> bound_F() const override { return 1; }
  std::optional<Cost> bound_B() const override { return static_cast<Cost>(k_); }
  bool symmetric() const override { return true; }

  std::size_t k() const noexcept { return k_; }
  const std::vector<PageId>& universe() const noexcept { return universe_; }

  static StateHandle cache_state(std::vector<PageId> pages);
  static Request page_request(PageId page) { return Request::single(page); }

 private:
  bool in_universe(PageId page) const;

  std::size_t k_;
  std::vector<PageId> universe_;
};

std::shared_ptr<PagingProblem> paging_problem(const PagingInstance& inst);

std::vector<Request> page_requests(std::span<const PageId> pages);

/// Offline optimum fault count: evict the page whose next use is farthest in
/// the future (never-used-again counts as farthest), smallest page id on ties.
std::int64_t belady_opt(std::span<const PageId> cache, std::span<const PageId> requests);

/// Randomized marking: requested pages get marked; on a fault with every
/// cached page marked, all marks are cleared first; the victim is a uniformly
/// random unmarked page (ascending id order indexes the tape draw).
class MarkingAlgorithm final : public Algorithm {
 public:
  explicit MarkingAlgorithm(std::size_t k) : k_(k) {}

  std::string name() const override { return "marking"; }
  void start(const StateHandle& state, RandomTape& tape) override;
  Answer answer(const Request& request) override;
  std::unique_ptr<Algorithm> fresh() const override {
    return std::make_unique<MarkingAlgorithm>(k_);
  }

 private:
  std::size_t k_;
  std::vector<PageId> cache_;  // sorted
  std::vector<bool> marked_;   // parallel to cache_
  RandomTape* tape_ = nullptr;
};

/// H_k = 1 + 1/2 + ... + 1/k.
double harmonic(std::size_t k);

}  // namespace hpboost
