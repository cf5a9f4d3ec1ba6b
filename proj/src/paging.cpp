#include "hpboost/paging.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

namespace hpboost {

void PagingInstance::validate() const {
  if (k == 0) throw std::invalid_argument("paging: k must be positive");
  std::set<PageId> u(universe.begin(), universe.end());
  if (u.size() != universe.size()) throw std::invalid_argument("paging: duplicate universe page");
  std::set<PageId> c(initial_cache.begin(), initial_cache.end());
  if (c.size() != initial_cache.size() || c.size() != k) {
    throw std::invalid_argument("paging: initial cache must hold k distinct pages");
  }
  for (PageId p : c) {
    if (!u.contains(p)) throw std::invalid_argument("paging: cached page outside universe");
  }
}

PagingProblem::PagingProblem(std::size_t k, std::vector<PageId> universe)
    : k_(k), universe_(std::move(universe)) {
  std::sort(universe_.begin(), universe_.end());
  if (k_ == 0 || universe_.size() < k_) {
    throw std::invalid_argument("paging: need 0 < k <= |universe|");
  }
  if (std::adjacent_find(universe_.begin(), universe_.end()) != universe_.end()) {
    throw std::invalid_argument("paging: duplicate universe page");
  }
  for (PageId p : universe_) {
    if (p < 0) throw std::invalid_argument("paging: page ids must be nonnegative");
  }
}

bool PagingProblem::in_universe(PageId page) const {
  return std::binary_search(universe_.begin(), universe_.end(), page);
}

StateHandle PagingProblem::cache_state(std::vector<PageId> pages) {
  std::sort(pages.begin(), pages.end());
  return StateHandle(std::move(pages));
}

std::vector<StateHandle> PagingProblem::initial_states() const {
  std::vector<StateHandle> out;
  std::vector<bool> pick(universe_.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k_), true);
  do {
    std::vector<PageId> cache;
    for (std::size_t i = 0; i < universe_.size(); ++i) {
      if (pick[i]) cache.push_back(universe_[i]);
    }
    out.emplace_back(std::move(cache));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  std::sort(out.begin(), out.end());
  return out;
}

bool PagingProblem::is_initial(const StateHandle& state) const {
  const auto& v = state.values;
  if (v.size() != k_ || !std::is_sorted(v.begin(), v.end())) return false;
  if (std::adjacent_find(v.begin(), v.end()) != v.end()) return false;
  return std::all_of(v.begin(), v.end(), [&](PageId p) { return in_universe(p); });
}

std::vector<Answer> PagingProblem::feasible_answers(const StateHandle& state,
                                                    const Request& request) const {
  if (request.values.size() != 1 || !in_universe(request.values[0])) return {};
  const auto& cache = state.values;
  PageId p = request.values[0];
  if (std::binary_search(cache.begin(), cache.end(), p)) return {Answer{kNoEviction}};
  std::vector<Answer> out;
  out.reserve(cache.size());
  for (PageId q : cache) out.push_back(Answer{q});
  return out;
}

bool PagingProblem::is_feasible(const StateHandle& state, const Request& request,
                                Answer answer) const {
  if (request.values.size() != 1 || !in_universe(request.values[0])) return false;
  const auto& cache = state.values;
  bool hit = std::binary_search(cache.begin(), cache.end(), request.values[0]);
  if (hit) return answer.value == kNoEviction;
  return std::binary_search(cache.begin(), cache.end(), answer.value);
}

Cost PagingProblem::step_cost(const StateHandle& state, const Request& request,
                              Answer /*answer*/) const {
  const auto& cache = state.values;
  return std::binary_search(cache.begin(), cache.end(), request.values.at(0)) ? 0 : 1;
}

StateHandle PagingProblem::next_state(const StateHandle& state, const Request& request,
                                      Answer answer) const {
  if (answer.value == kNoEviction) return state;
  std::vector<PageId> cache = state.values;
  auto it = std::lower_bound(cache.begin(), cache.end(), answer.value);
  if (it == cache.end() || *it != answer.value) {
    throw ProblemError("paging: evicting page " + answer.to_string() + " not in cache");
  }
  cache.erase(it);
  cache.insert(std::upper_bound(cache.begin(), cache.end(), request.values.at(0)),
               request.values.at(0));
  return StateHandle(std::move(cache));
}

Cost PagingProblem::opt_cost(const StateHandle& state, std::span<const Request> requests) const {
  std::vector<PageId> pages;
  pages.reserve(requests.size());
  for (const auto& r : requests) pages.push_back(r.values.at(0));
  return belady_opt(state.values, pages);
}

namespace {

/// Work function over cache configurations encoded as bitmasks of universe
/// positions. Only configurations reachable by demand paging are stored.
class PagingPrefixOpt final : public PrefixOpt {
 public:
  PagingPrefixOpt(const PagingProblem& problem, const StateHandle& start)
      : universe_(problem.universe()) {
    std::uint64_t mask = 0;
    for (PageId p : start.values) mask |= bit_of(p);
    frontier_.emplace_back(mask, 0);
  }

  Cost push(const Request& request) override {
    const std::uint64_t page_bit = bit_of(request.values.at(0));
    next_.clear();
    for (const auto& [mask, cost] : frontier_) {
      if ((mask & page_bit) != 0) {
        next_.emplace_back(mask, cost);
        continue;
      }
      for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1) {
        std::uint64_t victim = rest & (~rest + 1);
        next_.emplace_back((mask & ~victim) | page_bit, cost + 1);
      }
    }
    std::sort(next_.begin(), next_.end());
    frontier_.clear();
    for (const auto& entry : next_) {
      if (frontier_.empty() || frontier_.back().first != entry.first) frontier_.push_back(entry);
    }
    Cost best = kInfiniteCost;
    for (const auto& entry : frontier_) best = std::min(best, entry.second);
    return best;
  }

 private:
  std::uint64_t bit_of(PageId p) const {
    auto it = std::lower_bound(universe_.begin(), universe_.end(), p);
    if (it == universe_.end() || *it != p) throw ProblemError("paging: page outside universe");
    return 1ULL << static_cast<unsigned>(it - universe_.begin());
  }

  const std::vector<PageId>& universe_;
  std::vector<std::pair<std::uint64_t, Cost>> frontier_;
  std::vector<std::pair<std::uint64_t, Cost>> next_;
};

}  // namespace

std::unique_ptr<PrefixOpt> PagingProblem::prefix_opt(const StateHandle& state) const {
  if (universe_.size() <= 64) return std::make_unique<PagingPrefixOpt>(*this, state);
  return Problem::prefix_opt(state);
}

std::shared_ptr<PagingProblem> paging_problem(const PagingInstance& inst) {
  inst.validate();
  return std::make_shared<PagingProblem>(inst.k, inst.universe);
}

std::vector<Request> page_requests(std::span<const PageId> pages) {
  std::vector<Request> out;
  out.reserve(pages.size());
  for (PageId p : pages) out.push_back(Request::single(p));
  return out;
}

std::int64_t belady_opt(std::span<const PageId> cache, std::span<const PageId> requests) {
  const std::size_t n = requests.size();
  constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();
  // next_use[i]: next index after i requesting the same page.
  std::vector<std::size_t> next_use(n, kNever);
  {
    std::vector<std::pair<PageId, std::size_t>> last;  // page -> latest index seen from the right
    for (std::size_t i = n; i-- > 0;) {
      auto it = std::find_if(last.begin(), last.end(),
                             [&](const auto& e) { return e.first == requests[i]; });
      if (it != last.end()) {
        next_use[i] = it->second;
        it->second = i;
      } else {
        last.emplace_back(requests[i], i);
      }
    }
  }
  auto first_use_from = [&](PageId p, std::size_t from) {
    for (std::size_t j = from; j < n; ++j) {
      if (requests[j] == p) return j;
    }
    return kNever;
  };

  // Cached pages with their next use index.
  std::vector<std::pair<PageId, std::size_t>> resident;
  for (PageId p : cache) resident.emplace_back(p, first_use_from(p, 0));

  std::int64_t faults = 0;
  for (std::size_t i = 0; i < n; ++i) {
    PageId p = requests[i];
    auto it = std::find_if(resident.begin(), resident.end(),
                           [&](const auto& e) { return e.first == p; });
    if (it != resident.end()) {
      it->second = next_use[i];
      continue;
    }
    ++faults;
    auto victim = std::max_element(resident.begin(), resident.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second < b.second;
      return a.first > b.first;  // smallest id wins among equal next use
    });
    *victim = {p, next_use[i]};
  }
  return faults;
}

void MarkingAlgorithm::start(const StateHandle& state, RandomTape& tape) {
  cache_ = state.values;
  std::sort(cache_.begin(), cache_.end());
  marked_.assign(cache_.size(), false);
  tape_ = &tape;
}

Answer MarkingAlgorithm::answer(const Request& request) {
  const PageId p = request.values.at(0);
  auto it = std::lower_bound(cache_.begin(), cache_.end(), p);
  if (it != cache_.end() && *it == p) {
    marked_[static_cast<std::size_t>(it - cache_.begin())] = true;
    return Answer{kNoEviction};
  }
  if (std::all_of(marked_.begin(), marked_.end(), [](bool m) { return m; })) {
    std::fill(marked_.begin(), marked_.end(), false);
  }
  std::vector<std::size_t> unmarked;
  for (std::size_t i = 0; i < cache_.size(); ++i) {
    if (!marked_[i]) unmarked.push_back(i);
  }
  const std::size_t victim = unmarked[tape_->uniform(unmarked.size())];
  const PageId evicted = cache_[victim];
  cache_.erase(cache_.begin() + static_cast<std::ptrdiff_t>(victim));
  marked_.erase(marked_.begin() + static_cast<std::ptrdiff_t>(victim));
  auto pos = std::lower_bound(cache_.begin(), cache_.end(), p);
  auto idx = pos - cache_.begin();
  cache_.insert(pos, p);
  marked_.insert(marked_.begin() + idx, true);
  return Answer{evicted};
}

double harmonic(std::size_t k) {
  double h = 0.0;
  for (std::size_t i = 1; i <= k; ++i) h += 1.0 / static_cast<double>(i);
  return h;
}

}  // namespace hpboost
