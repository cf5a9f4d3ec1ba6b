#include "hpboost/mts.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace hpboost {

TaskSystem::TaskSystem(DistanceMatrix distances, bool metrical_flag)
    : d(std::move(distances)), metrical(metrical_flag) {
  for (std::size_t s = 0; s < d.size(); ++s) {
    if (d(s, s) != 0) throw std::invalid_argument("task system: d(s,s) must be 0");
  }
  if (metrical) {
    std::string why;
    // Configurations of a k-server system may coincide only when equal, so
    // the zero-distance check in is_metric is the right one here too.
    if (!d.is_metric(&why)) throw std::invalid_argument("task system is not metrical: " + why);
  }
}

MtsProblem::MtsProblem(TaskSystem ts, std::optional<Cost> task_bound)
    : ts_(std::move(ts)), task_bound_(task_bound) {
  if (ts_.size() == 0) throw std::invalid_argument("mts: empty state space");
}

std::vector<StateHandle> MtsProblem::initial_states() const {
  std::vector<StateHandle> out;
  for (std::size_t s = 0; s < ts_.size(); ++s) out.push_back(state(s));
  return out;
}

bool MtsProblem::is_initial(const StateHandle& s) const {
  return s.values.size() == 1 && s.values[0] >= 0 &&
         static_cast<std::size_t>(s.values[0]) < ts_.size();
}

std::vector<Answer> MtsProblem::feasible_answers(const StateHandle& /*state*/,
                                                 const Request& request) const {
  if (request.values.size() != ts_.size()) return {};
  std::vector<Answer> out(ts_.size());
  for (std::size_t t = 0; t < ts_.size(); ++t) out[t] = Answer{static_cast<std::int64_t>(t)};
  return out;
}

bool MtsProblem::is_feasible(const StateHandle& /*state*/, const Request& request,
                             Answer answer) const {
  return request.values.size() == ts_.size() && answer.value >= 0 &&
         static_cast<std::size_t>(answer.value) < ts_.size();
}

Cost MtsProblem::step_cost(const StateHandle& state, const Request& request,
                           Answer answer) const {
  auto s = static_cast<std::size_t>(state.values.at(0));
  auto t = static_cast<std::size_t>(answer.value);
  return add_costs(ts_.d(s, t), request.values.at(t));
}

StateHandle MtsProblem::next_state(const StateHandle& /*state*/, const Request& /*request*/,
                                   Answer answer) const {
  return StateHandle({answer.value});
}

Cost MtsProblem::opt_cost(const StateHandle& state, std::span<const Request> requests) const {
  WorkFunction wf(ts_, static_cast<std::size_t>(state.values.at(0)));
  Cost best = 0;
  for (const auto& r : requests) best = wf.push(r.values);
  return best;
}

namespace {

class MtsPrefixOpt final : public PrefixOpt {
 public:
  MtsPrefixOpt(const TaskSystem& ts, std::size_t start) : wf_(ts, start) {}
  Cost push(const Request& request) override { return wf_.push(request.values); }

 private:
  WorkFunction wf_;
};

}  // namespace

std::unique_ptr<PrefixOpt> MtsProblem::prefix_opt(const StateHandle& state) const {
  return std::make_unique<MtsPrefixOpt>(ts_, static_cast<std::size_t>(state.values.at(0)));
}

std::optional<Cost> MtsProblem::bound_F() const {
  if (!task_bound_) return std::nullopt;
  return ts_.d.max_entry() + *task_bound_;
}

std::shared_ptr<MtsProblem> mts_problem(TaskSystem ts, std::optional<Cost> task_bound) {
  return std::make_shared<MtsProblem>(std::move(ts), task_bound);
}

WorkFunction::WorkFunction(const TaskSystem& ts, std::size_t start)
    : ts_(&ts), w_(ts.size(), kInfiniteCost), scratch_(ts.size()) {
  if (start >= ts.size()) throw std::invalid_argument("work function: start outside state space");
  w_[start] = 0;
}

Cost WorkFunction::push(std::span<const Cost> task) {
  const std::size_t n = ts_->size();
  if (task.size() != n) throw std::invalid_argument("work function: task length mismatch");
  for (std::size_t s = 0; s < n; ++s) {
    Cost best = kInfiniteCost;
    for (std::size_t t = 0; t < n; ++t) best = std::min(best, add_costs(w_[t], ts_->d(t, s)));
    scratch_[s] = add_costs(best, task[s]);
  }
  w_.swap(scratch_);
  return minimum();
}

Cost WorkFunction::minimum() const { return *std::min_element(w_.begin(), w_.end()); }

Cost workfunction_opt(const TaskSystem& ts, std::size_t start, std::span<const TaskVector> tasks) {
  WorkFunction wf(ts, start);
  Cost best = 0;
  for (const auto& t : tasks) best = wf.push(t);
  return best;
}

void WorkFunctionAlgorithm::start(const StateHandle& state, RandomTape& /*tape*/) {
  current_ = static_cast<std::size_t>(state.values.at(0));
  wf_.emplace(ts_, current_);
}

Answer WorkFunctionAlgorithm::answer(const Request& request) {
  wf_->push(request.values);
  const auto& w = wf_->values();
  std::size_t best = current_;
  Cost best_value = add_costs(w[current_], 0);
  for (std::size_t s = 0; s < ts_.size(); ++s) {
    Cost v = add_costs(w[s], ts_.d(current_, s));
    if (v < best_value) {
      best_value = v;
      best = s;
    }
  }
  // Never settle in a state where the task is infinite if avoidable.
  if (is_infinite(request.values[best])) {
    Cost cheapest = kInfiniteCost;
    for (std::size_t s = 0; s < ts_.size(); ++s) {
      Cost c = add_costs(ts_.d(current_, s), request.values[s]);
      if (c < cheapest) {
        cheapest = c;
        best = s;
      }
    }
  }
  current_ = best;
  return Answer{static_cast<std::int64_t>(best)};
}

void RandomGreedyMtsAlgorithm::start(const StateHandle& state, RandomTape& tape) {
  current_ = static_cast<std::size_t>(state.values.at(0));
  tape_ = &tape;
}

Answer RandomGreedyMtsAlgorithm::answer(const Request& request) {
  Cost best = kInfiniteCost;
  std::vector<std::size_t> ties;
  for (std::size_t s = 0; s < ts_.size(); ++s) {
    Cost c = add_costs(ts_.d(current_, s), request.values.at(s));
    if (c < best) {
      best = c;
      ties.assign(1, s);
    } else if (c == best) {
      ties.push_back(s);
    }
  }
  current_ = ties[tape_->uniform(ties.size())];
  return Answer{static_cast<std::int64_t>(current_)};
}

TaskSystem relabel(const TaskSystem& ts, std::span<const std::size_t> perm) {
  const std::size_t n = ts.size();
  std::vector<Cost> e(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) e[perm[a] * n + perm[b]] = ts.d(a, b);
  }
  return TaskSystem(DistanceMatrix(n, std::move(e)), ts.metrical);
}

RelabelWrap::RelabelWrap(MtsAlgorithmFactory factory, TaskSystem ts, std::size_t designated_start)
    : factory_(std::move(factory)), ts_(std::move(ts)), s0_(designated_start) {
  if (s0_ >= ts_.size()) throw std::invalid_argument("relabel: designated start outside states");
}

void RelabelWrap::start(const StateHandle& state, RandomTape& tape) {
  const auto s = static_cast<std::size_t>(state.values.at(0));
  perm_.resize(ts_.size());
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  std::swap(perm_[s], perm_[s0_]);
  base_ = factory_(relabel(ts_, perm_));
  base_->start(MtsProblem::state(s0_), tape);
}

Answer RelabelWrap::answer(const Request& request) {
  Request mapped;
  mapped.values.resize(request.values.size());
  for (std::size_t i = 0; i < request.values.size(); ++i) mapped.values[perm_[i]] = request.values[i];
  Answer a = base_->answer(mapped);
  // A transposition is its own inverse.
  return Answer{static_cast<std::int64_t>(perm_.at(static_cast<std::size_t>(a.value)))};
}

std::unique_ptr<Algorithm> RelabelWrap::fresh() const {
  return std::make_unique<RelabelWrap>(factory_, ts_, s0_);
}

std::unique_ptr<Algorithm> relabel_wrap(MtsAlgorithmFactory factory, TaskSystem ts,
                                        std::size_t designated_start) {
  return std::make_unique<RelabelWrap>(std::move(factory), std::move(ts), designated_start);
}

Cost matching_distance(const Metric& metric, std::span<const std::size_t> from,
                       std::span<const std::size_t> to) {
  if (from.size() != to.size()) throw std::invalid_argument("matching: size mismatch");
  if (from.size() > 8) throw std::invalid_argument("matching: exhaustive search limited to k <= 8");
  std::vector<std::size_t> order(to.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Cost best = kInfiniteCost;
  do {
    Cost c = 0;
    for (std::size_t i = 0; i < from.size(); ++i) c += metric(from[i], to[order[i]]);
    best = std::min(best, c);
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

KServerMts kserver_to_mts(const Metric& metric, std::size_t k) {
  const std::size_t n = metric.size();
  if (k == 0 || k > n) throw std::invalid_argument("k-server: need 0 < k <= |points|");
  KServerMts out;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
  do {
    std::vector<std::size_t> config;
    for (std::size_t i = 0; i < n; ++i) {
      if (pick[i]) config.push_back(i);
    }
    out.configurations.push_back(std::move(config));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  std::sort(out.configurations.begin(), out.configurations.end());
  const std::size_t m = out.configurations.size();
  std::vector<Cost> e(m * m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      e[a * m + b] = matching_distance(metric, out.configurations[a], out.configurations[b]);
    }
  }
  out.ts = TaskSystem(DistanceMatrix(m, std::move(e)), true);
  return out;
}

std::size_t KServerMts::configuration_index(std::vector<std::size_t> points) const {
  std::sort(points.begin(), points.end());
  auto it = std::lower_bound(configurations.begin(), configurations.end(), points);
  if (it == configurations.end() || *it != points) {
    throw std::invalid_argument("k-server: not a configuration");
  }
  return static_cast<std::size_t>(it - configurations.begin());
}

TaskVector KServerMts::translate(std::size_t point) const {
  TaskVector v(configurations.size());
  for (std::size_t i = 0; i < configurations.size(); ++i) {
    const auto& c = configurations[i];
    v[i] = std::binary_search(c.begin(), c.end(), point) ? 0 : kInfiniteCost;
  }
  return v;
}

}  // namespace hpboost
