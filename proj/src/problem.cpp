#include "hpboost/problem.hpp"

#include <algorithm>
#include <map>

namespace hpboost {
namespace {

std::string join_values(const std::vector<std::int64_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != 0) out += ';';
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

std::string Request::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != 0) out += ';';
    out += cost_to_string(values[i]);
  }
  return out;
}

std::string StateHandle::to_string() const { return join_values(values); }

std::size_t StateHandleHash::operator()(const StateHandle& s) const noexcept {
  std::uint64_t h = 0x51ED270B27A3C1D5ULL ^ s.values.size();
  for (auto v : s.values) h = mix64(h + static_cast<std::uint64_t>(v) + kGoldenGamma);
  return static_cast<std::size_t>(h);
}

bool Problem::is_initial(const StateHandle& state) const {
  auto states = initial_states();
  return std::find(states.begin(), states.end(), state) != states.end();
}

bool Problem::is_feasible(const StateHandle& state, const Request& request,
                          Answer answer) const {
  auto answers = feasible_answers(state, request);
  return std::binary_search(answers.begin(), answers.end(), answer);
}

Cost Problem::min_step_cost(const StateHandle& state, const Request& request) const {
  Cost best = kInfiniteCost;
  for (Answer a : feasible_answers(state, request)) {
    best = std::min(best, step_cost(state, request, a));
  }
  return best;
}

Cost Problem::opt_cost(const StateHandle& state, std::span<const Request> requests) const {
  StateDpPrefixOpt dp(*this, state);
  for (const auto& r : requests) dp.push(r);
  return dp.current();
}

std::unique_ptr<PrefixOpt> Problem::prefix_opt(const StateHandle& state) const {
  return std::make_unique<StateDpPrefixOpt>(*this, state);
}

StateDpPrefixOpt::StateDpPrefixOpt(const Problem& problem, StateHandle start)
    : problem_(problem) {
  frontier_.emplace_back(std::move(start), 0);
}

Cost StateDpPrefixOpt::push(const Request& request) {
  std::map<StateHandle, Cost> next;
  for (const auto& [state, cost] : frontier_) {
    for (Answer a : problem_.feasible_answers(state, request)) {
      Cost c = add_costs(cost, problem_.step_cost(state, request, a));
      if (is_infinite(c)) continue;
      auto [it, inserted] = next.try_emplace(problem_.next_state(state, request, a), c);
      if (!inserted) it->second = std::min(it->second, c);
    }
  }
  frontier_.assign(next.begin(), next.end());
  return current();
}

Cost StateDpPrefixOpt::current() const {
  Cost best = kInfiniteCost;
  for (const auto& entry : frontier_) best = std::min(best, entry.second);
  return best;
}

UniformRandomAlgorithm::UniformRandomAlgorithm(std::shared_ptr<const Problem> problem)
    : problem_(std::move(problem)) {}

void UniformRandomAlgorithm::start(const StateHandle& state, RandomTape& tape) {
  state_ = state;
  tape_ = &tape;
}

Answer UniformRandomAlgorithm::answer(const Request& request) {
  auto answers = problem_->feasible_answers(state_, request);
  if (answers.empty()) throw ProblemError("invalid request " + request.to_string());
  Answer a = answers[tape_->uniform(answers.size())];
  state_ = problem_->next_state(state_, request, a);
  return a;
}

std::unique_ptr<Algorithm> UniformRandomAlgorithm::fresh() const {
  return std::make_unique<UniformRandomAlgorithm>(problem_);
}

GreedyAlgorithm::GreedyAlgorithm(std::shared_ptr<const Problem> problem)
    : problem_(std::move(problem)) {}

void GreedyAlgorithm::start(const StateHandle& state, RandomTape& /*tape*/) { state_ = state; }

Answer GreedyAlgorithm::answer(const Request& request) {
  auto answers = problem_->feasible_answers(state_, request);
  if (answers.empty()) throw ProblemError("invalid request " + request.to_string());
  Answer best = answers.front();
  Cost best_cost = kInfiniteCost;
  for (Answer a : answers) {
    Cost c = problem_->step_cost(state_, request, a);
    if (c < best_cost) {
      best_cost = c;
      best = a;
    }
  }
  state_ = problem_->next_state(state_, request, best);
  return best;
}

std::unique_ptr<Algorithm> GreedyAlgorithm::fresh() const {
  return std::make_unique<GreedyAlgorithm>(problem_);
}

}  // namespace hpboost
