#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hpboost/metric.hpp"
#include "hpboost/problem.hpp"

namespace hpboost {

/// Finite state space with a transition cost matrix.
struct TaskSystem {
  DistanceMatrix d;
  bool metrical = false;

  TaskSystem() = default;
  /// Checks d(s,s) = 0, and the metric axioms when metrical is set.
  TaskSystem(DistanceMatrix distances, bool metrical_flag);

  std::size_t size() const noexcept { return d.size(); }
};

/// A task: one processing cost per state, kInfiniteCost allowed.
using TaskVector = std::vector<Cost>;

inline Request task_request(const TaskVector& task) { return Request(task); }

/// Metrical task system as an online problem. Answers are destination states;
/// the cost of moving from s to t and processing there is d(s,t) + task(t).
class MtsProblem final : public Problem {
 public:
  /// task_bound declares the largest finite task entry the inputs will use;
  /// without it the problem is not request-bounded.
  explicit MtsProblem(TaskSystem ts, std::optional<Cost> task_bound = std::nullopt);

  std::string name() const override { return "mts"; }
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
  std::optional<Cost> bound_F() const override;
  std::optional<Cost> bound_B() const override { return ts_.d.max_entry(); }
  bool symmetric() const override { return true; }

  const TaskSystem& task_system() const noexcept { return ts_; }
  static StateHandle state(std::size_t s) { return StateHandle({static_cast<std::int64_t>(s)}); }

 private:
  TaskSystem ts_;
  std::optional<Cost> task_bound_;
};

std::shared_ptr<MtsProblem> mts_problem(TaskSystem ts, std::optional<Cost> task_bound = std::nullopt);

/// Offline optimum by the work-function recurrence
/// w_i(s) = min_t (w_{i-1}(t) + d(t,s)) + task_i(s), started from the
/// indicator of the start state.
Cost workfunction_opt(const TaskSystem& ts, std::size_t start, std::span<const TaskVector> tasks);

/// Incremental work function: push() returns min_s w_i(s).
class WorkFunction {
 public:
  WorkFunction(const TaskSystem& ts, std::size_t start);
  Cost push(std::span<const Cost> task);
  const std::vector<Cost>& values() const noexcept { return w_; }
  Cost minimum() const;

 private:
  const TaskSystem* ts_;
  std::vector<Cost> w_;
  std::vector<Cost> scratch_;
};

/// Deterministic work function algorithm: after updating the work function it
/// moves to argmin_s (w(s) + d(current, s)), lowest index on ties. It treats
/// the state passed to start() as its designated initial state.
class WorkFunctionAlgorithm final : public Algorithm {
 public:
  explicit WorkFunctionAlgorithm(TaskSystem ts) : ts_(std::move(ts)) {}
  std::string name() const override { return "wfa"; }
  void start(const StateHandle& state, RandomTape& tape) override;
  Answer answer(const Request& request) override;
  std::unique_ptr<Algorithm> fresh() const override {
    return std::make_unique<WorkFunctionAlgorithm>(ts_);
  }

 private:
  TaskSystem ts_;
  std::optional<WorkFunction> wf_;
  std::size_t current_ = 0;
};

/// Picks uniformly among the states of minimum step cost (randomized greedy).
class RandomGreedyMtsAlgorithm final : public Algorithm {
 public:
  explicit RandomGreedyMtsAlgorithm(TaskSystem ts) : ts_(std::move(ts)) {}
  std::string name() const override { return "random-greedy"; }
  void start(const StateHandle& state, RandomTape& tape) override;
  Answer answer(const Request& request) override;
  std::unique_ptr<Algorithm> fresh() const override {
    return std::make_unique<RandomGreedyMtsAlgorithm>(ts_);
  }

 private:
  TaskSystem ts_;
  std::size_t current_ = 0;
  RandomTape* tape_ = nullptr;
};

/// Builds a base algorithm for a (relabeled) task system.
using MtsAlgorithmFactory = std::function<std::unique_ptr<Algorithm>(const TaskSystem&)>;

/// The task system with states renamed by the permutation: state s of ts
/// becomes perm[s].
TaskSystem relabel(const TaskSystem& ts, std::span<const std::size_t> perm);

/// Runs a base algorithm that only knows how to start from a designated
/// state s0 from any state s: on start(s) it swaps the labels of s and s0,
/// builds the base for the relabeled system, and translates requests and
/// answers through the swap.
class RelabelWrap final : public Algorithm {
 public:
  RelabelWrap(MtsAlgorithmFactory factory, TaskSystem ts, std::size_t designated_start);
  std::string name() const override { return "relabel"; }
  void start(const StateHandle& state, RandomTape& tape) override;
  Answer answer(const Request& request) override;
  std::unique_ptr<Algorithm> fresh() const override;

  const std::vector<std::size_t>& permutation() const noexcept { return perm_; }

 private:
  MtsAlgorithmFactory factory_;
  TaskSystem ts_;
  std::size_t s0_;
  std::vector<std::size_t> perm_;
  std::unique_ptr<Algorithm> base_;
};

std::unique_ptr<Algorithm> relabel_wrap(MtsAlgorithmFactory factory, TaskSystem ts,
                                        std::size_t designated_start);

/// k-server on a finite metric as a task system: states are the k-subsets of
/// points, transitions cost the minimum matching, and a request at q is the
/// vector that is 0 on configurations covering q and infinite elsewhere.
struct KServerMts {
  TaskSystem ts;
  std::vector<std::vector<std::size_t>> configurations;  // sorted point sets

  std::size_t configuration_index(std::vector<std::size_t> points) const;
  TaskVector translate(std::size_t point) const;
};

/// Exhaustive minimum-cost perfect matching between two point lists of equal
/// length (k <= 8).
Cost matching_distance(const Metric& metric, std::span<const std::size_t> from,
                       std::span<const std::size_t> to);

KServerMts kserver_to_mts(const Metric& metric, std::size_t k);

}  // namespace hpboost
