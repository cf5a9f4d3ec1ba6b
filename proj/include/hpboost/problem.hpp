#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpboost/cost.hpp"
#include "hpboost/tape.hpp"

namespace hpboost {

/// Problem-specific request token: a page id, a task cost vector, a bit, ...
struct Request {
  std::vector<std::int64_t> values;

  Request() = default;
  explicit Request(std::vector<std::int64_t> v) : values(std::move(v)) {}
  static Request single(std::int64_t v) { return Request({v}); }

  friend auto operator<=>(const Request&, const Request&) = default;
  std::string to_string() const;
};

struct Answer {
  std::int64_t value = 0;

  friend auto operator<=>(const Answer&, const Answer&) = default;
  std::string to_string() const { return std::to_string(value); }
};

/// Canonical identifier of one equivalence class of (configuration, requests,
/// answers) histories. Two histories with equal handles admit the same future
/// request/answer sequences at the same costs.
struct StateHandle {
  std::vector<std::int64_t> values;

  StateHandle() = default;
  explicit StateHandle(std::vector<std::int64_t> v) : values(std::move(v)) {}

  friend auto operator<=>(const StateHandle&, const StateHandle&) = default;
  std::string to_string() const;
};

struct StateHandleHash {
  std::size_t operator()(const StateHandle& s) const noexcept;
};

class ProblemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Optimal cost of a growing prefix, queried once per request.
class PrefixOpt {
 public:
  virtual ~PrefixOpt() = default;
  /// Appends a request and returns the optimal cost of the whole prefix.
  virtual Cost push(const Request& request) = 0;
};

/// A partitionable online minimization problem. Implementations are immutable
/// after construction and safe to share between threads.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;

  /// A finite listing of initial states. Problems with infinitely many
  /// initial states list a representative subset and override is_initial.
  virtual std::vector<StateHandle> initial_states() const = 0;
  virtual bool is_initial(const StateHandle& state) const;

  /// Feasible answers, sorted ascending. Empty means the request is invalid
  /// in this state.
  virtual std::vector<Answer> feasible_answers(const StateHandle& state,
                                               const Request& request) const = 0;
  virtual bool is_feasible(const StateHandle& state, const Request& request,
                           Answer answer) const;

  /// Nonnegative cost of one answer, or kInfiniteCost.
  virtual Cost step_cost(const StateHandle& state, const Request& request,
                         Answer answer) const = 0;
  virtual StateHandle next_state(const StateHandle& state, const Request& request,
                                 Answer answer) const = 0;

  /// Minimum total cost of serving requests from state. The default is a
  /// layered dynamic program over reachable states, exact whenever state
  /// handles are canonical.
  virtual Cost opt_cost(const StateHandle& state, std::span<const Request> requests) const;

  /// Incremental optimum of a growing prefix starting at state.
  virtual std::unique_ptr<PrefixOpt> prefix_opt(const StateHandle& state) const;

  /// Request-boundedness constant F: every finite step cost is at most F.
  virtual std::optional<Cost> bound_F() const = 0;
  /// Opt-boundedness constant B; nullopt if the problem is not opt-bounded.
  virtual std::optional<Cost> bound_B() const = 0;
  /// Every state is initial (resets are allowed anywhere).
  virtual bool symmetric() const = 0;

  /// Minimum step cost over feasible answers, m(s, x).
  Cost min_step_cost(const StateHandle& state, const Request& request) const;
};

/// Frontier dynamic program over reachable states: the generic work function.
class StateDpPrefixOpt final : public PrefixOpt {
 public:
  StateDpPrefixOpt(const Problem& problem, StateHandle start);
  Cost push(const Request& request) override;
  Cost current() const;

 private:
  const Problem& problem_;
  std::vector<std::pair<StateHandle, Cost>> frontier_;
};

/// A randomized online algorithm. Instances are single-run, single-thread
/// objects; all randomness must come from the tape handed to start().
class Algorithm {
 public:
  virtual ~Algorithm() = default;

  virtual std::string name() const = 0;

  /// Begin, or restart (reset), treating state as the initial configuration.
  /// The tape must outlive every subsequent answer() call.
  virtual void start(const StateHandle& state, RandomTape& tape) = 0;
  virtual Answer answer(const Request& request) = 0;

  /// An unstarted copy with the same configuration.
  virtual std::unique_ptr<Algorithm> fresh() const = 0;

  /// True when the last answer was followed by an internal restart.
  virtual bool last_answer_reset() const { return false; }
};

/// Picks uniformly among the feasible answers of the state it tracks.
class UniformRandomAlgorithm final : public Algorithm {
 public:
  explicit UniformRandomAlgorithm(std::shared_ptr<const Problem> problem);
  std::string name() const override { return "uniform"; }
  void start(const StateHandle& state, RandomTape& tape) override;
  Answer answer(const Request& request) override;
  std::unique_ptr<Algorithm> fresh() const override;

 private:
  std::shared_ptr<const Problem> problem_;
  StateHandle state_;
  RandomTape* tape_ = nullptr;
};

/// Always picks the cheapest answer, lowest token on ties. Deterministic.
class GreedyAlgorithm final : public Algorithm {
 public:
  explicit GreedyAlgorithm(std::shared_ptr<const Problem> problem);
  std::string name() const override { return "greedy"; }
  void start(const StateHandle& state, RandomTape& tape) override;
  Answer answer(const Request& request) override;
  std::unique_ptr<Algorithm> fresh() const override;

 private:
  std::shared_ptr<const Problem> problem_;
  StateHandle state_;
};

}  // namespace hpboost
