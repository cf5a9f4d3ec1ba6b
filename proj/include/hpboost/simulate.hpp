#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hpboost/problem.hpp"

namespace hpboost {

struct TraceStep {
  Request request;
  Answer answer;
  Cost cost = 0;
  StateHandle state;  // state after the answer
  bool reset = false;
};

/// Result of one run. When steps are not recorded only the summary fields
/// are filled in.
struct RunTrace {
  std::uint64_t seed = 0;
  std::vector<TraceStep> steps;
  std::vector<Answer> answers;
  std::size_t length = 0;
  Cost total_cost = 0;
  std::uint64_t tape_bits = 0;
  StateHandle final_state;
};

struct SimulateOptions {
  bool record_steps = true;
};

/// Thrown when an algorithm emits an answer outside the feasible set.
class InfeasibleAnswer : public ProblemError {
 public:
  InfeasibleAnswer(std::size_t step, const std::string& what)
      : ProblemError(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Runs alg on requests from start without resets. The algorithm is started
/// once at start on the given tape.
RunTrace simulate(const Problem& problem, Algorithm& alg, const StateHandle& start,
                  std::span<const Request> requests, RandomTape& tape,
                  const SimulateOptions& options = {});

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

/// Exact optimum by enumerating every feasible answer sequence. The budget
/// caps the number of complete answer sequences enumerated; exceeding it
/// throws BudgetExceeded.
Cost brute_force_opt(const Problem& problem, const StateHandle& start,
                     std::span<const Request> requests,
                     std::uint64_t budget = kDefaultEnumerationBudget);

/// All answer sequences attaining the brute-force optimum.
std::vector<std::vector<Answer>> brute_force_optimal_sequences(
    const Problem& problem, const StateHandle& start, std::span<const Request> requests,
    std::uint64_t budget = kDefaultEnumerationBudget);

/// Maximum |opt(s, x) - opt(s', x)| over all state pairs and sequences,
/// using brute_force_opt. Sequences with an infinite optimum from some state
/// yield an infinite deviation.
Cost verify_opt_bounded(const Problem& problem, std::span<const StateHandle> states,
                        std::span<const std::vector<Request>> sequences,
                        std::uint64_t budget = kDefaultEnumerationBudget);

/// Line-per-step CSV: step,request,answer,cost,state,cumulative.
std::string trace_to_csv(const RunTrace& trace);
/// JSON summary: seed, total cost, steps, tape bits.
std::string trace_summary_json(const RunTrace& trace);

}  // namespace hpboost
