#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hpboost/problem.hpp"
#include "hpboost/rational.hpp"

namespace hpboost {

enum class CounterexampleKind { kBitGuess, kLastGuess, kTest, kDoubling };

std::string to_string(CounterexampleKind kind);
CounterexampleKind parse_counterexample_kind(const std::string& name);

struct CounterexampleSpec {
  CounterexampleKind kind = CounterexampleKind::kBitGuess;
  std::size_t n = 1;
  std::int64_t b = 2;  // lastguess only

  /// Throws std::invalid_argument on out-of-range sizes.
  void validate() const;
};

/// Guess the shifted input. Requests x_0 = 1, x_1..x_n are bits and every
/// request is answered by a bit. When y_{i-1} = x_i for all i in 1..n the
/// total cost is D = 2^(2n), otherwise it is x_0 + ... + x_n. Step i is
/// charged x_i and the last step also carries D - sum when every guess hit.
/// The final answer is never compared with anything.
class BitGuessProblem final : public Problem {
 public:
  explicit BitGuessProblem(std::size_t n);
  std::string name() const override { return "bitguess"; }
  std::vector<StateHandle> initial_states() const override;
  std::vector<Answer> feasible_answers(const StateHandle& state,
                                       const Request& request) const override;
  Cost step_cost(const StateHandle& state, const Request& request, Answer answer) const override;
  StateHandle next_state(const StateHandle& state, const Request& request,
                         Answer answer) const override;
  std::optional<Cost> bound_F() const override { return big_d_; }
  std::optional<Cost> bound_B() const override { return std::nullopt; }
  bool symmetric() const override { return false; }

  std::size_t n() const noexcept { return n_; }
  Cost big_d() const noexcept { return big_d_; }

 private:
  std::size_t n_;
  Cost big_d_;
};

/// n requests: n-1 dummies (token 0) and a final x_n in 1..b. The first
/// answer y_1 is in 1..b, later answers are the token 0. The final step costs
/// b*n if y_1 = x_n and n otherwise.
class LastGuessProblem final : public Problem {
 public:
  LastGuessProblem(std::size_t n, std::int64_t b);
  std::string name() const override { return "lastguess"; }
  std::vector<StateHandle> initial_states() const override;
  std::vector<Answer> feasible_answers(const StateHandle& state,
                                       const Request& request) const override;
  Cost step_cost(const StateHandle& state, const Request& request, Answer answer) const override;
  StateHandle next_state(const StateHandle& state, const Request& request,
                         Answer answer) const override;
  std::optional<Cost> bound_F() const override { return b_ * static_cast<Cost>(n_); }
  std::optional<Cost> bound_B() const override { return std::nullopt; }
  bool symmetric() const override { return false; }

 private:
  std::size_t n_;
  std::int64_t b_;
};

/// The test problem: a dummy request 0, a test bit x_0 guessed by the first
/// answer, then bits x_1..x_n. Step i >= 1 costs 1 when the test was passed
/// or the previous answer equals x_i, and 5 otherwise, so the last answer is
/// never charged. States carry no index: init, guessed(bit), passed,
/// failed(previous answer).
class TestProblem final : public Problem {
 public:
  enum Phase : std::int64_t { kInit = 0, kGuessed = 1, kPassed = 2, kFailed = 3 };

  std::string name() const override { return "test"; }
  std::vector<StateHandle> initial_states() const override;
  std::vector<Answer> feasible_answers(const StateHandle& state,
                                       const Request& request) const override;
  Cost step_cost(const StateHandle& state, const Request& request, Answer answer) const override;
  StateHandle next_state(const StateHandle& state, const Request& request,
                         Answer answer) const override;
  std::optional<Cost> bound_F() const override { return 5; }
  std::optional<Cost> bound_B() const override { return std::nullopt; }
  bool symmetric() const override { return false; }

  /// The dummy, the test bit, then the n payload bits.
  static std::vector<Request> input(std::int64_t test_bit, std::span<const std::int64_t> bits);
};

/// States (s, t); a request bit r answered by y costs 2^t if s = r and
/// 3 * 2^t otherwise, and leads to (y, t + 1). Every state is initial.
class DoublingProblem final : public Problem {
 public:
  static constexpr std::int64_t kMaxTime = 60;

  std::string name() const override { return "doubling"; }
  /// (0,0) and (1,0); is_initial accepts every (s,t).
  std::vector<StateHandle> initial_states() const override;
  bool is_initial(const StateHandle& state) const override;
  std::vector<Answer> feasible_answers(const StateHandle& state,
                                       const Request& request) const override;
  Cost step_cost(const StateHandle& state, const Request& request, Answer answer) const override;
  StateHandle next_state(const StateHandle& state, const Request& request,
                         Answer answer) const override;
  std::optional<Cost> bound_F() const override { return std::nullopt; }
  std::optional<Cost> bound_B() const override { return std::nullopt; }
  bool symmetric() const override { return true; }

  static StateHandle state(std::int64_t s, std::int64_t t) { return StateHandle({s, t}); }
};

std::shared_ptr<Problem> counterexample_problem(const CounterexampleSpec& spec);

/// Exact finite distribution of a cost.
struct CostDistribution {
  std::vector<std::pair<Cost, Rational>> atoms;  // sorted by cost, probabilities sum to 1

  Rational expectation() const;
  Rational probability_at_least(Cost threshold) const;
  Rational probability_equal(Cost value) const;
  Rational total_probability() const;
};

/// Cost distribution of the idealized uniform guesser, which picks every
/// feasible answer with probability 1/|answers|, by exhaustive search.
CostDistribution uniform_answer_distribution(const Problem& problem, const StateHandle& start,
                                             std::span<const Request> requests);

/// Cost distribution of a concrete algorithm over all 2^tape_bits explicit
/// tapes of the given length, each weighted equally. Throws TapeExhausted if
/// some run needs more bits.
CostDistribution tape_enumeration_distribution(const Problem& problem, const Algorithm& prototype,
                                               const StateHandle& start,
                                               std::span<const Request> requests,
                                               unsigned tape_bits);

/// Closed forms.
Rational bitguess_success_probability(std::size_t n);        // 1 - 2^-n
Rational bitguess_expected_ratio_lower_bound(std::size_t n);  // 2^n / (n+1)
Rational lastguess_expected_cost(std::size_t n, std::int64_t b);  // n (1 + (b-1)/b)
Rational lastguess_max_cost_probability(std::int64_t b);     // 1/b
/// Uniform guesser on doubling from a state matching x_1 with n requests:
/// OPT = 2^n - 1 and expectation 2^(n+1) - 3.
Cost doubling_opt(std::size_t n);
Rational doubling_uniform_expectation(std::size_t n);
Cost doubling_tail_threshold(std::size_t n);  // 9 * 2^(n-2)
/// opt((1,t), x) - opt((0,t), x) for the single request x = 0.
Cost doubling_deviation(std::int64_t t);

/// Number of classes of histories of length <= depth that differ in their
/// future cost tables (continuations up to the given horizon); a brute-force
/// state minimization independent of the problem's state handles.
std::size_t count_state_classes(const Problem& problem, const StateHandle& start,
                                std::span<const std::int64_t> request_alphabet,
                                std::size_t depth, std::size_t horizon);

}  // namespace hpboost
