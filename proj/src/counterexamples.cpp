#include "hpboost/counterexamples.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "hpboost/simulate.hpp"

namespace hpboost {

std::string to_string(CounterexampleKind kind) {
  switch (kind) {
    case CounterexampleKind::kBitGuess: return "bitguess";
    case CounterexampleKind::kLastGuess: return "lastguess";
    case CounterexampleKind::kTest: return "test";
    case CounterexampleKind::kDoubling: return "doubling";
  }
  return "?";
}

CounterexampleKind parse_counterexample_kind(const std::string& name) {
  if (name == "bitguess") return CounterexampleKind::kBitGuess;
  if (name == "lastguess") return CounterexampleKind::kLastGuess;
  if (name == "test") return CounterexampleKind::kTest;
  if (name == "doubling") return CounterexampleKind::kDoubling;
  throw std::invalid_argument("unknown counterexample '" + name + "'");
}

void CounterexampleSpec::validate() const {
  switch (kind) {
    case CounterexampleKind::kBitGuess:
      if (n < 1 || n > 30) throw std::invalid_argument("bitguess: need 1 <= n <= 30");
      break;
    case CounterexampleKind::kLastGuess:
      // With one request the only guess would be made after seeing x_n.
      if (n < 2) throw std::invalid_argument("lastguess: need n >= 2");
      if (b < 2) throw std::invalid_argument("lastguess: need b >= 2");
      break;
    case CounterexampleKind::kTest:
      if (n < 1) throw std::invalid_argument("test: need n >= 1");
      break;
    case CounterexampleKind::kDoubling:
      if (n < 2 || n > static_cast<std::size_t>(DoublingProblem::kMaxTime)) {
        throw std::invalid_argument("doubling: need 2 <= n <= 60");
      }
      break;
  }
}

namespace {

bool is_bit(std::int64_t v) { return v == 0 || v == 1; }

const std::vector<Answer> kBitAnswers{Answer{0}, Answer{1}};

}  // namespace

// ---- bitguess: state (i, matched, prev, sum)

BitGuessProblem::BitGuessProblem(std::size_t n) : n_(n) {
  CounterexampleSpec{CounterexampleKind::kBitGuess, n, 2}.validate();
  big_d_ = Cost{1} << (2 * n);
}

std::vector<StateHandle> BitGuessProblem::initial_states() const {
  return {StateHandle({0, 1, -1, 0})};
}

std::vector<Answer> BitGuessProblem::feasible_answers(const StateHandle& state,
                                                      const Request& request) const {
  const auto i = state.values.at(0);
  if (request.values.size() != 1 || i > static_cast<std::int64_t>(n_)) return {};
  const auto x = request.values[0];
  if (i == 0 ? x != 1 : !is_bit(x)) return {};
  return kBitAnswers;
}

Cost BitGuessProblem::step_cost(const StateHandle& state, const Request& request,
                                Answer /*answer*/) const {
  const auto& v = state.values;
  const auto x = request.values.at(0);
  const bool matched = v[1] != 0 && (v[0] == 0 || v[2] == x);
  if (v[0] == static_cast<std::int64_t>(n_) && matched) return big_d_ - v[3];
  return x;
}

StateHandle BitGuessProblem::next_state(const StateHandle& state, const Request& request,
                                        Answer answer) const {
  const auto& v = state.values;
  const auto x = request.values.at(0);
  const bool matched = v[1] != 0 && (v[0] == 0 || v[2] == x);
  return StateHandle({v[0] + 1, matched ? 1 : 0, answer.value, v[3] + x});
}

// ---- lastguess: state (i, y1)

LastGuessProblem::LastGuessProblem(std::size_t n, std::int64_t b) : n_(n), b_(b) {
  CounterexampleSpec{CounterexampleKind::kLastGuess, n, b}.validate();
}

std::vector<StateHandle> LastGuessProblem::initial_states() const {
  return {StateHandle({0, 0})};
}

std::vector<Answer> LastGuessProblem::feasible_answers(const StateHandle& state,
                                                       const Request& request) const {
  const auto i = state.values.at(0);
  const auto last = static_cast<std::int64_t>(n_) - 1;
  if (request.values.size() != 1 || i > last) return {};
  const auto x = request.values[0];
  if (i < last ? x != 0 : (x < 1 || x > b_)) return {};
  if (i != 0) return {Answer{0}};
  std::vector<Answer> out;
  for (std::int64_t y = 1; y <= b_; ++y) out.push_back(Answer{y});
  return out;
}

Cost LastGuessProblem::step_cost(const StateHandle& state, const Request& request,
                                 Answer answer) const {
  const auto i = state.values.at(0);
  if (i != static_cast<std::int64_t>(n_) - 1) return 0;
  const auto y1 = i == 0 ? answer.value : state.values[1];
  const auto n = static_cast<Cost>(n_);
  return y1 == request.values.at(0) ? b_ * n : n;
}

StateHandle LastGuessProblem::next_state(const StateHandle& state, const Request& /*request*/,
                                         Answer answer) const {
  const auto i = state.values.at(0);
  return StateHandle({i + 1, i == 0 ? answer.value : state.values[1]});
}

// ---- test problem: state (phase, bit)

std::vector<StateHandle> TestProblem::initial_states() const { return {StateHandle({kInit, 0})}; }

std::vector<Answer> TestProblem::feasible_answers(const StateHandle& state,
                                                  const Request& request) const {
  if (request.values.size() != 1) return {};
  const auto x = request.values[0];
  if (state.values.at(0) == kInit ? x != 0 : !is_bit(x)) return {};
  return kBitAnswers;
}

Cost TestProblem::step_cost(const StateHandle& state, const Request& request,
                            Answer /*answer*/) const {
  switch (state.values.at(0)) {
    case kPassed: return 1;
    case kFailed: return state.values[1] == request.values.at(0) ? 1 : 5;
    default: return 0;
  }
}

StateHandle TestProblem::next_state(const StateHandle& state, const Request& request,
                                    Answer answer) const {
  switch (state.values.at(0)) {
    case kInit: return StateHandle({kGuessed, answer.value});
    case kGuessed:
      if (state.values[1] == request.values.at(0)) return StateHandle({kPassed, 0});
      return StateHandle({kFailed, answer.value});
    case kPassed: return state;
    default: return StateHandle({kFailed, answer.value});
  }
}

std::vector<Request> TestProblem::input(std::int64_t test_bit, std::span<const std::int64_t> bits) {
  std::vector<Request> out{Request::single(0), Request::single(test_bit)};
  for (auto b : bits) out.push_back(Request::single(b));
  return out;
}

// ---- doubling: state (s, t)

std::vector<StateHandle> DoublingProblem::initial_states() const {
  return {state(0, 0), state(1, 0)};
}

bool DoublingProblem::is_initial(const StateHandle& s) const {
  return s.values.size() == 2 && is_bit(s.values[0]) && s.values[1] >= 0 &&
         s.values[1] <= kMaxTime;
}

std::vector<Answer> DoublingProblem::feasible_answers(const StateHandle& state,
                                                      const Request& request) const {
  if (request.values.size() != 1 || !is_bit(request.values[0])) return {};
  if (state.values.at(1) >= kMaxTime) return {};
  return kBitAnswers;
}

Cost DoublingProblem::step_cost(const StateHandle& state, const Request& request,
                                Answer /*answer*/) const {
  const Cost unit = Cost{1} << state.values.at(1);
  return state.values[0] == request.values.at(0) ? unit : 3 * unit;
}

StateHandle DoublingProblem::next_state(const StateHandle& state, const Request& /*request*/,
                                        Answer answer) const {
  return DoublingProblem::state(answer.value, state.values.at(1) + 1);
}

std::shared_ptr<Problem> counterexample_problem(const CounterexampleSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case CounterexampleKind::kBitGuess: return std::make_shared<BitGuessProblem>(spec.n);
    case CounterexampleKind::kLastGuess: return std::make_shared<LastGuessProblem>(spec.n, spec.b);
    case CounterexampleKind::kTest: return std::make_shared<TestProblem>();
    case CounterexampleKind::kDoubling: return std::make_shared<DoublingProblem>();
  }
  throw std::logic_error("unreachable");
}

// ---- exact distributions

Rational CostDistribution::expectation() const {
  Rational e(0);
  for (const auto& [c, p] : atoms) {
    if (is_infinite(c)) throw std::domain_error("expectation of a distribution with infinite atoms");
    e += p * Rational(c);
  }
  return e;
}

Rational CostDistribution::probability_at_least(Cost threshold) const {
  Rational p(0);
  for (const auto& [c, q] : atoms) {
    if (c >= threshold) p += q;
  }
  return p;
}

Rational CostDistribution::probability_equal(Cost value) const {
  for (const auto& [c, q] : atoms) {
    if (c == value) return q;
  }
  return Rational(0);
}

Rational CostDistribution::total_probability() const {
  Rational p(0);
  for (const auto& atom : atoms) p += atom.second;
  return p;
}

namespace {

CostDistribution from_map(const std::map<Cost, Rational>& m) {
  CostDistribution d;
  d.atoms.assign(m.begin(), m.end());
  return d;
}

}  // namespace

CostDistribution uniform_answer_distribution(const Problem& problem, const StateHandle& start,
                                             std::span<const Request> requests) {
  std::map<Cost, Rational> mass;
  std::function<void(const StateHandle&, std::size_t, Cost, const Rational&)> walk =
      [&](const StateHandle& s, std::size_t i, Cost acc, const Rational& p) {
        if (i == requests.size()) {
          mass[acc] += p;
          return;
        }
        auto answers = problem.feasible_answers(s, requests[i]);
        if (answers.empty()) throw ProblemError("invalid request at step " + std::to_string(i));
        Rational q = p / Rational(static_cast<std::int64_t>(answers.size()));
        for (Answer a : answers) {
          walk(problem.next_state(s, requests[i], a), i + 1,
               add_costs(acc, problem.step_cost(s, requests[i], a)), q);
        }
      };
  walk(start, 0, 0, Rational(1));
  return from_map(mass);
}

CostDistribution tape_enumeration_distribution(const Problem& problem, const Algorithm& prototype,
                                               const StateHandle& start,
                                               std::span<const Request> requests,
                                               unsigned tape_bits) {
  if (tape_bits > 26) throw BudgetExceeded("tape enumeration limited to 26 bits");
  const std::uint64_t count = 1ULL << tape_bits;
  std::map<Cost, std::int64_t> hits;
  SimulateOptions opts;
  opts.record_steps = false;
  for (std::uint64_t w = 0; w < count; ++w) {
    std::vector<bool> bits(tape_bits);
    for (unsigned j = 0; j < tape_bits; ++j) bits[j] = ((w >> (tape_bits - 1 - j)) & 1ULL) != 0;
    RandomTape tape = RandomTape::from_bits(std::move(bits));
    auto alg = prototype.fresh();
    hits[simulate(problem, *alg, start, requests, tape, opts).total_cost] += 1;
  }
  std::map<Cost, Rational> mass;
  for (const auto& [c, h] : hits) mass[c] = Rational(h, static_cast<std::int64_t>(count));
  return from_map(mass);
}

// ---- closed forms

Rational bitguess_success_probability(std::size_t n) {
  const auto pow = std::int64_t{1} << n;
  return Rational(pow - 1, pow);
}

Rational bitguess_expected_ratio_lower_bound(std::size_t n) {
  return Rational(std::int64_t{1} << n, static_cast<std::int64_t>(n) + 1);
}

Rational lastguess_expected_cost(std::size_t n, std::int64_t b) {
  return Rational(static_cast<std::int64_t>(n)) * (Rational(1) + Rational(b - 1, b));
}

Rational lastguess_max_cost_probability(std::int64_t b) { return Rational(1, b); }

Cost doubling_opt(std::size_t n) { return (Cost{1} << n) - 1; }

Rational doubling_uniform_expectation(std::size_t n) {
  return Rational((Cost{1} << (n + 1)) - 3);
}

Cost doubling_tail_threshold(std::size_t n) { return 9 * (Cost{1} << (n - 2)); }

Cost doubling_deviation(std::int64_t t) { return Cost{2} << t; }

// ---- brute-force state minimization

namespace {

/// Serialized table of every valid continuation up to the horizon: for each
/// request token either "invalid" or the answers with their cost and the
/// table of the successor.
std::string future_signature(const Problem& problem, const StateHandle& s,
                             std::span<const std::int64_t> alphabet, std::size_t horizon) {
  if (horizon == 0) return "";
  std::string sig = "(";
  for (auto x : alphabet) {
    Request r = Request::single(x);
    auto answers = problem.feasible_answers(s, r);
    sig += std::to_string(x) + ":";
    if (answers.empty()) {
      sig += "!";
      continue;
    }
    for (Answer a : answers) {
      sig += a.to_string() + "/" + cost_to_string(problem.step_cost(s, r, a)) +
             future_signature(problem, problem.next_state(s, r, a), alphabet, horizon - 1) + ",";
    }
  }
  return sig + ")";
}

}  // namespace

std::size_t count_state_classes(const Problem& problem, const StateHandle& start,
                                std::span<const std::int64_t> request_alphabet,
                                std::size_t depth, std::size_t horizon) {
  std::set<std::string> classes;
  std::function<void(const StateHandle&, std::size_t)> walk = [&](const StateHandle& s,
                                                                   std::size_t d) {
    classes.insert(future_signature(problem, s, request_alphabet, horizon));
    if (d == depth) return;
    for (auto x : request_alphabet) {
      Request r = Request::single(x);
      for (Answer a : problem.feasible_answers(s, r)) walk(problem.next_state(s, r, a), d + 1);
    }
  };
  walk(start, 0);
  return classes.size();
}

}  // namespace hpboost
