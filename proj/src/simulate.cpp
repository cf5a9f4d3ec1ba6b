#include "hpboost/simulate.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace hpboost {

RunTrace simulate(const Problem& problem, Algorithm& alg, const StateHandle& start,
                  std::span<const Request> requests, RandomTape& tape,
                  const SimulateOptions& options) {
  RunTrace trace;
  trace.seed = tape.seed();
  const auto first_bit = tape.position();
  StateHandle state = start;
  alg.start(state, tape);
  if (options.record_steps) trace.steps.reserve(requests.size());
  trace.answers.reserve(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const Request& x = requests[i];
    Answer y = alg.answer(x);
    if (!problem.is_feasible(state, x, y)) {
      throw InfeasibleAnswer(i, "step " + std::to_string(i) + ": answer " + y.to_string() +
                                    " infeasible for request " + x.to_string() +
                                    " in state " + state.to_string());
    }
    Cost c = problem.step_cost(state, x, y);
    state = problem.next_state(state, x, y);
    trace.total_cost = add_costs(trace.total_cost, c);
    trace.answers.push_back(y);
    if (options.record_steps) {
      trace.steps.push_back(TraceStep{x, y, c, state, alg.last_answer_reset()});
    }
  }
  trace.length = requests.size();
  trace.tape_bits = tape.position() - first_bit;
  trace.final_state = std::move(state);
  return trace;
}

namespace {

struct Enumerator {
  const Problem& problem;
  std::span<const Request> requests;
  std::uint64_t budget;
  std::uint64_t leaves = 0;
  Cost best = kInfiniteCost;
  bool collect = false;
  std::vector<Answer> path;
  std::vector<std::vector<Answer>> best_paths;

  void run(const StateHandle& state, std::size_t i, Cost acc) {
    if (i == requests.size()) {
      if (++leaves > budget) {
        throw BudgetExceeded("brute-force enumeration exceeded " + std::to_string(budget) +
                             " answer sequences");
      }
      if (acc < best) {
        best = acc;
        if (collect) best_paths.clear();
      }
      if (collect && acc == best && !is_infinite(acc)) best_paths.push_back(path);
      return;
    }
    const Request& x = requests[i];
    for (Answer a : problem.feasible_answers(state, x)) {
      Cost c = add_costs(acc, problem.step_cost(state, x, a));
      path.push_back(a);
      run(problem.next_state(state, x, a), i + 1, c);
      path.pop_back();
    }
  }
};

}  // namespace

Cost brute_force_opt(const Problem& problem, const StateHandle& start,
                     std::span<const Request> requests, std::uint64_t budget) {
  Enumerator e{problem, requests, budget, 0, kInfiniteCost, false, {}, {}};
  e.run(start, 0, 0);
  return e.best;
}

std::vector<std::vector<Answer>> brute_force_optimal_sequences(const Problem& problem,
                                                               const StateHandle& start,
                                                               std::span<const Request> requests,
                                                               std::uint64_t budget) {
  Enumerator e{problem, requests, budget, 0, kInfiniteCost, false, {}, {}};
  e.collect = true;
  e.run(start, 0, 0);
  return e.best_paths;
}

Cost verify_opt_bounded(const Problem& problem, std::span<const StateHandle> states,
                        std::span<const std::vector<Request>> sequences, std::uint64_t budget) {
  Cost worst = 0;
  for (const auto& seq : sequences) {
    Cost lo = kInfiniteCost;
    Cost hi = 0;
    for (const auto& s : states) {
      Cost c = brute_force_opt(problem, s, seq, budget);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    if (states.empty()) continue;
    if (is_infinite(hi)) return kInfiniteCost;
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

std::string trace_to_csv(const RunTrace& trace) {
  std::ostringstream os;
  os << "step,request,answer,cost,state,cumulative\n";
  Cost cumulative = 0;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    cumulative = add_costs(cumulative, s.cost);
    os << i + 1 << ',' << s.request.to_string() << ',' << s.answer.to_string() << ','
       << cost_to_string(s.cost) << ',' << s.state.to_string() << ','
       << cost_to_string(cumulative) << '\n';
  }
  return os.str();
}

std::string trace_summary_json(const RunTrace& trace) {
  nlohmann::json j;
  j["seed"] = trace.seed;
  j["total_cost"] = is_infinite(trace.total_cost) ? nlohmann::json("inf")
                                                  : nlohmann::json(trace.total_cost);
  j["steps"] = trace.length;
  j["tape_bits"] = trace.tape_bits;
  return j.dump();
}

}  // namespace hpboost
