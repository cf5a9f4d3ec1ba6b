#pragma once

#include <map>
#include <memory>
#include <vector>

#include "hpboost/metric.hpp"
#include "hpboost/problem.hpp"
#include "hpboost/rational.hpp"

namespace hpboost {

/// k-server on a finite metric with configurations as sorted multisets of
/// server positions. A request is a point; a covered request must be served
/// lazily (answer kNoMove, cost 0), otherwise the answer is the slot of the
/// server that moves there (one slot per distinct position).
class KServerProblem final : public Problem {
 public:
  static constexpr std::int64_t kNoMove = -1;

  KServerProblem(Metric metric, std::size_t k);

  std::string name() const override { return "kserver"; }
  std::vector<StateHandle> initial_states() const override;
  bool is_initial(const StateHandle& state) const override;
  std::vector<Answer> feasible_answers(const StateHandle& state,
                                       const Request& request) const override;
  Cost step_cost(const StateHandle& state, const Request& request, Answer answer) const override;
  StateHandle next_state(const StateHandle& state, const Request& request,
                         Answer answer) const override;
  std::optional<Cost> bound_F() const override { return metric_.matrix().max_entry(); }
  std::optional<Cost> bound_B() const override {
    return static_cast<Cost>(k_) * metric_.matrix().max_entry();
  }
  bool symmetric() const override { return true; }

  const Metric& metric() const noexcept { return metric_; }
  std::size_t k() const noexcept { return k_; }
  static StateHandle configuration(std::vector<std::int64_t> points);

 private:
  Metric metric_;
  std::size_t k_;
};

using History = std::vector<std::int64_t>;

/// Deterministic algorithm answering from a history table (histories since
/// the last start); unknown histories get the cheapest answer.
class TableAlgorithm final : public Algorithm {
 public:
  TableAlgorithm(std::shared_ptr<const Problem> problem, std::map<History, Answer> table);
  std::string name() const override { return "table"; }
  void start(const StateHandle& state, RandomTape& tape) override;
  Answer answer(const Request& request) override;
  std::unique_ptr<Algorithm> fresh() const override;

 private:
  std::shared_ptr<const Problem> problem_;
  std::shared_ptr<const std::map<History, Answer>> table_;
  StateHandle state_;
  History history_;
};

/// Draws one member uniformly from the tape at start() and delegates to it.
class MixtureAlgorithm final : public Algorithm {
 public:
  explicit MixtureAlgorithm(std::vector<std::shared_ptr<const Algorithm>> members);
  std::string name() const override { return "mixture"; }
  void start(const StateHandle& state, RandomTape& tape) override;
  Answer answer(const Request& request) override;
  std::unique_ptr<Algorithm> fresh() const override;
  std::size_t chosen() const noexcept { return chosen_; }

 private:
  std::vector<std::shared_ptr<const Algorithm>> members_;
  std::unique_ptr<Algorithm> current_;
  std::size_t chosen_ = 0;
};

/// Exact value min over deterministic strategies of max over request
/// sequences of length ell (over the given points) of cost / OPT, by
/// game-tree search, together with an optimal strategy table. Sequences with
/// OPT = 0 must be served at cost 0. Table keys include the prefix.
struct MinimaxResult {
  Rational value{0};
  std::map<History, Answer> table;
};

MinimaxResult kserver_minimax(const KServerProblem& problem, const StateHandle& start,
                              const std::vector<std::int64_t>& points, std::size_t ell,
                              const History& prefix = {});

struct ProbeConfig {
  std::size_t k = 2;
  std::size_t ell = 3;
  std::size_t lambda = 0;
  double zeta = 1.0;
  std::size_t copies = 3;
  std::size_t base_point = 0;
  std::uint64_t samples = 2000;
  std::uint64_t seed = 1;
};

/// The scaled metric, the k-server problem on it, the copy the adversary
/// plays in (j = clamp(round(zeta * min distance), 1, copies)) and the
/// initial configuration with every server on the shared point s.
struct ProbeSetup {
  std::shared_ptr<KServerProblem> problem;
  std::size_t copy = 1;
  std::vector<std::int64_t> copy_points;  // s first
  StateHandle start;
  History prefix;  // lambda requests of s
};

ProbeSetup make_probe_setup(const Metric& base_metric, const ProbeConfig& config);

struct ProbeResult {
  std::size_t copy = 1;
  History worst_sequence;          // excluding the prefix
  Rational strategy_ratio{0};      // worst ratio against the most frequent strategy
  std::size_t distinct_strategies = 0;
  double top_frequency = 0;        // share of samples playing the most frequent strategy
  std::vector<double> strategy_frequencies;  // sorted descending
  std::vector<double> ratios;      // algorithm cost / OPT on the chosen sequence, per sample
  double mean_ratio = 0;
  double log10_psi = 0;            // log10 of (k^(ell+1))^(n^(ell+1))
};

/// Sends lambda requests of s, estimates the algorithm's most frequent
/// deterministic continuation over all histories of length <= ell in the
/// chosen copy by replaying fresh instances with equal seeds, picks the
/// request sequence with the largest cost/OPT against that continuation and
/// measures the algorithm on it with fresh seeds.
ProbeResult probe_adversary(const Algorithm& alg, const ProbeSetup& setup,
                            const ProbeConfig& config);

}  // namespace hpboost
