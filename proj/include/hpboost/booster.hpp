#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hpboost/problem.hpp"
#include "hpboost/rational.hpp"
#include "hpboost/simulate.hpp"

namespace hpboost {

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A derived constant failed its strict inequality after rounding.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct BoostConfig {
  Rational epsilon{1};
  Rational r{1};
  Rational F{0};
  Rational B{0};
  Rational alpha{0};
  Rational safety_factor{2};

  void validate() const;  // throws ParameterError
};

/// One strict inequality lhs > rhs that the derived constants must satisfy.
struct ConstraintWitness {
  std::string name;
  Rational lhs;
  Rational rhs;
  bool holds() const { return lhs > rhs; }
  Rational margin() const { return lhs - rhs; }
};

struct BoostParams {
  BoostConfig config;
  Cost C = 0;
  Cost D = 0;
  Rational p{0};
  Rational mu{0};
  std::vector<ConstraintWitness> constraints;

  /// Re-evaluates every invariant from C and D; throws ConsistencyError.
  void check() const;
};

/// C = ceil(safety (F+B)/eps) and
/// D = ceil(safety max(r(C+F+B), (1+eps) r^2 C (C+B+F) / (r((1+eps)C - (C+B+F))))),
/// then p = r(C+F+B)/D and mu = r(C+F+B)/(1-p).
BoostParams derive_params(const BoostConfig& config);

/// key=value table with every constraint and its margin.
std::string params_table(const BoostParams& params);

enum class ResetReason : unsigned { kPhaseStart = 1, kCostExceeded = 2 };

struct ResetEvent {
  std::size_t step = 0;  // 0-based index of the first request served after the reset
  bool phase_start = false;
  bool cost_exceeded = false;
  StateHandle state;
  std::uint64_t tape_position = 0;
};

struct PhaseRecord {
  std::size_t start = 0;      // n_i, 1-based index of the first request
  std::size_t length = 0;     // number of requests (0 for a phase skipped by an OPT jump)
  Cost opt_before = 0;        // OPT of x_1..x_{n_i - 1}
  Cost opt_at_end = 0;        // OPT of x_1..x_{n_{i+1} - 1}
  std::size_t subphases = 0;  // X_i
  Cost cost = 0;              // W_i
  std::vector<Cost> subphase_costs;
  std::vector<std::size_t> reset_indices;  // into PhaseLedger::resets

  Cost opt_increment() const { return opt_at_end - opt_before; }
};

struct PhaseLedger {
  std::vector<PhaseRecord> phases;
  std::vector<ResetEvent> resets;
  std::vector<Cost> prefix_opt;  // OPT of x_1..x_j for j = 1..n

  std::string to_json() const;
};

struct BoostedRun {
  RunTrace trace;
  PhaseLedger ledger;
};

/// The reset meta-algorithm. Phase i starts at the first request whose OPT
/// prefix (including it) reaches (i-1)C; the base algorithm is restarted at
/// the current state before that request, and also right after the cost
/// accumulated since the last restart exceeds D. All restarts continue on
/// the same tape. A restart for both reasons is a single restart.
BoostedRun boosted_run(const Problem& problem, const Algorithm& base, const StateHandle& start,
                       std::span<const Request> requests, RandomTape& tape,
                       const BoostParams& params);

/// Overload taking the two thresholds directly.
BoostedRun boosted_run(const Problem& problem, const Algorithm& base, const StateHandle& start,
                       std::span<const Request> requests, RandomTape& tape, Cost C, Cost D);

/// Replays the base algorithm from every reset of a boosted run up to the
/// next reset, on a fresh instance and a tape reopened at the recorded
/// position. Returns the index of the first reset whose replay diverges.
std::optional<std::size_t> replay_divergence(const Problem& problem, const Algorithm& base,
                                             std::span<const Request> requests,
                                             const BoostedRun& run);

/// Structural checks on a ledger: non-final phase OPT increments within
/// [C-F, C+F], subphase costs at most D+F, non-final subphase costs above D,
/// X_i equal to one plus the cost-triggered restarts inside phase i.
std::vector<std::string> ledger_violations(const PhaseLedger& ledger, Cost C, Cost D, Cost F);

/// exp(-k ((1+eps) r C - mu)^2 / (2 c^2 ln^2 k)); requires k >= 2 and
/// c ln k > mu (std::domain_error otherwise). Returns 1 when (1+eps) r C <= mu.
double azuma_tail_bound(std::uint64_t k, const BoostParams& params, double c);
double azuma_tail_bound(std::uint64_t k, double C, double mu, double c, double epsilon,
                        double r);

struct ClipConstant {
  double exact = 0;  // (F+D)/ln(1/p) * ln((2k/p)(2+kC)^beta)/ln k
  Cost grain = 0;    // smallest integer at least exact
};

/// Clipping constant of the concentration analysis. Reporting only; the
/// boosted algorithm never uses it.
ClipConstant clip_constant_c(std::uint64_t k, const BoostParams& params, double beta);
ClipConstant clip_constant_c(std::uint64_t k, double F_plus_D, double p, double C, double beta);

// ---- truncation

struct TruncationParams {
  Rational sigma{0};
  Rational tau{0};
};

/// sigma = rB/(r-1), tau = (2/eps)(alpha + r(sigma + B)); r <= 1 is an error.
TruncationParams derive_truncation(const Rational& r, const Rational& B, const Rational& alpha,
                                   const Rational& epsilon);

/// The (sigma,tau)-truncated problem. Costs are multiplied by scale() (the
/// denominator of sigma) to stay integral: c' = c when m(s,x) <= sigma,
/// else c - m + sigma; scaled costs above scale*tau become infinite.
class TruncatedProblem final : public Problem {
 public:
  TruncatedProblem(std::shared_ptr<const Problem> base, TruncationParams tp);

  std::string name() const override { return base_->name() + "'"; }
  std::vector<StateHandle> initial_states() const override { return base_->initial_states(); }
  bool is_initial(const StateHandle& s) const override { return base_->is_initial(s); }
  std::vector<Answer> feasible_answers(const StateHandle& state,
                                       const Request& request) const override {
    return base_->feasible_answers(state, request);
  }
  bool is_feasible(const StateHandle& state, const Request& request,
                   Answer answer) const override {
    return base_->is_feasible(state, request, answer);
  }
  Cost step_cost(const StateHandle& state, const Request& request, Answer answer) const override;
  StateHandle next_state(const StateHandle& state, const Request& request,
                         Answer answer) const override {
    return base_->next_state(state, request, answer);
  }
  std::optional<Cost> bound_F() const override { return tau_floor_; }
  std::optional<Cost> bound_B() const override;
  bool symmetric() const override { return base_->symmetric(); }

  Cost scale() const noexcept { return scale_; }
  const TruncationParams& params() const noexcept { return tp_; }
  const Problem& base() const noexcept { return *base_; }
  /// Scaled cost before the infinity ceiling.
  Cost mapped_cost(const StateHandle& state, const Request& request, Answer answer) const;
  /// True when scaled cost c satisfies c > scale * tau.
  bool above_tau(Cost scaled) const;

 private:
  std::shared_ptr<const Problem> base_;
  TruncationParams tp_;
  Cost scale_;
  Cost sigma_scaled_;
  Cost tau_floor_;
};

std::shared_ptr<TruncatedProblem> truncate_problem(std::shared_ptr<const Problem> base,
                                                   TruncationParams tp);

/// Runs base on the original problem; passes its answer through when
/// m(s,x) <= sigma and the answer's truncated cost is below tau, otherwise
/// answers a cheapest answer in the original problem (lowest token on ties)
/// and restarts base at the resulting state.
class GreedyFallback final : public Algorithm {
 public:
  GreedyFallback(std::unique_ptr<Algorithm> base, std::shared_ptr<const TruncatedProblem> problem);

  std::string name() const override { return "greedy-fallback(" + base_->name() + ")"; }
  void start(const StateHandle& state, RandomTape& tape) override;
  Answer answer(const Request& request) override;
  std::unique_ptr<Algorithm> fresh() const override;
  bool last_answer_reset() const override { return last_reset_; }

 private:
  std::unique_ptr<Algorithm> base_;
  std::shared_ptr<const TruncatedProblem> problem_;
  StateHandle state_;
  RandomTape* tape_ = nullptr;
  bool last_reset_ = false;
};

std::unique_ptr<Algorithm> greedy_fallback_wrap(std::unique_ptr<Algorithm> base,
                                                std::shared_ptr<const TruncatedProblem> problem);

}  // namespace hpboost
