#include "hpboost/booster.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace hpboost {

void BoostConfig::validate() const {
  if (epsilon <= Rational(0)) throw ParameterError("epsilon must be positive");
  if (r < Rational(1)) throw ParameterError("r must be at least 1");
  if (F < Rational(0)) throw ParameterError("F must be nonnegative");
  if (B < Rational(0)) throw ParameterError("B must be nonnegative");
  if (alpha < Rational(0)) throw ParameterError("alpha must be nonnegative");
  if (safety_factor < Rational(1)) throw ParameterError("safety_factor must be at least 1");
}

namespace {

std::vector<ConstraintWitness> evaluate_constraints(const BoostConfig& cfg, Cost C, Cost D,
                                                    const Rational& p, const Rational& mu) {
  const Rational one(1);
  const Rational c(C);
  const Rational sum = c + cfg.F + cfg.B;
  std::vector<ConstraintWitness> out;
  out.push_back({"C > (F+B)/epsilon", c, (cfg.F + cfg.B) / cfg.epsilon});
  out.push_back({"D > r(C+F+B)", Rational(D), cfg.r * sum});
  const Rational denom = cfg.r * ((one + cfg.epsilon) * c - sum);
  if (denom > Rational(0)) {
    out.push_back({"D > (1+eps)r^2 C(C+B+F)/(r((1+eps)C-(C+B+F)))", Rational(D),
                   (one + cfg.epsilon) * cfg.r * cfg.r * c * sum / denom});
  } else {
    out.push_back({"(1+eps)C > C+B+F", (one + cfg.epsilon) * c, sum});
  }
  out.push_back({"1 > p", one, p});
  out.push_back({"(1+eps) r C > mu", (one + cfg.epsilon) * cfg.r * c, mu});
  return out;
}

}  // namespace

void BoostParams::check() const {
  for (const auto& w : evaluate_constraints(config, C, D, p, mu)) {
    if (!w.holds()) {
      throw ConsistencyError("constraint violated: " + w.name + " (" + w.lhs.to_string() +
                             " vs " + w.rhs.to_string() + ")");
    }
  }
  const Rational sum = Rational(C) + config.F + config.B;
  if (p != config.r * sum / Rational(D) || mu != config.r * sum / (Rational(1) - p)) {
    throw ConsistencyError("p or mu inconsistent with C and D");
  }
}

BoostParams derive_params(const BoostConfig& config) {
  config.validate();
  const Rational one(1);
  BoostParams out;
  out.config = config;
  out.C = (config.safety_factor * (config.F + config.B) / config.epsilon).ceil();
  const Rational c(out.C);
  const Rational sum = c + config.F + config.B;
  const Rational first = config.r * sum;
  const Rational denom = config.r * ((one + config.epsilon) * c - sum);
  if (denom <= Rational(0)) {
    throw ConsistencyError("(1+eps)C must exceed C+B+F; C=" + std::to_string(out.C) +
                           " is too small");
  }
  const Rational second = (one + config.epsilon) * config.r * config.r * c * sum / denom;
  out.D = (config.safety_factor * max(first, second)).ceil();
  if (out.D <= 0) throw ConsistencyError("D must be positive");
  out.p = first / Rational(out.D);
  if (out.p >= one) throw ConsistencyError("p = " + out.p.to_string() + " is not below 1");
  out.mu = first / (one - out.p);
  out.constraints = evaluate_constraints(config, out.C, out.D, out.p, out.mu);
  out.check();
  return out;
}

std::string params_table(const BoostParams& params) {
  std::ostringstream os;
  const auto& c = params.config;
  os << "epsilon=" << c.epsilon << "\nr=" << c.r << "\nF=" << c.F << "\nB=" << c.B
     << "\nalpha=" << c.alpha << "\nsafety_factor=" << c.safety_factor << "\nC=" << params.C
     << "\nD=" << params.D << "\np=" << params.p << " (" << params.p.to_double() << ")"
     << "\nmu=" << params.mu << " (" << params.mu.to_double() << ")\n";
  for (const auto& w : params.constraints) {
    os << "constraint[" << w.name << "]=" << (w.holds() ? "ok" : "VIOLATED")
       << " margin=" << w.margin() << " (" << w.margin().to_double() << ")\n";
  }
  return os.str();
}

std::string PhaseLedger::to_json() const {
  using nlohmann::json;
  json j;
  j["phases"] = json::array();
  for (const auto& ph : phases) {
    json p;
    p["n"] = ph.start;
    p["length"] = ph.length;
    p["opt_before"] = ph.opt_before;
    p["opt_at_end"] = ph.opt_at_end;
    p["X"] = ph.subphases;
    p["W"] = ph.cost;
    p["subphase_costs"] = ph.subphase_costs;
    json rs = json::array();
    for (auto idx : ph.reset_indices) {
      const auto& ev = resets[idx];
      json reasons = json::array();
      if (ev.phase_start) reasons.push_back("phase-start");
      if (ev.cost_exceeded) reasons.push_back("cost-exceeded-D");
      rs.push_back({{"step", ev.step + 1}, {"reasons", reasons}});
    }
    p["resets"] = rs;
    j["phases"].push_back(p);
  }
  return j.dump();
}

BoostedRun boosted_run(const Problem& problem, const Algorithm& base, const StateHandle& start,
                       std::span<const Request> requests, RandomTape& tape,
                       const BoostParams& params) {
  return boosted_run(problem, base, start, requests, tape, params.C, params.D);
}

BoostedRun boosted_run(const Problem& problem, const Algorithm& base, const StateHandle& start,
                       std::span<const Request> requests, RandomTape& tape, Cost C, Cost D) {
  if (!problem.symmetric()) {
    throw ProblemError("boosting refused: problem " + problem.name() + " is not symmetric");
  }
  if (C <= 0 || D <= 0) throw ParameterError("boosting needs C > 0 and D > 0");
  BoostedRun out;
  RunTrace& trace = out.trace;
  PhaseLedger& ledger = out.ledger;
  trace.seed = tape.seed();
  const auto first_bit = tape.position();

  auto alg = base.fresh();
  auto prefix = problem.prefix_opt(start);
  StateHandle state = start;
  Cost opt_prev = 0;
  Cost since_reset = 0;
  bool cost_reset_pending = false;

  for (std::size_t j = 0; j < requests.size(); ++j) {
    const Request& x = requests[j];
    const Cost opt = prefix->push(x);
    if (is_infinite(opt)) {
      throw ProblemError("prefix optimum infinite at step " + std::to_string(j + 1));
    }
    ledger.prefix_opt.push_back(opt);

    bool phase_start = false;
    while (opt >= static_cast<Cost>(ledger.phases.size()) * C) {
      if (!ledger.phases.empty()) ledger.phases.back().opt_at_end = opt_prev;
      PhaseRecord ph;
      ph.start = j + 1;
      ph.opt_before = opt_prev;
      ledger.phases.push_back(ph);
      phase_start = true;
    }
    PhaseRecord& phase = ledger.phases.back();

    const bool reset = phase_start || cost_reset_pending;
    if (reset) {
      // start() may read bits; the replay needs the position before it.
      ResetEvent ev{j, phase_start, cost_reset_pending, state, tape.position()};
      alg->start(state, tape);
      phase.reset_indices.push_back(ledger.resets.size());
      ledger.resets.push_back(ev);
      phase.subphases += 1;
      phase.subphase_costs.push_back(0);
      since_reset = 0;
      cost_reset_pending = false;
    }

    const Answer y = alg->answer(x);
    if (!problem.is_feasible(state, x, y)) {
      throw InfeasibleAnswer(j, "step " + std::to_string(j) + ": base answer " + y.to_string() +
                                    " infeasible for request " + x.to_string());
    }
    const Cost c = problem.step_cost(state, x, y);
    state = problem.next_state(state, x, y);
    trace.total_cost = add_costs(trace.total_cost, c);
    trace.answers.push_back(y);
    trace.steps.push_back(TraceStep{x, y, c, state, reset});
    since_reset = add_costs(since_reset, c);
    phase.cost = add_costs(phase.cost, c);
    phase.subphase_costs.back() = add_costs(phase.subphase_costs.back(), c);
    phase.length += 1;
    if (since_reset > D) cost_reset_pending = true;
    opt_prev = opt;
  }
  if (!ledger.phases.empty()) ledger.phases.back().opt_at_end = opt_prev;
  trace.length = requests.size();
  trace.tape_bits = tape.position() - first_bit;
  trace.final_state = std::move(state);
  return out;
}

std::optional<std::size_t> replay_divergence(const Problem& /*problem*/, const Algorithm& base,
                                             std::span<const Request> requests,
                                             const BoostedRun& run) {
  const auto& resets = run.ledger.resets;
  for (std::size_t e = 0; e < resets.size(); ++e) {
    const auto& ev = resets[e];
    const std::size_t end = e + 1 < resets.size() ? resets[e + 1].step : requests.size();
    auto alg = base.fresh();
    RandomTape tape(run.trace.seed, ev.tape_position);
    alg->start(ev.state, tape);
    for (std::size_t j = ev.step; j < end; ++j) {
      if (alg->answer(requests[j]) != run.trace.answers[j]) return e;
    }
  }
  return std::nullopt;
}

std::vector<std::string> ledger_violations(const PhaseLedger& ledger, Cost C, Cost D, Cost F) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ledger.phases.size(); ++i) {
    const auto& ph = ledger.phases[i];
    const std::string tag = "phase " + std::to_string(i + 1) + ": ";
    const bool last_phase = i + 1 == ledger.phases.size();
    if (!last_phase) {
      const Cost inc = ph.opt_increment();
      if (inc < C - F || inc > C + F) {
        out.push_back(tag + "OPT increment " + std::to_string(inc) + " outside [C-F, C+F]");
      }
    }
    std::size_t cost_resets = 0;
    for (auto idx : ph.reset_indices) {
      const auto& ev = ledger.resets[idx];
      if (!ev.phase_start && ev.cost_exceeded) ++cost_resets;
    }
    if (ph.length > 0 && ph.subphases != 1 + cost_resets) {
      out.push_back(tag + "X_i != 1 + cost-triggered resets");
    }
    Cost sum = 0;
    for (std::size_t s = 0; s < ph.subphase_costs.size(); ++s) {
      const Cost c = ph.subphase_costs[s];
      sum = add_costs(sum, c);
      if (c > add_costs(D, F)) {
        out.push_back(tag + "subphase " + std::to_string(s + 1) + " cost " + cost_to_string(c) +
                      " > D+F");
      }
      if (s + 1 < ph.subphase_costs.size() && c <= D) {
        out.push_back(tag + "non-final subphase " + std::to_string(s + 1) + " cost " +
                      cost_to_string(c) + " <= D");
      }
    }
    if (sum != ph.cost) out.push_back(tag + "subphase costs do not add up to W_i");
  }
  return out;
}

double azuma_tail_bound(std::uint64_t k, const BoostParams& params, double c) {
  return azuma_tail_bound(k, static_cast<double>(params.C), params.mu.to_double(), c,
                          params.config.epsilon.to_double(), params.config.r.to_double());
}

double azuma_tail_bound(std::uint64_t k, double C, double mu, double c, double epsilon,
                        double r) {
  if (k < 2) throw std::domain_error("azuma bound needs k >= 2");
  const double lk = std::log(static_cast<double>(k));
  if (c * lk <= mu) throw std::domain_error("azuma bound needs c log k > mu");
  const double t = (1.0 + epsilon) * r * C - mu;
  if (t <= 0) return 1.0;
  return std::exp(-static_cast<double>(k) * t * t / (2.0 * c * c * lk * lk));
}

ClipConstant clip_constant_c(std::uint64_t k, const BoostParams& params, double beta) {
  return clip_constant_c(k, params.config.F.to_double() + static_cast<double>(params.D),
                         params.p.to_double(), static_cast<double>(params.C), beta);
}

ClipConstant clip_constant_c(std::uint64_t k, double F_plus_D, double p, double C, double beta) {
  if (k < 2) throw ParameterError("clip constant needs k >= 2");
  if (!(beta > 1.0)) throw ParameterError("clip constant needs beta > 1");
  if (!(p > 0.0) || p >= 1.0) throw ParameterError("clip constant needs 0 < p < 1");
  const double kd = static_cast<double>(k);
  const double g = (std::log(2.0 * kd / p) + beta * std::log(2.0 + kd * C)) / std::log(kd);
  ClipConstant out;
  out.exact = F_plus_D / std::log(1.0 / p) * g;
  out.grain = static_cast<Cost>(std::ceil(out.exact));
  return out;
}

// ---- truncation

TruncationParams derive_truncation(const Rational& r, const Rational& B, const Rational& alpha,
                                   const Rational& epsilon) {
  if (r <= Rational(1)) throw ParameterError("truncation needs r > 1");
  if (epsilon <= Rational(0)) throw ParameterError("truncation needs epsilon > 0");
  if (B < Rational(0) || alpha < Rational(0)) throw ParameterError("B and alpha must be >= 0");
  TruncationParams tp;
  tp.sigma = r * B / (r - Rational(1));
  tp.tau = Rational(2) / epsilon * (alpha + r * (tp.sigma + B));
  return tp;
}

TruncatedProblem::TruncatedProblem(std::shared_ptr<const Problem> base, TruncationParams tp)
    : base_(std::move(base)), tp_(tp) {
  if (tp_.sigma < Rational(0) || tp_.tau < tp_.sigma) {
    throw ParameterError("truncation needs 0 <= sigma <= tau");
  }
  scale_ = tp_.sigma.den();
  sigma_scaled_ = tp_.sigma.num();
  tau_floor_ = (tp_.tau * Rational(scale_)).floor();
}

bool TruncatedProblem::above_tau(Cost scaled) const {
  return is_infinite(scaled) || Rational(scaled) > tp_.tau * Rational(scale_);
}

Cost TruncatedProblem::mapped_cost(const StateHandle& state, const Request& request,
                                   Answer answer) const {
  const Cost c = base_->step_cost(state, request, answer);
  if (is_infinite(c)) return kInfiniteCost;
  const Cost m = base_->min_step_cost(state, request);
  if (m * scale_ <= sigma_scaled_) return c * scale_;
  return (c - m) * scale_ + sigma_scaled_;
}

Cost TruncatedProblem::step_cost(const StateHandle& state, const Request& request,
                                 Answer answer) const {
  const Cost c = mapped_cost(state, request, answer);
  return above_tau(c) ? kInfiniteCost : c;
}

std::optional<Cost> TruncatedProblem::bound_B() const {
  auto b = base_->bound_B();
  if (!b) return std::nullopt;
  return *b * scale_;
}

std::shared_ptr<TruncatedProblem> truncate_problem(std::shared_ptr<const Problem> base,
                                                   TruncationParams tp) {
  return std::make_shared<TruncatedProblem>(std::move(base), tp);
}

GreedyFallback::GreedyFallback(std::unique_ptr<Algorithm> base,
                               std::shared_ptr<const TruncatedProblem> problem)
    : base_(std::move(base)), problem_(std::move(problem)) {}

void GreedyFallback::start(const StateHandle& state, RandomTape& tape) {
  state_ = state;
  tape_ = &tape;
  last_reset_ = false;
  base_->start(state, tape);
}

Answer GreedyFallback::answer(const Request& request) {
  const Problem& p = problem_->base();
  Answer y = base_->answer(request);
  const Cost m = p.min_step_cost(state_, request);
  bool pass = Rational(m) <= problem_->params().sigma && p.is_feasible(state_, request, y);
  if (pass) {
    const Cost c = problem_->mapped_cost(state_, request, y);
    pass = !is_infinite(c) && Rational(c) < problem_->params().tau * Rational(problem_->scale());
  }
  if (!pass) {
    Cost best = kInfiniteCost;
    for (Answer a : p.feasible_answers(state_, request)) {
      const Cost c = p.step_cost(state_, request, a);
      if (c < best) {
        best = c;
        y = a;
      }
    }
  }
  state_ = p.next_state(state_, request, y);
  last_reset_ = !pass;
  if (!pass) base_->start(state_, *tape_);
  return y;
}

std::unique_ptr<Algorithm> GreedyFallback::fresh() const {
  return std::make_unique<GreedyFallback>(base_->fresh(), problem_);
}

std::unique_ptr<Algorithm> greedy_fallback_wrap(std::unique_ptr<Algorithm> base,
                                                std::shared_ptr<const TruncatedProblem> problem) {
  return std::make_unique<GreedyFallback>(std::move(base), problem);
}

}  // namespace hpboost
