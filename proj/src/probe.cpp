#include "hpboost/probe.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "hpboost/simulate.hpp"

namespace hpboost {

KServerProblem::KServerProblem(Metric metric, std::size_t k) : metric_(std::move(metric)), k_(k) {
  if (k_ == 0) throw std::invalid_argument("k-server: k must be positive");
}

StateHandle KServerProblem::configuration(std::vector<std::int64_t> points) {
  std::sort(points.begin(), points.end());
  return StateHandle(std::move(points));
}

std::vector<StateHandle> KServerProblem::initial_states() const {
  std::vector<StateHandle> out;
  const auto n = static_cast<std::int64_t>(metric_.size());
  std::vector<std::int64_t> cfg(k_, 0);
  for (;;) {
    out.emplace_back(cfg);
    std::size_t i = k_;
    while (i > 0 && cfg[i - 1] == n - 1) --i;
    if (i == 0) break;
    const auto v = cfg[i - 1] + 1;
    for (std::size_t j = i - 1; j < k_; ++j) cfg[j] = v;
  }
  return out;
}

bool KServerProblem::is_initial(const StateHandle& state) const {
  const auto& v = state.values;
  if (v.size() != k_ || !std::is_sorted(v.begin(), v.end())) return false;
  return std::all_of(v.begin(), v.end(), [&](std::int64_t p) {
    return p >= 0 && p < static_cast<std::int64_t>(metric_.size());
  });
}

std::vector<Answer> KServerProblem::feasible_answers(const StateHandle& state,
                                                     const Request& request) const {
  if (request.values.size() != 1) return {};
  const auto q = request.values[0];
  if (q < 0 || q >= static_cast<std::int64_t>(metric_.size())) return {};
  const auto& cfg = state.values;
  if (std::find(cfg.begin(), cfg.end(), q) != cfg.end()) return {Answer{kNoMove}};
  std::vector<Answer> out;
  for (std::size_t j = 0; j < cfg.size(); ++j) {
    if (j == 0 || cfg[j] != cfg[j - 1]) out.push_back(Answer{static_cast<std::int64_t>(j)});
  }
  return out;
}

Cost KServerProblem::step_cost(const StateHandle& state, const Request& request,
                               Answer answer) const {
  if (answer.value == kNoMove) return 0;
  const auto from = state.values.at(static_cast<std::size_t>(answer.value));
  return metric_(static_cast<std::size_t>(from), static_cast<std::size_t>(request.values.at(0)));
}

StateHandle KServerProblem::next_state(const StateHandle& state, const Request& request,
                                       Answer answer) const {
  if (answer.value == kNoMove) return state;
  auto cfg = state.values;
  cfg.at(static_cast<std::size_t>(answer.value)) = request.values.at(0);
  return configuration(std::move(cfg));
}

TableAlgorithm::TableAlgorithm(std::shared_ptr<const Problem> problem,
                               std::map<History, Answer> table)
    : problem_(std::move(problem)),
      table_(std::make_shared<const std::map<History, Answer>>(std::move(table))) {}

void TableAlgorithm::start(const StateHandle& state, RandomTape& /*tape*/) {
  state_ = state;
  history_.clear();
}

Answer TableAlgorithm::answer(const Request& request) {
  history_.push_back(request.values.at(0));
  Answer a{0};
  auto it = table_->find(history_);
  if (it != table_->end()) {
    a = it->second;
  } else {
    Cost best = kInfiniteCost;
    for (Answer cand : problem_->feasible_answers(state_, request)) {
      const Cost c = problem_->step_cost(state_, request, cand);
      if (c < best) {
        best = c;
        a = cand;
      }
    }
  }
  state_ = problem_->next_state(state_, request, a);
  return a;
}

std::unique_ptr<Algorithm> TableAlgorithm::fresh() const {
  auto out = std::make_unique<TableAlgorithm>(problem_, std::map<History, Answer>{});
  out->table_ = table_;
  return out;
}

MixtureAlgorithm::MixtureAlgorithm(std::vector<std::shared_ptr<const Algorithm>> members)
    : members_(std::move(members)) {
  if (members_.empty()) throw std::invalid_argument("mixture needs at least one member");
}

void MixtureAlgorithm::start(const StateHandle& state, RandomTape& tape) {
  chosen_ = tape.uniform(members_.size());
  current_ = members_[chosen_]->fresh();
  current_->start(state, tape);
}

Answer MixtureAlgorithm::answer(const Request& request) { return current_->answer(request); }

std::unique_ptr<Algorithm> MixtureAlgorithm::fresh() const {
  return std::make_unique<MixtureAlgorithm>(members_);
}

namespace {

std::vector<History> all_sequences(const std::vector<std::int64_t>& points, std::size_t len) {
  std::vector<History> out{{}};
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<History> next;
    for (const auto& h : out) {
      for (auto p : points) {
        auto g = h;
        g.push_back(p);
        next.push_back(std::move(g));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<Request> to_requests(const History& h) {
  std::vector<Request> out;
  for (auto p : h) out.push_back(Request::single(p));
  return out;
}

History concat(const History& a, const History& b) {
  History out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

MinimaxResult kserver_minimax(const KServerProblem& problem, const StateHandle& start,
                              const std::vector<std::int64_t>& points, std::size_t ell,
                              const History& prefix) {
  // Lazy prefix: every prefix request must already be covered.
  StateHandle after = start;
  for (auto q : prefix) {
    auto answers = problem.feasible_answers(after, Request::single(q));
    if (answers.size() != 1 || answers[0].value != KServerProblem::kNoMove) {
      throw std::invalid_argument("minimax: prefix requests must be covered");
    }
  }
  std::map<History, Cost> opt;
  for (const auto& x : all_sequences(points, ell)) {
    opt[x] = problem.opt_cost(after, to_requests(x));
  }

  // Candidate ratios from every leaf of the full game tree.
  std::vector<Rational> candidates{Rational(0)};
  std::function<void(const StateHandle&, History&, Cost)> leaves = [&](const StateHandle& s,
                                                                        History& x, Cost acc) {
    if (x.size() == ell) {
      if (opt[x] > 0) candidates.emplace_back(acc, opt[x]);
      return;
    }
    for (auto q : points) {
      Request r = Request::single(q);
      x.push_back(q);
      for (Answer a : problem.feasible_answers(s, r)) {
        leaves(problem.next_state(s, r, a), x, acc + problem.step_cost(s, r, a));
      }
      x.pop_back();
    }
  };
  History scratch;
  leaves(after, scratch, 0);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::map<History, Answer> table;
  std::function<bool(const StateHandle&, History&, Cost, const Rational&)> win =
      [&](const StateHandle& s, History& x, Cost acc, const Rational& c) -> bool {
    if (x.size() == ell) {
      const Cost o = opt[x];
      return o == 0 ? acc == 0 : Rational(acc) <= c * Rational(o);
    }
    for (auto q : points) {
      Request r = Request::single(q);
      x.push_back(q);
      bool ok = false;
      for (Answer a : problem.feasible_answers(s, r)) {
        if (win(problem.next_state(s, r, a), x, acc + problem.step_cost(s, r, a), c)) {
          table[concat(prefix, x)] = a;
          ok = true;
          break;
        }
      }
      x.pop_back();
      if (!ok) return false;
    }
    return true;
  };

  std::size_t lo = 0;
  std::size_t hi = candidates.size();  // first feasible index lies in [lo, hi)
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    History x;
    if (win(after, x, 0, candidates[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  if (lo == candidates.size()) throw std::logic_error("minimax: no feasible ratio");
  MinimaxResult out;
  out.value = candidates[lo];
  table.clear();
  History x;
  win(after, x, 0, out.value);
  out.table = std::move(table);
  return out;
}

ProbeSetup make_probe_setup(const Metric& base_metric, const ProbeConfig& config) {
  if (config.k < 1 || config.ell < 1) throw std::invalid_argument("probe: need k >= 1, ell >= 1");
  if (config.copies < 1) throw std::invalid_argument("probe: need at least one copy");
  const auto scaled = scaled_metric(base_metric, config.base_point, config.copies);
  ProbeSetup setup;
  const double dmin = static_cast<double>(base_metric.matrix().min_positive_entry());
  const auto j = std::llround(config.zeta * dmin);
  setup.copy = static_cast<std::size_t>(
      std::clamp<long long>(j, 1, static_cast<long long>(config.copies)));
  setup.copy_points.push_back(0);
  for (std::size_t u = 0; u < base_metric.size(); ++u) {
    if (u != config.base_point) {
      setup.copy_points.push_back(static_cast<std::int64_t>(scaled.point(setup.copy, u)));
    }
  }
  setup.problem = std::make_shared<KServerProblem>(scaled.metric, config.k);
  setup.start = KServerProblem::configuration(std::vector<std::int64_t>(config.k, 0));
  setup.prefix.assign(config.lambda, 0);
  return setup;
}

ProbeResult probe_adversary(const Algorithm& alg, const ProbeSetup& setup,
                            const ProbeConfig& config) {
  const auto& problem = *setup.problem;
  const auto& points = setup.copy_points;
  const std::size_t ell = config.ell;
  std::vector<History> histories;
  for (std::size_t len = 1; len <= ell; ++len) {
    for (auto& h : all_sequences(points, len)) histories.push_back(std::move(h));
  }
  if (histories.size() * config.samples > kDefaultEnumerationBudget) {
    throw BudgetExceeded("probe: strategy extraction exceeds the enumeration budget");
  }

  // Strategy table per sample: the last answer after prefix + h, for every h.
  std::map<std::vector<std::int64_t>, std::uint64_t> freq;
  SimulateOptions quiet;
  quiet.record_steps = false;
  for (std::uint64_t i = 0; i < config.samples; ++i) {
    const std::uint64_t seed = mix64(config.seed + (i + 1) * kGoldenGamma);
    std::vector<std::int64_t> table;
    table.reserve(histories.size());
    for (const auto& h : histories) {
      auto run = alg.fresh();
      RandomTape tape(seed);
      auto reqs = to_requests(concat(setup.prefix, h));
      auto trace = simulate(problem, *run, setup.start, reqs, tape, quiet);
      table.push_back(trace.answers.back().value);
    }
    freq[table] += 1;
  }
  std::vector<std::pair<std::uint64_t, const std::vector<std::int64_t>*>> ranked;
  for (const auto& [t, c] : freq) ranked.emplace_back(c, &t);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  ProbeResult out;
  out.copy = setup.copy;
  out.distinct_strategies = ranked.size();
  for (const auto& [c, t] : ranked) {
    out.strategy_frequencies.push_back(static_cast<double>(c) /
                                       static_cast<double>(config.samples));
  }
  out.top_frequency = out.strategy_frequencies.empty() ? 0 : out.strategy_frequencies.front();

  std::map<History, Answer> top;
  for (std::size_t i = 0; i < histories.size(); ++i) {
    top[concat(setup.prefix, histories[i])] = Answer{(*ranked.front().second)[i]};
  }

  // Worst sequence against the most frequent strategy.
  bool found = false;
  for (const auto& x : all_sequences(points, ell)) {
    auto full = concat(setup.prefix, x);
    auto reqs = to_requests(full);
    const Cost o = problem.opt_cost(setup.start, reqs);
    if (o == 0) continue;
    StateHandle s = setup.start;
    Cost cost = 0;
    History h;
    for (const auto& r : reqs) {
      h.push_back(r.values[0]);
      auto it = top.find(h);
      Answer a = it != top.end() ? it->second : problem.feasible_answers(s, r).front();
      cost += problem.step_cost(s, r, a);
      s = problem.next_state(s, r, a);
    }
    Rational ratio(cost, o);
    if (!found || ratio > out.strategy_ratio) {
      out.strategy_ratio = ratio;
      out.worst_sequence = x;
      found = true;
    }
  }

  // Measure the algorithm itself on the chosen sequence with fresh seeds.
  auto reqs = to_requests(concat(setup.prefix, out.worst_sequence));
  const Cost o = problem.opt_cost(setup.start, reqs);
  double sum = 0;
  for (std::uint64_t i = 0; i < config.samples; ++i) {
    const std::uint64_t seed = mix64(~config.seed + (i + 1) * kGoldenGamma);
    auto run = alg.fresh();
    RandomTape tape(seed);
    auto trace = simulate(problem, *run, setup.start, reqs, tape, quiet);
    const double ratio = o > 0 ? static_cast<double>(trace.total_cost) / static_cast<double>(o)
                               : 0.0;
    out.ratios.push_back(ratio);
    sum += ratio;
  }
  out.mean_ratio = config.samples > 0 ? sum / static_cast<double>(config.samples) : 0;
  const double n = static_cast<double>(points.size());
  const double e = static_cast<double>(ell + 1);
  out.log10_psi = std::pow(n, e) * e * std::log10(static_cast<double>(config.k));
  return out;
}

}  // namespace hpboost
