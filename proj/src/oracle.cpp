#include "hpboost/oracle.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "hpboost/booster.hpp"
#include "hpboost/generators.hpp"
#include "hpboost/simulate.hpp"

namespace hpboost {

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.mismatches == 0; });
}

nlohmann::json SuiteResult::to_json() const {
  nlohmann::json j{{"suite", suite}, {"instances", instances}, {"passed", passed()}};
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    j["checks"].push_back(
        {{"name", c.name}, {"mismatches", c.mismatches}, {"minimal_failure", c.failure}});
  }
  return j;
}

const std::vector<std::string>& oracle_suite_names() {
  static const std::vector<std::string> names{"belady", "workfunction", "kserver", "truncation"};
  return names;
}

namespace {

void record(CheckResult& check, std::size_t size, nlohmann::json instance) {
  ++check.mismatches;
  if (check.failure.is_null() || size < check.failure_size) {
    check.failure_size = size;
    check.failure = std::move(instance);
  }
}

nlohmann::json cost_json(Cost c) {
  return is_infinite(c) ? nlohmann::json("inf") : nlohmann::json(c);
}

nlohmann::json tasks_json(const std::vector<TaskVector>& tasks) {
  auto arr = nlohmann::json::array();
  for (const auto& t : tasks) {
    auto row = nlohmann::json::array();
    for (Cost c : t) row.push_back(cost_json(c));
    arr.push_back(row);
  }
  return arr;
}

nlohmann::json matrix_json(const DistanceMatrix& d) {
  auto arr = nlohmann::json::array();
  for (std::size_t a = 0; a < d.size(); ++a) {
    auto row = nlohmann::json::array();
    for (std::size_t b = 0; b < d.size(); ++b) row.push_back(d(a, b));
    arr.push_back(row);
  }
  return arr;
}

// Instance i cycles through every (k, universe, length) combination.
struct PagingCase {
  std::size_t k, universe, length;
};

std::vector<PagingCase> paging_cases(const OracleCheckConfig& cfg) {
  std::vector<PagingCase> out;
  for (std::size_t k = 1; k <= cfg.max_k; ++k) {
    for (std::size_t u = k + 1; u <= cfg.max_universe; ++u) {
      for (std::size_t len = 1; len <= cfg.max_length; ++len) out.push_back({k, u, len});
    }
  }
  if (out.empty()) throw std::invalid_argument("oracle-check: empty paging parameter range");
  return out;
}

std::vector<PageId> random_pages(std::size_t universe, std::size_t length, RandomTape& tape) {
  std::vector<PageId> out;
  for (std::size_t i = 0; i < length; ++i) out.push_back(static_cast<PageId>(tape.uniform(universe)) + 1);
  return out;
}

std::vector<PageId> first_pages(std::size_t k) {
  std::vector<PageId> out;
  for (std::size_t i = 1; i <= k; ++i) out.push_back(static_cast<PageId>(i));
  return out;
}

std::vector<PageId> iota_pages(std::size_t u) { return first_pages(u); }

SuiteResult belady_suite(const OracleCheckConfig& cfg, const OracleHooks& hooks) {
  SuiteResult res{"belady", 0, {{"belady_vs_brute_force", 0, 0, nullptr}}};
  const auto cases = paging_cases(cfg);
  RandomTape tape(cfg.seed);
  for (std::size_t i = 0; i < cfg.paging_instances; ++i) {
    const auto& c = cases[i % cases.size()];
    const auto cache = first_pages(c.k);
    const auto pages = random_pages(c.universe, c.length, tape);
    PagingProblem problem(c.k, iota_pages(c.universe));
    const auto reqs = page_requests(pages);
    const Cost want = brute_force_opt(problem, PagingProblem::cache_state(cache), reqs);
    const Cost got = hooks.belady(cache, pages);
    ++res.instances;
    if (want != got) {
      record(res.checks[0], c.length * 16 + c.universe,
             {{"k", c.k}, {"cache", cache}, {"universe", iota_pages(c.universe)},
              {"requests", pages}, {"brute_force", want}, {"belady", got}});
    }
  }
  return res;
}

struct MtsCase {
  TaskSystem ts;
  std::size_t start;
  std::vector<TaskVector> tasks;
};

MtsCase random_mts_case(std::size_t states, std::size_t length, Cost max_distance, Cost max_task,
                        unsigned inf_per_mille, RandomTape& tape) {
  MtsCase c;
  c.ts = TaskSystem(random_metric_matrix(states, max_distance, tape), true);
  c.start = tape.uniform(states);
  c.tasks = random_tasks(states, length, max_task, inf_per_mille, tape);
  return c;
}

std::vector<Request> task_requests(const std::vector<TaskVector>& tasks) {
  std::vector<Request> out;
  for (const auto& t : tasks) out.push_back(task_request(t));
  return out;
}

SuiteResult workfunction_suite(const OracleCheckConfig& cfg, const OracleHooks& hooks) {
  SuiteResult res{"workfunction", 0, {{"workfunction_vs_brute_force", 0, 0, nullptr}}};
  if (cfg.max_states < 2) throw std::invalid_argument("oracle-check: max_states must be >= 2");
  RandomTape tape(mix64(cfg.seed ^ 0x57));
  for (std::size_t i = 0; i < cfg.mts_instances; ++i) {
    const std::size_t n = 2 + tape.uniform(cfg.max_states - 1);
    const std::size_t len = 1 + tape.uniform(cfg.max_mts_length);
    auto c = random_mts_case(n, len, cfg.max_distance, cfg.max_task, 100, tape);
    MtsProblem problem(c.ts);
    const auto reqs = task_requests(c.tasks);
    const Cost want = brute_force_opt(problem, MtsProblem::state(c.start), reqs);
    const Cost got = hooks.workfunction(c.ts, c.start, c.tasks);
    ++res.instances;
    if (want != got) {
      record(res.checks[0], len * 16 + n,
             {{"distances", matrix_json(c.ts.d)}, {"start", c.start},
              {"tasks", tasks_json(c.tasks)}, {"brute_force", cost_json(want)},
              {"workfunction", cost_json(got)}});
    }
  }
  return res;
}

SuiteResult kserver_suite(const OracleCheckConfig& cfg, const OracleHooks& hooks) {
  SuiteResult res{"kserver", 0, {{"kserver_reduction_vs_belady", 0, 0, nullptr}}};
  const auto cases = paging_cases(cfg);
  RandomTape tape(mix64(cfg.seed ^ 0x6B));
  for (std::size_t i = 0; i < cfg.kserver_instances; ++i) {
    const auto& c = cases[tape.uniform(cases.size())];
    // Points 0..u-1 stand for pages 1..u.
    const Metric metric(DistanceMatrix::uniform(c.universe));
    const auto red = kserver_to_mts(metric, c.k);
    std::vector<std::size_t> init;
    for (std::size_t j = 0; j < c.k; ++j) init.push_back(j);
    const auto pages = random_pages(c.universe, c.length, tape);
    std::vector<TaskVector> tasks;
    for (auto p : pages) tasks.push_back(red.translate(static_cast<std::size_t>(p - 1)));
    const Cost got = hooks.workfunction(red.ts, red.configuration_index(init), tasks);
    const Cost want = hooks.belady(first_pages(c.k), pages);
    ++res.instances;
    if (want != got) {
      record(res.checks[0], c.length * 16 + c.universe,
             {{"k", c.k}, {"points", c.universe}, {"initial", init}, {"requests", pages},
              {"belady", want}, {"reduction", cost_json(got)}});
    }
  }
  return res;
}

SuiteResult truncation_suite(const OracleCheckConfig& cfg) {
  SuiteResult res{"truncation",
                  0,
                  {{"optimal_sequences_coincide", 0, 0, nullptr},
                   {"per_step_ratio", 0, 0, nullptr}}};
  if (cfg.max_truncation_states < 2) {
    throw std::invalid_argument("oracle-check: max_truncation_states must be >= 2");
  }
  RandomTape tape(mix64(cfg.seed ^ 0x74));
  const Rational r(2), alpha(0), eps(1);
  for (std::size_t i = 0; i < cfg.truncation_instances; ++i) {
    const std::size_t n = 2 + tape.uniform(cfg.max_truncation_states - 1);
    const std::size_t len = 1 + tape.uniform(cfg.max_truncation_length);
    const Cost maxd = 1 + static_cast<Cost>(tape.uniform(4));
    // Tasks reach well past sigma = 2B and tau = 12B so both cut-offs matter.
    auto c = random_mts_case(n, len, maxd, 16 * maxd, 50, tape);
    auto base = mts_problem(c.ts);
    const Cost B = *base->bound_B();
    auto tp = derive_truncation(r, Rational(B), alpha, eps);
    auto trunc = truncate_problem(base, tp);
    const auto reqs = task_requests(c.tasks);
    const auto start = MtsProblem::state(c.start);
    ++res.instances;
    nlohmann::json inst{{"distances", matrix_json(c.ts.d)},
                        {"start", c.start},
                        {"tasks", tasks_json(c.tasks)},
                        {"sigma", tp.sigma.to_string()},
                        {"tau", tp.tau.to_string()}};
    const std::size_t size = len * 16 + n;

    auto to_set = [](const std::vector<std::vector<Answer>>& seqs) {
      std::set<std::vector<std::int64_t>> out;
      for (const auto& s : seqs) {
        std::vector<std::int64_t> v;
        for (auto a : s) v.push_back(a.value);
        out.insert(v);
      }
      return out;
    };
    const auto opt_p = to_set(brute_force_optimal_sequences(*base, start, reqs));
    const auto opt_q = to_set(brute_force_optimal_sequences(*trunc, start, reqs));
    if (opt_p != opt_q) {
      auto j = inst;
      j["optimal_in_P"] = opt_p;
      j["optimal_in_P_truncated"] = opt_q;
      record(res.checks[0], size, j);
    }

    // Every answer sequence, every step: equal ratios when m <= sigma,
    // c/m <= c'/m' otherwise (cross-multiplied, costs of P' are scaled).
    const Cost scale = trunc->scale();
    bool bad = false;
    nlohmann::json witness;
    std::function<void(const StateHandle&, std::size_t)> walk = [&](const StateHandle& s,
                                                                    std::size_t step) {
      if (bad || step == reqs.size()) return;
      const auto& x = reqs[step];
      const Cost m = base->min_step_cost(s, x);
      const Cost mq = trunc->min_step_cost(s, x);
      for (Answer a : base->feasible_answers(s, x)) {
        const Cost cp = base->step_cost(s, x, a);
        const Cost cq = trunc->step_cost(s, x, a);
        bool ok = true;
        if (is_infinite(cp)) {
          ok = is_infinite(cq);
        } else if (!is_infinite(cq) && !is_infinite(mq) && !is_infinite(m)) {
          if (Rational(m) <= tp.sigma) {
            ok = cq == cp * scale && mq == m * scale;
          } else {
            ok = static_cast<__int128>(cp) * mq <= static_cast<__int128>(cq) * m;
          }
        }
        if (!ok) {
          bad = true;
          witness = {{"step", step}, {"state", s.to_string()}, {"answer", a.value},
                     {"cost_P", cost_json(cp)}, {"m_P", cost_json(m)},
                     {"cost_P_truncated", cost_json(cq)}, {"m_P_truncated", cost_json(mq)}};
          return;
        }
        walk(base->next_state(s, x, a), step + 1);
      }
    };
    walk(start, 0);
    if (bad) {
      auto j = inst;
      j["violation"] = witness;
      record(res.checks[1], size, j);
    }
  }
  return res;
}

}  // namespace

SuiteResult run_oracle_suite(const std::string& name, const OracleCheckConfig& config,
                             const OracleHooks& hooks) {
  if (name == "belady") return belady_suite(config, hooks);
  if (name == "workfunction") return workfunction_suite(config, hooks);
  if (name == "kserver") return kserver_suite(config, hooks);
  if (name == "truncation") return truncation_suite(config);
  throw std::invalid_argument("unknown oracle suite '" + name + "'");
}

}  // namespace hpboost
