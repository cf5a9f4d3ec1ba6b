#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "hpboost/booster.hpp"
#include "hpboost/generators.hpp"
#include "hpboost/mts.hpp"
#include "hpboost/paging.hpp"

using namespace hpboost;

namespace {

// Farthest-in-future fault count, written independently of the library.
std::int64_t ref_belady(std::vector<PageId> cache, const std::vector<PageId>& req) {
  std::int64_t faults = 0;
  for (std::size_t i = 0; i < req.size(); ++i) {
    if (std::find(cache.begin(), cache.end(), req[i]) != cache.end()) continue;
    ++faults;
    std::size_t victim = 0, far = 0;
    for (std::size_t c = 0; c < cache.size(); ++c) {
      std::size_t next = req.size() + 1;
      for (std::size_t j = i + 1; j < req.size(); ++j) {
        if (req[j] == cache[c]) {
          next = j;
          break;
        }
      }
      if (next > far) far = next, victim = c;
    }
    cache[victim] = req[i];
  }
  return faults;
}

BoostParams example_params() {
  BoostConfig c;
  c.epsilon = Rational(1);
  c.r = Rational(2);
  c.F = Rational(1);
  c.B = Rational(2);
  return derive_params(c);
}

struct PagingRun {
  std::shared_ptr<PagingProblem> problem;
  std::vector<PageId> pages;
  std::vector<Request> reqs;
};

PagingRun nasty_run(std::size_t k, std::size_t length, std::uint64_t seed) {
  PagingRun r;
  r.problem = std::make_shared<PagingProblem>(k, paging_universe(k));
  RandomTape t(seed);
  r.pages = paging_stream(PagingStream::kNasty, k, length, t);
  r.reqs = page_requests(r.pages);
  return r;
}

}  // namespace

TEST(DeriveParams, WorkedExample) {
  const auto p = example_params();
  EXPECT_EQ(p.C, 6);
  EXPECT_EQ(p.D, 144);
  EXPECT_EQ(p.p, Rational(1, 8));
  EXPECT_EQ(p.mu, Rational(144, 7));
  EXPECT_NO_THROW(p.check());
}

TEST(DeriveParams, InvariantsRecomputed) {
  RandomTape t(3);
  for (int i = 0; i < 300; ++i) {
    BoostConfig c;
    c.epsilon = Rational(1 + static_cast<std::int64_t>(t.uniform(8)), 1 + static_cast<std::int64_t>(t.uniform(4)));
    c.r = Rational(1) + Rational(static_cast<std::int64_t>(t.uniform(9)), 2);
    c.F = Rational(static_cast<std::int64_t>(t.uniform(5)));
    c.B = Rational(static_cast<std::int64_t>(t.uniform(5)));
    if (c.F + c.B == Rational(0)) c.F = Rational(1);
    const auto p = derive_params(c);
    const Rational C(p.C), D(p.D), sum = C + c.F + c.B;
    // Each constraint restated from the analysis.
    EXPECT_GT(c.epsilon * C, c.F + c.B);
    EXPECT_GT((Rational(1) + c.epsilon) * C, sum);
    EXPECT_GT(D, c.r * sum);
    const Rational p_ref = c.r * sum / D;
    EXPECT_EQ(p.p, p_ref);
    EXPECT_EQ(p.mu, c.r * sum / (Rational(1) - p_ref));
    EXPECT_LT(p.mu, (Rational(1) + c.epsilon) * c.r * C);
  }
}

TEST(DeriveParams, RejectsBadConfig) {
  BoostConfig c;
  c.epsilon = Rational(0);
  c.r = Rational(2);
  c.F = Rational(1);
  EXPECT_THROW(derive_params(c), ParameterError);
  c.epsilon = Rational(1);
  c.r = Rational(1, 2);
  EXPECT_THROW(derive_params(c), ParameterError);
}

TEST(DeriveParams, TableListsConstraints) {
  const auto table = params_table(example_params());
  EXPECT_NE(table.find("C=6"), std::string::npos);
  EXPECT_NE(table.find("D=144"), std::string::npos);
}

TEST(BoostedRun, PhaseStartsMatchOfflinePrefixOpt) {
  const auto params = example_params();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto r = nasty_run(2, 120, seed);
    MarkingAlgorithm alg(2);
    RandomTape tape(seed + 100);
    const auto run = boosted_run(*r.problem, alg, PagingProblem::cache_state(paging_initial_cache(2)),
                                 r.reqs, tape, params);
    std::vector<Cost> pre;
    for (std::size_t j = 1; j <= r.pages.size(); ++j) {
      pre.push_back(ref_belady(paging_initial_cache(2),
                               std::vector<PageId>(r.pages.begin(), r.pages.begin() + j)));
    }
    ASSERT_EQ(run.ledger.prefix_opt, pre);
    // n_i is the first index where the prefix reaches (i-1)C.
    for (std::size_t i = 0; i < run.ledger.phases.size(); ++i) {
      const auto& ph = run.ledger.phases[i];
      if (ph.length == 0) continue;
      const Cost target = static_cast<Cost>(i) * params.C;
      std::size_t want = 1;
      while (want <= pre.size() && pre[want - 1] < target) ++want;
      EXPECT_EQ(ph.start, want) << "phase " << i;
    }
    EXPECT_TRUE(ledger_violations(run.ledger, params.C, params.D, 1).empty());
    EXPECT_FALSE(replay_divergence(*r.problem, alg, r.reqs, run).has_value());
  }
}

TEST(BoostedRun, HugeThresholdsMatchPlainSimulation) {
  auto r = nasty_run(3, 200, 9);
  const auto start = PagingProblem::cache_state(paging_initial_cache(3));
  MarkingAlgorithm a(3), b(3);
  RandomTape t1(5), t2(5);
  const auto plain = simulate(*r.problem, a, start, r.reqs, t1);
  const auto run = boosted_run(*r.problem, b, start, r.reqs, t2, Cost{1} << 40, Cost{1} << 40);
  EXPECT_EQ(run.trace.answers, plain.answers);
  EXPECT_EQ(run.trace.total_cost, plain.total_cost);
  EXPECT_EQ(run.ledger.resets.size(), 1u);
}

TEST(BoostedRun, CostResetsSplitSubphases) {
  // Small D forces cost-triggered restarts; every non-final subphase then exceeds D.
  auto r = nasty_run(2, 300, 4);
  MarkingAlgorithm alg(2);
  RandomTape tape(8);
  const Cost C = 6, D = 3;
  const auto run = boosted_run(*r.problem, alg, PagingProblem::cache_state(paging_initial_cache(2)),
                               r.reqs, tape, C, D);
  std::size_t cost_resets = 0;
  for (const auto& e : run.ledger.resets) cost_resets += e.cost_exceeded && !e.phase_start;
  EXPECT_GT(cost_resets, 0u);
  std::size_t x_total = 0;
  for (const auto& ph : run.ledger.phases) {
    x_total += ph.subphases;
    Cost sum = 0;
    for (auto c : ph.subphase_costs) sum += c;
    EXPECT_EQ(sum, ph.cost);
  }
  EXPECT_TRUE(ledger_violations(run.ledger, C, D, 1).empty());
  EXPECT_FALSE(replay_divergence(*r.problem, alg, r.reqs, run).has_value());
  Cost total = 0;
  for (const auto& ph : run.ledger.phases) total += ph.cost;
  EXPECT_EQ(total, run.trace.total_cost);
  EXPECT_GE(x_total, run.ledger.phases.size());
}

TEST(BoostedRun, CoincidingResetIsOne) {
  std::size_t both = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto problem = std::make_shared<PagingProblem>(2, paging_universe(2));
    RandomTape gen(seed);
    const auto reqs = page_requests(paging_stream(PagingStream::kUniform, 2, 100, gen));
    MarkingAlgorithm alg(2);
    RandomTape tape(seed);
    // Tiny thresholds make restarts dense enough that some coincide.
    const auto run = boosted_run(*problem, alg, PagingProblem::cache_state(paging_initial_cache(2)),
                                 reqs, tape, 1, 1);
    std::set<std::size_t> steps;
    for (const auto& e : run.ledger.resets) {
      EXPECT_TRUE(steps.insert(e.step).second) << "two restarts before request " << e.step;
      both += e.phase_start && e.cost_exceeded;
    }
  }
  EXPECT_GT(both, 0u);
}

TEST(BoostedRun, LedgerJsonHasPhases) {
  auto r = nasty_run(2, 50, 1);
  MarkingAlgorithm alg(2);
  RandomTape tape(1);
  const auto run = boosted_run(*r.problem, alg, PagingProblem::cache_state(paging_initial_cache(2)),
                               r.reqs, tape, example_params());
  const auto j = run.ledger.to_json();
  EXPECT_NE(j.find("\"phases\""), std::string::npos);
}

TEST(Azuma, TrivialAndDomain) {
  // (1+eps) r C <= mu gives the trivial bound.
  EXPECT_EQ(azuma_tail_bound(10, 1.0, 100.0, 50.0, 1.0, 2.0), 1.0);
  EXPECT_THROW(azuma_tail_bound(1, 6.0, 1.0, 50.0, 1.0, 2.0), std::domain_error);
  EXPECT_THROW(azuma_tail_bound(10, 6.0, 10.0, 1.0, 1.0, 2.0), std::domain_error);
  const double k = 100, C = 6, mu = 144.0 / 7, c = 1000, eps = 1, r = 2;
  const double want = std::exp(-k * std::pow((1 + eps) * r * C - mu, 2) /
                               (2 * c * c * std::pow(std::log(k), 2)));
  EXPECT_NEAR(azuma_tail_bound(100, C, mu, c, eps, r), want, 1e-15);
}

TEST(ClipConstant, ClosedFormAndLimit) {
  const double C = 6;
  const auto cc = clip_constant_c(4, 10.0, 0.5, C, 2.0);
  const double want = 10 * std::log(16 * std::pow(2 + 4 * C, 2)) / (std::log(2.0) * std::log(4.0));
  EXPECT_NEAR(cc.exact, want, 1e-9);
  EXPECT_EQ(cc.grain, static_cast<Cost>(std::ceil(want)));
  const double limit = 10 * 3 / std::log(2.0);
  double prev = 1e300;
  for (std::uint64_t k : {10ULL, 100ULL, 1000ULL, 10000ULL, 100000ULL, 1000000ULL}) {
    const double v = clip_constant_c(k, 10.0, 0.5, C, 2.0).exact;
    EXPECT_GT(v, limit);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_THROW(clip_constant_c(4, 10.0, 0.5, C, 1.0), ParameterError);
}

TEST(Truncation, DerivedValues) {
  const auto tp = derive_truncation(Rational(2), Rational(3), Rational(1), Rational(1));
  EXPECT_EQ(tp.sigma, Rational(6));
  EXPECT_EQ(tp.tau, Rational(2) * (Rational(1) + Rational(2) * Rational(9)));
  EXPECT_THROW(derive_truncation(Rational(1), Rational(3), Rational(0), Rational(1)), ParameterError);
}

TEST(Truncation, CostMapping) {
  auto ts = std::make_shared<MtsProblem>(TaskSystem(DistanceMatrix(2, {0, 1, 1, 0}), true));
  // sigma = 2, tau = 12 with r=2, B=1, alpha=0, eps=1.
  auto tr = truncate_problem(ts, derive_truncation(Rational(2), Rational(1), Rational(0), Rational(1)));
  ASSERT_EQ(tr->scale(), 1);
  const auto s0 = MtsProblem::state(0);
  // m = 11 > sigma: c' = c - m + sigma.
  const auto x = task_request({11, 14});
  EXPECT_EQ(tr->step_cost(s0, x, Answer{0}), 2);
  EXPECT_EQ(tr->step_cost(s0, x, Answer{1}), 6);
  // m <= sigma: unchanged.
  const auto y = task_request({0, 2});
  EXPECT_EQ(tr->step_cost(s0, y, Answer{1}), 3);
  // Above tau becomes infinite.
  const auto z = task_request({20, 0});
  EXPECT_EQ(tr->step_cost(s0, z, Answer{0}), kInfiniteCost);
}

TEST(Truncation, OptimalSequencesCanDiffer) {
  // A documented instance where truncation changes the set of optimal answers.
  auto ts = std::make_shared<MtsProblem>(TaskSystem(DistanceMatrix(2, {0, 1, 1, 0}), true));
  auto tr = truncate_problem(ts, derive_truncation(Rational(2), Rational(1), Rational(0), Rational(1)));
  const std::vector<Request> reqs{task_request({11, 10}), task_request({16, 15})};
  const auto s0 = MtsProblem::state(0);
  const auto a = brute_force_optimal_sequences(*ts, s0, reqs);
  const auto b = brute_force_optimal_sequences(*tr, s0, reqs);
  EXPECT_EQ(a.size(), 1u);
  EXPECT_EQ(b.size(), 3u);
}

TEST(Truncation, FallbackStaysFeasible) {
  auto ts = std::make_shared<MtsProblem>(TaskSystem(DistanceMatrix(3, {0, 1, 2, 1, 0, 1, 2, 1, 0}), true));
  auto tr = truncate_problem(ts, derive_truncation(Rational(2), Rational(2), Rational(0), Rational(1)));
  RandomTape gen(2);
  const auto tasks = random_tasks(3, 40, 60, 0, gen);
  std::vector<Request> reqs;
  for (const auto& t : tasks) reqs.push_back(task_request(t));
  auto alg = greedy_fallback_wrap(std::make_unique<UniformRandomAlgorithm>(ts), tr);
  RandomTape tape(4);
  const auto run = simulate(*ts, *alg, MtsProblem::state(0), reqs, tape);
  EXPECT_EQ(run.length, reqs.size());
  EXPECT_LT(run.total_cost, kInfiniteCost);
}
