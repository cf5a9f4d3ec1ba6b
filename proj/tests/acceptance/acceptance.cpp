// Acceptance suite: one line per criterion, exit status 0 only when every
// selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hpboost/booster.hpp"
#include "hpboost/config.hpp"
#include "hpboost/counterexamples.hpp"
#include "hpboost/generators.hpp"
#include "hpboost/jss.hpp"
#include "hpboost/mcstats.hpp"
#include "hpboost/mts.hpp"
#include "hpboost/oracle.hpp"
#include "hpboost/paging.hpp"

using namespace hpboost;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(double x) {
  std::ostringstream ss;
  ss.precision(6);
  ss << x;
  return ss.str();
}

std::string check_summary(const SuiteResult& r) {
  std::string s = r.suite + " " + std::to_string(r.instances) + " instances";
  for (const auto& c : r.checks) s += ", " + c.name + " mismatches=" + std::to_string(c.mismatches);
  return s;
}

// Farthest-in-future fault count, independent of the library.
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

BoostParams paging_params(std::size_t k, const Rational& eps) {
  BoostConfig c;
  c.epsilon = eps;
  c.r = marking_ratio(k);
  c.F = Rational(1);
  c.B = Rational(static_cast<std::int64_t>(k));
  return derive_params(c);
}

// ---- 1
Outcome criterion1() {
  const auto t0 = Clock::now();
  OracleCheckConfig cfg;
  cfg.seed = 20240601;
  cfg.paging_instances = 2000;
  cfg.max_k = 3;
  cfg.max_universe = 5;
  cfg.max_length = 10;
  cfg.mts_instances = 100;
  cfg.max_states = 4;
  cfg.max_mts_length = 8;
  const auto a = run_oracle_suite("belady", cfg);
  const auto b = run_oracle_suite("workfunction", cfg);
  const double secs = seconds_since(t0);
  const bool pass = a.passed() && b.passed() && secs < 60;
  return {pass, check_summary(a) + "; " + check_summary(b) + "; " + fmt(secs) + " s (limit 60)"};
}

// ---- 2
Outcome criterion2() {
  OracleCheckConfig cfg;
  cfg.seed = 7;
  cfg.kserver_instances = 100;
  const auto r = run_oracle_suite("kserver", cfg);
  return {r.passed(), check_summary(r)};
}

// ---- 3
std::vector<std::string> independent_ledger_check(const BoostedRun& run, Cost C, Cost D, Cost F) {
  std::vector<std::string> bad;
  const auto& L = run.ledger;
  // Subphase costs recomputed from the trace between consecutive restarts.
  std::vector<std::size_t> cuts;
  for (const auto& e : L.resets) cuts.push_back(e.step);
  cuts.push_back(run.trace.steps.size());
  std::vector<Cost> segs;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Cost c = 0;
    for (std::size_t j = cuts[i]; j < cuts[i + 1]; ++j) c += run.trace.steps[j].cost;
    segs.push_back(c);
  }
  std::vector<Cost> flat;
  for (const auto& ph : L.phases) flat.insert(flat.end(), ph.subphase_costs.begin(), ph.subphase_costs.end());
  if (flat != segs) bad.push_back("subphase costs disagree with the trace");
  for (std::size_t i = 0; i < L.phases.size(); ++i) {
    const auto& ph = L.phases[i];
    const bool last_phase = i + 1 == L.phases.size();
    if (!last_phase && ph.length > 0) {
      const Cost inc = ph.opt_at_end - ph.opt_before;
      if (inc < C - F || inc > C + F) bad.push_back("phase " + std::to_string(i) + " OPT increment " + std::to_string(inc));
    }
    for (std::size_t s = 0; s < ph.subphase_costs.size(); ++s) {
      const Cost c = ph.subphase_costs[s];
      if (c > D + F) bad.push_back("subphase cost " + std::to_string(c) + " > D+F");
      const bool last_sub = s + 1 == ph.subphase_costs.size();
      if (!last_sub && c <= D) bad.push_back("non-final subphase cost " + std::to_string(c) + " <= D");
    }
  }
  return bad;
}

Outcome criterion3() {
  std::size_t runs = 0, violations = 0, subphases = 0, phases = 0, prefix_checked = 0;
  std::string first;
  RandomTape meta(33);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const std::size_t k = 2 + meta.uniform(2);
    auto problem = std::make_shared<PagingProblem>(k, paging_universe(k));
    const auto kind = meta.uniform(2) ? PagingStream::kNasty : PagingStream::kUniform;
    RandomTape gen(trial_seed(1, i));
    const auto pages = paging_stream(kind, k, 50 + meta.uniform(250), gen);
    const auto reqs = page_requests(pages);
    MarkingAlgorithm alg(k);
    RandomTape tape(trial_seed(2, i));
    Cost C, D;
    BoostedRun run;
    const auto start = PagingProblem::cache_state(paging_initial_cache(k));
    if (i % 2 == 0) {
      const auto p = paging_params(k, Rational(1));
      C = p.C, D = p.D;
      run = boosted_run(*problem, alg, start, reqs, tape, p);
    } else {
      // Small thresholds so that cost-triggered restarts actually happen.
      C = 2 + static_cast<Cost>(meta.uniform(5));
      D = 1 + static_cast<Cost>(meta.uniform(8));
      run = boosted_run(*problem, alg, start, reqs, tape, C, D);
    }
    ++runs;
    phases += run.ledger.phases.size();
    for (const auto& ph : run.ledger.phases) subphases += ph.subphases;
    auto bad = independent_ledger_check(run, C, D, 1);
    const auto lib = ledger_violations(run.ledger, C, D, 1);
    bad.insert(bad.end(), lib.begin(), lib.end());
    if (i < 60) {
      // Prefix OPT from an independent Belady on a subsample.
      std::vector<Cost> pre;
      for (std::size_t j = 1; j <= pages.size(); ++j) {
        pre.push_back(ref_belady(paging_initial_cache(k), std::vector<PageId>(pages.begin(), pages.begin() + j)));
      }
      if (pre != run.ledger.prefix_opt) bad.push_back("prefix OPT differs from reference Belady");
      ++prefix_checked;
    }
    if (!bad.empty() && first.empty()) first = "run " + std::to_string(i) + ": " + bad.front();
    violations += bad.size();
  }
  return {violations == 0, std::to_string(runs) + " runs, " + std::to_string(phases) + " phases, " +
                               std::to_string(subphases) + " subphases, violations=" +
                               std::to_string(violations) + (first.empty() ? "" : " (" + first + ")")};
}

// ---- 4
Outcome criterion4() {
  const auto ex = paging_params(2, Rational(1));
  bool ok = ex.C == 6 && ex.D == 144 && ex.p == Rational(1, 8) && ex.mu == Rational(144, 7);
  std::string detail = "example C=" + std::to_string(ex.C) + " D=" + std::to_string(ex.D) +
                       " p=" + ex.p.to_string() + " mu=" + ex.mu.to_string();
  std::size_t bad = 0, n = 0;
  RandomTape t(44);
  for (int i = 0; i < 1000; ++i) {
    BoostConfig c;
    c.epsilon = Rational(1 + static_cast<std::int64_t>(t.uniform(16)), 1 + static_cast<std::int64_t>(t.uniform(8)));
    c.r = Rational(1) + Rational(static_cast<std::int64_t>(t.uniform(16)), 1 + static_cast<std::int64_t>(t.uniform(4)));
    c.F = Rational(static_cast<std::int64_t>(t.uniform(6)));
    c.B = Rational(static_cast<std::int64_t>(t.uniform(6)));
    if (c.F + c.B == Rational(0)) c.B = Rational(1);
    c.alpha = Rational(static_cast<std::int64_t>(t.uniform(4)));
    c.safety_factor = Rational(1) + Rational(static_cast<std::int64_t>(1 + t.uniform(8)), 4);
    const auto p = derive_params(c);
    ++n;
    // Invariants restated from the analysis, in exact arithmetic.
    const Rational C(p.C), D(p.D), s = C + c.F + c.B, one(1);
    const Rational lower_d = (one + c.epsilon) * c.r * c.r * C * s / (c.r * ((one + c.epsilon) * C - s));
    const bool good = c.epsilon * C > c.F + c.B && (one + c.epsilon) * C > s && D > c.r * s &&
                      D > lower_d && p.p == c.r * s / D && p.p < one &&
                      p.mu == c.r * s / (one - p.p) && (one + c.epsilon) * c.r * C > p.mu;
    bool checked = true;
    try {
      p.check();
    } catch (const ConsistencyError&) {
      checked = false;
    }
    if (!good || !checked) ++bad;
  }
  ok = ok && bad == 0;
  return {ok, detail + "; random configs " + std::to_string(n) + ", invariant failures=" + std::to_string(bad)};
}

// ---- 5, 6, 7 share the paging experiment
ExperimentSpec nasty_spec(bool boost, std::uint64_t trials, std::uint64_t seed, std::size_t min_len,
                          std::size_t max_len) {
  ExperimentSpec s;
  s.problem_id = "paging-k2";
  s.algorithm_id = "marking";
  s.generator_id = "nasty";
  s.problem = std::make_shared<PagingProblem>(2, paging_universe(2));
  s.algorithm = std::make_shared<MarkingAlgorithm>(2);
  s.start = PagingProblem::cache_state(paging_initial_cache(2));
  s.generator = [min_len, max_len](RandomTape& t) {
    const std::size_t len = min_len + t.uniform(max_len - min_len + 1);
    return page_requests(paging_stream(PagingStream::kNasty, 2, len, t));
  };
  s.boost = boost;
  s.params = paging_params(2, Rational(1));
  s.trials = trials;
  s.master_seed = seed;
  s.betas = {1.0};
  s.epsilon = 1.0;
  return s;
}

const std::vector<TrialRecord>& lemma_runs(double* secs) {
  static std::vector<TrialRecord> recs;
  static double took = 0;
  if (recs.empty()) {
    const auto t0 = Clock::now();
    recs = run_trials(nasty_spec(true, 600, 5, 300, 300), threads());
    took = seconds_since(t0);
  }
  if (secs) *secs = took;
  return recs;
}

Outcome criterion5() {
  double secs = 0;
  const auto& recs = lemma_runs(&secs);
  const auto params = paging_params(2, Rational(1));
  const auto rep = lemma1_estimator(recs, params.p, 4, 10000);
  bool ok = secs < 300 && !any_errors(recs);
  std::string d;
  for (const auto& row : rep.pooled) {
    if (row.delta < 2) continue;
    ok = ok && row.verdict == Verdict::kPass;
    d += "delta=" + std::to_string(row.delta) + " freq=" + fmt(row.frequency) + " ci=[" + fmt(row.ci.lo) +
         "," + fmt(row.ci.hi) + "] bound=" + fmt(row.bound) + " " + to_string(row.verdict) + "; ";
  }
  const auto n = rep.pooled.empty() ? 0 : rep.pooled.front().n;
  ok = ok && n >= 10000;
  return {ok, std::to_string(n) + " phase observations; " + d + fmt(secs) + " s (limit 300)"};
}

Outcome criterion6() {
  const auto& recs = lemma_runs(nullptr);
  const auto params = paging_params(2, Rational(1));
  const auto rep = lemma2_estimator(recs, params.mu, 10000);
  // Independent pooled mean straight from the observations.
  double sum = 0;
  std::size_t n = 0;
  for (const auto& r : recs) {
    for (const auto& o : r.phase_obs) {
      if (o.final) continue;
      sum += static_cast<double>(o.cost);
      ++n;
    }
  }
  const double mu = params.mu.to_double();
  const bool ok = rep.verdict == Verdict::kPass && rep.pooled.ci.lo <= mu && n >= 10000;
  return {ok, std::to_string(rep.pooled.n) + " observations, mean=" + fmt(rep.pooled.mean) +
                  " (recomputed " + fmt(n ? sum / n : 0) + ") ci=[" + fmt(rep.pooled.ci.lo) + "," +
                  fmt(rep.pooled.ci.hi) + "] mu=" + fmt(mu)};
}

Outcome criterion7() {
  const std::uint64_t trials = 10000;
  // Nasty k=2 streams pay one OPT fault per two requests, so lengths 100..1000 give OPT 50..500.
  const auto raw_spec = nasty_spec(false, trials, 77, 100, 1000);
  const auto b_spec = nasty_spec(true, trials, 77, 100, 1000);
  const auto raw = run_trials(raw_spec, threads());
  const auto boosted = run_trials(b_spec, threads());
  Cost lo = kInfiniteCost, hi = 0;
  for (const auto& r : boosted) lo = std::min(lo, r.opt), hi = std::max(hi, r.opt);
  // (1 + eps) times the marking ratio for k = 2, eps = 1.
  const double r = 2.0 * marking_ratio(2).to_double();
  const double alpha_prime = 0.0;
  const auto rep = compare_raw_vs_boosted(raw_spec, raw, b_spec, boosted, {r}, {alpha_prime}, 1.0,
                                          {50, 501});
  const auto& row = rep.rows.front();
  const bool clause1 = row.boosted_within;
  const bool clause2 = row.boosted_frequency < row.raw_frequency;
  const bool in_range = lo >= 50 && hi <= 500;
  std::string d = "OPT range [" + std::to_string(lo) + "," + std::to_string(hi) + "], threshold " + fmt(r) +
                  "*OPT+" + fmt(alpha_prime) + ": boosted freq=" + fmt(row.boosted_frequency) + " ci=[" +
                  fmt(row.boosted_ci.lo) + "," + fmt(row.boosted_ci.hi) + "] target=" + fmt(row.target) +
                  " (" + (clause1 ? "within" : "exceeded") + "); raw freq=" + fmt(row.raw_frequency) +
                  "; strictly below raw: " + (clause2 ? "yes" : "no");
  return {clause1 && clause2 && in_range, d};
}

// ---- 8
Outcome criterion8() {
  std::vector<std::string> fails;
  // bitguess: every tape prefix for each input, n <= 12.
  for (std::size_t n = 1; n <= 12; ++n) {
    auto p = std::make_shared<BitGuessProblem>(n);
    UniformRandomAlgorithm alg(p);
    RandomTape pick(n);
    const std::size_t inputs = n <= 6 ? (1u << n) : 4;
    for (std::size_t k = 0; k < inputs; ++k) {
      const std::uint64_t mask = n <= 6 ? k : pick.uniform(1ULL << n);
      std::vector<Request> reqs{Request::single(1)};
      for (std::size_t i = 0; i < n; ++i) reqs.push_back(Request::single((mask >> i) & 1));
      const auto dist = tape_enumeration_distribution(*p, alg, p->initial_states().front(), reqs,
                                                      static_cast<unsigned>(n + 1));
      const Rational success = Rational(1) - dist.probability_equal(p->big_d());
      const Rational want = Rational(1) - Rational(1, static_cast<std::int64_t>(1ULL << n));
      if (success != want) fails.push_back("bitguess n=" + std::to_string(n));
    }
  }
  // lastguess.
  for (std::int64_t b : {2, 3, 4, 7, 16}) {
    for (std::size_t n = 2; n <= 8; ++n) {
      LastGuessProblem p(n, b);
      for (std::int64_t x = 1; x <= b; ++x) {
        std::vector<Request> reqs(n - 1, Request::single(0));
        reqs.push_back(Request::single(x));
        const auto dist = uniform_answer_distribution(p, p.initial_states().front(), reqs);
        const Cost nn = static_cast<Cost>(n);
        const Rational want = Rational(nn) * (Rational(1) + Rational(b - 1, b));
        if (dist.expectation() != want || dist.probability_equal(b * nn) != Rational(1, b)) {
          fails.push_back("lastguess n=" + std::to_string(n) + " b=" + std::to_string(b));
        }
      }
    }
  }
  {
    // The concrete tape-driven guesser with b = 16 uses exactly four bits.
    auto p = std::make_shared<LastGuessProblem>(4, 16);
    UniformRandomAlgorithm alg(p);
    std::vector<Request> reqs(3, Request::single(0));
    reqs.push_back(Request::single(11));
    const auto dist = tape_enumeration_distribution(*p, alg, p->initial_states().front(), reqs, 4);
    if (dist.expectation() != Rational(4) * (Rational(1) + Rational(15, 16)) ||
        dist.probability_equal(64) != Rational(1, 16)) {
      fails.push_back("lastguess tape enumeration");
    }
  }
  // doubling: E = 2 OPT - 1 or 2 OPT - 3 on every input, so the ratio is exactly 2.
  DoublingProblem dp;
  std::size_t inputs = 0;
  Rational n2_tail(0);
  for (std::size_t n = 1; n <= 10; ++n) {
    // Tail bound: start (0,0), first request 0. Needs two free guesses, so n >= 3.
    Rational family_tail(1);
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
      std::vector<std::int64_t> x;
      std::vector<Request> reqs;
      for (std::size_t i = 0; i < n; ++i) x.push_back((mask >> i) & 1), reqs.push_back(Request::single(x.back()));
      for (std::int64_t s : {0, 1}) {
        ++inputs;
        const auto start = DoublingProblem::state(s, 0);
        Rational e(0);
        Rational tail(0);
        const Cost thr = n >= 2 ? 9 * (Cost{1} << (n - 2)) : 0;
        for (std::uint64_t y = 0; y < (1ULL << n); ++y) {
          Cost c = 0;
          std::int64_t st = s;
          for (std::size_t i = 0; i < n; ++i) {
            c += (st == x[i] ? 1 : 3) * (Cost{1} << i);
            st = (y >> i) & 1;
          }
          const Rational w(1, static_cast<std::int64_t>(1ULL << n));
          e += Rational(c) * w;
          if (c >= thr) tail += w;
        }
        const Cost opt = dp.opt_cost(start, reqs);
        const Cost ref_opt = (s == x[0] ? 1 : 3) + ((Cost{1} << n) - 2);
        const auto lib = uniform_answer_distribution(dp, start, reqs);
        const Rational gap = e - Rational(2 * opt);
        if (opt != ref_opt || lib.expectation() != e || !(gap == Rational(-1) || gap == Rational(-3))) {
          fails.push_back("doubling n=" + std::to_string(n));
        }
        if (lib.probability_at_least(thr) != tail) fails.push_back("doubling tail n=" + std::to_string(n));
        if (s == 0 && x[0] == 0) family_tail = std::min(family_tail, tail);
      }
    }
    if (n == 2) n2_tail = family_tail;
    if (n >= 3 && family_tail < Rational(1, 4)) fails.push_back("doubling tail n=" + std::to_string(n));
  }
  // Growth of E - r OPT for r < 2 shows no smaller ratio works.
  const Rational e10 = doubling_uniform_expectation(10), e5 = doubling_uniform_expectation(5);
  const Rational r = Rational(199, 100);
  if (!(e10 - r * Rational(doubling_opt(10)) > e5 - r * Rational(doubling_opt(5)))) {
    fails.push_back("doubling ratio below 2 not refuted");
  }
  // test problem.
  TestProblem tp;
  const std::vector<std::int64_t> alphabet{0, 1};
  const auto classes = count_state_classes(tp, tp.initial_states().front(), alphabet, 6, 3);
  if (classes != 6) fails.push_back("test problem has " + std::to_string(classes) + " state classes");
  std::string d = "bitguess n<=12, lastguess b in {2,3,4,7,16}, doubling " + std::to_string(inputs) +
                  " (input, start) pairs (tail at n=2 is " + n2_tail.to_string() +
                  ", checked for n>=3), test problem classes=" + std::to_string(classes);
  if (!fails.empty()) d += "; first failure: " + fails.front() + " (" + std::to_string(fails.size()) + " total)";
  return {fails.empty(), d};
}

// ---- 9
Outcome criterion9() {
  OracleCheckConfig cfg;
  cfg.seed = 9;
  cfg.truncation_instances = 200;
  cfg.max_truncation_states = 3;
  cfg.max_truncation_length = 5;
  const auto r = run_oracle_suite("truncation", cfg);
  std::string d = check_summary(r);
  for (const auto& c : r.checks) {
    if (c.mismatches > 0) d += "; smallest " + c.name + " failure: " + c.failure.dump();
  }
  return {r.passed(), d};
}

// ---- 10
Outcome criterion10() {
  const auto t0 = Clock::now();
  std::vector<std::string> fails;
  for (std::size_t n : {2u, 3u}) {
    for (std::size_t r = 1; r <= 10; ++r) {
      std::uint64_t want = n;
      for (std::size_t i = 1; i < n; ++i) want *= r;
      // Brute-force count of points with exactly one zero in {0..r}^n.
      std::uint64_t brute = 0;
      std::vector<std::size_t> c(n, 0);
      while (true) {
        std::size_t zeros = 0;
        for (auto v : c) zeros += v == 0;
        brute += zeros == 1;
        std::size_t i = 0;
        while (i < n && ++c[i] > r) c[i++] = 0;
        if (i == n) break;
      }
      if (diagonal_count(n, r) != want || brute != want || enumerate_diagonals(n, r + 1, r).size() != want) {
        fails.push_back("count n=" + std::to_string(n) + " r=" + std::to_string(r));
      }
    }
  }
  std::size_t runs = 0, oracle_runs = 0, instances = 0;
  RandomTape tape(1010);
  for (std::size_t n : {2u, 3u}) {
    for (std::size_t m : {4u, 6u, 8u, 12u, 20u, 30u}) {
      const std::size_t r = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(m))));
      for (int rep = 0; rep < 50; ++rep) {
        const auto inst = JssInstance::random(n, m, tape);
        ++instances;
        const double f = 0.5;
        const auto census = delay_census(inst, r, f);
        // Bound recomputed here: m C(n,2) (n-1) r^(n-2).
        double bound = static_cast<double>(m) * (n * (n - 1) / 2.0) * (n - 1.0) * std::pow(r, n - 2.0);
        std::size_t total = 0, bad = 0;
        const double thr = m * f - static_cast<double>(r);
        for (const auto& d : enumerate_diagonals(n, m, r)) {
          const auto s = diagonal_strategy_run(inst, DiagonalTemplate{r, d});
          ++runs;
          if (!s.valid(inst) || s.makespan != m + r + s.delays) fails.push_back("makespan identity");
          if (m <= 8) {
            ++oracle_runs;
            if (s.makespan != shortest_template_path(inst, DiagonalTemplate{r, d})) fails.push_back("template path");
          }
          total += s.delays;
          bad += static_cast<double>(s.delays) > thr;
        }
        if (total != census.total || static_cast<double>(total) > bound) fails.push_back("total delays");
        if (thr > 0 && static_cast<double>(bad) > static_cast<double>(total) / thr) fails.push_back("bad diagonals");
        if (bad != census.bad) fails.push_back("census bad count");
      }
    }
  }
  const double secs = seconds_since(t0);
  if (secs >= 120) fails.push_back("runtime");
  std::string d = std::to_string(instances) + " instances, " + std::to_string(runs) + " strategy runs, " +
                  std::to_string(oracle_runs) + " checked against the exhaustive path, " + fmt(secs) +
                  " s (limit 120)";
  if (!fails.empty()) d += "; first failure: " + fails.front() + " (" + std::to_string(fails.size()) + " total)";
  return {fails.empty(), d};
}

// ---- 11
Outcome criterion11() {
  std::size_t runs = 0, resets = 0, diverged = 0;
  RandomTape meta(111);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    RandomTape gen(trial_seed(11, i));
    RandomTape tape(trial_seed(12, i));
    BoostedRun run;
    std::optional<std::size_t> bad;
    if (i % 2 == 0) {
      const std::size_t k = 2 + meta.uniform(2);
      PagingProblem p(k, paging_universe(k));
      const auto reqs = page_requests(paging_stream(PagingStream::kUniform, k, 40 + meta.uniform(200), gen));
      MarkingAlgorithm alg(k);
      run = boosted_run(p, alg, PagingProblem::cache_state(paging_initial_cache(k)), reqs, tape,
                        2 + static_cast<Cost>(meta.uniform(4)), 1 + static_cast<Cost>(meta.uniform(6)));
      bad = replay_divergence(p, alg, reqs, run);
    } else {
      const std::size_t n = 2 + meta.uniform(3);
      TaskSystem ts(random_metric_matrix(n, 4, gen), true);
      MtsProblem p(ts);
      std::vector<Request> reqs;
      for (const auto& t : random_tasks(n, 30 + meta.uniform(60), 6, 0, gen)) reqs.push_back(task_request(t));
      RandomGreedyMtsAlgorithm alg(ts);
      run = boosted_run(p, alg, MtsProblem::state(meta.uniform(n)), reqs, tape,
                        3 + static_cast<Cost>(meta.uniform(4)), 2 + static_cast<Cost>(meta.uniform(6)));
      bad = replay_divergence(p, alg, reqs, run);
    }
    ++runs;
    resets += run.ledger.resets.size();
    diverged += bad.has_value();
  }
  return {diverged == 0, std::to_string(runs) + " runs, " + std::to_string(resets) +
                             " restarts replayed, divergent runs=" + std::to_string(diverged)};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (selected.empty()) {
    for (int n = 1; n <= 11; ++n) selected.push_back(n);
  }
  const std::vector<std::function<Outcome()>> table{criterion1, criterion2, criterion3, criterion4,
                                                    criterion5, criterion6, criterion7, criterion8,
                                                    criterion9, criterion10, criterion11};
  bool all = true;
  for (int n : selected) {
    if (n < 1 || n > 11) {
      std::cerr << "unknown criterion " << n << "\n";
      return 2;
    }
    Outcome o;
    try {
      o = table[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " | " << o.detail << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
