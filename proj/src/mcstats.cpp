#include "hpboost/mcstats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "hpboost/simulate.hpp"

namespace hpboost {

namespace {
constexpr std::uint64_t kInputSalt = 0x6A09E667F3BCC909ULL;

double to_double(const Rational& q) {
  return static_cast<double>(q.num()) / static_cast<double>(q.den());
}
}  // namespace

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master + (index + 1) * kGoldenGamma);
}

std::uint64_t input_seed(std::uint64_t seed) { return mix64(seed ^ kInputSalt); }

void ExperimentSpec::validate() const {
  if (trials < 1) throw ParameterError("trials: must be at least 1");
  if (!problem) throw ParameterError("problem: missing");
  if (!algorithm) throw ParameterError("algorithm: missing");
  if (!generator) throw ParameterError("generator: missing");
  if (!problem->is_initial(start)) throw ParameterError("start: not an initial state");
  if (betas.empty()) throw ParameterError("betas: empty grid");
  for (double b : betas) {
    // Def 6 quantifies over beta >= 1.
    if (!(b >= 1.0)) throw ParameterError("betas: values must be at least 1");
  }
  if (boost) {
    if (!problem->symmetric()) throw ParameterError("boost: problem is not symmetric");
    if (params.C <= 0 || params.D <= 0) throw ParameterError("boost: parameters not derived");
  }
}

TrialRecord run_trial(const ExperimentSpec& spec, std::uint64_t index) {
  TrialRecord rec;
  rec.index = index;
  rec.seed = trial_seed(spec.master_seed, index);
  try {
    RandomTape in_tape(input_seed(rec.seed));
    const auto requests = spec.generator(in_tape);
    rec.length = requests.size();
    RandomTape tape(rec.seed);
    if (spec.boost) {
      auto run = boosted_run(*spec.problem, *spec.algorithm, spec.start, requests, tape,
                             spec.params);
      rec.cost = run.trace.total_cost;
      rec.opt = run.ledger.prefix_opt.empty() ? 0 : run.ledger.prefix_opt.back();
      rec.phases = run.ledger.phases.size();
      rec.resets = run.ledger.resets.size();
      for (std::size_t i = 0; i < run.ledger.phases.size(); ++i) {
        const auto& ph = run.ledger.phases[i];
        PhaseObservation obs;
        obs.subphases = ph.subphases;
        obs.cost = ph.cost;
        obs.final = i + 1 == run.ledger.phases.size();
        if (!ph.reset_indices.empty()) {
          obs.reset_state = run.ledger.resets[ph.reset_indices.front()].state.to_string();
        }
        if (ph.length > 0 || obs.final) rec.phase_obs.push_back(std::move(obs));
      }
    } else {
      auto alg = spec.algorithm->fresh();
      SimulateOptions quiet;
      quiet.record_steps = false;
      auto trace = simulate(*spec.problem, *alg, spec.start, requests, tape, quiet);
      rec.cost = trace.total_cost;
      rec.opt = spec.problem->opt_cost(spec.start, requests);
    }
    if (rec.opt > 0) {
      rec.ratio = static_cast<double>(rec.cost) / static_cast<double>(rec.opt);
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
    if (rec.error.empty()) rec.error = "error";
  }
  return rec;
}

std::vector<TrialRecord> run_trials(const ExperimentSpec& spec, unsigned threads) {
  spec.validate();
  std::vector<TrialRecord> out(spec.trials);
  threads = std::max(1u, threads);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= spec.trials) return;
      out[i] = run_trial(spec, i);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

bool any_errors(const std::vector<TrialRecord>& records) {
  return std::any_of(records.begin(), records.end(),
                     [](const TrialRecord& r) { return !r.error.empty(); });
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) return {0, 1};
  const double nn = static_cast<double>(n);
  const double ph = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1 + z2 / nn;
  const double center = (ph + z2 / (2 * nn)) / denom;
  const double half = z / denom * std::sqrt(ph * (1 - ph) / nn + z2 / (4 * nn * nn));
  Interval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  // Guard the containment invariant against rounding.
  ci.lo = std::min(ci.lo, ph);
  ci.hi = std::max(ci.hi, ph);
  return ci;
}

TailEstimate empirical_tail(const std::vector<TrialRecord>& records,
                            const std::vector<double>& r_grid,
                            const std::vector<double>& alpha_grid,
                            const std::vector<double>& betas) {
  if (records.empty()) throw ParameterError("empirical_tail: no records");
  TailEstimate out;
  out.betas = betas;
  std::vector<double> targets(betas.size(), 0.0);
  std::uint64_t n = 0;
  for (const auto& rec : records) {
    if (!rec.error.empty()) continue;
    ++n;
    for (std::size_t b = 0; b < betas.size(); ++b) {
      targets[b] += std::pow(2.0 + static_cast<double>(rec.opt), -betas[b]);
    }
  }
  for (auto& t : targets) t = n ? t / static_cast<double>(n) : 0;
  for (double r : r_grid) {
    for (double a : alpha_grid) {
      TailRow row;
      row.r = r;
      row.alpha = a;
      row.n = n;
      for (const auto& rec : records) {
        if (!rec.error.empty()) continue;
        if (static_cast<double>(rec.cost) >= r * static_cast<double>(rec.opt) + a) ++row.exceed;
      }
      row.frequency = n ? static_cast<double>(row.exceed) / static_cast<double>(n) : 0;
      row.ci = wilson_interval(row.exceed, n);
      row.targets = targets;
      for (double t : targets) row.within.push_back(row.ci.lo <= t);
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kUnderpowered: return "underpowered";
  }
  return "?";
}

std::vector<PhaseObservation> phase_observations(const std::vector<TrialRecord>& records) {
  std::vector<PhaseObservation> out;
  for (const auto& rec : records) {
    if (!rec.error.empty()) continue;
    for (const auto& obs : rec.phase_obs) {
      if (!obs.final) out.push_back(obs);
    }
  }
  return out;
}

namespace {

std::vector<Lemma1Row> lemma1_rows(const std::vector<const PhaseObservation*>& obs, double p,
                                   std::size_t max_delta, std::uint64_t min_obs) {
  std::vector<Lemma1Row> rows;
  for (std::size_t delta = 1; delta <= max_delta; ++delta) {
    Lemma1Row row;
    row.delta = delta;
    row.n = obs.size();
    for (const auto* o : obs) {
      if (o->subphases >= delta) ++row.hits;
    }
    row.frequency = row.n ? static_cast<double>(row.hits) / static_cast<double>(row.n) : 0;
    row.ci = wilson_interval(row.hits, row.n);
    row.bound = std::pow(p, static_cast<double>(delta - 1));
    if (row.n < min_obs) row.verdict = Verdict::kUnderpowered;
    else row.verdict = row.ci.lo <= row.bound ? Verdict::kPass : Verdict::kFail;
    rows.push_back(row);
  }
  return rows;
}

Verdict combine(const std::vector<Verdict>& vs) {
  if (vs.empty()) return Verdict::kUnderpowered;
  if (std::any_of(vs.begin(), vs.end(), [](Verdict v) { return v == Verdict::kFail; }))
    return Verdict::kFail;
  if (std::any_of(vs.begin(), vs.end(), [](Verdict v) { return v == Verdict::kUnderpowered; }))
    return Verdict::kUnderpowered;
  return Verdict::kPass;
}

std::map<std::string, std::vector<const PhaseObservation*>> by_state(
    const std::vector<PhaseObservation>& obs) {
  std::map<std::string, std::vector<const PhaseObservation*>> out;
  for (const auto& o : obs) out[o.reset_state].push_back(&o);
  return out;
}

}  // namespace

Lemma1Report lemma1_estimator(const std::vector<TrialRecord>& records, const Rational& p,
                              std::size_t max_delta, std::uint64_t min_observations) {
  const auto obs = phase_observations(records);
  std::vector<const PhaseObservation*> all;
  for (const auto& o : obs) all.push_back(&o);
  Lemma1Report out;
  const double pd = to_double(p);
  out.pooled = lemma1_rows(all, pd, max_delta, min_observations);
  std::vector<Verdict> vs;
  for (const auto& r : out.pooled) vs.push_back(r.verdict);
  out.verdict = combine(vs);
  const auto bins = by_state(obs);
  out.pooled_only = bins.size() > kMaxStateBins;
  if (!out.pooled_only) {
    for (const auto& [state, list] : bins) {
      out.per_state.push_back({state, lemma1_rows(list, pd, max_delta, min_observations)});
      // A powered per-state failure fails the whole report.
      for (const auto& r : out.per_state.back().rows) {
        if (r.verdict == Verdict::kFail) out.verdict = Verdict::kFail;
      }
    }
  }
  return out;
}

MeanEstimate mean_estimate(const std::vector<double>& xs, double z) {
  MeanEstimate m;
  m.n = xs.size();
  if (xs.empty()) return m;
  double sum = 0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(m.n);
  double ss = 0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  const double var = m.n > 1 ? ss / static_cast<double>(m.n - 1) : 0;
  m.stderr_ = std::sqrt(var / static_cast<double>(m.n));
  m.ci = {m.mean - z * m.stderr_, m.mean + z * m.stderr_};
  return m;
}

Lemma2Report lemma2_estimator(const std::vector<TrialRecord>& records, const Rational& mu,
                              std::uint64_t min_observations) {
  const auto obs = phase_observations(records);
  Lemma2Report out;
  out.mu = to_double(mu);
  auto verdict = [&](const MeanEstimate& m) {
    if (m.n < min_observations) return Verdict::kUnderpowered;
    return m.ci.lo <= out.mu ? Verdict::kPass : Verdict::kFail;
  };
  std::vector<double> xs;
  for (const auto& o : obs) xs.push_back(static_cast<double>(o.cost));
  out.pooled = mean_estimate(xs);
  out.verdict = verdict(out.pooled);
  const auto bins = by_state(obs);
  out.pooled_only = bins.size() > kMaxStateBins;
  if (!out.pooled_only) {
    for (const auto& [state, list] : bins) {
      std::vector<double> ys;
      for (const auto* o : list) ys.push_back(static_cast<double>(o->cost));
      Lemma2Bin bin{state, mean_estimate(ys), Verdict::kUnderpowered};
      bin.verdict = verdict(bin.estimate);
      if (bin.verdict == Verdict::kFail) out.verdict = Verdict::kFail;
      out.per_state.push_back(bin);
    }
  }
  return out;
}

namespace {

struct Counts {
  std::uint64_t n = 0;
  std::uint64_t exceed = 0;
};

Counts count_exceed(const std::vector<TrialRecord>& recs, double r, double a, Cost lo, Cost hi) {
  Counts c;
  for (const auto& rec : recs) {
    if (!rec.error.empty() || rec.opt < lo || rec.opt > hi) continue;
    ++c.n;
    if (static_cast<double>(rec.cost) >= r * static_cast<double>(rec.opt) + a) ++c.exceed;
  }
  return c;
}

double mean_target(const std::vector<TrialRecord>& recs, double beta, Cost lo, Cost hi) {
  double sum = 0;
  std::uint64_t n = 0;
  for (const auto& rec : recs) {
    if (!rec.error.empty() || rec.opt < lo || rec.opt > hi) continue;
    sum += std::pow(2.0 + static_cast<double>(rec.opt), -beta);
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0;
}

std::vector<PairedRow> paired_rows(const std::vector<TrialRecord>& raw,
                                   const std::vector<TrialRecord>& boosted,
                                   const std::vector<double>& r_grid,
                                   const std::vector<double>& alpha_grid, double beta, Cost lo,
                                   Cost hi) {
  std::vector<PairedRow> rows;
  const double target = mean_target(boosted, beta, lo, hi);
  for (double r : r_grid) {
    for (double a : alpha_grid) {
      PairedRow row;
      row.r = r;
      row.alpha = a;
      const auto cr = count_exceed(raw, r, a, lo, hi);
      const auto cb = count_exceed(boosted, r, a, lo, hi);
      row.raw_frequency = cr.n ? static_cast<double>(cr.exceed) / static_cast<double>(cr.n) : 0;
      row.raw_ci = wilson_interval(cr.exceed, cr.n);
      row.boosted_frequency =
          cb.n ? static_cast<double>(cb.exceed) / static_cast<double>(cb.n) : 0;
      row.boosted_ci = wilson_interval(cb.exceed, cb.n);
      row.target = target;
      row.boosted_within = row.boosted_ci.lo <= target;
      row.boosted_below_raw = row.boosted_frequency < row.raw_frequency;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace

PairedReport compare_raw_vs_boosted(const ExperimentSpec& raw_spec,
                                    const std::vector<TrialRecord>& raw,
                                    const ExperimentSpec& boosted_spec,
                                    const std::vector<TrialRecord>& boosted,
                                    const std::vector<double>& r_grid,
                                    const std::vector<double>& alpha_grid, double beta,
                                    const std::vector<Cost>& bucket_edges) {
  if (raw_spec.boost || !boosted_spec.boost) {
    throw ParameterError("compare: expected one raw and one boosted spec");
  }
  if (raw_spec.problem_id != boosted_spec.problem_id ||
      raw_spec.algorithm_id != boosted_spec.algorithm_id ||
      raw_spec.generator_id != boosted_spec.generator_id ||
      raw_spec.trials != boosted_spec.trials ||
      raw_spec.master_seed != boosted_spec.master_seed || raw_spec.start != boosted_spec.start) {
    throw ParameterError("compare: raw and boosted specs differ beyond the boost switch");
  }
  if (raw.size() != boosted.size()) throw ParameterError("compare: record counts differ");
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].seed != boosted[i].seed || raw[i].length != boosted[i].length) {
      throw ParameterError("compare: records are not paired");
    }
  }
  PairedReport out;
  out.beta = beta;
  out.rows = paired_rows(raw, boosted, r_grid, alpha_grid, beta, 0, kInfiniteCost);
  out.summary = true;
  for (std::size_t b = 0; b + 1 < bucket_edges.size(); ++b) {
    OptBucket bucket;
    bucket.lo = bucket_edges[b];
    bucket.hi = bucket_edges[b + 1] - 1;
    for (const auto& rec : boosted) {
      if (rec.error.empty() && rec.opt >= bucket.lo && rec.opt <= bucket.hi) ++bucket.n;
    }
    bucket.rows = paired_rows(raw, boosted, r_grid, alpha_grid, beta, bucket.lo, bucket.hi);
    if (bucket.n > 0) {
      for (const auto& row : bucket.rows) out.summary = out.summary && row.boosted_within;
    }
    out.buckets.push_back(std::move(bucket));
  }
  if (bucket_edges.size() < 2) {
    for (const auto& row : out.rows) out.summary = out.summary && row.boosted_within;
  }

  // Azuma: runs grouped by phase count k, event Z_k >= (1+eps) r k C.
  const auto& params = boosted_spec.params;
  const double C = static_cast<double>(params.C);
  const double r = to_double(params.config.r);
  const double eps = to_double(params.config.epsilon);
  std::map<std::uint64_t, Counts> groups;
  for (const auto& rec : boosted) {
    if (!rec.error.empty()) continue;
    auto& g = groups[rec.phases];
    ++g.n;
    if (static_cast<double>(rec.cost) >= (1 + eps) * r * static_cast<double>(rec.phases) * C) {
      ++g.exceed;
    }
  }
  for (const auto& [k, g] : groups) {
    AzumaRow row;
    row.k = k;
    row.n = g.n;
    row.exceed = g.exceed;
    row.frequency = static_cast<double>(g.exceed) / static_cast<double>(g.n);
    row.ci = wilson_interval(g.exceed, g.n);
    if (k >= 2) {
      try {
        const double c = clip_constant_c(k, params, beta).exact;
        row.bound = azuma_tail_bound(k, params, c);
      } catch (const std::domain_error&) {
        row.bound.reset();
      } catch (const ParameterError&) {
        row.bound.reset();  // the clip constant is only defined for beta > 1
      }
    }
    row.within = !row.bound || row.ci.lo <= *row.bound;
    out.azuma.push_back(row);
  }
  return out;
}

std::string records_to_csv(const std::vector<TrialRecord>& records, const std::string& variant,
                           bool header) {
  std::ostringstream os;
  if (header) os << "schema_version,variant,trial,seed,length,opt,cost,ratio,phases,resets,error\n";
  os.precision(17);
  for (const auto& rec : records) {
    os << kTrialsSchemaVersion << ',' << variant << ',' << rec.index << ',' << rec.seed << ',' << rec.length << ','
       << rec.opt << ',' << rec.cost << ',';
    if (rec.ratio) os << *rec.ratio;
    os << ',' << rec.phases << ',' << rec.resets << ',';
    std::string err = rec.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << err << '\n';
  }
  return os.str();
}

nlohmann::json to_json(const Interval& ci) { return nlohmann::json::array({ci.lo, ci.hi}); }

nlohmann::json to_json(const TailEstimate& tail) {
  nlohmann::json j;
  j["betas"] = tail.betas;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : tail.rows) {
    j["rows"].push_back({{"r", row.r},
                         {"alpha", row.alpha},
                         {"n", row.n},
                         {"exceed", row.exceed},
                         {"frequency", row.frequency},
                         {"ci", to_json(row.ci)},
                         {"targets", row.targets},
                         {"within", row.within}});
  }
  return j;
}

namespace {
nlohmann::json rows_json(const std::vector<Lemma1Row>& rows) {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"delta", r.delta},
                   {"n", r.n},
                   {"hits", r.hits},
                   {"frequency", r.frequency},
                   {"ci", to_json(r.ci)},
                   {"bound", r.bound},
                   {"verdict", to_string(r.verdict)}});
  }
  return arr;
}

nlohmann::json mean_json(const MeanEstimate& m) {
  return {{"n", m.n}, {"mean", m.mean}, {"stderr", m.stderr_}, {"ci", to_json(m.ci)}};
}

nlohmann::json paired_json(const std::vector<PairedRow>& rows) {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"r", r.r},
                   {"alpha", r.alpha},
                   {"raw_frequency", r.raw_frequency},
                   {"raw_ci", to_json(r.raw_ci)},
                   {"boosted_frequency", r.boosted_frequency},
                   {"boosted_ci", to_json(r.boosted_ci)},
                   {"target", r.target},
                   {"boosted_within", r.boosted_within},
                   {"boosted_below_raw", r.boosted_below_raw}});
  }
  return arr;
}
}  // namespace

nlohmann::json to_json(const Lemma1Report& report) {
  nlohmann::json j;
  j["pooled"] = rows_json(report.pooled);
  j["pooled_only"] = report.pooled_only;
  j["conservative"] = report.pooled_only;
  j["per_state"] = nlohmann::json::array();
  for (const auto& bin : report.per_state) {
    j["per_state"].push_back({{"state", bin.state}, {"rows", rows_json(bin.rows)}});
  }
  j["verdict"] = to_string(report.verdict);
  return j;
}

nlohmann::json to_json(const Lemma2Report& report) {
  nlohmann::json j;
  j["pooled"] = mean_json(report.pooled);
  j["mu"] = report.mu;
  j["pooled_only"] = report.pooled_only;
  j["conservative"] = report.pooled_only;
  j["per_state"] = nlohmann::json::array();
  for (const auto& bin : report.per_state) {
    j["per_state"].push_back(
        {{"state", bin.state}, {"estimate", mean_json(bin.estimate)}, {"verdict", to_string(bin.verdict)}});
  }
  j["verdict"] = to_string(report.verdict);
  return j;
}

nlohmann::json to_json(const PairedReport& report) {
  nlohmann::json j;
  j["beta"] = report.beta;
  j["rows"] = paired_json(report.rows);
  j["buckets"] = nlohmann::json::array();
  for (const auto& b : report.buckets) {
    j["buckets"].push_back({{"opt_lo", b.lo}, {"opt_hi", b.hi}, {"n", b.n}, {"rows", paired_json(b.rows)}});
  }
  j["azuma"] = nlohmann::json::array();
  for (const auto& a : report.azuma) {
    nlohmann::json row{{"k", a.k},         {"n", a.n},   {"exceed", a.exceed},
                       {"frequency", a.frequency}, {"ci", to_json(a.ci)}, {"within", a.within}};
    row["bound"] = a.bound ? nlohmann::json(*a.bound) : nlohmann::json(nullptr);
    j["azuma"].push_back(row);
  }
  j["summary_verdict"] = report.summary ? "pass" : "fail";
  return j;
}

}  // namespace hpboost
