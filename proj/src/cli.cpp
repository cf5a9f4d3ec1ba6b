#include "hpboost/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hpboost/config.hpp"
#include "hpboost/counterexamples.hpp"
#include "hpboost/jss.hpp"
#include "hpboost/mcstats.hpp"
#include "hpboost/oracle.hpp"
#include "hpboost/simulate.hpp"

namespace hpboost {

namespace {

using nlohmann::json;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string out;
  std::vector<std::string> suites;
  bool suite_given = false;
};

/// Verdict failure carrying the report that was already written.
struct VerdictFailure {};

class Output {
 public:
  Output(const Options& opt, std::ostream& out) : dir_(opt.out), out_(out) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }
  bool to_dir() const { return !dir_.empty(); }
  void write(const std::string& name, const std::string& content) {
    if (dir_.empty()) return;
    std::ofstream f(std::filesystem::path(dir_) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + name);
    f << content;
  }
  std::ostream& out() { return out_; }

 private:
  std::string dir_;
  std::ostream& out_;
};

json report_header(const std::string& command, const ConfigTree* cfg,
                   std::optional<std::uint64_t> seed) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool"] = {{"name", "hpboost"}, {"version", HPBOOST_VERSION}};
  j["command"] = command;
  j["config_hash"] = cfg ? json(config_hash(cfg->text)) : json(nullptr);
  j["config"] = cfg ? json(cfg->text) : json(nullptr);
  j["seed"] = seed ? json(*seed) : json(nullptr);
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

bool all_pass(const json& verdicts) {
  for (const auto& [k, v] : verdicts.items()) {
    if (v != "pass") return false;
  }
  return true;
}

void print_verdicts(std::ostream& out, const json& verdicts) {
  for (const auto& [k, v] : verdicts.items()) out << "verdict " << k << " = " << v.get<std::string>() << "\n";
}

ConfigTree load_config(const Options& opt) {
  if (opt.config.empty()) throw ConfigError("--config", "a configuration file is required");
  return ConfigTree::load(opt.config);
}

// ---- params

int cmd_params(const Options& opt, Output& io) {
  const auto cfg = load_config(opt);
  const auto node = cfg.required_section("params");
  node.check_keys({"epsilon", "r", "F", "B", "alpha", "safety_factor"});
  const auto params = derive_params(boost_config_from(node));
  const auto table = params_table(params);
  io.out() << table;
  io.write("params.txt", table);
  return kExitPass;
}

// ---- run

int cmd_run(const Options& opt, Output& io) {
  const auto cfg = load_config(opt);
  auto ec = experiment_from(cfg.required_section("experiment"), opt.seed);
  const auto& spec = ec.spec;
  auto report = report_header("run", &cfg, spec.master_seed);
  json verdicts = json::object();

  const auto records = run_trials(spec, opt.threads);
  const std::string variant = spec.boost ? "boosted" : "raw";
  std::string csv = records_to_csv(records, variant);
  report["trials"] = spec.trials;
  report["problem"] = spec.problem_id;
  report["algorithm"] = spec.algorithm_id;
  report["generator"] = spec.generator_id;
  report["boost"] = spec.boost;
  std::size_t errors = 0;
  for (const auto& r : records) errors += !r.error.empty();
  report["tail"][variant] = to_json(empirical_tail(records, ec.r_grid, ec.alpha_grid, spec.betas));

  if (spec.boost) {
    const auto table = params_table(spec.params);
    report["params"] = table;
    io.write("params.txt", table);
    if (ec.lemmas) {
      const auto l1 = lemma1_estimator(records, spec.params.p, 5, ec.min_observations);
      const auto l2 = lemma2_estimator(records, spec.params.mu, ec.min_observations);
      report["lemma1"] = to_json(l1);
      report["lemma2"] = to_json(l2);
      verdicts["lemma1"] = to_string(l1.verdict);
      verdicts["lemma2"] = to_string(l2.verdict);
    }
  }
  if (ec.paired) {
    auto raw_spec = spec;
    raw_spec.boost = false;
    const auto raw = run_trials(raw_spec, opt.threads);
    for (const auto& r : raw) errors += !r.error.empty();
    csv += records_to_csv(raw, "raw", false);
    report["tail"]["raw"] = to_json(empirical_tail(raw, ec.r_grid, ec.alpha_grid, spec.betas));
    json paired = json::array();
    bool ok = true;
    for (double beta : spec.betas) {
      const auto pr = compare_raw_vs_boosted(raw_spec, raw, spec, records, ec.r_grid,
                                             ec.alpha_grid, beta, ec.opt_buckets);
      paired.push_back(to_json(pr));
      ok = ok && pr.summary;
    }
    report["paired"] = paired;
    verdicts["paired_summary"] = ok ? "pass" : "fail";
  }
  report["errors"] = errors;
  verdicts["trials_without_errors"] = errors == 0 ? "pass" : "fail";
  report["verdicts"] = verdicts;
  report["summary_verdict"] = all_pass(verdicts) ? "pass" : "fail";

  io.write("trials.csv", csv);
  io.write("report.json", dump(report));
  if (!io.to_dir()) io.out() << dump(report);
  print_verdicts(io.out(), verdicts);
  return all_pass(verdicts) ? kExitPass : kExitVerdict;
}

// ---- oracle-check

int cmd_oracle_check(const Options& opt, Output& io) {
  std::optional<ConfigTree> cfg;
  if (!opt.config.empty()) cfg = ConfigTree::load(opt.config);
  OracleCheckConfig oc;
  std::vector<std::string> suites = oracle_suite_names();
  std::string perturb;
  if (cfg) {
    if (auto node = cfg->section("oracle-check")) {
      oc = oracle_config_from(*node);
      suites = node->strings_or("suites", suites);
      perturb = node->str_or("perturb", "");
    }
  }
  if (opt.seed) oc.seed = *opt.seed;
  if (opt.suite_given) {
    suites.clear();
    for (const auto& s : opt.suites) {
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) suites.push_back(item);
      }
    }
  }
  for (const auto& s : suites) {
    const auto& names = oracle_suite_names();
    if (std::find(names.begin(), names.end(), s) == names.end()) {
      throw ConfigError("--suite", "unknown suite '" + s + "'");
    }
  }
  OracleHooks hooks;
  // Negative control: an oracle that is off by one on longer inputs.
  if (perturb == "belady") {
    hooks.belady = [](std::span<const PageId> c, std::span<const PageId> r) {
      return belady_opt(c, r) + (r.size() >= 7 ? 1 : 0);
    };
  } else if (perturb == "workfunction") {
    hooks.workfunction = [](const TaskSystem& ts, std::size_t s, std::span<const TaskVector> t) {
      return add_costs(workfunction_opt(ts, s, t), t.size() >= 5 ? 1 : 0);
    };
  } else if (!perturb.empty()) {
    throw ConfigError("oracle-check.perturb", "unknown oracle '" + perturb + "'");
  }

  auto report = report_header("oracle-check", cfg ? &*cfg : nullptr, oc.seed);
  report["suites"] = json::array();
  bool ok = true;
  for (const auto& s : suites) {
    const auto res = run_oracle_suite(s, oc, hooks);
    report["suites"].push_back(res.to_json());
    ok = ok && res.passed();
    for (const auto& c : res.checks) {
      io.out() << std::left << std::setw(14) << s << std::setw(30) << c.name << " instances="
               << res.instances << " mismatches=" << c.mismatches << "\n";
      if (c.mismatches > 0) io.out() << "  minimal failing instance: " << c.failure.dump() << "\n";
    }
  }
  report["summary_verdict"] = ok ? "pass" : "fail";
  io.write("report.json", dump(report));
  return ok ? kExitPass : kExitVerdict;
}

// ---- jss

int cmd_jss(const Options& opt, Output& io) {
  const auto cfg = load_config(opt);
  const auto node = cfg.required_section("jss");
  node.check_keys({"n", "m", "r", "f", "instances", "seed", "instance_file", "check_shortest"});
  const std::uint64_t seed = opt.seed ? *opt.seed : node.unsigned_or("seed", 1);
  std::vector<JssInstance> instances;
  std::size_t r = 0;
  r = static_cast<std::size_t>(node.integer("r"));
  const double f = node.real_or("f", 0.5);
  if (node.has("instance_file")) {
    std::ifstream in(node.str("instance_file"));
    if (!in) throw ConfigError(node.key_path("instance_file"), "cannot read file");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      instances.push_back(JssInstance::from_json(ss.str()));
    } catch (const std::exception& e) {
      throw ConfigError(node.key_path("instance_file"), e.what());
    }
  } else {
    const auto n = node.integer("n");
    const auto m = node.integer("m");
    const auto count = node.integer_or("instances", 1);
    if (n < 2 || n > 3) throw ConfigError(node.key_path("n"), "must be 2 or 3");
    if (m < 2) throw ConfigError(node.key_path("m"), "must be at least 2");
    if (count < 1) throw ConfigError(node.key_path("instances"), "must be at least 1");
    RandomTape tape(seed);
    for (std::int64_t i = 0; i < count; ++i) {
      instances.push_back(
          JssInstance::random(static_cast<std::size_t>(n), static_cast<std::size_t>(m), tape));
    }
  }
  const std::size_t m0 = instances.front().m;
  if (r < 1 || r >= m0) throw ConfigError(node.key_path("r"), "need 1 <= r < m");
  const bool shortest = node.boolean_or("check_shortest", m0 <= 8);

  auto report = report_header("jss", &cfg, seed);
  std::ostringstream csv;
  csv << "schema_version,instance,diagonal,delays,makespan,identity_ok";
  if (shortest) csv << ",shortest_path";
  csv << "\n";
  json verdicts = {{"diagonal_count", "pass"}, {"total_delays", "pass"}, {"bad_diagonals", "pass"},
                   {"makespan_identity", "pass"}};
  if (shortest) verdicts["shortest_template_path"] = "pass";
  json per = json::array();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    inst.validate();
    const auto census = delay_census(inst, r, f);
    if (census.diagonals.size() != diagonal_count(inst.n, r)) verdicts["diagonal_count"] = "fail";
    if (!census.total_ok()) verdicts["total_delays"] = "fail";
    if (!census.bad_ok()) verdicts["bad_diagonals"] = "fail";
    for (std::size_t d = 0; d < census.diagonals.size(); ++d) {
      const DiagonalTemplate tmpl{r, census.diagonals[d]};
      const auto sched = diagonal_strategy_run(inst, tmpl);
      const bool identity = sched.makespan == inst.m + r + sched.delays && sched.valid(inst);
      if (!identity) verdicts["makespan_identity"] = "fail";
      std::string coords;
      for (std::size_t c = 0; c < tmpl.start.size(); ++c) {
        coords += (c ? ";" : "") + std::to_string(tmpl.start[c]);
      }
      csv << kTrialsSchemaVersion << ',' << i << ',' << coords << ',' << sched.delays << ','
          << sched.makespan << ',' << (identity ? 1 : 0);
      if (shortest) {
        const auto sp = shortest_template_path(inst, tmpl);
        if (sp != sched.makespan) verdicts["shortest_template_path"] = "fail";
        csv << ',' << sp;
      }
      csv << "\n";
    }
    per.push_back({{"instance", i},
                   {"n", inst.n},
                   {"m", inst.m},
                   {"diagonals", census.diagonals.size()},
                   {"total_delays", census.total},
                   {"total_bound", census.total_bound},
                   {"threshold", census.threshold},
                   {"bad", census.bad},
                   {"bad_bound", census.threshold > 0 ? json(census.bad_bound) : json("inf")}});
  }
  report["r"] = r;
  report["f"] = f;
  report["instances"] = per;
  report["verdicts"] = verdicts;
  report["summary_verdict"] = all_pass(verdicts) ? "pass" : "fail";
  io.write("trials.csv", csv.str());
  io.write("report.json", dump(report));
  if (!io.to_dir()) io.out() << csv.str();
  print_verdicts(io.out(), verdicts);
  return all_pass(verdicts) ? kExitPass : kExitVerdict;
}

// ---- counterexample

struct CxEvent {
  std::function<bool(Cost)> hit;
  Rational exact;
};

int cmd_counterexample(const Options& opt, Output& io) {
  const auto cfg = load_config(opt);
  const auto node = cfg.required_section("counterexample");
  node.check_keys({"kind", "n", "b", "trials", "seed", "checkpoints"});
  CounterexampleSpec cx;
  try {
    cx.kind = parse_counterexample_kind(node.str("kind"));
    cx.n = static_cast<std::size_t>(node.integer("n"));
    cx.b = node.integer_or("b", 2);
    cx.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(node.path(), e.what());
  }
  const std::uint64_t seed = opt.seed ? *opt.seed : node.unsigned_or("seed", 1);
  const auto trials = node.integer_or("trials", 10000);
  if (trials < 1) throw ConfigError(node.key_path("trials"), "must be at least 1");
  auto checkpoints = node.integers_or("checkpoints", {100, 1000, 10000});
  const auto problem = counterexample_problem(cx);

  // One fixed input drawn from the seed.
  RandomTape in_tape(input_seed(seed));
  std::vector<Request> reqs;
  StateHandle start = problem->initial_states().front();
  auto bits = [&](std::size_t count) {
    std::vector<std::int64_t> v;
    for (std::size_t i = 0; i < count; ++i) v.push_back(in_tape.bit() ? 1 : 0);
    return v;
  };
  switch (cx.kind) {
    case CounterexampleKind::kBitGuess:
      reqs.push_back(Request::single(1));
      for (auto v : bits(cx.n)) reqs.push_back(Request::single(v));
      break;
    case CounterexampleKind::kLastGuess:
      reqs.assign(cx.n - 1, Request::single(0));
      reqs.push_back(Request::single(1 + static_cast<std::int64_t>(
                                             in_tape.uniform(static_cast<std::uint64_t>(cx.b)))));
      break;
    case CounterexampleKind::kTest: {
      const auto b = bits(cx.n + 1);
      reqs = TestProblem::input(b[0], std::span<const std::int64_t>(b).subspan(1));
      break;
    }
    case CounterexampleKind::kDoubling: {
      const auto b = bits(cx.n);
      for (auto v : b) reqs.push_back(Request::single(v));
      start = DoublingProblem::state(b[0], 0);
      break;
    }
  }
  const auto dist = uniform_answer_distribution(*problem, start, reqs);
  const Cost opt_value = problem->opt_cost(start, reqs);
  json exact;
  json verdicts = json::object();
  CxEvent event;
  const Rational expectation = dist.expectation();
  exact["expected_cost"] = expectation.to_string();
  exact["opt"] = opt_value;
  auto check = [&](const std::string& name, bool ok) { verdicts[name] = ok ? "pass" : "fail"; };
  switch (cx.kind) {
    case CounterexampleKind::kBitGuess: {
      const Cost big_d = static_cast<const BitGuessProblem&>(*problem).big_d();
      const Rational success = Rational(1) - dist.probability_equal(big_d);
      exact["success_probability"] = success.to_string();
      check("success_probability", success == bitguess_success_probability(cx.n));
      event = {[big_d](Cost c) { return c == big_d; }, dist.probability_equal(big_d)};
      break;
    }
    case CounterexampleKind::kLastGuess: {
      const Cost top = cx.b * static_cast<Cost>(cx.n);
      exact["probability_max_cost"] = dist.probability_equal(top).to_string();
      check("expected_cost", expectation == lastguess_expected_cost(cx.n, cx.b));
      check("probability_max_cost", dist.probability_equal(top) == lastguess_max_cost_probability(cx.b));
      event = {[top](Cost c) { return c == top; }, dist.probability_equal(top)};
      break;
    }
    case CounterexampleKind::kTest: {
      const std::vector<std::int64_t> alphabet{0, 1};
      const auto classes = count_state_classes(*problem, start, alphabet, cx.n + 2, 3);
      exact["state_classes"] = classes;
      check("six_states", classes == 6);
      check("expected_cost", expectation == Rational(2 * static_cast<std::int64_t>(cx.n)));
      const Cost thr = 2 * static_cast<Cost>(cx.n);
      event = {[thr](Cost c) { return c > thr; }, dist.probability_at_least(thr + 1)};
      break;
    }
    case CounterexampleKind::kDoubling: {
      const Cost thr = doubling_tail_threshold(cx.n);
      exact["tail_probability"] = dist.probability_at_least(thr).to_string();
      exact["ratio"] = (expectation / Rational(opt_value)).to_string();
      check("opt", opt_value == doubling_opt(cx.n));
      check("expected_cost", expectation == doubling_uniform_expectation(cx.n));
      check("ratio_at_most_2", expectation <= Rational(2) * Rational(opt_value));
      check("tail_at_least_quarter", dist.probability_at_least(thr) >= Rational(1, 4));
      event = {[thr](Cost c) { return c >= thr; }, dist.probability_at_least(thr)};
      break;
    }
  }

  // Monte Carlo convergence of the event frequency.
  UniformRandomAlgorithm alg(problem);
  SimulateOptions quiet;
  quiet.record_steps = false;
  std::uint64_t hits = 0;
  json mc = json::array();
  const double p_exact = static_cast<double>(event.exact.num()) / static_cast<double>(event.exact.den());
  std::sort(checkpoints.begin(), checkpoints.end());
  std::size_t next_cp = 0;
  bool mc_ok = true;
  for (std::int64_t i = 0; i < trials; ++i) {
    RandomTape tape(trial_seed(seed, static_cast<std::uint64_t>(i)));
    auto run = alg.fresh();
    const auto t = simulate(*problem, *run, start, reqs, tape, quiet);
    hits += event.hit(t.total_cost);
    while (next_cp < checkpoints.size() && checkpoints[next_cp] == i + 1) {
      const auto n = static_cast<std::uint64_t>(i + 1);
      const auto ci = wilson_interval(hits, n);
      const bool inside = ci.lo <= p_exact && p_exact <= ci.hi;
      mc_ok = mc_ok && inside;
      mc.push_back({{"trials", n},
                    {"frequency", static_cast<double>(hits) / static_cast<double>(n)},
                    {"ci", to_json(ci)},
                    {"contains_exact", inside}});
      ++next_cp;
    }
  }
  verdicts["monte_carlo"] = mc_ok ? "pass" : "fail";

  auto report = report_header("counterexample", &cfg, seed);
  report["kind"] = to_string(cx.kind);
  report["n"] = cx.n;
  if (cx.kind == CounterexampleKind::kLastGuess) report["b"] = cx.b;
  report["exact"] = exact;
  report["event_probability"] = event.exact.to_string();
  report["monte_carlo"] = mc;
  report["verdicts"] = verdicts;
  report["summary_verdict"] = all_pass(verdicts) ? "pass" : "fail";
  io.write("report.json", dump(report));
  if (!io.to_dir()) io.out() << dump(report);
  print_verdicts(io.out(), verdicts);
  return all_pass(verdicts) ? kExitPass : kExitVerdict;
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message,
                const std::string& path = "") {
  json j{{"schema_version", kReportSchemaVersion},
         {"error", {{"kind", kind}, {"message", message}}}};
  if (!path.empty()) j["error"]["path"] = path;
  err << j.dump() << "\n";
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hpboost: expected-to-high-probability boosting of online algorithms"};
  app.set_version_flag("--version", std::string(HPBOOST_VERSION));
  Options opt;
  std::uint64_t seed = 0;
  app.add_option("--config", opt.config, "configuration file (YAML)");
  auto* seed_opt = app.add_option("--seed", seed, "master seed, overrides the config");
  app.add_option("--threads", opt.threads, "worker threads for trial runs")->check(CLI::PositiveNumber);
  app.add_option("--out", opt.out, "output directory for trials.csv, report.json, params.txt");
  auto* suite_opt = app.add_option("--suite", opt.suites, "oracle-check suite (repeatable, comma lists)");
  app.require_subcommand(1, 1);
  app.fallthrough();
  auto* params = app.add_subcommand("params", "derive C, D, p, mu and print the constraint table");
  auto* run = app.add_subcommand("run", "run a Monte Carlo experiment");
  auto* oracle = app.add_subcommand("oracle-check", "oracle equivalence suites");
  auto* jss = app.add_subcommand("jss", "diagonal strategy delay census");
  auto* cx = app.add_subcommand("counterexample", "exact and Monte Carlo counterexample checks");
  for (auto* sub : {params, run, oracle, jss, cx}) sub->fallthrough();

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForVersion&) {
    out << HPBOOST_VERSION << "\n";
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", e.what());
    return kExitConfig;
  }
  if (seed_opt->count() > 0) opt.seed = seed;
  opt.suite_given = suite_opt->count() > 0;

  try {
    Output io(opt, out);
    if (params->parsed()) return cmd_params(opt, io);
    if (run->parsed()) return cmd_run(opt, io);
    if (oracle->parsed()) return cmd_oracle_check(opt, io);
    if (jss->parsed()) return cmd_jss(opt, io);
    if (cx->parsed()) return cmd_counterexample(opt, io);
    emit_error(err, "usage", "no subcommand");
    return kExitConfig;
  } catch (const ConfigError& e) {
    emit_error(err, "config", e.what(), e.path());
    return kExitConfig;
  } catch (const ParameterError& e) {
    emit_error(err, "config", e.what());
    return kExitConfig;
  } catch (const ConsistencyError& e) {
    emit_error(err, "consistency", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    emit_error(err, "internal", e.what());
    return kExitInternal;
  }
}

}  // namespace hpboost
