#include "hpboost/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hpboost/counterexamples.hpp"
#include "hpboost/generators.hpp"
#include "hpboost/mts.hpp"
#include "hpboost/paging.hpp"
#include "hpboost/probe.hpp"

namespace hpboost {

ConfigNode::ConfigNode(YAML::Node node, std::string path)
    : node_(std::move(node)), path_(std::move(path)) {
  if (!node_.IsMap()) throw ConfigError(path_, "expected a mapping");
}

std::string ConfigNode::key_path(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

bool ConfigNode::has(const std::string& key) const {
  return static_cast<bool>(node_[key]) && !node_[key].IsNull();
}

void ConfigNode::check_keys(const std::vector<std::string>& allowed) const {
  for (const auto& kv : node_) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(key_path(key), "unknown key");
    }
  }
}

YAML::Node ConfigNode::required(const std::string& key) const {
  if (!has(key)) throw ConfigError(key_path(key), "missing required key");
  return node_[key];
}

ConfigNode ConfigNode::child(const std::string& key) const {
  return ConfigNode(required(key), key_path(key));
}

std::optional<ConfigNode> ConfigNode::optional_child(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return child(key);
}

namespace {
template <typename T>
T convert(const YAML::Node& n, const std::string& path, const char* what) {
  try {
    if (!n.IsScalar()) throw ConfigError(path, std::string("expected ") + what);
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path, std::string("expected ") + what);
  }
}
}  // namespace

std::string ConfigNode::str(const std::string& key) const {
  return convert<std::string>(required(key), key_path(key), "a string");
}

std::string ConfigNode::str_or(const std::string& key, const std::string& def) const {
  return has(key) ? str(key) : def;
}

std::int64_t ConfigNode::integer(const std::string& key) const {
  return convert<std::int64_t>(required(key), key_path(key), "an integer");
}

std::int64_t ConfigNode::integer_or(const std::string& key, std::int64_t def) const {
  return has(key) ? integer(key) : def;
}

std::uint64_t ConfigNode::unsigned_or(const std::string& key, std::uint64_t def) const {
  if (!has(key)) return def;
  const auto text = str(key);
  if (text.empty() || text[0] == '-') throw ConfigError(key_path(key), "expected a nonnegative integer");
  return convert<std::uint64_t>(required(key), key_path(key), "a nonnegative integer");
}

double ConfigNode::real_or(const std::string& key, double def) const {
  return has(key) ? convert<double>(required(key), key_path(key), "a number") : def;
}

bool ConfigNode::boolean_or(const std::string& key, bool def) const {
  return has(key) ? convert<bool>(required(key), key_path(key), "true or false") : def;
}

Rational ConfigNode::rational(const std::string& key) const {
  const auto text = str(key);
  try {
    return Rational::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(key_path(key), e.what());
  }
}

std::optional<Rational> ConfigNode::rational_or_auto(const std::string& key) const {
  if (!has(key) || str(key) == "auto") return std::nullopt;
  return rational(key);
}

std::vector<double> ConfigNode::reals_or(const std::string& key, std::vector<double> def) const {
  if (!has(key)) return def;
  const auto n = required(key);
  if (!n.IsSequence()) throw ConfigError(key_path(key), "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    out.push_back(convert<double>(n[i], key_path(key) + "[" + std::to_string(i) + "]", "a number"));
  }
  return out;
}

std::vector<std::int64_t> ConfigNode::integers_or(const std::string& key,
                                                  std::vector<std::int64_t> def) const {
  if (!has(key)) return def;
  const auto n = required(key);
  if (!n.IsSequence()) throw ConfigError(key_path(key), "expected a list of integers");
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    out.push_back(
        convert<std::int64_t>(n[i], key_path(key) + "[" + std::to_string(i) + "]", "an integer"));
  }
  return out;
}

std::vector<std::string> ConfigNode::strings_or(const std::string& key,
                                                std::vector<std::string> def) const {
  if (!node_[key]) return def;
  const auto n = node_[key];
  if (n.IsNull()) return {};
  if (!n.IsSequence()) throw ConfigError(key_path(key), "expected a list of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    out.push_back(
        convert<std::string>(n[i], key_path(key) + "[" + std::to_string(i) + "]", "a string"));
  }
  return out;
}

ConfigTree ConfigTree::parse(const std::string& text) {
  ConfigTree t;
  t.text = text;
  try {
    t.root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<config>", std::string("parse error: ") + e.what());
  }
  if (t.root.IsNull()) t.root = YAML::Node(YAML::NodeType::Map);
  ConfigNode(t.root, "").check_keys({"experiment", "params", "oracle-check", "jss", "counterexample"});
  return t;
}

ConfigTree ConfigTree::load(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("<config>", "cannot read '" + file + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::optional<ConfigNode> ConfigTree::section(const std::string& name) const {
  return ConfigNode(root, "").optional_child(name);
}

ConfigNode ConfigTree::required_section(const std::string& name) const {
  return ConfigNode(root, "").child(name);
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Rational marking_ratio(std::size_t k) {
  Rational h(0);
  for (std::size_t i = 1; i <= k; ++i) h += Rational(1, static_cast<std::int64_t>(i));
  return Rational(2) * h - Rational(1);
}

BoostConfig boost_config_from(const ConfigNode& node) {
  BoostConfig c;
  c.epsilon = node.rational("epsilon");
  c.r = node.rational("r");
  c.F = node.rational("F");
  c.B = node.rational("B");
  c.alpha = node.has("alpha") ? node.rational("alpha") : Rational(0);
  c.safety_factor = node.has("safety_factor") ? node.rational("safety_factor") : Rational(2);
  try {
    c.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(node.path(), e.what());
  }
  return c;
}

namespace {

std::size_t positive(const ConfigNode& n, const std::string& key, std::int64_t def = -1) {
  const auto v = def < 0 ? n.integer(key) : n.integer_or(key, def);
  if (v < 1) throw ConfigError(n.key_path(key), "must be a positive integer");
  return static_cast<std::size_t>(v);
}

DistanceMatrix matrix_from(const ConfigNode& n) {
  if (n.has("matrix_file")) {
    try {
      return load_distance_matrix(n.str("matrix_file"));
    } catch (const std::exception& e) {
      throw ConfigError(n.key_path("matrix_file"), e.what());
    }
  }
  if (n.has("line")) {
    try {
      return Metric::line(n.integers_or("line", {})).matrix();
    } catch (const std::exception& e) {
      throw ConfigError(n.key_path("line"), e.what());
    }
  }
  if (n.has("points")) return DistanceMatrix::uniform(positive(n, "points"));
  if (n.has("states")) {
    RandomTape tape(n.unsigned_or("metric_seed", 1));
    return random_metric_matrix(positive(n, "states"), n.integer_or("max_distance", 5), tape);
  }
  throw ConfigError(n.path(), "one of matrix_file, line, points or states is required");
}

struct Built {
  std::shared_ptr<const Problem> problem;
  StateHandle start;
  std::string id;
  std::size_t k = 0;
  std::optional<TaskSystem> ts;
  std::optional<CounterexampleSpec> cx;
  std::shared_ptr<const KServerProblem> kserver;
};

Built problem_from(const ConfigNode& n) {
  Built b;
  const auto type = n.str("type");
  b.id = type;
  if (type == "paging") {
    n.check_keys({"type", "k", "pages"});
    b.k = positive(n, "k");
    const auto pages = positive(n, "pages", static_cast<std::int64_t>(b.k + 1));
    if (pages <= b.k) throw ConfigError(n.key_path("pages"), "must exceed k");
    std::vector<PageId> universe;
    for (std::size_t i = 1; i <= pages; ++i) universe.push_back(static_cast<PageId>(i));
    b.problem = std::make_shared<PagingProblem>(b.k, universe);
    b.start = PagingProblem::cache_state(paging_initial_cache(b.k));
  } else if (type == "mts") {
    n.check_keys({"type", "matrix_file", "line", "points", "states", "max_distance", "metric_seed",
                  "metrical", "task_bound", "start"});
    try {
      b.ts = TaskSystem(matrix_from(n), n.boolean_or("metrical", true));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(n.path(), e.what());
    }
    std::optional<Cost> bound;
    if (n.has("task_bound")) bound = n.integer("task_bound");
    b.problem = mts_problem(*b.ts, bound);
    const auto s = static_cast<std::size_t>(n.integer_or("start", 0));
    if (s >= b.ts->size()) throw ConfigError(n.key_path("start"), "out of range");
    b.start = MtsProblem::state(s);
  } else if (type == "kserver") {
    n.check_keys({"type", "k", "matrix_file", "line", "points", "states", "max_distance",
                  "metric_seed", "initial"});
    b.k = positive(n, "k");
    std::shared_ptr<KServerProblem> ks;
    try {
      ks = std::make_shared<KServerProblem>(Metric(matrix_from(n)), b.k);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(n.path(), e.what());
    }
    std::vector<std::int64_t> def;
    for (std::size_t i = 0; i < b.k; ++i) def.push_back(static_cast<std::int64_t>(i));
    b.start = KServerProblem::configuration(n.integers_or("initial", def));
    if (!ks->is_initial(b.start)) throw ConfigError(n.key_path("initial"), "not a configuration");
    b.kserver = ks;
    b.problem = ks;
  } else if (type == "counterexample") {
    n.check_keys({"type", "kind", "n", "b"});
    CounterexampleSpec cx;
    try {
      cx.kind = parse_counterexample_kind(n.str("kind"));
      cx.n = positive(n, "n");
      cx.b = n.integer_or("b", 2);
      b.problem = counterexample_problem(cx);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(n.path(), e.what());
    }
    b.id = "counterexample/" + to_string(cx.kind);
    b.cx = cx;
    b.start = b.problem->initial_states().front();
  } else {
    throw ConfigError(n.key_path("type"), "unknown problem type '" + type + "'");
  }
  return b;
}

std::shared_ptr<const Algorithm> algorithm_from(const ConfigNode& n, const Built& b,
                                                std::string& id) {
  n.check_keys({"type"});
  id = n.str("type");
  if (id == "marking") {
    if (b.id != "paging") throw ConfigError(n.key_path("type"), "marking needs a paging problem");
    return std::make_shared<MarkingAlgorithm>(b.k);
  }
  if (id == "uniform") return std::make_shared<UniformRandomAlgorithm>(b.problem);
  if (id == "greedy") return std::make_shared<GreedyAlgorithm>(b.problem);
  if (id == "wfa" || id == "random-greedy") {
    if (!b.ts) throw ConfigError(n.key_path("type"), id + " needs an mts problem");
    if (id == "wfa") return std::make_shared<WorkFunctionAlgorithm>(*b.ts);
    return std::make_shared<RandomGreedyMtsAlgorithm>(*b.ts);
  }
  throw ConfigError(n.key_path("type"), "unknown algorithm '" + id + "'");
}

std::vector<Request> bits_requests(std::size_t count, RandomTape& tape) {
  std::vector<Request> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(Request::single(tape.bit() ? 1 : 0));
  return out;
}

InputGenerator generator_from(const ConfigNode& n, const Built& b, std::string& id) {
  id = n.str("type");
  if (id == "paging") {
    n.check_keys({"type", "stream", "length"});
    if (b.id != "paging") throw ConfigError(n.key_path("type"), "needs a paging problem");
    PagingStream kind;
    try {
      kind = parse_paging_stream(n.str_or("stream", "uniform"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(n.key_path("stream"), e.what());
    }
    const auto len = positive(n, "length");
    const auto k = b.k;
    const auto pages = static_cast<const PagingProblem&>(*b.problem).universe().size();
    if (pages != k + 1) throw ConfigError(n.path(), "paging streams use exactly k+1 pages");
    id += "/" + to_string(kind);
    return [kind, k, len](RandomTape& tape) {
      const auto p = paging_stream(kind, k, len, tape);
      return page_requests(p);
    };
  }
  if (id == "mts") {
    n.check_keys({"type", "length", "max_task", "infinite_per_mille"});
    if (!b.ts) throw ConfigError(n.key_path("type"), "needs an mts problem");
    const auto len = positive(n, "length");
    const Cost max_task = n.integer_or("max_task", 5);
    const auto inf = static_cast<unsigned>(n.integer_or("infinite_per_mille", 0));
    const auto states = b.ts->size();
    return [=](RandomTape& tape) {
      std::vector<Request> out;
      for (const auto& t : random_tasks(states, len, max_task, inf, tape)) {
        out.push_back(task_request(t));
      }
      return out;
    };
  }
  if (id == "kserver") {
    n.check_keys({"type", "length"});
    if (!b.kserver) throw ConfigError(n.key_path("type"), "needs a kserver problem");
    const auto len = positive(n, "length");
    const auto points = b.kserver->metric().size();
    return [=](RandomTape& tape) {
      std::vector<Request> out;
      for (std::size_t i = 0; i < len; ++i) {
        out.push_back(Request::single(static_cast<std::int64_t>(tape.uniform(points))));
      }
      return out;
    };
  }
  if (id == "counterexample") {
    n.check_keys({"type"});
    if (!b.cx) throw ConfigError(n.key_path("type"), "needs a counterexample problem");
    const auto cx = *b.cx;
    return [cx](RandomTape& tape) -> std::vector<Request> {
      switch (cx.kind) {
        case CounterexampleKind::kBitGuess: {
          std::vector<Request> out{Request::single(1)};
          for (auto& r : bits_requests(cx.n, tape)) out.push_back(r);
          return out;
        }
        case CounterexampleKind::kLastGuess: {
          std::vector<Request> out(cx.n - 1, Request::single(0));
          out.push_back(Request::single(1 + static_cast<std::int64_t>(
                                                tape.uniform(static_cast<std::uint64_t>(cx.b)))));
          return out;
        }
        case CounterexampleKind::kTest: {
          const std::int64_t test = tape.bit() ? 1 : 0;
          std::vector<std::int64_t> bits;
          for (std::size_t i = 0; i < cx.n; ++i) bits.push_back(tape.bit() ? 1 : 0);
          return TestProblem::input(test, bits);
        }
        case CounterexampleKind::kDoubling: return bits_requests(cx.n, tape);
      }
      return {};
    };
  }
  throw ConfigError(n.key_path("type"), "unknown generator '" + id + "'");
}

}  // namespace

ExperimentConfig experiment_from(const ConfigNode& node,
                                 std::optional<std::uint64_t> seed_override) {
  node.check_keys({"seed", "trials", "problem", "algorithm", "generator", "boost", "statistics"});
  ExperimentConfig out;
  auto& spec = out.spec;
  const auto trials = node.integer("trials");
  if (trials < 1) throw ConfigError(node.key_path("trials"), "must be at least 1");
  spec.trials = static_cast<std::uint64_t>(trials);
  spec.master_seed = seed_override ? *seed_override : node.unsigned_or("seed", 0);

  const auto built = problem_from(node.child("problem"));
  spec.problem = built.problem;
  spec.problem_id = built.id;
  spec.start = built.start;
  spec.algorithm = algorithm_from(node.child("algorithm"), built, spec.algorithm_id);
  spec.generator = generator_from(node.child("generator"), built, spec.generator_id);

  Rational r_value(1);
  if (auto bn = node.optional_child("boost")) {
    bn->check_keys({"enabled", "paired", "epsilon", "r", "F", "B", "alpha", "safety_factor"});
    spec.boost = bn->boolean_or("enabled", true);
    out.paired = bn->boolean_or("paired", false);
    if (spec.boost) {
      BoostConfig c;
      c.epsilon = bn->rational("epsilon");
      if (auto r = bn->rational_or_auto("r")) {
        c.r = *r;
      } else if (spec.algorithm_id == "marking") {
        c.r = marking_ratio(built.k);
      } else {
        throw ConfigError(bn->key_path("r"), "auto is only defined for marking");
      }
      auto bound = [&](const std::string& key, std::optional<Cost> from_problem) {
        if (auto v = bn->rational_or_auto(key)) return *v;
        if (!from_problem) {
          throw ConfigError(bn->key_path(key), "the problem declares no bound; give one");
        }
        return Rational(*from_problem);
      };
      c.F = bound("F", spec.problem->bound_F());
      c.B = bound("B", spec.problem->bound_B());
      c.alpha = bn->has("alpha") ? bn->rational("alpha") : Rational(0);
      c.safety_factor = bn->has("safety_factor") ? bn->rational("safety_factor") : Rational(2);
      try {
        spec.params = derive_params(c);
      } catch (const ParameterError& e) {
        throw ConfigError(bn->path(), e.what());
      }
      r_value = c.r;
      spec.epsilon = static_cast<double>(c.epsilon.num()) / static_cast<double>(c.epsilon.den());
      spec.alpha = static_cast<double>(c.alpha.num()) / static_cast<double>(c.alpha.den());
    }
  }

  const double r_default = static_cast<double>(r_value.num()) / static_cast<double>(r_value.den()) *
                           (spec.boost ? 1 + spec.epsilon : 1.0);
  out.lemmas = spec.boost;
  if (auto sn = node.optional_child("statistics")) {
    sn->check_keys({"betas", "r_grid", "alpha_grid", "opt_buckets", "min_observations", "lemmas"});
    spec.betas = sn->reals_or("betas", spec.betas);
    out.r_grid = sn->reals_or("r_grid", {r_default});
    out.alpha_grid = sn->reals_or("alpha_grid", {0.0});
    out.opt_buckets = sn->integers_or("opt_buckets", {});
    out.min_observations = sn->unsigned_or("min_observations", kDefaultMinObservations);
    out.lemmas = spec.boost && sn->boolean_or("lemmas", true);
    if (!std::is_sorted(out.opt_buckets.begin(), out.opt_buckets.end())) {
      throw ConfigError(sn->key_path("opt_buckets"), "edges must be ascending");
    }
  } else {
    out.r_grid = {r_default};
    out.alpha_grid = {0.0};
  }
  if (out.paired && !spec.boost) {
    throw ConfigError(node.key_path("boost.paired"), "pairing needs boost.enabled");
  }
  try {
    spec.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(node.path(), e.what());
  }
  return out;
}

OracleCheckConfig oracle_config_from(const ConfigNode& n) {
  n.check_keys({"seed", "suites", "perturb", "paging_instances", "max_k", "max_universe",
                "max_length", "mts_instances", "max_states", "max_mts_length", "max_distance",
                "max_task", "kserver_instances", "truncation_instances", "max_truncation_states",
                "max_truncation_length"});
  OracleCheckConfig c;
  auto size = [&](const std::string& key, std::size_t def) {
    const auto v = n.integer_or(key, static_cast<std::int64_t>(def));
    if (v < 0) throw ConfigError(n.key_path(key), "must be nonnegative");
    return static_cast<std::size_t>(v);
  };
  c.seed = n.unsigned_or("seed", c.seed);
  c.paging_instances = size("paging_instances", c.paging_instances);
  c.max_k = size("max_k", c.max_k);
  c.max_universe = size("max_universe", c.max_universe);
  c.max_length = size("max_length", c.max_length);
  c.mts_instances = size("mts_instances", c.mts_instances);
  c.max_states = size("max_states", c.max_states);
  c.max_mts_length = size("max_mts_length", c.max_mts_length);
  c.max_distance = n.integer_or("max_distance", c.max_distance);
  c.max_task = n.integer_or("max_task", c.max_task);
  c.kserver_instances = size("kserver_instances", c.kserver_instances);
  c.truncation_instances = size("truncation_instances", c.truncation_instances);
  c.max_truncation_states = size("max_truncation_states", c.max_truncation_states);
  c.max_truncation_length = size("max_truncation_length", c.max_truncation_length);
  if (c.max_k < 1 || c.max_universe <= c.max_k || c.max_length < 1) {
    throw ConfigError(n.path(), "need 1 <= max_k < max_universe and max_length >= 1");
  }
  if (c.max_distance < 1 || c.max_task < 0) {
    throw ConfigError(n.path(), "need max_distance >= 1 and max_task >= 0");
  }
  return c;
}

}  // namespace hpboost
