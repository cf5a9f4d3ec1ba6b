#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hpboost/booster.hpp"
#include "hpboost/cli.hpp"
#include "hpboost/counterexamples.hpp"
#include "hpboost/generators.hpp"
#include "hpboost/jss.hpp"
#include "hpboost/mcstats.hpp"
#include "hpboost/mts.hpp"
#include "hpboost/oracle.hpp"
#include "hpboost/paging.hpp"
#include "hpboost/simulate.hpp"

namespace py = pybind11;
using namespace hpboost;

namespace {

py::dict params_dict(const BoostParams& p) {
  py::dict d;
  d["C"] = p.C;
  d["D"] = p.D;
  d["p"] = p.p.to_string();
  d["mu"] = p.mu.to_string();
  d["table"] = params_table(p);
  return d;
}

BoostParams params_from(const std::string& epsilon, const std::string& r, const std::string& F,
                        const std::string& B, const std::string& alpha,
                        const std::string& safety) {
  BoostConfig c;
  c.epsilon = Rational::parse(epsilon);
  c.r = Rational::parse(r);
  c.F = Rational::parse(F);
  c.B = Rational::parse(B);
  c.alpha = Rational::parse(alpha);
  c.safety_factor = Rational::parse(safety);
  return derive_params(c);
}

TaskSystem task_system(const std::vector<std::vector<Cost>>& rows, bool metrical) {
  std::vector<Cost> flat;
  for (const auto& row : rows) {
    if (row.size() != rows.size()) throw std::invalid_argument("distance matrix must be square");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return TaskSystem(DistanceMatrix(rows.size(), flat), metrical);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Boosting randomized online algorithms from expectation to high probability";
  m.attr("__version__") = HPBOOST_VERSION;

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<ConsistencyError>(m, "ConsistencyError", PyExc_ArithmeticError);

  m.def(
      "derive_params",
      [](const std::string& epsilon, const std::string& r, const std::string& F,
         const std::string& B, const std::string& alpha, const std::string& safety) {
        return params_dict(params_from(epsilon, r, F, B, alpha, safety));
      },
      py::arg("epsilon"), py::arg("r"), py::arg("F"), py::arg("B"), py::arg("alpha") = "0",
      py::arg("safety_factor") = "2",
      "C, D, p, mu and the constraint table; rationals are given as strings like '3/2'.");

  m.def("belady_opt", [](const std::vector<PageId>& cache, const std::vector<PageId>& requests) {
    return belady_opt(cache, requests);
  });

  m.def(
      "paging_brute_force_opt",
      [](std::size_t k, std::size_t universe, const std::vector<PageId>& cache,
         const std::vector<PageId>& requests) {
        std::vector<PageId> u;
        for (std::size_t i = 1; i <= universe; ++i) u.push_back(static_cast<PageId>(i));
        PagingProblem problem(k, u);
        return brute_force_opt(problem, PagingProblem::cache_state(cache), page_requests(requests));
      },
      py::arg("k"), py::arg("universe"), py::arg("cache"), py::arg("requests"));

  m.def(
      "workfunction_opt",
      [](const std::vector<std::vector<Cost>>& distances, std::size_t start,
         const std::vector<std::vector<Cost>>& tasks) {
        return workfunction_opt(task_system(distances, false), start, tasks);
      },
      py::arg("distances"), py::arg("start"), py::arg("tasks"));

  m.def(
      "paging_stream",
      [](const std::string& kind, std::size_t k, std::size_t length, std::uint64_t seed) {
        RandomTape tape(seed);
        return paging_stream(parse_paging_stream(kind), k, length, tape);
      },
      py::arg("kind"), py::arg("k"), py::arg("length"), py::arg("seed"));

  m.def(
      "run_marking",
      [](std::size_t k, const std::vector<PageId>& requests, std::uint64_t seed) {
        PagingProblem problem(k, paging_universe(k));
        MarkingAlgorithm alg(k);
        RandomTape tape(seed);
        const auto reqs = page_requests(requests);
        const auto t =
            simulate(problem, alg, PagingProblem::cache_state(paging_initial_cache(k)), reqs, tape);
        std::vector<std::int64_t> answers;
        for (auto a : t.answers) answers.push_back(a.value);
        return py::make_tuple(t.total_cost, answers);
      },
      py::arg("k"), py::arg("requests"), py::arg("seed"),
      "Marking on pages 1..k+1 from cache 1..k: (cost, evictions, -1 for hits).");

  m.def(
      "run_boosted_marking",
      [](std::size_t k, const std::vector<PageId>& requests, std::uint64_t seed,
         const std::string& epsilon) {
        PagingProblem problem(k, paging_universe(k));
        MarkingAlgorithm alg(k);
        Rational h(0);
        for (std::size_t i = 1; i <= k; ++i) h += Rational(1, static_cast<std::int64_t>(i));
        BoostConfig c;
        c.epsilon = Rational::parse(epsilon);
        c.r = Rational(2) * h - Rational(1);
        c.F = Rational(1);
        c.B = Rational(static_cast<std::int64_t>(k));
        const auto params = derive_params(c);
        RandomTape tape(seed);
        const auto reqs = page_requests(requests);
        const auto run = boosted_run(problem, alg, PagingProblem::cache_state(paging_initial_cache(k)),
                                     reqs, tape, params);
        py::dict d;
        d["cost"] = run.trace.total_cost;
        d["opt"] = run.ledger.prefix_opt.empty() ? 0 : run.ledger.prefix_opt.back();
        d["phases"] = run.ledger.phases.size();
        d["resets"] = run.ledger.resets.size();
        d["ledger"] = run.ledger.to_json();
        return d;
      },
      py::arg("k"), py::arg("requests"), py::arg("seed"), py::arg("epsilon") = "1");

  m.def("trial_seed", &trial_seed, py::arg("master"), py::arg("index"));
  m.def(
      "wilson_interval",
      [](std::uint64_t s, std::uint64_t n, double z) {
        const auto ci = wilson_interval(s, n, z);
        return py::make_tuple(ci.lo, ci.hi);
      },
      py::arg("successes"), py::arg("n"), py::arg("z") = kSigmas);

  m.def(
      "run_oracle_suite",
      [](const std::string& name, std::uint64_t seed) {
        OracleCheckConfig c;
        c.seed = seed;
        return run_oracle_suite(name, c).to_json().dump();
      },
      py::arg("name"), py::arg("seed") = 1, "JSON text of the suite result.");

  m.def("lastguess_expected_cost",
        [](std::size_t n, std::int64_t b) { return lastguess_expected_cost(n, b).to_string(); });
  m.def("bitguess_success_probability",
        [](std::size_t n) { return bitguess_success_probability(n).to_string(); });
  m.def(
      "counterexample_distribution",
      [](const std::string& kind, std::size_t n, std::int64_t b,
         const std::vector<std::int64_t>& requests, const std::vector<std::int64_t>& start) {
        CounterexampleSpec spec{parse_counterexample_kind(kind), n, b};
        const auto problem = counterexample_problem(spec);
        std::vector<Request> reqs;
        for (auto v : requests) reqs.push_back(Request::single(v));
        const StateHandle s = start.empty() ? problem->initial_states().front() : StateHandle(start);
        const auto dist = uniform_answer_distribution(*problem, s, reqs);
        std::vector<std::pair<Cost, std::string>> atoms;
        for (const auto& [c, p] : dist.atoms) atoms.emplace_back(c, p.to_string());
        return atoms;
      },
      py::arg("kind"), py::arg("n"), py::arg("b"), py::arg("requests"),
      py::arg("start") = std::vector<std::int64_t>{},
      "Exact cost distribution of the uniform guesser as (cost, probability) pairs.");

  m.def("diagonal_count", &diagonal_count, py::arg("n"), py::arg("r"));
  m.def(
      "jss_exact_opt",
      [](const std::string& json_text) { return jss_exact_opt(JssInstance::from_json(json_text)); },
      py::arg("instance_json"));
  m.def(
      "jss_random_instance",
      [](std::size_t n, std::size_t mm, std::uint64_t seed) {
        RandomTape tape(seed);
        return JssInstance::random(n, mm, tape).to_json();
      },
      py::arg("n"), py::arg("m"), py::arg("seed"));

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"hpboost"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process: (exit code, stdout, stderr).");
}
