#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hpboost/mts.hpp"
#include "hpboost/paging.hpp"
#include "json.hpp"

namespace hpboost {

struct OracleCheckConfig {
  std::uint64_t seed = 1;
  // belady vs brute force
  std::size_t paging_instances = 1000;
  std::size_t max_k = 3;
  std::size_t max_universe = 5;
  std::size_t max_length = 10;
  // work function vs brute force
  std::size_t mts_instances = 100;
  std::size_t max_states = 4;
  std::size_t max_mts_length = 8;
  Cost max_distance = 5;
  Cost max_task = 8;
  // k-server reduction vs belady
  std::size_t kserver_instances = 100;
  // truncation preservation
  std::size_t truncation_instances = 200;
  std::size_t max_truncation_states = 3;
  std::size_t max_truncation_length = 5;
};

/// Oracles under test; replace one to inject a perturbed oracle.
struct OracleHooks {
  std::function<std::int64_t(std::span<const PageId>, std::span<const PageId>)> belady =
      [](std::span<const PageId> c, std::span<const PageId> r) { return belady_opt(c, r); };
  std::function<Cost(const TaskSystem&, std::size_t, std::span<const TaskVector>)> workfunction =
      [](const TaskSystem& ts, std::size_t s, std::span<const TaskVector> t) {
        return workfunction_opt(ts, s, t);
      };
};

struct CheckResult {
  std::string name;
  std::size_t mismatches = 0;
  std::size_t failure_size = 0;  // size of the smallest failing instance
  nlohmann::json failure;        // that instance, null when none
};

struct SuiteResult {
  std::string suite;
  std::size_t instances = 0;
  std::vector<CheckResult> checks;

  bool passed() const;
  nlohmann::json to_json() const;
};

/// belady, workfunction, kserver, truncation.
const std::vector<std::string>& oracle_suite_names();

/// Throws std::invalid_argument for an unknown suite name.
SuiteResult run_oracle_suite(const std::string& name, const OracleCheckConfig& config,
                             const OracleHooks& hooks = {});

}  // namespace hpboost
