#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "hpboost/booster.hpp"
#include "hpboost/mcstats.hpp"
#include "hpboost/oracle.hpp"

namespace hpboost {

/// Bad or missing configuration; the message starts with the key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A YAML mapping with its key path. Accessors throw ConfigError naming the
/// full path; check_keys rejects keys outside the allowed set.
class ConfigNode {
 public:
  ConfigNode(YAML::Node node, std::string path);

  const std::string& path() const noexcept { return path_; }
  std::string key_path(const std::string& key) const;
  bool has(const std::string& key) const;
  void check_keys(const std::vector<std::string>& allowed) const;

  ConfigNode child(const std::string& key) const;
  std::optional<ConfigNode> optional_child(const std::string& key) const;

  std::string str(const std::string& key) const;
  std::string str_or(const std::string& key, const std::string& def) const;
  std::int64_t integer(const std::string& key) const;
  std::int64_t integer_or(const std::string& key, std::int64_t def) const;
  std::uint64_t unsigned_or(const std::string& key, std::uint64_t def) const;
  double real_or(const std::string& key, double def) const;
  bool boolean_or(const std::string& key, bool def) const;
  /// Integer, "p/q" or a finite decimal.
  Rational rational(const std::string& key) const;
  std::optional<Rational> rational_or_auto(const std::string& key) const;  // nullopt for "auto"
  std::vector<double> reals_or(const std::string& key, std::vector<double> def) const;
  std::vector<std::int64_t> integers_or(const std::string& key,
                                        std::vector<std::int64_t> def) const;
  std::vector<std::string> strings_or(const std::string& key, std::vector<std::string> def) const;

 private:
  YAML::Node required(const std::string& key) const;
  YAML::Node node_;
  std::string path_;
};

/// Top-level sections: experiment, params, oracle-check, jss, counterexample.
struct ConfigTree {
  std::string text;  // verbatim file contents
  YAML::Node root;

  static ConfigTree parse(const std::string& text);
  static ConfigTree load(const std::string& file);
  std::optional<ConfigNode> section(const std::string& name) const;
  ConfigNode required_section(const std::string& name) const;
};

/// FNV-1a 64 of the verbatim config text, as 16 hex digits.
std::string config_hash(const std::string& text);

BoostConfig boost_config_from(const ConfigNode& node);

struct ExperimentConfig {
  ExperimentSpec spec;  // boost flag as configured
  bool paired = false;  // also run the raw algorithm on the same seeds
  std::vector<double> r_grid;
  std::vector<double> alpha_grid;
  std::vector<Cost> opt_buckets;
  std::uint64_t min_observations = kDefaultMinObservations;
  bool lemmas = false;
};

/// Builds the problem, algorithm, generator and boost parameters of the
/// experiment section. seed_override replaces experiment.seed.
ExperimentConfig experiment_from(const ConfigNode& node,
                                 std::optional<std::uint64_t> seed_override = std::nullopt);

OracleCheckConfig oracle_config_from(const ConfigNode& node);

/// Exact 2 H_k - 1 as a fraction.
Rational marking_ratio(std::size_t k);

}  // namespace hpboost
