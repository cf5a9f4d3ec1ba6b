#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hpboost/booster.hpp"
#include "hpboost/problem.hpp"
#include "json.hpp"

namespace hpboost {

inline constexpr int kTrialsSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;
inline constexpr double kSigmas = 3.0;
inline constexpr std::uint64_t kDefaultMinObservations = 1000;

/// Seed of trial i: mix64(master + (i + 1) * golden gamma). The algorithm tape
/// of trial i is seeded with it directly; the input tape with input_seed.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index);
std::uint64_t input_seed(std::uint64_t trial_seed);

using InputGenerator = std::function<std::vector<Request>(RandomTape&)>;

struct ExperimentSpec {
  std::string problem_id;
  std::string algorithm_id;
  std::string generator_id;
  std::shared_ptr<const Problem> problem;
  std::shared_ptr<const Algorithm> algorithm;
  StateHandle start;
  InputGenerator generator;
  bool boost = false;
  BoostParams params;
  std::uint64_t trials = 1;
  std::uint64_t master_seed = 0;
  std::vector<double> betas{1.0};
  double epsilon = 1.0;
  double alpha = 0.0;

  void validate() const;  // throws ParameterError
};

struct PhaseObservation {
  std::size_t subphases = 0;  // X_i
  Cost cost = 0;              // W_i
  std::string reset_state;
  bool final = false;
};

struct TrialRecord {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::size_t length = 0;
  Cost opt = 0;
  Cost cost = 0;
  std::optional<double> ratio;  // empty when OPT = 0
  std::size_t phases = 0;
  std::size_t resets = 0;
  std::vector<PhaseObservation> phase_obs;
  std::string error;
};

/// One trial, exactly as run_trials would produce it.
TrialRecord run_trial(const ExperimentSpec& spec, std::uint64_t index);

/// Parallel map over trial indices, merged by index. Output does not depend
/// on the thread count.
std::vector<TrialRecord> run_trials(const ExperimentSpec& spec, unsigned threads = 1);

bool any_errors(const std::vector<TrialRecord>& records);

struct Interval {
  double lo = 0;
  double hi = 0;
};

/// Two-sided Wilson score interval for successes out of n at z sigmas.
Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z = kSigmas);

struct TailRow {
  double r = 0;
  double alpha = 0;
  std::uint64_t n = 0;
  std::uint64_t exceed = 0;
  double frequency = 0;
  Interval ci;
  std::vector<double> targets;  // mean of (2+OPT)^-beta per beta
  std::vector<bool> within;     // ci.lo <= target per beta
};

struct TailEstimate {
  std::vector<double> betas;
  std::vector<TailRow> rows;
};

/// Frequency of cost >= r*OPT + alpha for every (r, alpha) pair of the grid.
TailEstimate empirical_tail(const std::vector<TrialRecord>& records,
                            const std::vector<double>& r_grid,
                            const std::vector<double>& alpha_grid,
                            const std::vector<double>& betas);

enum class Verdict { kPass, kFail, kUnderpowered };
std::string to_string(Verdict v);

struct Lemma1Row {
  std::size_t delta = 0;
  std::uint64_t n = 0;
  std::uint64_t hits = 0;
  double frequency = 0;
  Interval ci;
  double bound = 0;  // p^(delta-1)
  Verdict verdict = Verdict::kUnderpowered;
};

struct Lemma1Bin {
  std::string state;
  std::vector<Lemma1Row> rows;
};

struct Lemma1Report {
  std::vector<Lemma1Row> pooled;
  std::vector<Lemma1Bin> per_state;  // empty when more than 64 reset states
  bool pooled_only = false;
  Verdict verdict = Verdict::kUnderpowered;
};

struct MeanEstimate {
  std::uint64_t n = 0;
  double mean = 0;
  double stderr_ = 0;
  Interval ci;
};

struct Lemma2Bin {
  std::string state;
  MeanEstimate estimate;
  Verdict verdict = Verdict::kUnderpowered;
};

struct Lemma2Report {
  MeanEstimate pooled;
  double mu = 0;
  std::vector<Lemma2Bin> per_state;
  bool pooled_only = false;
  Verdict verdict = Verdict::kUnderpowered;
};

inline constexpr std::size_t kMaxStateBins = 64;

/// Phase observations exclude the final (censored) phase of every run and
/// phases of length zero.
std::vector<PhaseObservation> phase_observations(const std::vector<TrialRecord>& records);

Lemma1Report lemma1_estimator(const std::vector<TrialRecord>& records, const Rational& p,
                              std::size_t max_delta = 5,
                              std::uint64_t min_observations = kDefaultMinObservations);

Lemma2Report lemma2_estimator(const std::vector<TrialRecord>& records, const Rational& mu,
                              std::uint64_t min_observations = kDefaultMinObservations);

MeanEstimate mean_estimate(const std::vector<double>& xs, double z = kSigmas);

struct AzumaRow {
  std::uint64_t k = 0;
  std::uint64_t n = 0;
  std::uint64_t exceed = 0;
  double frequency = 0;
  Interval ci;
  std::optional<double> bound;  // empty when the bound is undefined at k
  bool within = true;
};

struct PairedRow {
  double r = 0;
  double alpha = 0;
  double raw_frequency = 0;
  Interval raw_ci;
  double boosted_frequency = 0;
  Interval boosted_ci;
  double target = 0;
  bool boosted_within = false;   // boosted ci.lo <= target
  bool boosted_below_raw = false;  // boosted frequency < raw frequency
};

struct OptBucket {
  Cost lo = 0;
  Cost hi = 0;  // inclusive
  std::uint64_t n = 0;
  std::vector<PairedRow> rows;
};

struct PairedReport {
  double beta = 1;
  std::vector<PairedRow> rows;
  std::vector<OptBucket> buckets;
  std::vector<AzumaRow> azuma;
  bool summary = false;  // boosted within target at every threshold of every bucket
};

/// Side-by-side exceedance of a raw and a boosted run of the same inputs and
/// seeds. Throws ParameterError when the specs differ in anything other than
/// the boost switch.
PairedReport compare_raw_vs_boosted(const ExperimentSpec& raw_spec,
                                    const std::vector<TrialRecord>& raw,
                                    const ExperimentSpec& boosted_spec,
                                    const std::vector<TrialRecord>& boosted,
                                    const std::vector<double>& r_grid,
                                    const std::vector<double>& alpha_grid, double beta,
                                    const std::vector<Cost>& bucket_edges);

/// One CSV row per trial with schema_version and variant columns.
std::string records_to_csv(const std::vector<TrialRecord>& records, const std::string& variant,
                           bool header = true);

nlohmann::json to_json(const Interval& ci);
nlohmann::json to_json(const TailEstimate& tail);
nlohmann::json to_json(const Lemma1Report& report);
nlohmann::json to_json(const Lemma2Report& report);
nlohmann::json to_json(const PairedReport& report);

}  // namespace hpboost
