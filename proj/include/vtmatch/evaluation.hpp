#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vtmatch/filter.hpp"
#include "vtmatch/ransac.hpp"
#include "vtmatch/synthgen.hpp"

namespace vtmatch {

struct ConfusionCounts {
  std::size_t rc = 0;  // residual, correct
  std::size_t rf = 0;  // residual, false
  std::size_t dc = 0;  // deleted, correct
  std::size_t df = 0;  // deleted, false

  std::size_t total() const { return rc + rf + dc + df; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Ratios are empty when their denominator is zero.
struct Metrics {
  std::optional<double> acc;
  std::optional<double> spe;
  std::optional<double> pre;
  std::optional<double> rec;
};

// A pair counts as correct when |T_truth(v) - v'| <= tolerance (Euclidean,
// pixels). Throws Error(kIdMismatch) when the result does not partition the
// id range of `truth`.
ConfusionCounts classify(const FilterResult& result, const GroundTruth& truth,
                         double tolerance = 2.0);

Metrics metrics(const ConfusionCounts& c);

enum class Algorithm { kVtm, kRfvtm, kRansac };

const char* algorithm_name(Algorithm a);
// Throws Error(kInvalidConfig) for unknown names.
Algorithm parse_algorithm(std::string_view name);

// Runs one algorithm with the sweep's settings.
struct AlgorithmSettings {
  FilterOptions descriptor;
  std::size_t vtm_groups = 1;
  RfvtmConfig rfvtm;
  RansacConfig ransac;
};

FilterResult run_algorithm(Algorithm a, const CorrespondenceSet& corr,
                           const AlgorithmSettings& settings,
                           std::uint64_t seed);

struct SweepConfig {
  SceneConfig base;
  std::vector<double> ratios;
  std::vector<std::size_t> inlier_counts;  // empty: base.n_inliers
  std::size_t repeats = 100;
  std::vector<Algorithm> algorithms = {Algorithm::kVtm, Algorithm::kRfvtm,
                                       Algorithm::kRansac};
  AlgorithmSettings settings;
  std::size_t threads = 1;

  void validate() const;
};

struct MetricSummary {
  std::optional<double> mean;
  std::optional<double> stddev;  // sample standard deviation
  std::size_t defined = 0;       // trials with a defined value
};

struct SweepRow {
  Algorithm algorithm = Algorithm::kVtm;
  double outlier_ratio = 0.0;
  std::size_t n_inliers = 0;
  std::size_t repeats = 0;
  MetricSummary acc, spe, pre, rec;
  double time_ms_mean = 0.0;
  std::size_t failures = 0;
};

// Per-trial outcome, for callers that need more than the summary rows.
struct TrialOutcome {
  Algorithm algorithm = Algorithm::kVtm;
  std::size_t ratio_index = 0;
  std::size_t inlier_index = 0;
  std::size_t repeat = 0;
  std::uint64_t scene_seed = 0;
  bool failed = false;
  std::string error;
  ConfusionCounts counts;
  double time_ms = 0.0;
};

// Scene seed of one trial: derived from (base seed, ratio index, repeat).
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t ratio_index,
                         std::size_t repeat);

// Monte-Carlo sweep. Rows are ordered by (inlier count, ratio, algorithm in
// config order). Per-trial algorithm errors are counted as failures.
std::vector<SweepRow> sweep(const SweepConfig& config,
                            std::vector<TrialOutcome>* trials = nullptr);

MetricSummary summarize(const std::vector<double>& values);

// CSV with header row. With include_timing = false the time column holds
// "nan" so that reruns are byte-identical.
std::string sweep_to_csv(const std::vector<SweepRow>& rows,
                         bool include_timing = true);

// VTM_THREADS if set to a positive integer, otherwise the hardware
// concurrency (at least 1).
std::size_t threads_from_env();

}  // namespace vtmatch
