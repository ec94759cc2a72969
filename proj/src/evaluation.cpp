#include "vtmatch/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>

#include "vtmatch/error.hpp"
#include "vtmatch/random.hpp"

namespace vtmatch {

ConfusionCounts classify(const FilterResult& result, const GroundTruth& truth,
                         double tolerance) {
  const std::size_t n = truth.labels.size();
  std::vector<bool> seen(n, false);
  const double tol_sq = tolerance * tolerance;
  ConfusionCounts c;
  auto tally = [&](const CorrespondenceSet& set, bool residual) {
    for (std::size_t k = 0; k < set.size(); ++k) {
      const std::int64_t id = set.ids[k];
      if (id < 0 || static_cast<std::size_t>(id) >= n ||
          seen[static_cast<std::size_t>(id)]) {
        throw Error(ErrorCode::kIdMismatch,
                    "result id " + std::to_string(id) +
                        " is outside the ground truth or appears twice");
      }
      seen[static_cast<std::size_t>(id)] = true;
      const bool correct = individual_error(set.reference[k], set.sensed[k],
                                            truth.transform) <= tol_sq;
      if (residual) {
        ++(correct ? c.rc : c.rf);
      } else {
        ++(correct ? c.dc : c.df);
      }
    }
  };
  tally(result.residual, true);
  tally(result.deleted, false);
  if (c.total() != n) {
    throw Error(ErrorCode::kIdMismatch,
                "result covers " + std::to_string(c.total()) + " of " +
                    std::to_string(n) + " ground-truth pairs");
  }
  return c;
}

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Metrics metrics(const ConfusionCounts& c) {
  Metrics m;
  m.acc = ratio(c.rc + c.df, c.rc + c.df + c.dc + c.rf);
  m.spe = ratio(c.df, c.df + c.rf);
  m.pre = ratio(c.rc, c.rc + c.rf);
  m.rec = ratio(c.rc, c.rc + c.dc);
  return m;
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kVtm: return "vtm";
    case Algorithm::kRfvtm: return "rfvtm";
    case Algorithm::kRansac: return "ransac";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "vtm") return Algorithm::kVtm;
  if (name == "rfvtm") return Algorithm::kRfvtm;
  if (name == "ransac") return Algorithm::kRansac;
  throw Error(ErrorCode::kInvalidConfig,
              "unknown algorithm '" + std::string(name) +
                  "' (expected vtm, rfvtm or ransac)");
}

FilterResult run_algorithm(Algorithm a, const CorrespondenceSet& corr,
                           const AlgorithmSettings& settings,
                           std::uint64_t seed) {
  switch (a) {
    case Algorithm::kVtm:
      return vtm_subdivided(corr, settings.vtm_groups, seed,
                            settings.descriptor);
    case Algorithm::kRfvtm: {
      RfvtmConfig cfg = settings.rfvtm;
      cfg.descriptor = settings.descriptor;
      cfg.seed = seed;
      return rfvtm(corr, cfg);
    }
    case Algorithm::kRansac: {
      RansacConfig cfg = settings.ransac;
      cfg.seed = seed;
      return ransac_affine(corr, cfg);
    }
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown algorithm");
}

void SweepConfig::validate() const {
  if (repeats < 1) {
    throw Error(ErrorCode::kInvalidConfig, "repeats must be at least 1");
  }
  if (ratios.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "at least one outlier ratio needed");
  }
  if (algorithms.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "at least one algorithm needed");
  }
  for (double r : ratios) {
    SceneConfig probe = base;
    probe.outlier_ratio = r;
    probe.validate();
  }
  settings.rfvtm.validate();
  settings.ransac.validate();
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t ratio_index,
                         std::size_t repeat) {
  return derive_seed({base_seed, static_cast<std::uint64_t>(ratio_index),
                      static_cast<std::uint64_t>(repeat)});
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  s.defined = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  s.mean = mean;
  s.stddev = values.size() > 1
                 ? std::sqrt(ss / static_cast<double>(values.size() - 1))
                 : 0.0;
  return s;
}

std::vector<SweepRow> sweep(const SweepConfig& config,
                            std::vector<TrialOutcome>* trials) {
  config.validate();
  const std::vector<std::size_t> inliers =
      config.inlier_counts.empty()
          ? std::vector<std::size_t>{config.base.n_inliers}
          : config.inlier_counts;
  const std::size_t n_alg = config.algorithms.size();
  const std::size_t n_ratio = config.ratios.size();
  const std::size_t n_trials = inliers.size() * n_ratio * config.repeats;

  // Trial t covers (inlier index, ratio index, repeat) in row-major order.
  std::vector<TrialOutcome> outcomes(n_trials * n_alg);
  auto run_trial = [&](std::size_t t) {
    const std::size_t repeat = t % config.repeats;
    const std::size_t ratio_index = (t / config.repeats) % n_ratio;
    const std::size_t inlier_index = t / (config.repeats * n_ratio);
    SceneConfig scene_cfg = config.base;
    scene_cfg.n_inliers = inliers[inlier_index];
    scene_cfg.outlier_ratio = config.ratios[ratio_index];
    scene_cfg.seed = trial_seed(config.base.seed, ratio_index, repeat);
    const Scene scene = generate_scene(scene_cfg);
    for (std::size_t a = 0; a < n_alg; ++a) {
      TrialOutcome& out = outcomes[t * n_alg + a];
      out.algorithm = config.algorithms[a];
      out.ratio_index = ratio_index;
      out.inlier_index = inlier_index;
      out.repeat = repeat;
      out.scene_seed = scene_cfg.seed;
      const auto start = std::chrono::steady_clock::now();
      try {
        const FilterResult r =
            run_algorithm(out.algorithm, scene.correspondences, config.settings,
                          derive_seed({scene_cfg.seed, 0x5eedULL}));
        out.counts = classify(r, scene.truth);
      } catch (const Error& e) {
        out.failed = true;
        out.error = e.what();
      }
      out.time_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    }
  };

  const std::size_t workers =
      std::max<std::size_t>(1, std::min(config.threads, n_trials));
  if (workers == 1) {
    for (std::size_t t = 0; t < n_trials; ++t) run_trial(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next.fetch_add(1); t < n_trials;
             t = next.fetch_add(1)) {
          run_trial(t);
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }

  std::vector<SweepRow> rows;
  for (std::size_t ii = 0; ii < inliers.size(); ++ii) {
    for (std::size_t ri = 0; ri < n_ratio; ++ri) {
      for (std::size_t a = 0; a < n_alg; ++a) {
        SweepRow row;
        row.algorithm = config.algorithms[a];
        row.outlier_ratio = config.ratios[ri];
        row.n_inliers = inliers[ii];
        row.repeats = config.repeats;
        std::vector<double> acc, spe, pre, rec;
        double time_sum = 0.0;
        for (std::size_t rep = 0; rep < config.repeats; ++rep) {
          const std::size_t t = (ii * n_ratio + ri) * config.repeats + rep;
          const TrialOutcome& out = outcomes[t * n_alg + a];
          time_sum += out.time_ms;
          if (out.failed) {
            ++row.failures;
            continue;
          }
          const Metrics m = metrics(out.counts);
          if (m.acc) acc.push_back(*m.acc);
          if (m.spe) spe.push_back(*m.spe);
          if (m.pre) pre.push_back(*m.pre);
          if (m.rec) rec.push_back(*m.rec);
        }
        row.acc = summarize(acc);
        row.spe = summarize(spe);
        row.pre = summarize(pre);
        row.rec = summarize(rec);
        row.time_ms_mean = time_sum / static_cast<double>(config.repeats);
        rows.push_back(row);
      }
    }
  }
  if (trials != nullptr) *trials = std::move(outcomes);
  return rows;
}

namespace {

std::string format_number(std::optional<double> v) {
  if (!v) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

}  // namespace

std::string sweep_to_csv(const std::vector<SweepRow>& rows,
                         bool include_timing) {
  std::string out =
      "algorithm,outlier_ratio,n_inliers,repeats,acc_mean,acc_std,spe_mean,"
      "spe_std,pre_mean,pre_std,rec_mean,rec_std,time_ms_mean,failures\n";
  for (const SweepRow& r : rows) {
    char ratio_buf[32];
    std::snprintf(ratio_buf, sizeof(ratio_buf), "%.4f", r.outlier_ratio);
    out += algorithm_name(r.algorithm);
    out += ',';
    out += ratio_buf;
    out += ',' + std::to_string(r.n_inliers);
    out += ',' + std::to_string(r.repeats);
    for (const MetricSummary* m : {&r.acc, &r.spe, &r.pre, &r.rec}) {
      out += ',' + format_number(m->mean);
      out += ',' + format_number(m->stddev);
    }
    out += ',' + (include_timing ? format_number(r.time_ms_mean)
                                 : std::string("nan"));
    out += ',' + std::to_string(r.failures);
    out += '\n';
  }
  return out;
}

std::size_t threads_from_env() {
  if (const char* env = std::getenv("VTM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

}  // namespace vtmatch
