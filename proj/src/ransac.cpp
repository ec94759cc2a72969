#include "vtmatch/ransac.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vtmatch/error.hpp"
#include "vtmatch/random.hpp"

namespace vtmatch {

void RansacConfig::validate() const {
  if (max_iterations < 1) {
    throw Error(ErrorCode::kInvalidConfig, "max_iterations must be at least 1");
  }
  if (!(inlier_threshold > 0.0) || !std::isfinite(inlier_threshold)) {
    throw Error(ErrorCode::kInvalidConfig, "inlier_threshold must be positive");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "confidence must lie in (0, 1)");
  }
}

namespace {

std::vector<std::size_t> consensus(const CorrespondenceSet& corr,
                                   const AffineTransform& t,
                                   double threshold_sq) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < corr.size(); ++k) {
    if (individual_error(corr.reference[k], corr.sensed[k], t) <=
        threshold_sq) {
      out.push_back(k);
    }
  }
  return out;
}

std::size_t required_iterations(double inlier_fraction, double confidence,
                                std::size_t cap) {
  const double p_good = inlier_fraction * inlier_fraction * inlier_fraction;
  if (p_good <= 0.0) return cap;
  if (p_good >= 1.0) return 1;
  const double k = std::log(1.0 - confidence) / std::log(1.0 - p_good);
  if (!std::isfinite(k) || k >= static_cast<double>(cap)) return cap;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(k)));
}

}  // namespace

FilterResult ransac_affine(const CorrespondenceSet& corr,
                           const RansacConfig& config) {
  config.validate();
  validate(corr);
  const std::size_t n = corr.size();
  if (n < 3) {
    throw Error(ErrorCode::kDegenerateInput,
                "RANSAC needs at least 3 correspondences, got " +
                    std::to_string(n));
  }
  const double threshold_sq = config.inlier_threshold * config.inlier_threshold;
  const double collinear_eps = default_orientation_eps(corr);

  Rng rng(config.seed);
  std::vector<std::size_t> best;
  AffineTransform best_model;
  bool found_sample = false;
  std::size_t budget = config.max_iterations;
  std::size_t iterations = 0;
  for (; iterations < budget; ++iterations) {
    const std::size_t a = rng.index(n);
    std::size_t b = rng.index(n - 1);
    if (b >= a) ++b;
    std::size_t c = rng.index(n - 2);
    if (c >= std::min(a, b)) ++c;
    if (c >= std::max(a, b)) ++c;
    if (orient(corr.reference[a], corr.reference[b], corr.reference[c],
               collinear_eps) == Orientation::kZero) {
      continue;
    }
    const std::size_t sample[3] = {a, b, c};
    AffineTransform t;
    try {
      t = estimate_affine_lsm(corr.subset(sample));
    } catch (const Error&) {
      continue;
    }
    found_sample = true;
    std::vector<std::size_t> support = consensus(corr, t, threshold_sq);
    if (support.size() > best.size()) {
      best = std::move(support);
      best_model = t;
      const double fraction =
          static_cast<double>(best.size()) / static_cast<double>(n);
      budget = std::min(budget, required_iterations(fraction, config.confidence,
                                                    config.max_iterations));
    }
  }
  if (!found_sample) {
    throw Error(ErrorCode::kDegenerateInput,
                "no non-collinear sample found in " +
                    std::to_string(config.max_iterations) + " draws");
  }

  // Least-squares refit on the consensus, then re-select under the refit so
  // that every member lies within the threshold of the returned model.
  AffineTransform model = estimate_affine_lsm(corr.subset(best));
  std::vector<std::size_t> members = consensus(corr, model, threshold_sq);
  if (members.size() < 3) {
    model = best_model;
    members = best;
  }

  FilterResult result;
  std::vector<bool> in_consensus(n, false);
  for (std::size_t k : members) in_consensus[k] = true;
  std::vector<std::size_t> rejected;
  for (std::size_t k = 0; k < n; ++k) {
    if (!in_consensus[k]) rejected.push_back(k);
  }
  result.residual = corr.subset(members);
  result.deleted = corr.subset(rejected);
  result.model = model;
  if (!members.empty()) result.rms_error = rms_error(result.residual, model);
  result.termination = Termination::kConsensus;
  TraceRecord rec;
  rec.note = "iterations=" + std::to_string(iterations) +
             " consensus=" + std::to_string(members.size());
  result.trace.push_back(std::move(rec));
  return result;
}

}  // namespace vtmatch
