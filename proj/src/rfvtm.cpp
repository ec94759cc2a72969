#include <algorithm>
#include <cmath>
#include <string>

#include "filter_internal.hpp"
#include "vtmatch/error.hpp"

namespace vtmatch {

void RfvtmConfig::validate() const {
  if (!(th_err > 0.0) || !std::isfinite(th_err)) {
    throw Error(ErrorCode::kInvalidConfig, "th_err must be positive");
  }
  if (max_outer_iterations < 1) {
    throw Error(ErrorCode::kInvalidConfig,
                "max_outer_iterations must be at least 1");
  }
  if (m < 1) {
    throw Error(ErrorCode::kInvalidGroupCount, "group count must be at least 1");
  }
}

namespace {

struct ModelFit {
  AffineTransform theta;
  double max_error = 0.0;  // pixels^2
  double rms = 0.0;        // pixels
};

ModelFit fit_residual(const CorrespondenceSet& residual) {
  if (residual.size() < 3) {
    throw Error(ErrorCode::kDegenerateResidual,
                "residual set has " + std::to_string(residual.size()) +
                    " pairs; at least 3 non-collinear pairs are needed to "
                    "estimate the affine model");
  }
  ModelFit fit;
  try {
    fit.theta = estimate_affine_lsm(residual);
  } catch (const Error& e) {
    throw Error(ErrorCode::kDegenerateResidual,
                std::string("residual set is degenerate: ") + e.what());
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < residual.size(); ++k) {
    const double e =
        individual_error(residual.reference[k], residual.sensed[k], fit.theta);
    fit.max_error = std::max(fit.max_error, e);
    sum += e;
  }
  fit.rms = std::sqrt(sum / static_cast<double>(residual.size()));
  return fit;
}

bool qualifies(const CorrespondenceSet& residual, const ModelFit& fit,
               const Point2& ref, const Point2& sen, double eps,
               bool reflected) {
  // Error bound first: it is O(1) and rejects most gross outliers.
  if (individual_error(ref, sen, fit.theta) > fit.max_error) return false;
  return candidate_consistent(residual, ref, sen, eps, reflected);
}

void erase_positions(std::vector<std::size_t>& from,
                     const std::vector<std::size_t>& drop) {
  std::erase_if(from, [&](std::size_t p) {
    return std::find(drop.begin(), drop.end(), p) != drop.end();
  });
}

void merge_positions(std::vector<std::size_t>& into,
                     const std::vector<std::size_t>& add) {
  into.insert(into.end(), add.begin(), add.end());
  std::sort(into.begin(), into.end());
}

}  // namespace

std::vector<std::int64_t> recover_candidates(const CorrespondenceSet& residual,
                                             const CorrespondenceSet& deleted,
                                             const AffineTransform& theta,
                                             double eps, bool reflected) {
  validate(residual);
  validate(deleted);
  ModelFit fit = fit_residual(residual);
  fit.theta = theta;
  fit.max_error = 0.0;
  for (std::size_t k = 0; k < residual.size(); ++k) {
    fit.max_error = std::max(
        fit.max_error,
        individual_error(residual.reference[k], residual.sensed[k], theta));
  }
  std::vector<std::int64_t> out;
  for (std::size_t k = 0; k < deleted.size(); ++k) {
    if (qualifies(residual, fit, deleted.reference[k], deleted.sensed[k], eps,
                  reflected)) {
      out.push_back(deleted.ids[k]);
    }
  }
  return out;
}

FilterResult rfvtm(const CorrespondenceSet& corr, const RfvtmConfig& config) {
  config.validate();
  validate(corr);
  const FilterOptions options = detail::resolve_options(corr, config.descriptor);
  const std::size_t n = corr.size();

  FilterResult result;
  std::vector<std::size_t> residual = detail::iota_positions(n);
  if (n < 4) {
    detail::vtm_pass(corr, residual, options, 0, 0, result.trace);
    result.residual = corr;
    result.termination = Termination::kPassthrough;
    return result;
  }

  std::vector<std::size_t> pool;  // deleted positions, deletion order
  std::vector<bool> ever_recovered(n, false);
  std::vector<std::size_t> previous;
  bool have_previous = false;
  Termination reason = Termination::kIterationCap;

  auto run_pass = [&](int outer, bool subdivide) {
    detail::PassOutcome pass =
        subdivide ? detail::subdivided_pass(corr, residual, config.m,
                                            config.seed, options, outer,
                                            result.trace)
                  : detail::vtm_pass(corr, residual, options, outer, 0,
                                     result.trace);
    residual = std::move(pass.residual);
    pool.insert(pool.end(), pass.removed.begin(), pass.removed.end());
    result.orientation_evaluations += pass.evaluations;
    if (!pass.passthrough) result.reflected = pass.reflected;
  };

  for (std::size_t outer = 0; outer < config.max_outer_iterations; ++outer) {
    const int it = static_cast<int>(outer);
    if (outer == 0 && config.m > 1) {
      run_pass(it, true);
      // Groups are filtered independently; one pass over the merged residual
      // restores identical descriptors before recovery.
      run_pass(it, false);
    } else {
      run_pass(it, false);
    }

    const CorrespondenceSet residual_set = corr.subset(residual);
    const ModelFit fit = fit_residual(residual_set);

    std::vector<std::size_t> recovered;
    for (std::size_t p : pool) {
      if (qualifies(residual_set, fit, corr.reference[p], corr.sensed[p],
                    options.eps, result.reflected)) {
        recovered.push_back(p);
      }
    }

    TraceRecord rec;
    rec.outer_iteration = it;
    rec.rms_error = fit.rms;
    rec.max_error = fit.max_error;
    for (std::size_t p : recovered) rec.recovered_ids.push_back(corr.ids[p]);
    rec.note = "recovery";
    result.trace.push_back(std::move(rec));

    if (fit.rms < config.th_err) {
      reason = Termination::kThresholdReached;
      if (!recovered.empty()) {
        for (std::size_t p : recovered) ever_recovered[p] = true;
        erase_positions(pool, recovered);
        merge_positions(residual, recovered);
        run_pass(it, false);
      }
      break;
    }
    if (recovered.empty()) {
      reason = Termination::kNoRecovery;
      break;
    }
    if (have_previous && previous == residual) {
      reason = Termination::kStalled;
      break;
    }
    if (outer + 1 == config.max_outer_iterations) {
      reason = Termination::kIterationCap;
      break;
    }
    previous = residual;
    have_previous = true;
    for (std::size_t p : recovered) ever_recovered[p] = true;
    erase_positions(pool, recovered);
    merge_positions(residual, recovered);
  }

  result.termination = reason;
  result.residual = corr.subset(residual);
  result.deleted = corr.subset(pool);
  std::vector<std::size_t> kept_recovered;
  for (std::size_t p : residual) {
    if (ever_recovered[p]) kept_recovered.push_back(p);
  }
  result.recovered = corr.subset(kept_recovered);
  try {
    const ModelFit final_fit = fit_residual(result.residual);
    result.model = final_fit.theta;
    result.rms_error = final_fit.rms;
  } catch (const Error&) {
    // The final pass after a recovery can in principle leave a degenerate
    // set; the residual is still reported.
  }
  return result;
}

}  // namespace vtmatch
