#include <algorithm>
#include <numeric>
#include <string>

#include "filter_internal.hpp"
#include "vtmatch/error.hpp"
#include "vtmatch/random.hpp"

namespace vtmatch {

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::kPassthrough: return "passthrough";
    case Termination::kConsistent: return "consistent";
    case Termination::kThresholdReached: return "threshold_reached";
    case Termination::kNoRecovery: return "no_recovery";
    case Termination::kStalled: return "stalled";
    case Termination::kIterationCap: return "iteration_cap";
    case Termination::kConsensus: return "consensus";
  }
  return "unknown";
}

namespace detail {

std::vector<std::size_t> iota_positions(std::size_t n) {
  std::vector<std::size_t> out(n);
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

FilterOptions resolve_options(const CorrespondenceSet& corr,
                              const FilterOptions& options) {
  FilterOptions out = options;
  if (out.eps < 0.0) out.eps = default_orientation_eps(corr);
  return out;
}

PassOutcome vtm_pass(const CorrespondenceSet& corr,
                     std::span<const std::size_t> positions,
                     const FilterOptions& options, int outer, int group,
                     std::vector<TraceRecord>& trace) {
  PassOutcome out;
  if (positions.size() < 4) {
    out.residual.assign(positions.begin(), positions.end());
    out.passthrough = true;
    TraceRecord rec;
    rec.outer_iteration = outer;
    rec.group = group;
    rec.note = "fewer than 4 pairs; descriptor is vacuous, input passed through";
    trace.push_back(std::move(rec));
    return out;
  }

  const CorrespondenceSet sub = corr.subset(positions);
  TrichotomyState state = TrichotomyState::build(sub, options);
  out.evaluations = state.orientation_evaluations();
  out.reflected = state.reflected();
  if (state.reflected()) {
    TraceRecord rec;
    rec.outer_iteration = outer;
    rec.group = group;
    rec.note = "mirrored correspondence detected; sensed signs negated";
    trace.push_back(std::move(rec));
  }

  while (!state.disparity_is_zero()) {
    const std::vector<std::size_t> outliers = state.select_outliers();
    if (outliers.empty()) break;
    TraceRecord rec;
    rec.outer_iteration = outer;
    rec.group = group;
    rec.max_disparity = state.disparity_total(outliers.front());
    if (outliers.size() > 1) {
      rec.note = std::to_string(outliers.size()) + " vertices tied at maximum";
    }
    for (std::size_t local : outliers) {
      rec.removed_ids.push_back(sub.ids[local]);
      state.remove_vertex(local);
    }
    trace.push_back(std::move(rec));
  }

  for (std::size_t local : state.alive_vertices()) {
    out.residual.push_back(positions[local]);
  }
  for (std::size_t local : state.removal_log()) {
    out.removed.push_back(positions[local]);
  }
  return out;
}

PassOutcome subdivided_pass(const CorrespondenceSet& corr,
                            std::span<const std::size_t> positions,
                            std::size_t m, std::uint64_t seed,
                            const FilterOptions& options, int outer,
                            std::vector<TraceRecord>& trace) {
  const std::size_t n = positions.size();
  std::vector<std::size_t> order(positions.begin(), positions.end());
  Rng rng(seed);
  rng.shuffle(order.begin(), order.end());

  PassOutcome out;
  out.passthrough = true;
  for (std::size_t g = 0; g < m; ++g) {
    const std::size_t begin = g * n / m;
    const std::size_t end = (g + 1) * n / m;
    std::vector<std::size_t> group(order.begin() + static_cast<long>(begin),
                                   order.begin() + static_cast<long>(end));
    std::sort(group.begin(), group.end());
    PassOutcome part = vtm_pass(corr, group, options, outer,
                                static_cast<int>(g + 1), trace);
    out.residual.insert(out.residual.end(), part.residual.begin(),
                        part.residual.end());
    out.removed.insert(out.removed.end(), part.removed.begin(),
                       part.removed.end());
    out.evaluations += part.evaluations;
    out.reflected = out.reflected || part.reflected;
    out.passthrough = out.passthrough && part.passthrough;
  }
  std::sort(out.residual.begin(), out.residual.end());
  return out;
}

}  // namespace detail

namespace {

FilterResult to_result(const CorrespondenceSet& corr,
                       const detail::PassOutcome& pass,
                       std::vector<TraceRecord> trace) {
  FilterResult result;
  result.residual = corr.subset(pass.residual);
  result.deleted = corr.subset(pass.removed);
  result.trace = std::move(trace);
  result.termination =
      pass.passthrough ? Termination::kPassthrough : Termination::kConsistent;
  result.reflected = pass.reflected;
  result.orientation_evaluations = pass.evaluations;
  return result;
}

}  // namespace

FilterResult vtm(const CorrespondenceSet& corr, const FilterOptions& options) {
  validate(corr);
  const FilterOptions resolved = detail::resolve_options(corr, options);
  const std::vector<std::size_t> all = detail::iota_positions(corr.size());
  std::vector<TraceRecord> trace;
  const detail::PassOutcome pass =
      detail::vtm_pass(corr, all, resolved, 0, 0, trace);
  return to_result(corr, pass, std::move(trace));
}

FilterResult vtm_subdivided(const CorrespondenceSet& corr, std::size_t m,
                            std::uint64_t seed, const FilterOptions& options) {
  validate(corr);
  if (m < 1 || m > corr.size()) {
    throw Error(ErrorCode::kInvalidGroupCount,
                "group count " + std::to_string(m) + " must lie in [1, " +
                    std::to_string(corr.size()) + "]");
  }
  if (m == 1) return vtm(corr, options);
  const FilterOptions resolved = detail::resolve_options(corr, options);
  const std::vector<std::size_t> all = detail::iota_positions(corr.size());
  std::vector<TraceRecord> trace;
  const detail::PassOutcome pass =
      detail::subdivided_pass(corr, all, m, seed, resolved, 0, trace);
  return to_result(corr, pass, std::move(trace));
}

}  // namespace vtmatch
