#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vtmatch/descriptor.hpp"
#include "vtmatch/geometry.hpp"

namespace vtmatch {

enum class Termination {
  kPassthrough,      // fewer than 4 vertices, nothing to filter
  kConsistent,       // VTM reached identical descriptors
  kThresholdReached, // RFVTM: RMS error below th_err
  kNoRecovery,       // RFVTM: no deleted candidate qualified
  kStalled,          // RFVTM: recoveries were undone by the next VTM pass
  kIterationCap,     // RFVTM: max_outer_iterations reached
  kConsensus,        // RANSAC finished
};

const char* termination_name(Termination t);

// One VTM removal step or one RFVTM recovery step.
struct TraceRecord {
  int outer_iteration = 0;
  int group = 0;  // subdivision group, 0 when not subdivided
  std::vector<std::int64_t> removed_ids;
  std::uint64_t max_disparity = 0;
  std::vector<std::int64_t> recovered_ids;
  std::optional<double> rms_error;
  std::optional<double> max_error;
  std::string note;
};

struct FilterResult {
  CorrespondenceSet residual;   // input order preserved
  CorrespondenceSet deleted;    // deletion order
  CorrespondenceSet recovered;  // recovered by RFVTM and still residual
  std::vector<TraceRecord> trace;
  std::optional<AffineTransform> model;
  std::optional<double> rms_error;
  Termination termination = Termination::kConsistent;
  bool reflected = false;
  // Orientation evaluations spent building descriptors.
  std::uint64_t orientation_evaluations = 0;
};

using FilterOptions = DescriptorOptions;

// Greedy vertex trichotomy matching: repeatedly removes every vertex of
// maximal accumulated disparity until both descriptors agree. Inputs with
// fewer than 4 pairs pass through unchanged.
FilterResult vtm(const CorrespondenceSet& corr,
                 const FilterOptions& options = {});

// Runs vtm independently on m seeded random groups of near-equal size and
// merges the outcomes. m = 1 is exactly vtm(corr). Throws
// Error(kInvalidGroupCount) unless 1 <= m <= corr.size().
FilterResult vtm_subdivided(const CorrespondenceSet& corr, std::size_t m,
                            std::uint64_t seed,
                            const FilterOptions& options = {});

struct RfvtmConfig {
  double th_err = 0.5;  // pixels
  std::size_t max_outer_iterations = 50;
  std::size_t m = 1;  // groups for the first VTM pass
  std::uint64_t seed = 0;
  FilterOptions descriptor;

  void validate() const;
};

// Deleted pairs that may rejoin the residual set under model theta: each
// candidate, taken alone, keeps the descriptors identical and has squared
// error no larger than the worst residual pair. Returns candidate ids in the
// order of `deleted`. Throws Error(kDegenerateResidual) when the residual
// set has fewer than 3 pairs.
std::vector<std::int64_t> recover_candidates(const CorrespondenceSet& residual,
                                             const CorrespondenceSet& deleted,
                                             const AffineTransform& theta,
                                             double eps, bool reflected = false);

// VTM alternated with restricted recovery of deleted candidates until the
// RMS error drops below th_err or no further progress is possible.
FilterResult rfvtm(const CorrespondenceSet& corr, const RfvtmConfig& config = {});

}  // namespace vtmatch
