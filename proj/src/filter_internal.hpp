#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vtmatch/filter.hpp"

namespace vtmatch::detail {

struct PassOutcome {
  std::vector<std::size_t> residual;  // positions into corr, ascending
  std::vector<std::size_t> removed;   // positions into corr, removal order
  std::uint64_t evaluations = 0;
  bool reflected = false;
  bool passthrough = false;
};

// Resolves a negative eps to the default tolerance of the whole input.
FilterOptions resolve_options(const CorrespondenceSet& corr,
                              const FilterOptions& options);

// VTM over the pairs at `positions` (ascending).
PassOutcome vtm_pass(const CorrespondenceSet& corr,
                     std::span<const std::size_t> positions,
                     const FilterOptions& options, int outer, int group,
                     std::vector<TraceRecord>& trace);

// VTM over m seeded random groups of `positions`, results merged.
PassOutcome subdivided_pass(const CorrespondenceSet& corr,
                            std::span<const std::size_t> positions,
                            std::size_t m, std::uint64_t seed,
                            const FilterOptions& options, int outer,
                            std::vector<TraceRecord>& trace);

std::vector<std::size_t> iota_positions(std::size_t n);

}  // namespace vtmatch::detail
