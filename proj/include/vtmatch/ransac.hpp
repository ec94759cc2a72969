#pragma once

#include <cstddef>
#include <cstdint>

#include "vtmatch/filter.hpp"
#include "vtmatch/geometry.hpp"

namespace vtmatch {

struct RansacConfig {
  std::size_t max_iterations = 10000;
  double inlier_threshold = 2.0;  // residual distance, pixels
  double confidence = 0.99;       // adaptive early exit
  std::uint64_t seed = 0;

  void validate() const;
};

// Affine RANSAC over minimal 3-pair samples. The returned FilterResult holds
// the consensus set (residual) under the least-squares refit stored in
// `model`; every residual pair lies within inlier_threshold of that model.
// Throws Error(kDegenerateInput) for fewer than 3 pairs or when no
// non-collinear sample is found within max_iterations draws.
FilterResult ransac_affine(const CorrespondenceSet& corr,
                           const RansacConfig& config = {});

}  // namespace vtmatch
