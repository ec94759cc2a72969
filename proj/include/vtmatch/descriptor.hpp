#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vtmatch/geometry.hpp"
#include "vtmatch/packed_signs.hpp"

namespace vtmatch {

struct DescriptorOptions {
  // Orientation tolerance; a negative value selects
  // default_orientation_eps() of the input.
  double eps = -1.0;
  // Compare against negated sensed signs when the sensed graph looks like a
  // mirror image of the reference graph.
  bool handle_reflections = true;
  // Largest vertex count accepted by TrichotomyState::build. Sign storage is
  // roughly n^3 / 4 bytes per graph.
  std::size_t max_vertices = 600;
};

// Vertex trichotomy descriptors of a reference and a sensed graph together
// with the accumulated disparity matrix
//
//   dM(i, j) = #{ k alive : M_{i->j}[k] != M'_{i->j}[k] },
//
// maintained incrementally under vertex removal. Vertices are addressed by
// their position in the correspondence set the state was built from.
class TrichotomyState {
 public:
  // Throws Error(kTooFewVertices) for n < 4 and Error(kBudgetExceeded) when
  // n exceeds options.max_vertices.
  static TrichotomyState build(const CorrespondenceSet& corr,
                               const DescriptorOptions& options = {});

  std::size_t n_total() const { return n_; }
  std::size_t alive_count() const { return alive_count_; }
  bool is_alive(std::size_t v) const { return v < n_ && alive_[v] != 0; }
  double eps() const { return eps_; }

  // True when sensed signs are compared negated (mirrored correspondence).
  bool reflected() const { return reflected_; }

  // Stored signs M_{i->j}[k] and M'_{i->j}[k]; entries with repeated or
  // removed indices read as zero.
  Orientation sign_ref(std::size_t i, std::size_t j, std::size_t k) const {
    return live_triple(i, j, k) ? signs_ref_.get(i, j, k) : Orientation::kZero;
  }
  Orientation sign_sen(std::size_t i, std::size_t j, std::size_t k) const {
    return live_triple(i, j, k) ? signs_sen_.get(i, j, k) : Orientation::kZero;
  }

  std::uint32_t disparity(std::size_t i, std::size_t j) const {
    return disparity_[i * n_ + j];
  }
  bool disparity_is_zero() const { return disparity_sum_ == 0; }
  std::uint64_t disparity_sum() const { return disparity_sum_; }

  // Column sum over alive i of dM(i, j). Throws Error(kUnknownVertex) when j
  // is out of range or removed.
  std::uint64_t disparity_total(std::size_t j) const;

  // Every alive vertex attaining the positive maximum of disparity_total, in
  // increasing position order; empty when dM is identically zero.
  std::vector<std::size_t> select_outliers() const;

  // Deletes every reference to d from both sign tensors and from dM.
  void remove_vertex(std::size_t d);

  // Whether re-adding the removed vertex d keeps both descriptors identical:
  // M_{i->j}[d], M_{d->j}[i] and M_{i->d}[j] agree across the graphs for all
  // alive i != j. Evaluated directly from `corr` (the set the state was
  // built from) without touching the state.
  bool check_candidate_consistency(const CorrespondenceSet& corr,
                                   std::size_t d) const;

  const std::vector<std::size_t>& removal_log() const { return removal_log_; }
  std::vector<std::size_t> alive_vertices() const;

  // Orientation predicate evaluations performed by build().
  std::uint64_t orientation_evaluations() const { return evaluations_; }

 private:
  TrichotomyState() = default;

  void require_known(std::size_t v) const;
  bool live_triple(std::size_t i, std::size_t j, std::size_t k) const {
    return i != j && j != k && i != k && is_alive(i) && is_alive(j) &&
           is_alive(k);
  }

  std::size_t n_ = 0;
  std::size_t alive_count_ = 0;
  double eps_ = 0.0;
  bool reflected_ = false;
  std::vector<std::uint8_t> alive_;
  PackedSignTensor signs_ref_;
  PackedSignTensor signs_sen_;
  std::vector<std::uint32_t> pair_first_;
  std::vector<std::uint32_t> pair_second_;
  std::vector<std::uint32_t> disparity_;
  std::vector<std::uint64_t> column_totals_;
  std::uint64_t disparity_sum_ = 0;
  std::vector<std::size_t> removal_log_;
  std::uint64_t evaluations_ = 0;
};

// Consistency test of one candidate pair against a residual set whose
// descriptors already agree; the free-standing form of
// TrichotomyState::check_candidate_consistency. `reflected` negates the
// sensed signs. Residual sets smaller than 3 accept every candidate.
bool candidate_consistent(const CorrespondenceSet& residual,
                          const Point2& candidate_ref,
                          const Point2& candidate_sen, double eps,
                          bool reflected = false);

}  // namespace vtmatch
