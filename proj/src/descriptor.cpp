#include "vtmatch/descriptor.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "vtmatch/error.hpp"

namespace vtmatch {
namespace {

inline bool same_sign(Orientation a, Orientation b, bool reflected) {
  return a == (reflected ? negate(b) : b);
}

inline std::uint8_t negate_code(std::uint8_t c) {
  return static_cast<std::uint8_t>(((c & 1U) << 1) | (c >> 1));
}

// Structure-of-arrays copy of one point cloud for the vectorized build loop.
struct Cloud {
  std::vector<double> x;
  std::vector<double> y;

  explicit Cloud(std::span<const Point2> pts) : x(pts.size()), y(pts.size()) {
    for (std::size_t k = 0; k < pts.size(); ++k) {
      x[k] = pts[k].x;
      y[k] = pts[k].y;
    }
  }
};

// Writes the sign code of orient(v_i, v_j, v_k) for every pair i < j into
// `codes` (lexicographic pair order). Pairs with k as an endpoint get code 0
// without evaluation. Returns the number of orientations evaluated.
std::uint64_t probe_codes(const Cloud& c, std::size_t k, double eps,
                          std::span<std::uint8_t> codes) {
  const std::size_t n = c.x.size();
  const double* x = c.x.data();
  const double* y = c.y.data();
  std::uint64_t evaluated = 0;
  std::size_t p = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t len = n - i - 1;
    std::uint8_t* out = codes.data() + p;
    p += len;
    if (i == k) {
      std::fill(out, out + len, std::uint8_t{0});
      continue;
    }
    const double xi = x[i];
    const double yi = y[i];
    const double kx = x[k] - xi;
    const double ky = y[k] - yi;
    auto segment = [&](std::size_t from, std::size_t to) {
      for (std::size_t j = from; j < to; ++j) {
        // Same operation order as orientation_determinant(v_i, v_j, v_k).
        const double det = (x[j] - xi) * ky - (y[j] - yi) * kx;
        out[j - i - 1] = static_cast<std::uint8_t>(
            static_cast<unsigned>(det > eps) |
            (static_cast<unsigned>(det < -eps) << 1));
      }
      evaluated += to - from;
    };
    if (k > i && k < n) {
      segment(i + 1, k);
      out[k - i - 1] = 0;
      segment(k + 1, n);
    } else {
      segment(i + 1, n);
    }
  }
  return evaluated;
}

void pack_codes(std::span<const std::uint8_t> codes,
                std::span<std::uint64_t> row) {
  const std::size_t n = codes.size();
  for (std::size_t w = 0; w < row.size(); ++w) {
    const std::size_t begin = w * 32;
    const std::size_t end = std::min(n, begin + 32);
    std::uint64_t word = 0;
    for (std::size_t f = begin; f < end; ++f) {
      word |= static_cast<std::uint64_t>(codes[f]) << (2 * (f - begin));
    }
    row[w] = word;
  }
}

}  // namespace

TrichotomyState TrichotomyState::build(const CorrespondenceSet& corr,
                                       const DescriptorOptions& options) {
  validate(corr);
  const std::size_t n = corr.size();
  if (n < 4) {
    throw Error(ErrorCode::kTooFewVertices,
                "trichotomy descriptor needs at least 4 vertices, got " +
                    std::to_string(n));
  }
  if (n > options.max_vertices) {
    throw Error(ErrorCode::kBudgetExceeded,
                std::to_string(n) + " vertices exceed the descriptor cap of " +
                    std::to_string(options.max_vertices) +
                    "; subdivide the input into groups");
  }

  TrichotomyState s;
  s.n_ = n;
  s.alive_count_ = n;
  s.eps_ = options.eps < 0.0 ? default_orientation_eps(corr) : options.eps;
  s.alive_.assign(n, 1);
  s.signs_ref_ = PackedSignTensor(n);
  s.signs_sen_ = PackedSignTensor(n);
  s.disparity_.assign(n * n, 0);
  s.column_totals_.assign(n, 0);

  const std::size_t pairs = s.signs_ref_.pair_count();
  s.pair_first_.resize(pairs);
  s.pair_second_.resize(pairs);
  for (std::size_t i = 0, p = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++p) {
      s.pair_first_[p] = static_cast<std::uint32_t>(i);
      s.pair_second_[p] = static_cast<std::uint32_t>(j);
    }
  }

  const Cloud ref(corr.reference);
  const Cloud sen(corr.sensed);
  std::vector<std::uint8_t> codes_ref(pairs);
  std::vector<std::uint8_t> codes_sen(pairs);
  std::vector<std::uint32_t> direct(pairs, 0);
  std::vector<std::uint32_t> flipped(pairs, 0);
  std::uint64_t evaluations = 0;
  for (std::size_t k = 0; k < n; ++k) {
    evaluations += probe_codes(ref, k, s.eps_, codes_ref);
    evaluations += probe_codes(sen, k, s.eps_, codes_sen);
    for (std::size_t p = 0; p < pairs; ++p) {
      direct[p] += codes_ref[p] != codes_sen[p];
      flipped[p] += codes_ref[p] != negate_code(codes_sen[p]);
    }
    pack_codes(codes_ref, s.signs_ref_.row(k));
    pack_codes(codes_sen, s.signs_sen_.row(k));
  }
  s.evaluations_ = evaluations;

  std::uint64_t direct_total = 0;
  std::uint64_t flipped_total = 0;
  for (std::size_t p = 0; p < pairs; ++p) {
    direct_total += direct[p];
    flipped_total += flipped[p];
  }
  // A mirrored scene flips every inlier triple, so the negated comparison
  // wins by a wide margin; for orientation-preserving scenes it never does.
  s.reflected_ = options.handle_reflections && 2 * flipped_total < direct_total;
  const std::vector<std::uint32_t>& chosen = s.reflected_ ? flipped : direct;

  for (std::size_t p = 0; p < pairs; ++p) {
    const std::size_t i = s.pair_first_[p];
    const std::size_t j = s.pair_second_[p];
    const std::uint32_t v = chosen[p];
    s.disparity_[i * n + j] = v;
    s.disparity_[j * n + i] = v;
    s.column_totals_[i] += v;
    s.column_totals_[j] += v;
    s.disparity_sum_ += 2 * static_cast<std::uint64_t>(v);
  }
  return s;
}

void TrichotomyState::require_known(std::size_t v) const {
  if (v >= n_) {
    throw Error(ErrorCode::kUnknownVertex,
                "vertex " + std::to_string(v) + " is not part of the state");
  }
}

std::uint64_t TrichotomyState::disparity_total(std::size_t j) const {
  require_known(j);
  if (!alive_[j]) {
    throw Error(ErrorCode::kUnknownVertex,
                "vertex " + std::to_string(j) + " has been removed");
  }
  return column_totals_[j];
}

std::vector<std::size_t> TrichotomyState::select_outliers() const {
  std::vector<std::size_t> out;
  if (disparity_sum_ == 0) return out;
  std::uint64_t best = 0;
  for (std::size_t j = 0; j < n_; ++j) {
    if (alive_[j]) best = std::max(best, column_totals_[j]);
  }
  for (std::size_t j = 0; j < n_; ++j) {
    if (alive_[j] && column_totals_[j] == best) out.push_back(j);
  }
  return out;
}

std::vector<std::size_t> TrichotomyState::alive_vertices() const {
  std::vector<std::size_t> out;
  out.reserve(alive_count_);
  for (std::size_t v = 0; v < n_; ++v) {
    if (alive_[v]) out.push_back(v);
  }
  return out;
}

void TrichotomyState::remove_vertex(std::size_t d) {
  require_known(d);
  if (!alive_[d]) {
    throw Error(ErrorCode::kAlreadyRemoved,
                "vertex " + std::to_string(d) + " was already removed");
  }
  alive_[d] = 0;
  --alive_count_;
  removal_log_.push_back(d);

  // d as probe k: drop its contribution to every surviving pair.
  auto row_ref = signs_ref_.row(d);
  auto row_sen = signs_sen_.row(d);
  for (std::size_t w = 0; w < row_ref.size(); ++w) {
    const std::uint64_t sen_word =
        reflected_ ? PackedSignTensor::negate_word(row_sen[w]) : row_sen[w];
    std::uint64_t mask = PackedSignTensor::mismatch_mask(row_ref[w], sen_word);
    while (mask != 0) {
      const std::size_t p = w * 32 + std::countr_zero(mask) / 2;
      mask &= mask - 1;
      const std::size_t i = pair_first_[p];
      const std::size_t j = pair_second_[p];
      if (!alive_[i] || !alive_[j]) continue;
      --disparity_[i * n_ + j];
      --disparity_[j * n_ + i];
      --column_totals_[i];
      --column_totals_[j];
      disparity_sum_ -= 2;
    }
  }
  signs_ref_.clear_row(d);
  signs_sen_.clear_row(d);

  // d as an endpoint of a trichotomy vector. Those fields stay in the other
  // probe rows but are never read again: sign accessors and later removals
  // skip pairs with a dead endpoint.
  for (std::size_t i = 0; i < n_; ++i) {
    if (i == d) continue;
    const std::uint32_t v = disparity_[i * n_ + d];
    if (v != 0) {
      column_totals_[i] -= v;
      column_totals_[d] -= v;
      disparity_sum_ -= 2 * static_cast<std::uint64_t>(v);
      disparity_[i * n_ + d] = 0;
      disparity_[d * n_ + i] = 0;
    }
  }
}

bool TrichotomyState::check_candidate_consistency(const CorrespondenceSet& corr,
                                                  std::size_t d) const {
  require_known(d);
  if (alive_[d]) {
    throw Error(ErrorCode::kVertexAlive,
                "vertex " + std::to_string(d) + " is still in the residual set");
  }
  if (corr.size() != n_) {
    throw Error(ErrorCode::kInvalidInput,
                "correspondence set does not match the trichotomy state");
  }
  const std::vector<std::size_t> alive = alive_vertices();
  return candidate_consistent(corr.subset(alive), corr.reference[d],
                              corr.sensed[d], eps_, reflected_);
}

bool candidate_consistent(const CorrespondenceSet& residual,
                          const Point2& candidate_ref,
                          const Point2& candidate_sen, double eps,
                          bool reflected) {
  const auto& ref = residual.reference;
  const auto& sen = residual.sensed;
  const std::size_t n = residual.size();
  // With the candidate there would be at most 3 vertices, below the size at
  // which descriptors discriminate anything.
  if (n < 3) return true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      // M_{i->j}[d]
      if (!same_sign(orient(ref[i], ref[j], candidate_ref, eps),
                     orient(sen[i], sen[j], candidate_sen, eps), reflected)) {
        return false;
      }
      // M_{d->j}[i]
      if (!same_sign(orient(candidate_ref, ref[j], ref[i], eps),
                     orient(candidate_sen, sen[j], sen[i], eps), reflected)) {
        return false;
      }
      // M_{i->d}[j]
      if (!same_sign(orient(ref[i], candidate_ref, ref[j], eps),
                     orient(sen[i], candidate_sen, sen[j], eps), reflected)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace vtmatch
