#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vtmatch/geometry.hpp"

namespace vtmatch {

// Orientation signs M_{i->j}[k], two bits per entry (00 zero, 01 positive,
// 10 negative), laid out probe-major: row k holds one field per unordered
// pair i < j in lexicographic pair order. Entries with i > j are the
// negation of the stored (j, i) entry, so n * n(n-1)/2 fields are kept.
//
// Probe-major rows make "every pair, one probe" a contiguous scan, which is
// the access pattern of vertex removal.
class PackedSignTensor {
 public:
  static constexpr std::uint64_t kLowBits = 0x5555555555555555ULL;

  PackedSignTensor() = default;
  explicit PackedSignTensor(std::size_t n)
      : n_(n),
        pairs_(n < 2 ? 0 : n * (n - 1) / 2),
        words_per_row_((pairs_ + 31) / 32),
        data_(n * words_per_row_, 0) {}

  std::size_t vertex_count() const { return n_; }
  std::size_t pair_count() const { return pairs_; }
  std::size_t words_per_row() const { return words_per_row_; }
  std::size_t memory_bytes() const {
    return data_.size() * sizeof(std::uint64_t);
  }

  // Field index of the unordered pair i < j.
  std::size_t pair_index(std::size_t i, std::size_t j) const {
    return i * n_ - i * (i + 1) / 2 + (j - i - 1);
  }

  std::span<std::uint64_t> row(std::size_t k) {
    return {data_.data() + k * words_per_row_, words_per_row_};
  }
  std::span<const std::uint64_t> row(std::size_t k) const {
    return {data_.data() + k * words_per_row_, words_per_row_};
  }

  static std::uint64_t encode(Orientation o) {
    switch (o) {
      case Orientation::kPositive: return 1;
      case Orientation::kNegative: return 2;
      default: return 0;
    }
  }
  static Orientation decode(std::uint64_t bits) {
    if (bits == 1) return Orientation::kPositive;
    if (bits == 2) return Orientation::kNegative;
    return Orientation::kZero;
  }

  Orientation get_field(std::size_t k, std::size_t pair) const {
    const std::uint64_t w = data_[k * words_per_row_ + pair / 32];
    return decode((w >> (2 * (pair % 32))) & 3U);
  }

  void set_field(std::size_t k, std::size_t pair, Orientation o) {
    std::uint64_t& w = data_[k * words_per_row_ + pair / 32];
    const unsigned shift = 2 * (pair % 32);
    w = (w & ~(std::uint64_t{3} << shift)) | (encode(o) << shift);
  }

  // M_{i->j}[k] for distinct i, j.
  Orientation get(std::size_t i, std::size_t j, std::size_t k) const {
    if (i < j) return get_field(k, pair_index(i, j));
    return negate(get_field(k, pair_index(j, i)));
  }

  void clear_row(std::size_t k) {
    auto r = row(k);
    std::fill(r.begin(), r.end(), 0);
  }

  // Swaps 01 <-> 10 in every field: the word-wise sign negation.
  static std::uint64_t negate_word(std::uint64_t w) {
    return ((w & kLowBits) << 1) | ((w >> 1) & kLowBits);
  }

  // One bit (at the even position of each field) per differing field.
  static std::uint64_t mismatch_mask(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t x = a ^ b;
    return (x | (x >> 1)) & kLowBits;
  }

 private:
  std::size_t n_ = 0;
  std::size_t pairs_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> data_;
};

}  // namespace vtmatch
