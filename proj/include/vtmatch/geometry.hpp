#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace vtmatch {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

// Planar affine map p -> A p + t with A = [[a11, a12], [a21, a22]].
struct AffineTransform {
  double a11 = 1.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 1.0;
  double tx = 0.0;
  double ty = 0.0;

  static AffineTransform identity() { return {}; }

  double det() const { return a11 * a22 - a12 * a21; }
  bool is_finite() const;
  bool is_degenerate() const;

  friend bool operator==(const AffineTransform&,
                         const AffineTransform&) = default;
};

// Matched point pairs: reference[k] corresponds to sensed[k], and ids[k] is
// the stable identifier of that pair.
struct CorrespondenceSet {
  std::vector<Point2> reference;
  std::vector<Point2> sensed;
  std::vector<std::int64_t> ids;

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }

  void push_back(const Point2& ref, const Point2& sen, std::int64_t id);
  void reserve(std::size_t n);

  // Pairs at the given positions, in the order given.
  CorrespondenceSet subset(std::span<const std::size_t> positions) const;

  // Consecutive ids 0..n-1.
  static CorrespondenceSet from_points(std::vector<Point2> reference,
                                       std::vector<Point2> sensed);

  friend bool operator==(const CorrespondenceSet&,
                         const CorrespondenceSet&) = default;
};

// Throws Error(kInvalidInput) on length mismatch, duplicate ids or
// non-finite coordinates.
void validate(const CorrespondenceSet& set);

enum class Orientation : std::int8_t {
  kNegative = -1,
  kZero = 0,
  kPositive = 1,
};

inline Orientation negate(Orientation o) {
  return static_cast<Orientation>(-static_cast<int>(o));
}

// det | xi xj xk ; yi yj yk ; 1 1 1 |, evaluated as
// (xj - xi)(yk - yi) - (yj - yi)(xk - xi).
inline double orientation_determinant(const Point2& vi, const Point2& vj,
                                      const Point2& vk) {
  return (vj.x - vi.x) * (vk.y - vi.y) - (vj.y - vi.y) * (vk.x - vi.x);
}

// Positive: vk lies left of the directed line vi -> vj (counterclockwise in a
// y-up frame). |det| <= eps counts as collinear.
inline Orientation orient(const Point2& vi, const Point2& vj, const Point2& vk,
                          double eps) {
  const double d = orientation_determinant(vi, vj, vk);
  if (d > eps) return Orientation::kPositive;
  if (d < -eps) return Orientation::kNegative;
  return Orientation::kZero;
}

// 1e-9 times the squared bounding-box diagonal, taking the larger of the two
// point clouds so that one tolerance serves both graphs.
double default_orientation_eps(const CorrespondenceSet& set);

inline Point2 apply_affine(const AffineTransform& t, const Point2& p) {
  return {t.a11 * p.x + t.a12 * p.y + t.tx, t.a21 * p.x + t.a22 * p.y + t.ty};
}

// Least-squares affine fit of sensed ~ T(reference). Throws
// Error(kDegenerateInput) for fewer than 3 pairs or collinear references.
AffineTransform estimate_affine_lsm(const CorrespondenceSet& pairs);

// Squared residual |T(vk) - vk'|^2 in pixels^2.
double individual_error(const Point2& vk, const Point2& vk_sensed,
                        const AffineTransform& t);

// Root mean square of the residual distances, in pixels. Throws
// Error(kEmptySet) when the set is empty.
double rms_error(const CorrespondenceSet& set, const AffineTransform& t);

}  // namespace vtmatch
