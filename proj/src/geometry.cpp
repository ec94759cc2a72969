#include "vtmatch/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>

#include "vtmatch/error.hpp"

namespace vtmatch {

bool AffineTransform::is_finite() const {
  return std::isfinite(a11) && std::isfinite(a12) && std::isfinite(a21) &&
         std::isfinite(a22) && std::isfinite(tx) && std::isfinite(ty);
}

bool AffineTransform::is_degenerate() const { return std::abs(det()) <= 1e-12; }

void CorrespondenceSet::push_back(const Point2& ref, const Point2& sen,
                                  std::int64_t id) {
  reference.push_back(ref);
  sensed.push_back(sen);
  ids.push_back(id);
}

void CorrespondenceSet::reserve(std::size_t n) {
  reference.reserve(n);
  sensed.reserve(n);
  ids.reserve(n);
}

CorrespondenceSet CorrespondenceSet::subset(
    std::span<const std::size_t> positions) const {
  CorrespondenceSet out;
  out.reserve(positions.size());
  for (std::size_t p : positions) {
    out.push_back(reference.at(p), sensed.at(p), ids.at(p));
  }
  return out;
}

CorrespondenceSet CorrespondenceSet::from_points(std::vector<Point2> reference,
                                                 std::vector<Point2> sensed) {
  CorrespondenceSet out;
  out.ids.resize(reference.size());
  for (std::size_t k = 0; k < out.ids.size(); ++k) {
    out.ids[k] = static_cast<std::int64_t>(k);
  }
  out.reference = std::move(reference);
  out.sensed = std::move(sensed);
  validate(out);
  return out;
}

void validate(const CorrespondenceSet& set) {
  if (set.reference.size() != set.ids.size() ||
      set.sensed.size() != set.ids.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "correspondence set has mismatched list lengths");
  }
  std::unordered_set<std::int64_t> seen;
  seen.reserve(set.ids.size());
  for (std::size_t k = 0; k < set.ids.size(); ++k) {
    if (!seen.insert(set.ids[k]).second) {
      throw Error(ErrorCode::kInvalidInput,
                  "duplicate correspondence id " + std::to_string(set.ids[k]));
    }
    const Point2& a = set.reference[k];
    const Point2& b = set.sensed[k];
    if (!std::isfinite(a.x) || !std::isfinite(a.y) || !std::isfinite(b.x) ||
        !std::isfinite(b.y)) {
      throw Error(ErrorCode::kInvalidInput,
                  "non-finite coordinate in correspondence " +
                      std::to_string(set.ids[k]));
    }
  }
}

namespace {

double squared_diagonal(std::span<const Point2> pts) {
  if (pts.empty()) return 0.0;
  double min_x = pts[0].x, max_x = pts[0].x;
  double min_y = pts[0].y, max_y = pts[0].y;
  for (const Point2& p : pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double w = max_x - min_x;
  const double h = max_y - min_y;
  return w * w + h * h;
}

// Solves the 3x3 system m * x = rhs by Gaussian elimination with partial
// pivoting. Returns false when a pivot falls below `tiny`.
bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> rhs,
            double tiny, std::array<double, 3>& x) {
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    if (std::abs(m[pivot][col]) <= tiny) return false;
    std::swap(m[pivot], m[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 3; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double s = rhs[r];
    for (int c = r + 1; c < 3; ++c) s -= m[r][c] * x[c];
    x[r] = s / m[r][r];
  }
  return true;
}

}  // namespace

double default_orientation_eps(const CorrespondenceSet& set) {
  return 1e-9 * std::max(squared_diagonal(set.reference),
                         squared_diagonal(set.sensed));
}

AffineTransform estimate_affine_lsm(const CorrespondenceSet& pairs) {
  const std::size_t n = pairs.size();
  if (n < 3) {
    throw Error(ErrorCode::kDegenerateInput,
                "affine estimation needs at least 3 correspondences");
  }
  // Centering both clouds keeps the normal equations well conditioned for
  // pixel-scale coordinates; the translation is restored afterwards.
  double mx = 0, my = 0, sx = 0, sy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += pairs.reference[k].x;
    my += pairs.reference[k].y;
    sx += pairs.sensed[k].x;
    sy += pairs.sensed[k].y;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  mx *= inv_n;
  my *= inv_n;
  sx *= inv_n;
  sy *= inv_n;

  std::array<std::array<double, 3>, 3> normal{};
  std::array<double, 3> rhs_x{};
  std::array<double, 3> rhs_y{};
  for (std::size_t k = 0; k < n; ++k) {
    const std::array<double, 3> row = {pairs.reference[k].x - mx,
                                       pairs.reference[k].y - my, 1.0};
    const double u = pairs.sensed[k].x - sx;
    const double v = pairs.sensed[k].y - sy;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) normal[r][c] += row[r] * row[c];
      rhs_x[r] += row[r] * u;
      rhs_y[r] += row[r] * v;
    }
  }
  const double scale = std::max(normal[0][0] + normal[1][1], 1.0);
  // The pivot test alone misses collinear clouds whose scatter matrix is
  // singular but has large diagonal entries; check its determinant too.
  const double scatter_det =
      normal[0][0] * normal[1][1] - normal[0][1] * normal[1][0];
  if (!(scatter_det > 1e-12 * scale * scale)) {
    throw Error(ErrorCode::kDegenerateInput,
                "reference points are collinear; affine fit is rank deficient");
  }
  std::array<double, 3> px{};
  std::array<double, 3> py{};
  if (!solve3(normal, rhs_x, 1e-12 * scale, px) ||
      !solve3(normal, rhs_y, 1e-12 * scale, py)) {
    throw Error(ErrorCode::kDegenerateInput,
                "normal equations are singular; affine fit is rank deficient");
  }
  AffineTransform t;
  t.a11 = px[0];
  t.a12 = px[1];
  t.a21 = py[0];
  t.a22 = py[1];
  t.tx = sx + px[2] - (t.a11 * mx + t.a12 * my);
  t.ty = sy + py[2] - (t.a21 * mx + t.a22 * my);
  if (!t.is_finite()) {
    throw Error(ErrorCode::kDegenerateInput, "affine fit is not finite");
  }
  return t;
}

double individual_error(const Point2& vk, const Point2& vk_sensed,
                        const AffineTransform& t) {
  const Point2 p = apply_affine(t, vk);
  const double dx = p.x - vk_sensed.x;
  const double dy = p.y - vk_sensed.y;
  return dx * dx + dy * dy;
}

double rms_error(const CorrespondenceSet& set, const AffineTransform& t) {
  if (set.empty()) {
    throw Error(ErrorCode::kEmptySet, "rms error of an empty set is undefined");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < set.size(); ++k) {
    sum += individual_error(set.reference[k], set.sensed[k], t);
  }
  return std::sqrt(sum / static_cast<double>(set.size()));
}

}  // namespace vtmatch
