#pragma once

// Brute-force reference implementations used by the tests. Deliberately
// written without the library's packed storage or incremental updates.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "vtmatch/geometry.hpp"

namespace oracle {

using vtmatch::CorrespondenceSet;
using vtmatch::Point2;

// Cofactor expansion of | xi xj xk ; yi yj yk ; 1 1 1 |.
inline double det3(const Point2& a, const Point2& b, const Point2& c) {
  return a.x * (b.y - c.y) - b.x * (a.y - c.y) + c.x * (a.y - b.y);
}

// Sign from the (xj - xi)(yk - yi) - (yj - yi)(xk - xi) form so that
// tolerance decisions match the library bit for bit.
inline int sign(const Point2& a, const Point2& b, const Point2& c, double eps) {
  const double d = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  if (d > eps) return 1;
  if (d < -eps) return -1;
  return 0;
}

// Full dM over the vertices with alive[v] set, n x n row-major.
inline std::vector<std::uint32_t> disparity(const CorrespondenceSet& c,
                                            const std::vector<bool>& alive,
                                            double eps, bool reflected) {
  const std::size_t n = c.size();
  std::vector<std::uint32_t> dm(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !alive[j]) continue;
      std::uint32_t count = 0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j || !alive[k]) continue;
        const int s = sign(c.reference[i], c.reference[j], c.reference[k], eps);
        int t = sign(c.sensed[i], c.sensed[j], c.sensed[k], eps);
        if (reflected) t = -t;
        if (s != t) ++count;
      }
      dm[i * n + j] = count;
    }
  }
  return dm;
}

inline std::vector<std::uint32_t> disparity(const CorrespondenceSet& c,
                                            double eps, bool reflected = false) {
  return disparity(c, std::vector<bool>(c.size(), true), eps, reflected);
}

inline std::vector<std::uint64_t> column_totals(
    const std::vector<std::uint32_t>& dm, std::size_t n) {
  std::vector<std::uint64_t> out(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j] += dm[i * n + j];
  return out;
}

// Plain VTM: full recomputation of dM at every step.
inline std::vector<bool> vtm_alive(const CorrespondenceSet& c, double eps,
                                   bool reflected = false) {
  const std::size_t n = c.size();
  std::vector<bool> alive(n, true);
  if (n < 4) return alive;
  for (;;) {
    const auto totals = column_totals(disparity(c, alive, eps, reflected), n);
    std::uint64_t best = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (alive[j] && totals[j] > best) best = totals[j];
    if (best == 0) return alive;
    for (std::size_t j = 0; j < n; ++j)
      if (alive[j] && totals[j] == best) alive[j] = false;
  }
}

// Affine LSM through the uncentered 6x6 normal equations, Gauss-Jordan with
// partial pivoting. Returns {a11, a12, a21, a22, tx, ty}.
inline std::vector<double> lsm(const CorrespondenceSet& c) {
  double m[6][7] = {};
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double x = c.reference[k].x, y = c.reference[k].y;
    const double rows[2][6] = {{x, y, 0, 0, 1, 0}, {0, 0, x, y, 0, 1}};
    const double rhs[2] = {c.sensed[k].x, c.sensed[k].y};
    for (int r = 0; r < 2; ++r) {
      for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) m[a][b] += rows[r][a] * rows[r][b];
        m[a][6] += rows[r][a] * rhs[r];
      }
    }
  }
  for (int col = 0; col < 6; ++col) {
    int piv = col;
    for (int r = col + 1; r < 6; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    for (int k = 0; k < 7; ++k) std::swap(m[col][k], m[piv][k]);
    for (int r = 0; r < 6; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int k = col; k < 7; ++k) m[r][k] -= f * m[col][k];
    }
  }
  std::vector<double> p(6);
  for (int i = 0; i < 6; ++i) p[i] = m[i][6] / m[i][i];
  return p;
}

inline double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace oracle
