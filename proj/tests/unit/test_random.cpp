#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vtmatch/random.hpp"

using namespace vtmatch;

TEST(Rng, Reproducible) {
  Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, UniformRangeAndMean) {
  Rng r(1);
  double sum = 0;
  for (int k = 0; k < 100000; ++k) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.01);
}

TEST(Rng, IndexUnbiased) {
  Rng r(2);
  std::vector<int> hist(7, 0);
  for (int k = 0; k < 70000; ++k) ++hist[r.index(7)];
  for (int h : hist) EXPECT_NEAR(h, 10000, 400);
}

TEST(Rng, NormalMoments) {
  Rng r(3);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Rng, ShuffleIsPermutation) {
  Rng r(4);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  r.shuffle(v.begin(), v.end());
  std::vector<int> s = v;
  std::sort(s.begin(), s.end());
  for (int k = 0; k < 50; ++k) EXPECT_EQ(s[k], k);
}

TEST(Seeds, DeriveSeedDependsOnOrder) {
  EXPECT_EQ(derive_seed({1, 2, 3}), derive_seed({1, 2, 3}));
  EXPECT_NE(derive_seed({1, 2, 3}), derive_seed({1, 3, 2}));
  EXPECT_NE(derive_seed({0}), derive_seed({0, 0}));
}
