#include <gtest/gtest.h>

#include <cmath>

#include "vtmatch/error.hpp"
#include "vtmatch/synthgen.hpp"

using namespace vtmatch;

TEST(Factors, Examples) {
  EXPECT_EQ(transform_from_factors(0, 1, 0, 0, {0, 0}),
            AffineTransform::identity());
  const AffineTransform r = transform_from_factors(90, 1, 0, 0, {0, 0});
  EXPECT_NEAR(r.a11, 0, 1e-15);
  EXPECT_NEAR(r.a12, -1, 1e-15);
  EXPECT_NEAR(r.a21, 1, 1e-15);
  EXPECT_NEAR(r.a22, 0, 1e-15);
  EXPECT_DOUBLE_EQ(transform_from_factors(0, 1, 0.1, 0.1, {0, 0}).det(), 0.99);
  EXPECT_THROW(transform_from_factors(0, 0, 0, 0, {0, 0}), Error);
  EXPECT_LT(transform_from_factors(30, 2, 0, 0, {0, 0}, true).det(), 0);
}

TEST(Factors, CompositionOrder) {
  // shear * rotation * scale
  const double c = std::cos(M_PI / 6), s = std::sin(M_PI / 6);
  const AffineTransform t = transform_from_factors(30, 2, 0.2, 0.1, {3, 4});
  EXPECT_NEAR(t.a11, 2 * (c + 0.2 * s), 1e-14);
  EXPECT_NEAR(t.a12, 2 * (-s + 0.2 * c), 1e-14);
  EXPECT_NEAR(t.a21, 2 * (0.1 * c + s), 1e-14);
  EXPECT_NEAR(t.a22, 2 * (-0.1 * s + c), 1e-14);
  EXPECT_EQ(t.tx, 3);
  EXPECT_EQ(t.ty, 4);
}

TEST(Scene, ExactWithoutNoiseOrOutliers) {
  SceneConfig c;
  c.n_inliers = 50;
  c.noise_sigma = 0;
  c.rotation_deg = 45;
  c.seed = 3;
  const Scene s = generate_scene(c);
  ASSERT_EQ(s.correspondences.size(), 50u);
  for (std::size_t k = 0; k < 50; ++k) {
    EXPECT_EQ(apply_affine(s.truth.transform, s.correspondences.reference[k]),
              s.correspondences.sensed[k]);
    EXPECT_TRUE(s.truth.labels[k]);
  }
}

TEST(Scene, OutlierCount) {
  SceneConfig c;
  c.n_inliers = 100;
  c.outlier_ratio = 0.5;
  EXPECT_EQ(c.n_outliers(), 100u);
  const Scene s = generate_scene(c);
  EXPECT_EQ(s.correspondences.size(), 200u);
  std::size_t inliers = 0;
  for (bool b : s.truth.labels) inliers += b;
  EXPECT_EQ(inliers, 100u);
  c.outlier_ratio = 0.75;
  EXPECT_EQ(c.n_outliers(), 300u);
  c.outlier_ratio = 0.95;
  c.n_inliers = 20;
  EXPECT_EQ(c.n_outliers(), 380u);
}

TEST(Scene, LsmRoundTrip) {
  SceneConfig c;
  c.n_inliers = 60;
  c.noise_sigma = 0;
  c.rotation_deg = 120;
  c.scale = 2.0;
  const Scene s = generate_scene(c);
  const AffineTransform got = estimate_affine_lsm(s.correspondences);
  const AffineTransform& t = s.truth.transform;
  EXPECT_NEAR(got.a11, t.a11, 1e-9);
  EXPECT_NEAR(got.a12, t.a12, 1e-9);
  EXPECT_NEAR(got.a21, t.a21, 1e-9);
  EXPECT_NEAR(got.a22, t.a22, 1e-9);
  EXPECT_NEAR(got.tx, t.tx, 1e-9);
  EXPECT_NEAR(got.ty, t.ty, 1e-9);
}

TEST(Scene, SeededDeterminism) {
  SceneConfig c;
  c.outlier_ratio = 0.3;
  c.seed = 77;
  const Scene a = generate_scene(c);
  const Scene b = generate_scene(c);
  EXPECT_EQ(a.correspondences, b.correspondences);
  EXPECT_EQ(a.truth.labels, b.truth.labels);
  c.seed = 78;
  EXPECT_FALSE(generate_scene(c).correspondences == a.correspondences);
}

TEST(Scene, LabelSoundness) {
  SceneConfig c;
  c.n_inliers = 1000;
  c.noise_sigma = 0.5;
  c.seed = 5;
  const Scene s = generate_scene(c);
  std::size_t within = 0;
  const double bound = 3 * c.noise_sigma * std::sqrt(2.0);
  for (std::size_t k = 0; k < s.correspondences.size(); ++k) {
    const double e = std::sqrt(individual_error(
        s.correspondences.reference[k], s.correspondences.sensed[k],
        s.truth.transform));
    within += e <= bound;
  }
  EXPECT_GE(static_cast<double>(within) / 1000.0, 0.99);
}

TEST(Scene, MinimumSeparation) {
  SceneConfig c;
  c.n_inliers = 300;
  c.outlier_ratio = 0.5;
  c.min_separation = 5;
  const Scene s = generate_scene(c);
  const auto& r = s.correspondences.reference;
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = i + 1; j < r.size(); ++j)
      EXPECT_GE(std::hypot(r[i].x - r[j].x, r[i].y - r[j].y), 5.0);
}

TEST(Scene, InvalidConfig) {
  const auto code_of = [](SceneConfig c) {
    try {
      generate_scene(c);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  SceneConfig c;
  c.outlier_ratio = 1.0;
  EXPECT_EQ(code_of(c), ErrorCode::kInvalidConfig);
  c = {};
  c.scale = -1;
  EXPECT_EQ(code_of(c), ErrorCode::kInvalidConfig);
  c = {};
  c.shear_h = 1;
  c.shear_v = 1;  // det 0
  EXPECT_EQ(code_of(c), ErrorCode::kInvalidConfig);
  c = {};
  c.noise_sigma = -0.1;
  EXPECT_EQ(code_of(c), ErrorCode::kInvalidConfig);
}

TEST(Scene, JsonRoundTrip) {
  SceneConfig c;
  c.n_inliers = 25;
  c.outlier_ratio = 0.2;
  c.rotation_deg = 33.3;
  c.shear_h = 0.1;
  c.seed = 9;
  const Scene s = generate_scene(c);
  const std::string text = scene_to_json(s);
  const Scene back = scene_from_json(text);
  EXPECT_EQ(back.correspondences, s.correspondences);
  EXPECT_EQ(back.truth.labels, s.truth.labels);
  EXPECT_EQ(back.truth.transform, s.truth.transform);
  EXPECT_EQ(scene_to_json(back), text);
  EXPECT_EQ(text.find("{\n  \"config\""), 0u);
}

TEST(Scene, JsonErrors) {
  EXPECT_THROW(scene_from_json("{"), ParseError);
  EXPECT_THROW(scene_from_json("{\"points\": [[1,2,3]]}"), ParseError);
  EXPECT_THROW(scene_from_json("[]"), ParseError);
}
