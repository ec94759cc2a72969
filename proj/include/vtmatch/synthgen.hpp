#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vtmatch/geometry.hpp"

namespace vtmatch {

struct SceneConfig {
  std::size_t n_inliers = 100;
  double outlier_ratio = 0.0;  // outliers / all pairs, in [0, 1)
  double field_width = 512.0;
  double field_height = 512.0;
  double rotation_deg = 0.0;
  double scale = 1.0;
  double shear_h = 0.0;
  double shear_v = 0.0;
  Point2 translation;
  double noise_sigma = 0.5;  // isotropic Gaussian on sensed inliers, pixels
  std::uint64_t seed = 0;
  bool reflect = false;          // mirror the reference y axis first
  double min_separation = 1.0;   // between reference points; 0 disables

  // round(ratio / (1 - ratio) * n_inliers)
  std::size_t n_outliers() const;
  void validate() const;
};

struct GroundTruth {
  AffineTransform transform;
  std::vector<bool> labels;  // true = generated as an inlier
};

struct Scene {
  SceneConfig config;
  CorrespondenceSet correspondences;
  GroundTruth truth;
};

// shear * rotation * scale (* mirror), then translation:
//   A = [[1, h], [v, 1]] * R(rotation) * scale * diag(1, reflect ? -1 : 1).
// Throws Error(kInvalidConfig) unless scale is positive and finite.
AffineTransform transform_from_factors(double rotation_deg, double scale,
                                       double shear_h, double shear_v,
                                       Point2 translation,
                                       bool reflect = false);

// Inliers: uniform reference points mapped through the configured transform
// plus Gaussian noise. Outliers: independent uniform points in the reference
// field and in the bounding box of the transformed field. Pairs are shuffled
// and numbered 0..n-1. Throws Error(kInvalidConfig) on bad configuration.
Scene generate_scene(const SceneConfig& config);

// Scene document {config, points, transform, labels} with canonical field
// order; points are [x, y, x', y'] rows.
std::string scene_to_json(const Scene& scene, int indent = 2);
// Throws ParseError on malformed documents.
Scene scene_from_json(const std::string& text);

}  // namespace vtmatch
