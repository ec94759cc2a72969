#include "vtmatch/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "json.hpp"
#include "vtmatch/error.hpp"
#include "vtmatch/random.hpp"

namespace vtmatch {

std::size_t SceneConfig::n_outliers() const {
  return static_cast<std::size_t>(std::llround(
      outlier_ratio / (1.0 - outlier_ratio) * static_cast<double>(n_inliers)));
}

void SceneConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidConfig, msg);
  };
  if (!(outlier_ratio >= 0.0 && outlier_ratio < 1.0)) {
    fail("outlier ratio must lie in [0, 1)");
  }
  if (!(field_width > 0.0 && field_height > 0.0) ||
      !std::isfinite(field_width) || !std::isfinite(field_height)) {
    fail("field dimensions must be positive");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) fail("scale must be positive");
  if (!std::isfinite(rotation_deg) || !std::isfinite(shear_h) ||
      !std::isfinite(shear_v) || !std::isfinite(translation.x) ||
      !std::isfinite(translation.y)) {
    fail("transform factors must be finite");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    fail("noise sigma must be non-negative");
  }
  if (!(min_separation >= 0.0) || !std::isfinite(min_separation)) {
    fail("minimum separation must be non-negative");
  }
  const double det = transform_from_factors(rotation_deg, scale, shear_h,
                                            shear_v, translation, reflect)
                         .det();
  if (!reflect && !(det > 1e-12)) {
    fail("transform determinant must be positive (shear_h * shear_v < 1)");
  }
  if (reflect && !(det < -1e-12)) {
    fail("reflected transform must have a negative determinant");
  }
}

AffineTransform transform_from_factors(double rotation_deg, double scale,
                                       double shear_h, double shear_v,
                                       Point2 translation, bool reflect) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::kInvalidConfig, "scale must be positive");
  }
  const double theta = rotation_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double m = reflect ? -1.0 : 1.0;
  // R * scale * diag(1, m)
  const double r11 = scale * c;
  const double r12 = -scale * s * m;
  const double r21 = scale * s;
  const double r22 = scale * c * m;
  AffineTransform t;
  t.a11 = r11 + shear_h * r21;
  t.a12 = r12 + shear_h * r22;
  t.a21 = shear_v * r11 + r21;
  t.a22 = shear_v * r12 + r22;
  t.tx = translation.x;
  t.ty = translation.y;
  return t;
}

namespace {

struct Box {
  double min_x, min_y, max_x, max_y;
};

Box transformed_field(const AffineTransform& t, double w, double h) {
  const Point2 corners[4] = {{0, 0}, {w, 0}, {0, h}, {w, h}};
  Box b{INFINITY, INFINITY, -INFINITY, -INFINITY};
  for (const Point2& c : corners) {
    const Point2 p = apply_affine(t, c);
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  return b;
}

Point2 sample_reference(Rng& rng, const SceneConfig& cfg,
                        const std::vector<Point2>& taken) {
  const double min_sq = cfg.min_separation * cfg.min_separation;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const Point2 p{rng.uniform(0.0, cfg.field_width),
                   rng.uniform(0.0, cfg.field_height)};
    if (min_sq == 0.0) return p;
    const bool clear = std::none_of(taken.begin(), taken.end(), [&](const Point2& q) {
      const double dx = p.x - q.x;
      const double dy = p.y - q.y;
      return dx * dx + dy * dy < min_sq;
    });
    if (clear) return p;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "field too crowded for the requested minimum separation");
}

}  // namespace

Scene generate_scene(const SceneConfig& config) {
  config.validate();
  Scene scene;
  scene.config = config;
  const AffineTransform t =
      transform_from_factors(config.rotation_deg, config.scale, config.shear_h,
                             config.shear_v, config.translation, config.reflect);
  scene.truth.transform = t;

  const std::size_t n_in = config.n_inliers;
  const std::size_t n_out = config.n_outliers();
  const std::size_t n = n_in + n_out;
  Rng rng(config.seed);

  std::vector<Point2> ref;
  std::vector<Point2> sen;
  ref.reserve(n);
  sen.reserve(n);
  for (std::size_t k = 0; k < n_in; ++k) {
    const Point2 p = sample_reference(rng, config, ref);
    Point2 q = apply_affine(t, p);
    if (config.noise_sigma > 0.0) {
      q.x += config.noise_sigma * rng.normal();
      q.y += config.noise_sigma * rng.normal();
    }
    ref.push_back(p);
    sen.push_back(q);
  }
  const Box sensed_box =
      transformed_field(t, config.field_width, config.field_height);
  for (std::size_t k = 0; k < n_out; ++k) {
    const Point2 p = sample_reference(rng, config, ref);
    const Point2 q{rng.uniform(sensed_box.min_x, sensed_box.max_x),
                   rng.uniform(sensed_box.min_y, sensed_box.max_y)};
    ref.push_back(p);
    sen.push_back(q);
  }

  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  rng.shuffle(order.begin(), order.end());

  scene.correspondences.reserve(n);
  scene.truth.labels.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    scene.correspondences.push_back(ref[src], sen[src],
                                    static_cast<std::int64_t>(k));
    scene.truth.labels.push_back(src < n_in);
  }
  return scene;
}

namespace {

using json = nlohmann::ordered_json;

json config_to_json(const SceneConfig& c) {
  json j;
  j["n_inliers"] = c.n_inliers;
  j["outlier_ratio"] = c.outlier_ratio;
  j["field_width"] = c.field_width;
  j["field_height"] = c.field_height;
  j["rotation_deg"] = c.rotation_deg;
  j["scale"] = c.scale;
  j["shear_h"] = c.shear_h;
  j["shear_v"] = c.shear_v;
  j["translation"] = {c.translation.x, c.translation.y};
  j["noise_sigma"] = c.noise_sigma;
  j["seed"] = c.seed;
  j["reflect"] = c.reflect;
  j["min_separation"] = c.min_separation;
  return j;
}

SceneConfig config_from_json(const json& j) {
  SceneConfig c;
  c.n_inliers = j.at("n_inliers").get<std::size_t>();
  c.outlier_ratio = j.at("outlier_ratio").get<double>();
  c.field_width = j.at("field_width").get<double>();
  c.field_height = j.at("field_height").get<double>();
  c.rotation_deg = j.at("rotation_deg").get<double>();
  c.scale = j.at("scale").get<double>();
  c.shear_h = j.at("shear_h").get<double>();
  c.shear_v = j.at("shear_v").get<double>();
  const auto& tr = j.at("translation");
  c.translation = {tr.at(0).get<double>(), tr.at(1).get<double>()};
  c.noise_sigma = j.at("noise_sigma").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.reflect = j.value("reflect", false);
  c.min_separation = j.value("min_separation", 1.0);
  return c;
}

}  // namespace

std::string scene_to_json(const Scene& scene, int indent) {
  json doc;
  doc["config"] = config_to_json(scene.config);
  json points = json::array();
  const CorrespondenceSet& c = scene.correspondences;
  for (std::size_t k = 0; k < c.size(); ++k) {
    points.push_back(
        {c.reference[k].x, c.reference[k].y, c.sensed[k].x, c.sensed[k].y});
  }
  doc["points"] = std::move(points);
  const AffineTransform& t = scene.truth.transform;
  doc["transform"] = {t.a11, t.a12, t.a21, t.a22, t.tx, t.ty};
  json labels = json::array();
  for (bool b : scene.truth.labels) labels.push_back(b);
  doc["labels"] = std::move(labels);
  return doc.dump(indent) + "\n";
}

Scene scene_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("invalid JSON: ") + e.what());
  }
  try {
    Scene scene;
    scene.config = config_from_json(doc.at("config"));
    const json& points = doc.at("points");
    for (std::size_t k = 0; k < points.size(); ++k) {
      const json& row = points.at(k);
      if (!row.is_array() || row.size() != 4) {
        throw ParseError(0, "points[" + std::to_string(k) +
                                "] must hold 4 numbers");
      }
      scene.correspondences.push_back(
          {row[0].get<double>(), row[1].get<double>()},
          {row[2].get<double>(), row[3].get<double>()},
          static_cast<std::int64_t>(k));
    }
    const json& t = doc.at("transform");
    if (!t.is_array() || t.size() != 6) {
      throw ParseError(0, "transform must hold 6 numbers");
    }
    scene.truth.transform = {t[0].get<double>(), t[1].get<double>(),
                             t[2].get<double>(), t[3].get<double>(),
                             t[4].get<double>(), t[5].get<double>()};
    for (const json& b : doc.at("labels")) {
      scene.truth.labels.push_back(b.get<bool>());
    }
    if (scene.truth.labels.size() != scene.correspondences.size()) {
      throw ParseError(0, "labels and points differ in length");
    }
    validate(scene.correspondences);
    return scene;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("scene document: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    throw ParseError(0, std::string("scene document: ") + e.what());
  }
}

}  // namespace vtmatch
