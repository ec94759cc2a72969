#include <gtest/gtest.h>

#include <filesystem>
#include <limits>

#include <json.hpp>

#include "vtmatch/error.hpp"
#include "vtmatch/io.hpp"
#include "vtmatch/random.hpp"

using namespace vtmatch;

namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path p = fs::temp_directory_path() /
                     ("vtmatch_io_" + std::to_string(::testing::UnitTest::GetInstance()
                                                         ->random_seed()));
  fs::create_directories(p);
  return p;
}

std::size_t parse_line_of(const std::string& text) {
  try {
    parse_correspondences(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Text, ParsesSeparatorsAndComments) {
  const auto c = parse_correspondences(
      "# header\n"
      "1 2 3 4\n"
      "\n"
      "5,6,7,8  # trailing\n"
      "  9\t10 ,11, 12\r\n"
      "+1e2 -2.5 0 .5\n");
  ASSERT_EQ(c.size(), 4u);
  EXPECT_EQ(c.reference[1], (Point2{5, 6}));
  EXPECT_EQ(c.sensed[2], (Point2{11, 12}));
  EXPECT_EQ(c.reference[3], (Point2{100, -2.5}));
  EXPECT_EQ(c.ids, (std::vector<std::int64_t>{0, 1, 2, 3}));
}

TEST(Text, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_line_of("1 2 3 4\n1 2 3\n"), 2u);
  EXPECT_EQ(parse_line_of("1 2 3 4 5\n"), 1u);
  EXPECT_EQ(parse_line_of("#c\n\n1 2 x 4\n"), 3u);
  EXPECT_EQ(parse_line_of("1 2 nan 4\n"), 1u);
  EXPECT_EQ(parse_line_of("1 2 inf 4\n"), 1u);
}

TEST(Text, RoundTripIsExact) {
  Rng rng(4);
  CorrespondenceSet c;
  for (int k = 0; k < 200; ++k)
    c.push_back({rng.uniform(-1e6, 1e6), rng.normal() * 1e-7},
                {rng.uniform(0, 1), std::ldexp(rng.uniform(), -1000)}, k);
  c.push_back({std::numeric_limits<double>::max(), -0.0},
              {std::numeric_limits<double>::denorm_min(), 1.0 / 3.0}, 200);
  EXPECT_EQ(parse_correspondences(format_correspondences(c)), c);
}

TEST(Files, AtomicWriteAndRead) {
  const fs::path dir = temp_dir();
  const std::string path = (dir / "a.txt").string();
  write_file_atomic(path, "hello\n");
  write_file_atomic(path, "world\n");
  EXPECT_EQ(read_file(path), "world\n");
  EXPECT_FALSE(fs::exists(path + ".tmp"));
  EXPECT_THROW(read_file((dir / "missing").string()), Error);
  EXPECT_THROW(write_file_atomic((dir / "no/such/dir/x").string(), "x"), Error);
  fs::remove_all(dir);
}

TEST(Files, LoadsTextAndSceneDocuments) {
  const fs::path dir = temp_dir();
  SceneConfig cfg;
  cfg.n_inliers = 12;
  cfg.outlier_ratio = 0.25;
  const Scene s = generate_scene(cfg);
  write_file_atomic((dir / "s.json").string(), scene_to_json(s));
  write_file_atomic((dir / "s.txt").string(),
                    format_correspondences(s.correspondences));
  const LoadedInput a = load_correspondence_file((dir / "s.json").string());
  const LoadedInput b = load_correspondence_file((dir / "s.txt").string());
  EXPECT_TRUE(a.scene.has_value());
  EXPECT_FALSE(b.scene.has_value());
  EXPECT_EQ(a.correspondences, s.correspondences);
  EXPECT_EQ(b.correspondences, s.correspondences);
  fs::remove_all(dir);
}

TEST(ResultJson, Fields) {
  SceneConfig cfg;
  cfg.n_inliers = 20;
  cfg.outlier_ratio = 0.3;
  const Scene s = generate_scene(cfg);
  const FilterResult r = rfvtm(s.correspondences);
  const auto doc = nlohmann::json::parse(
      result_to_json(r, Algorithm::kRfvtm, classify(r, s.truth)));
  EXPECT_EQ(doc["algorithm"], "rfvtm");
  EXPECT_EQ(doc["termination"], termination_name(r.termination));
  EXPECT_EQ(doc["residual_ids"].size(), r.residual.size());
  EXPECT_EQ(doc["deleted_ids"].size(), r.deleted.size());
  EXPECT_TRUE(doc["model"].is_object());
  EXPECT_TRUE(doc["rms_error"].is_number());
  EXPECT_EQ(doc["counts"]["rc"].get<std::size_t>() +
                doc["counts"]["rf"].get<std::size_t>(),
            r.residual.size());
  EXPECT_EQ(doc["trace"].size(), r.trace.size());
}

TEST(Svg, ClassesAndDeterminism) {
  SceneConfig cfg;
  cfg.n_inliers = 15;
  cfg.outlier_ratio = 0.4;
  const Scene s = generate_scene(cfg);
  const FilterResult r = vtm(s.correspondences);
  const std::string svg = render_svg(r);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("class=\"residual\""), std::string::npos);
  EXPECT_NE(svg.find("class=\"deleted\""), std::string::npos);
  std::size_t lines = 0;
  for (std::size_t p = svg.find("data-id="); p != std::string::npos;
       p = svg.find("data-id=", p + 1))
    ++lines;
  EXPECT_EQ(lines, s.correspondences.size());
  EXPECT_EQ(svg, render_svg(r));
  EXPECT_NO_THROW(render_svg(FilterResult{}));
}
