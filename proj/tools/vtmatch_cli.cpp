// vtmatch: synth / filter / bench front end.
//
// Exit codes: 0 ok, 2 invalid flags or configuration, 3 I/O failure,
// 4 parse error, 5 algorithm degeneracy, 1 anything else.

#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vtmatch/error.hpp"
#include "vtmatch/evaluation.hpp"
#include "vtmatch/filter.hpp"
#include "vtmatch/io.hpp"
#include "vtmatch/ransac.hpp"
#include "vtmatch/synthgen.hpp"

namespace {

using namespace vtmatch;

constexpr int kExitFlags = 2;
constexpr int kExitIo = 3;
constexpr int kExitParse = 4;
constexpr int kExitDegenerate = 5;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
      return kExitIo;
    case ErrorCode::kParse:
      return kExitParse;
    case ErrorCode::kDegenerateInput:
    case ErrorCode::kDegenerateResidual:
    case ErrorCode::kTooFewVertices:
    case ErrorCode::kBudgetExceeded:
    case ErrorCode::kEmptySet:
      return kExitDegenerate;
    case ErrorCode::kInvalidInput:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidGroupCount:
      return kExitFlags;
    default:
      return 1;
  }
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string fixed(const std::optional<double>& v, int digits) {
  return v ? fixed(*v, digits) : std::string("nan");
}

// "5:95:10" is a percent range (inclusive); anything else is a comma list of
// fractions.
std::vector<double> parse_ratios(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double start = 0, stop = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(spec);
    if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' ||
        !(in >> std::ws).eof() || step <= 0 || stop < start) {
      throw Error(ErrorCode::kInvalidConfig,
                  "--ratios range must look like start:stop:step in percent");
    }
    const auto count = static_cast<std::size_t>(
        std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back((start + static_cast<double>(i) * step) / 100.0);
    }
    return out;
  }
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw Error(ErrorCode::kInvalidConfig, "bad ratio '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidConfig, "--ratios is empty");
  return out;
}

struct SceneFlags {
  std::size_t inliers = 100;
  double outlier_ratio = 0.5;
  double rotation = 0.0;
  double scale = 1.0;
  double shear_h = 0.0;
  double shear_v = 0.0;
  double tx = 0.0;
  double ty = 0.0;
  double noise = 0.5;
  std::uint64_t seed = 0;
  bool reflect = false;

  SceneConfig config() const {
    SceneConfig c;
    c.n_inliers = inliers;
    c.outlier_ratio = outlier_ratio;
    c.rotation_deg = rotation;
    c.scale = scale;
    c.shear_h = shear_h;
    c.shear_v = shear_v;
    c.translation = {tx, ty};
    c.noise_sigma = noise;
    c.seed = seed;
    c.reflect = reflect;
    return c;
  }
};

void add_transform_flags(CLI::App* app, SceneFlags& f) {
  app->add_option("--rotation", f.rotation, "rotation in degrees");
  app->add_option("--scale", f.scale, "isotropic scale")
      ->check(CLI::PositiveNumber);
  app->add_option("--shear-h", f.shear_h, "horizontal shear");
  app->add_option("--shear-v", f.shear_v, "vertical shear");
  app->add_option("--tx", f.tx, "translation x (pixels)");
  app->add_option("--ty", f.ty, "translation y (pixels)");
  app->add_option("--noise", f.noise, "inlier noise sigma (pixels)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--seed", f.seed, "random seed");
  app->add_flag("--reflect", f.reflect, "mirror the reference y axis");
}

struct FilterFlags {
  std::string algo = "rfvtm";
  std::string in;
  std::string out;
  std::string result;
  std::string svg;
  std::size_t m = 1;
  double th_err = 0.5;
  double eps = -1.0;
  std::uint64_t seed = 0;
  std::size_t max_iter = 50;
  std::size_t max_vertices = 600;
  double ransac_threshold = 2.0;
  std::size_t ransac_iterations = 10000;
};

AlgorithmSettings settings_from(const FilterFlags& f) {
  AlgorithmSettings s;
  s.descriptor.eps = f.eps;
  s.descriptor.max_vertices = f.max_vertices;
  s.vtm_groups = f.m;
  s.rfvtm.th_err = f.th_err;
  s.rfvtm.m = f.m;
  s.rfvtm.max_outer_iterations = f.max_iter;
  s.ransac.inlier_threshold = f.ransac_threshold;
  s.ransac.max_iterations = f.ransac_iterations;
  return s;
}

void add_algorithm_flags(CLI::App* app, FilterFlags& f) {
  app->add_option("--m", f.m, "subdivision groups")->check(CLI::PositiveNumber);
  app->add_option("--th-err", f.th_err, "RFVTM RMS threshold (pixels)")
      ->check(CLI::PositiveNumber);
  app->add_option("--eps", f.eps,
                  "collinearity tolerance (negative: scale-relative default)");
  app->add_option("--max-iter", f.max_iter, "RFVTM outer iteration cap")
      ->check(CLI::PositiveNumber);
  app->add_option("--max-vertices", f.max_vertices,
                  "largest descriptor size accepted");
  app->add_option("--ransac-threshold", f.ransac_threshold,
                  "RANSAC inlier distance (pixels)")
      ->check(CLI::PositiveNumber);
  app->add_option("--ransac-iterations", f.ransac_iterations,
                  "RANSAC iteration cap")
      ->check(CLI::PositiveNumber);
}

int cmd_synth(const SceneFlags& f, const std::string& out) {
  const Scene scene = generate_scene(f.config());
  write_file_atomic(out, scene_to_json(scene));
  const std::size_t n = scene.correspondences.size();
  std::cout << "synth: " << n << " pairs (" << scene.config.n_inliers
            << " inliers, " << n - scene.config.n_inliers << " outliers) -> "
            << out << "\n";
  return 0;
}

int cmd_filter(const FilterFlags& f) {
  const Algorithm algo = parse_algorithm(f.algo);
  const LoadedInput input = load_correspondence_file(f.in);
  const FilterResult result =
      run_algorithm(algo, input.correspondences, settings_from(f), f.seed);
  std::optional<ConfusionCounts> counts;
  if (input.scene) counts = classify(result, input.scene->truth);

  write_file_atomic(f.out, format_correspondences(result.residual));
  const std::string result_path =
      f.result.empty() ? f.out + ".json" : f.result;
  write_file_atomic(result_path, result_to_json(result, algo, counts));
  if (!f.svg.empty()) write_file_atomic(f.svg, render_svg(result));

  std::cout << "filter: " << algorithm_name(algo) << " kept "
            << result.residual.size() << " of " << input.correspondences.size()
            << " pairs, termination " << termination_name(result.termination)
            << ", rms " << fixed(result.rms_error, 4);
  if (counts) {
    std::cout << ", rc " << counts->rc << " rf " << counts->rf << " dc "
              << counts->dc << " df " << counts->df;
  }
  std::cout << "\n";
  return 0;
}

struct BenchFlags {
  SceneFlags scene;
  FilterFlags filter;
  std::string ratios = "5:95:10";
  std::size_t repeats = 100;
  std::vector<std::size_t> inliers = {100};
  std::vector<std::string> algos = {"vtm", "rfvtm", "ransac"};
  std::string out;
  std::size_t threads = 0;
  bool no_timing = false;
};

int cmd_bench(const BenchFlags& f) {
  SweepConfig cfg;
  cfg.base = f.scene.config();
  cfg.ratios = parse_ratios(f.ratios);
  cfg.repeats = f.repeats;
  cfg.inlier_counts = f.inliers;
  cfg.algorithms.clear();
  for (const std::string& a : f.algos) cfg.algorithms.push_back(parse_algorithm(a));
  cfg.settings = settings_from(f.filter);
  cfg.threads = f.threads > 0 ? f.threads : threads_from_env();

  const std::vector<SweepRow> rows = sweep(cfg);
  write_file_atomic(f.out, sweep_to_csv(rows, !f.no_timing));

  for (Algorithm a : cfg.algorithms) {
    double pre = 0, rec = 0, ms = 0;
    std::size_t npre = 0, nrec = 0, cells = 0, failures = 0;
    for (const SweepRow& r : rows) {
      if (r.algorithm != a) continue;
      ++cells;
      failures += r.failures;
      ms += r.time_ms_mean;
      if (r.pre.mean) { pre += *r.pre.mean; ++npre; }
      if (r.rec.mean) { rec += *r.rec.mean; ++nrec; }
    }
    std::cout << "bench: " << algorithm_name(a) << " cells " << cells
              << " mean pre "
              << (npre ? fixed(pre / static_cast<double>(npre), 4) : "nan")
              << " mean rec "
              << (nrec ? fixed(rec / static_cast<double>(nrec), 4) : "nan")
              << " failures " << failures;
    if (!f.no_timing) {
      std::cout << " time_ms " << fixed(ms / static_cast<double>(cells), 2);
    }
    std::cout << "\n";
  }
  std::cout << "bench: wrote " << rows.size() << " rows -> " << f.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vertex trichotomy correspondence filtering"};
  app.require_subcommand(1);

  SceneFlags synth_flags;
  std::string synth_out;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic scene");
  synth->add_option("--inliers", synth_flags.inliers, "number of inliers");
  synth->add_option("--outlier-ratio", synth_flags.outlier_ratio,
                    "outliers / all pairs, in [0, 1)");
  add_transform_flags(synth, synth_flags);
  synth->add_option("--out", synth_out, "scene JSON path")->required();

  FilterFlags filter_flags;
  CLI::App* filter = app.add_subcommand("filter", "filter a correspondence set");
  filter->add_option("--algo", filter_flags.algo, "vtm, rfvtm or ransac");
  filter->add_option("--in", filter_flags.in, "scene JSON or text pairs")
      ->required();
  filter->add_option("--out", filter_flags.out, "residual pairs (text)")
      ->required();
  filter->add_option("--result", filter_flags.result,
                     "result JSON (default: <out>.json)");
  filter->add_option("--svg", filter_flags.svg, "match overlay SVG");
  filter->add_option("--seed", filter_flags.seed, "random seed");
  add_algorithm_flags(filter, filter_flags);

  BenchFlags bench_flags;
  CLI::App* bench = app.add_subcommand("bench", "Monte-Carlo sweep");
  bench->add_option("--ratios", bench_flags.ratios,
                    "percent range start:stop:step or fraction list");
  bench->add_option("--repeats", bench_flags.repeats, "trials per cell")
      ->check(CLI::PositiveNumber);
  bench->add_option("--inliers", bench_flags.inliers, "inlier counts")
      ->delimiter(',');
  bench->add_option("--algos", bench_flags.algos, "algorithms")
      ->delimiter(',');
  bench->add_option("--out", bench_flags.out, "report CSV path")->required();
  bench->add_option("--threads", bench_flags.threads,
                    "worker threads (default: VTM_THREADS or all cores)");
  bench->add_flag("--no-timing", bench_flags.no_timing,
                  "write nan in the time column for reproducible files");
  add_transform_flags(bench, bench_flags.scene);
  add_algorithm_flags(bench, bench_flags.filter);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitFlags;
  }

  try {
    if (*synth) return cmd_synth(synth_flags, synth_out);
    if (*filter) return cmd_filter(filter_flags);
    if (*bench) return cmd_bench(bench_flags);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
