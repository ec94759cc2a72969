#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "vtmatch/error.hpp"
#include "vtmatch/evaluation.hpp"
#include "vtmatch/filter.hpp"
#include "vtmatch/io.hpp"
#include "vtmatch/ransac.hpp"
#include "vtmatch/synthgen.hpp"

namespace py = pybind11;
using namespace vtmatch;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<Point2> points_from(const Array& a, const char* what) {
  if (a.ndim() != 2 || a.shape(1) != 2)
    throw Error(ErrorCode::kInvalidInput,
                std::string(what) + " must have shape (n, 2)");
  auto r = a.unchecked<2>();
  std::vector<Point2> out(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) out[i] = {r(i, 0), r(i, 1)};
  return out;
}

Array points_to(const std::vector<Point2>& pts) {
  Array a({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    w(i, 0) = pts[i].x;
    w(i, 1) = pts[i].y;
  }
  return a;
}

CorrespondenceSet make_set(const Array& reference, const Array& sensed,
                           const std::optional<std::vector<std::int64_t>>& ids) {
  CorrespondenceSet c = CorrespondenceSet::from_points(
      points_from(reference, "reference"), points_from(sensed, "sensed"));
  if (c.reference.size() != c.sensed.size())
    throw Error(ErrorCode::kInvalidInput,
                "reference and sensed differ in length");
  if (ids) {
    if (ids->size() != c.size())
      throw Error(ErrorCode::kInvalidInput, "ids differ in length");
    c.ids = *ids;
  }
  validate(c);
  return c;
}

FilterOptions options_for(std::optional<double> eps, bool handle_reflections) {
  FilterOptions o;
  if (eps) o.eps = *eps;
  o.handle_reflections = handle_reflections;
  return o;
}

py::array_t<double> matrix_of(const AffineTransform& t) {
  py::array_t<double> a({2, 3});
  auto w = a.mutable_unchecked<2>();
  w(0, 0) = t.a11, w(0, 1) = t.a12, w(0, 2) = t.tx;
  w(1, 0) = t.a21, w(1, 1) = t.a22, w(1, 2) = t.ty;
  return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Vertex trichotomy correspondence filtering";

  static py::exception<Error> error(m, "VtmatchError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(error_code_name(e.code())) + ": " +
                            e.what())
                               .c_str());
    }
  });

  py::class_<AffineTransform>(m, "AffineTransform")
      .def(py::init<>())
      .def(py::init([](double a11, double a12, double a21, double a22,
                       double tx, double ty) {
             return AffineTransform{a11, a12, a21, a22, tx, ty};
           }),
           py::arg("a11"), py::arg("a12"), py::arg("a21"), py::arg("a22"),
           py::arg("tx") = 0.0, py::arg("ty") = 0.0)
      .def_readwrite("a11", &AffineTransform::a11)
      .def_readwrite("a12", &AffineTransform::a12)
      .def_readwrite("a21", &AffineTransform::a21)
      .def_readwrite("a22", &AffineTransform::a22)
      .def_readwrite("tx", &AffineTransform::tx)
      .def_readwrite("ty", &AffineTransform::ty)
      .def("det", &AffineTransform::det)
      .def("matrix", &matrix_of, "2x3 matrix [A | t].")
      .def("apply",
           [](const AffineTransform& t, const Array& pts) {
             std::vector<Point2> p = points_from(pts, "points");
             for (Point2& q : p) q = apply_affine(t, q);
             return points_to(p);
           })
      .def("__repr__", [](const AffineTransform& t) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "AffineTransform(%g, %g, %g, %g, tx=%g, ty=%g)", t.a11,
                      t.a12, t.a21, t.a22, t.tx, t.ty);
        return std::string(buf);
      });

  py::class_<FilterResult>(m, "FilterResult")
      .def_property_readonly(
          "residual_ids", [](const FilterResult& r) { return r.residual.ids; })
      .def_property_readonly(
          "deleted_ids", [](const FilterResult& r) { return r.deleted.ids; })
      .def_property_readonly(
          "recovered_ids", [](const FilterResult& r) { return r.recovered.ids; })
      .def_readonly("model", &FilterResult::model)
      .def_readonly("rms_error", &FilterResult::rms_error)
      .def_readonly("reflected", &FilterResult::reflected)
      .def_readonly("orientation_evaluations",
                    &FilterResult::orientation_evaluations)
      .def_property_readonly("termination",
                             [](const FilterResult& r) {
                               return std::string(
                                   termination_name(r.termination));
                             })
      .def("to_json",
           [](const FilterResult& r, const std::string& algorithm) {
             return result_to_json(r, parse_algorithm(algorithm));
           },
           py::arg("algorithm") = "rfvtm")
      .def("to_svg", [](const FilterResult& r) { return render_svg(r); });

  m.def("orient",
        [](std::pair<double, double> a, std::pair<double, double> b,
           std::pair<double, double> c, double eps) {
          return static_cast<int>(orient({a.first, a.second},
                                         {b.first, b.second},
                                         {c.first, c.second}, eps));
        },
        py::arg("vi"), py::arg("vj"), py::arg("vk"), py::arg("eps") = 0.0,
        "Orientation of vk relative to the directed line vi -> vj: 1, 0 or -1.");

  m.def("estimate_affine",
        [](const Array& reference, const Array& sensed) {
          return estimate_affine_lsm(make_set(reference, sensed, std::nullopt));
        },
        py::arg("reference"), py::arg("sensed"));

  m.def("vtm",
        [](const Array& reference, const Array& sensed,
           std::optional<std::vector<std::int64_t>> ids, std::size_t groups,
           std::uint64_t seed, std::optional<double> eps,
           bool handle_reflections) {
          const CorrespondenceSet c = make_set(reference, sensed, ids);
          const FilterOptions o = options_for(eps, handle_reflections);
          py::gil_scoped_release release;
          return groups == 1 ? vtm(c, o) : vtm_subdivided(c, groups, seed, o);
        },
        py::arg("reference"), py::arg("sensed"), py::arg("ids") = py::none(),
        py::arg("m") = 1, py::arg("seed") = 0, py::arg("eps") = py::none(),
        py::arg("handle_reflections") = true);

  m.def("rfvtm",
        [](const Array& reference, const Array& sensed,
           std::optional<std::vector<std::int64_t>> ids, double th_err,
           std::size_t groups, std::uint64_t seed,
           std::size_t max_outer_iterations, std::optional<double> eps,
           bool handle_reflections) {
          const CorrespondenceSet c = make_set(reference, sensed, ids);
          RfvtmConfig cfg;
          cfg.th_err = th_err;
          cfg.m = groups;
          cfg.seed = seed;
          cfg.max_outer_iterations = max_outer_iterations;
          cfg.descriptor = options_for(eps, handle_reflections);
          py::gil_scoped_release release;
          return rfvtm(c, cfg);
        },
        py::arg("reference"), py::arg("sensed"), py::arg("ids") = py::none(),
        py::arg("th_err") = 0.5, py::arg("m") = 1, py::arg("seed") = 0,
        py::arg("max_outer_iterations") = 50, py::arg("eps") = py::none(),
        py::arg("handle_reflections") = true);

  m.def("ransac",
        [](const Array& reference, const Array& sensed,
           std::optional<std::vector<std::int64_t>> ids, double threshold,
           std::size_t max_iterations, double confidence, std::uint64_t seed) {
          const CorrespondenceSet c = make_set(reference, sensed, ids);
          RansacConfig cfg;
          cfg.inlier_threshold = threshold;
          cfg.max_iterations = max_iterations;
          cfg.confidence = confidence;
          cfg.seed = seed;
          py::gil_scoped_release release;
          return ransac_affine(c, cfg);
        },
        py::arg("reference"), py::arg("sensed"), py::arg("ids") = py::none(),
        py::arg("threshold") = 2.0, py::arg("max_iterations") = 10000,
        py::arg("confidence") = 0.99, py::arg("seed") = 0);

  py::class_<Scene>(m, "Scene")
      .def_property_readonly("reference",
                             [](const Scene& s) {
                               return points_to(s.correspondences.reference);
                             })
      .def_property_readonly("sensed",
                             [](const Scene& s) {
                               return points_to(s.correspondences.sensed);
                             })
      .def_property_readonly("ids",
                             [](const Scene& s) { return s.correspondences.ids; })
      .def_property_readonly(
          "labels", [](const Scene& s) { return s.truth.labels; })
      .def_property_readonly(
          "transform", [](const Scene& s) { return s.truth.transform; })
      .def("to_json", [](const Scene& s) { return scene_to_json(s); })
      .def_static("from_json", &scene_from_json)
      .def("classify",
           [](const Scene& s, const FilterResult& r, double tolerance) {
             const ConfusionCounts c = classify(r, s.truth, tolerance);
             const Metrics mt = metrics(c);
             py::dict d;
             d["rc"] = c.rc;
             d["rf"] = c.rf;
             d["dc"] = c.dc;
             d["df"] = c.df;
             d["acc"] = mt.acc;
             d["spe"] = mt.spe;
             d["pre"] = mt.pre;
             d["rec"] = mt.rec;
             return d;
           },
           py::arg("result"), py::arg("tolerance") = 2.0,
           "Confusion counts and metrics; undefined ratios are None.");

  m.def("generate_scene",
        [](std::size_t n_inliers, double outlier_ratio, double rotation,
           double scale, double shear_h, double shear_v, double tx, double ty,
           double noise, std::uint64_t seed, bool reflect, double field_width,
           double field_height) {
          SceneConfig cfg;
          cfg.n_inliers = n_inliers;
          cfg.outlier_ratio = outlier_ratio;
          cfg.rotation_deg = rotation;
          cfg.scale = scale;
          cfg.shear_h = shear_h;
          cfg.shear_v = shear_v;
          cfg.translation = {tx, ty};
          cfg.noise_sigma = noise;
          cfg.seed = seed;
          cfg.reflect = reflect;
          cfg.field_width = field_width;
          cfg.field_height = field_height;
          return generate_scene(cfg);
        },
        py::arg("n_inliers") = 100, py::arg("outlier_ratio") = 0.0,
        py::arg("rotation") = 0.0, py::arg("scale") = 1.0,
        py::arg("shear_h") = 0.0, py::arg("shear_v") = 0.0,
        py::arg("tx") = 0.0, py::arg("ty") = 0.0, py::arg("noise") = 0.5,
        py::arg("seed") = 0, py::arg("reflect") = false,
        py::arg("field_width") = 512.0, py::arg("field_height") = 512.0);

  m.def("metrics",
        [](std::size_t rc, std::size_t rf, std::size_t dc, std::size_t df) {
          const Metrics mt = metrics({rc, rf, dc, df});
          return py::make_tuple(mt.acc, mt.spe, mt.pre, mt.rec);
        },
        py::arg("rc"), py::arg("rf"), py::arg("dc"), py::arg("df"),
        "(acc, spe, pre, rec); None where the denominator is zero.");
}
