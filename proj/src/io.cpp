#include "vtmatch/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "vtmatch/error.hpp"

namespace vtmatch {

namespace {

bool is_separator(char c) {
  return c == ' ' || c == '\t' || c == ',' || c == '\r' || c == '\v' ||
         c == '\f';
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

CorrespondenceSet parse_correspondences(const std::string& text) {
  CorrespondenceSet set;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    double values[4];
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < line.size()) {
      if (is_separator(line[i])) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < line.size() && !is_separator(line[j])) ++j;
      const std::string_view token = line.substr(i, j - i);
      // from_chars rejects a leading '+'.
      std::string_view digits = token;
      if (digits.size() > 1 && digits[0] == '+' && digits[1] != '-') {
        digits.remove_prefix(1);
      }
      if (count == 4) {
        throw ParseError(line_no, "line " + std::to_string(line_no) +
                                      ": expected 4 values, found more");
      }
      double v = 0.0;
      const auto [ptr, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (ec != std::errc() || ptr != digits.data() + digits.size() ||
          !std::isfinite(v)) {
        throw ParseError(line_no, "line " + std::to_string(line_no) +
                                      ": invalid number '" +
                                      std::string(token) + "'");
      }
      values[count++] = v;
      i = j;
    }
    if (count == 0) continue;
    if (count != 4) {
      throw ParseError(line_no, "line " + std::to_string(line_no) +
                                    ": expected 4 values, found " +
                                    std::to_string(count));
    }
    set.push_back({values[0], values[1]}, {values[2], values[3]},
                  static_cast<std::int64_t>(set.size()));
  }
  return set;
}

std::string format_correspondences(const CorrespondenceSet& set) {
  std::string out;
  out.reserve(set.size() * 96);
  for (std::size_t k = 0; k < set.size(); ++k) {
    out += g17(set.reference[k].x);
    out += ' ';
    out += g17(set.reference[k].y);
    out += ' ';
    out += g17(set.sensed[k].x);
    out += ' ';
    out += g17(set.sensed[k].y);
    out += '\n';
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, "error reading '" + path + "'");
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kIo, "cannot open '" + tmp.string() +
                                      "' for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw Error(ErrorCode::kIo, "error writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw Error(ErrorCode::kIo,
                "cannot rename onto '" + path + "': " + ec.message());
  }
}

LoadedInput load_correspondence_file(const std::string& path) {
  const std::string text = read_file(path);
  LoadedInput loaded;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    Scene scene = scene_from_json(text);
    loaded.correspondences = scene.correspondences;
    loaded.scene = std::move(scene);
  } else {
    loaded.correspondences = parse_correspondences(text);
  }
  return loaded;
}

namespace {

using nlohmann::ordered_json;

ordered_json id_array(const CorrespondenceSet& set) {
  ordered_json a = ordered_json::array();
  for (std::int64_t id : set.ids) a.push_back(id);
  return a;
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

std::string result_to_json(const FilterResult& result, Algorithm algorithm,
                           const std::optional<ConfusionCounts>& counts,
                           int indent) {
  ordered_json doc;
  doc["algorithm"] = algorithm_name(algorithm);
  doc["termination"] = termination_name(result.termination);
  doc["reflected"] = result.reflected;
  doc["n_residual"] = result.residual.size();
  doc["n_deleted"] = result.deleted.size();
  doc["residual_ids"] = id_array(result.residual);
  doc["deleted_ids"] = id_array(result.deleted);
  doc["recovered_ids"] = id_array(result.recovered);
  if (result.model) {
    const AffineTransform& t = *result.model;
    doc["model"] = {{"a11", t.a11}, {"a12", t.a12}, {"a21", t.a21},
                    {"a22", t.a22}, {"tx", t.tx},   {"ty", t.ty}};
  } else {
    doc["model"] = nullptr;
  }
  doc["rms_error"] = optional_number(result.rms_error);
  doc["orientation_evaluations"] = result.orientation_evaluations;
  if (counts) {
    const Metrics m = metrics(*counts);
    doc["counts"] = {{"rc", counts->rc},
                     {"rf", counts->rf},
                     {"dc", counts->dc},
                     {"df", counts->df}};
    doc["metrics"] = {{"acc", optional_number(m.acc)},
                      {"spe", optional_number(m.spe)},
                      {"pre", optional_number(m.pre)},
                      {"rec", optional_number(m.rec)}};
  }
  ordered_json trace = ordered_json::array();
  for (const TraceRecord& r : result.trace) {
    ordered_json rec;
    rec["outer_iteration"] = r.outer_iteration;
    rec["group"] = r.group;
    rec["removed_ids"] = r.removed_ids;
    rec["max_disparity"] = r.max_disparity;
    rec["recovered_ids"] = r.recovered_ids;
    rec["rms_error"] = optional_number(r.rms_error);
    rec["max_error"] = optional_number(r.max_error);
    if (!r.note.empty()) rec["note"] = r.note;
    trace.push_back(std::move(rec));
  }
  doc["trace"] = std::move(trace);
  return doc.dump(indent) + "\n";
}

namespace {

struct Bounds {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void add(const Point2& p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
};

// Maps a cloud into a square panel, preserving aspect ratio, y flipped so
// that the picture is y-up.
struct PanelMap {
  Bounds b;
  double scale = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;

  PanelMap(const Bounds& bounds, double size, double offset_x, double margin)
      : b(bounds) {
    const double w = std::max(b.max_x - b.min_x, 1e-12);
    const double h = std::max(b.max_y - b.min_y, 1e-12);
    scale = (size - 2.0 * margin) / std::max(w, h);
    x0 = offset_x + margin;
    y0 = margin;
  }

  Point2 operator()(const Point2& p) const {
    return {x0 + (p.x - b.min_x) * scale,
            y0 + (b.max_y - p.y) * scale};
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

void emit_pairs(std::string& out, const CorrespondenceSet& set,
                const PanelMap& left, const PanelMap& right,
                const char* cls) {
  out += "  <g class=\"" + std::string(cls) + "\">\n";
  for (std::size_t k = 0; k < set.size(); ++k) {
    const Point2 a = left(set.reference[k]);
    const Point2 b = right(set.sensed[k]);
    out += "    <line x1=\"" + fmt(a.x) + "\" y1=\"" + fmt(a.y) + "\" x2=\"" +
           fmt(b.x) + "\" y2=\"" + fmt(b.y) + "\" data-id=\"" +
           std::to_string(set.ids[k]) + "\"/>\n";
    out += "    <circle cx=\"" + fmt(a.x) + "\" cy=\"" + fmt(a.y) +
           "\" r=\"2\"/>\n";
    out += "    <circle cx=\"" + fmt(b.x) + "\" cy=\"" + fmt(b.y) +
           "\" r=\"2\"/>\n";
  }
  out += "  </g>\n";
}

}  // namespace

std::string render_svg(const FilterResult& result, const SvgOptions& options) {
  Bounds ref, sen;
  for (const CorrespondenceSet* s : {&result.residual, &result.deleted}) {
    for (const Point2& p : s->reference) ref.add(p);
    for (const Point2& p : s->sensed) sen.add(p);
  }
  if (result.residual.empty() && result.deleted.empty()) {
    ref.add({0.0, 0.0});
    sen.add({0.0, 0.0});
  }
  const double size = options.panel_size;
  const PanelMap left(ref, size, 0.0, options.margin);
  const PanelMap right(sen, size, size, options.margin);

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         fmt(2.0 * size) + "\" height=\"" + fmt(size) + "\" viewBox=\"0 0 " +
         fmt(2.0 * size) + " " + fmt(size) + "\">\n";
  out +=
      "  <style>\n"
      "    .residual line { stroke: #e6c200; stroke-width: 1; }\n"
      "    .residual circle { fill: #e6c200; }\n"
      "    .deleted line { stroke: #d62728; stroke-width: 1; }\n"
      "    .deleted circle { fill: #d62728; }\n"
      "  </style>\n";
  out += "  <rect x=\"0\" y=\"0\" width=\"" + fmt(2.0 * size) +
         "\" height=\"" + fmt(size) + "\" fill=\"#202020\"/>\n";
  out += "  <line x1=\"" + fmt(size) + "\" y1=\"0\" x2=\"" + fmt(size) +
         "\" y2=\"" + fmt(size) + "\" stroke=\"#808080\"/>\n";
  emit_pairs(out, result.deleted, left, right, "deleted");
  emit_pairs(out, result.residual, left, right, "residual");
  out += "</svg>\n";
  return out;
}

}  // namespace vtmatch
