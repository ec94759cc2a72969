#pragma once

#include <optional>
#include <string>

#include "vtmatch/evaluation.hpp"
#include "vtmatch/filter.hpp"
#include "vtmatch/geometry.hpp"
#include "vtmatch/synthgen.hpp"

namespace vtmatch {

// Plain text, one pair per line: "x y x' y'". Fields are separated by
// whitespace and/or commas; '#' starts a comment; blank lines are skipped.
// Ids are assigned 0..n-1 in line order. Throws ParseError with the 1-based
// line number.
CorrespondenceSet parse_correspondences(const std::string& text);

// Inverse of parse_correspondences, 17 significant digits per value.
std::string format_correspondences(const CorrespondenceSet& set);

// Whole-file read. Throws Error(kIo).
std::string read_file(const std::string& path);

// Writes to a temporary sibling and renames it over `path`. Throws
// Error(kIo).
void write_file_atomic(const std::string& path, const std::string& content);

struct LoadedInput {
  CorrespondenceSet correspondences;
  std::optional<Scene> scene;  // set when the file was a scene document
};

// Accepts either a scene document (JSON object) or the text format.
LoadedInput load_correspondence_file(const std::string& path);

// JSON result document. `counts` is included when ground truth is known.
std::string result_to_json(const FilterResult& result, Algorithm algorithm,
                           const std::optional<ConfusionCounts>& counts = {},
                           int indent = 2);

struct SvgOptions {
  double panel_size = 512.0;
  double margin = 16.0;
};

// Reference points on the left panel, sensed points on the right, one line
// per pair: residual pairs in yellow, deleted pairs in red.
std::string render_svg(const FilterResult& result,
                       const SvgOptions& options = {});

}  // namespace vtmatch
