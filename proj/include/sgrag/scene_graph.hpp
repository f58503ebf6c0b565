#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sgrag {

struct BoundingBox {
  double x_min = 0;
  double y_min = 0;
  double x_max = 0;
  double y_max = 0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
};

struct Point {
  double x = 0;
  double y = 0;
};

// Row-major over the uniform 3x3 partition of the image.
enum class GridCell : int {
  top_left = 0,
  top_center = 1,
  top_right = 2,
  middle_left = 3,
  center = 4,
  middle_right = 5,
  bottom_left = 6,
  bottom_center = 7,
  bottom_right = 8,
};

inline constexpr int kGridCellCount = 9;

std::string_view grid_cell_name(GridCell cell);
std::optional<GridCell> grid_cell_from_name(std::string_view name);
GridCell grid_cell_from_row_col(int row, int col);
int grid_row(GridCell cell);
int grid_col(GridCell cell);

struct ObjectInstance {
  int object_id = 0;
  std::string category_label;
  BoundingBox bbox;
  double detection_score = 1.0;
};

struct RelationTriple {
  int subject_id = 0;
  std::string predicate_label;
  int object_id = 0;
  double relation_score = 1.0;
};

// Immutable after construction; parsing is a pure function, so values are
// safe to share across threads.
struct SceneGraph {
  std::string image_id;
  int image_width = 0;
  int image_height = 0;
  std::vector<ObjectInstance> objects;
  std::vector<RelationTriple> relations;
  // Optional declared predicate vocabulary; the effective predicate set is
  // this union the labels observed in `relations`.
  std::vector<std::string> declared_predicates;

  const ObjectInstance* find_object(int object_id) const;
  std::set<std::string> predicate_set() const;
};

// Parses one canonical annotation document (UTF-8 JSON object). Throws
// Error{parse|validation|referential_integrity} naming the offending
// field/id/coordinates.
SceneGraph parse_scene_graph(std::string_view document);

// Canonical single-line JSON; parse(serialize(g)) == g field by field.
std::string serialize_scene_graph(const SceneGraph& graph);

// Enforces every type invariant; used by parse and by the adapters.
void validate_scene_graph(const SceneGraph& graph);

// Exact midpoint of the box.
Point center(const BoundingBox& bbox);

// col = min(floor(3x/W), 2), row = min(floor(3y/H), 2). A point on an
// internal gridline belongs to the higher-index cell; the right/bottom image
// edge clamps to index 2. Points outside [0,W]x[0,H] raise a validation
// error.
GridCell grid_cell(Point point, double image_width, double image_height);

std::map<std::string, int> category_counts(const SceneGraph& graph);

// Per-category grid-cell histograms of object centers; shared by chunk
// construction and ground-truth derivation.
std::map<std::string, std::map<GridCell, int>> category_grid_histograms(
    const SceneGraph& graph);

enum class DatasetFormat { directory, lines };
enum class AnnotationAdapter { canonical, aug, vg };

DatasetFormat dataset_format_from_name(std::string_view name);
AnnotationAdapter adapter_from_name(std::string_view name);

struct AdaptedDocument {
  SceneGraph graph;
  std::vector<std::string> warnings;  // lossy fields dropped during adaptation
};

// Converts one annotation document of the given layout into the canonical
// model. `canonical` passes through parse_scene_graph unchanged.
AdaptedDocument adapt_document(std::string_view document, AnnotationAdapter adapter);

struct Dataset {
  std::vector<SceneGraph> graphs;
  std::vector<std::string> warnings;

  const SceneGraph* find(std::string_view image_id) const;
};

// Loads a dataset from a directory of .json documents (sorted by filename)
// or a line-delimited file. Duplicate image ids raise a conflict error.
Dataset load_dataset(const std::string& path, DatasetFormat format,
                     AnnotationAdapter adapter);

}  // namespace sgrag
