#include "sgrag/scene_graph.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "sgrag/errors.hpp"
#include "sgrag/util.hpp"

namespace sgrag {
namespace {

using json = nlohmann::json;

constexpr std::string_view kCellNames[kGridCellCount] = {
    "top-left",    "top-center",    "top-right",
    "middle-left", "center",        "middle-right",
    "bottom-left", "bottom-center", "bottom-right",
};

[[noreturn]] void parse_fail(const std::string& field, const std::string& detail) {
  throw Error(ErrorCode::parse, field + ": " + detail);
}

double require_number(const json& obj, const std::string& field) {
  if (!obj.contains(field) || !obj.at(field).is_number()) {
    parse_fail(field, "expected a number");
  }
  return obj.at(field).get<double>();
}

int require_int(const json& obj, const std::string& field) {
  if (!obj.contains(field) || !obj.at(field).is_number_integer()) {
    parse_fail(field, "expected an integer");
  }
  return obj.at(field).get<int>();
}

std::string require_string(const json& obj, const std::string& field) {
  if (!obj.contains(field) || !obj.at(field).is_string()) {
    parse_fail(field, "expected a string");
  }
  return obj.at(field).get<std::string>();
}

double optional_score(const json& obj, const std::string& field) {
  if (!obj.contains(field)) {
    return 1.0;
  }
  if (!obj.at(field).is_number()) {
    parse_fail(field, "expected a number");
  }
  return obj.at(field).get<double>();
}

std::string bbox_string(const BoundingBox& b) {
  std::ostringstream out;
  out << "[" << b.x_min << ", " << b.y_min << ", " << b.x_max << ", " << b.y_max << "]";
  return out.str();
}

}  // namespace

std::string_view grid_cell_name(GridCell cell) {
  return kCellNames[static_cast<int>(cell)];
}

std::optional<GridCell> grid_cell_from_name(std::string_view name) {
  for (int i = 0; i < kGridCellCount; ++i) {
    if (kCellNames[i] == name) {
      return static_cast<GridCell>(i);
    }
  }
  return std::nullopt;
}

GridCell grid_cell_from_row_col(int row, int col) {
  if (row < 0 || row > 2 || col < 0 || col > 2) {
    throw Error(ErrorCode::validation,
                "grid cell (row " + std::to_string(row) + ", col " +
                    std::to_string(col) + ") out of range");
  }
  return static_cast<GridCell>(row * 3 + col);
}

int grid_row(GridCell cell) { return static_cast<int>(cell) / 3; }
int grid_col(GridCell cell) { return static_cast<int>(cell) % 3; }

const ObjectInstance* SceneGraph::find_object(int object_id) const {
  for (const auto& object : objects) {
    if (object.object_id == object_id) {
      return &object;
    }
  }
  return nullptr;
}

std::set<std::string> SceneGraph::predicate_set() const {
  std::set<std::string> predicates(declared_predicates.begin(),
                                   declared_predicates.end());
  for (const auto& relation : relations) {
    predicates.insert(relation.predicate_label);
  }
  return predicates;
}

void validate_scene_graph(const SceneGraph& graph) {
  if (graph.image_id.empty()) {
    throw Error(ErrorCode::validation, "image_id must be non-empty");
  }
  if (graph.image_width <= 0 || graph.image_height <= 0) {
    throw Error(ErrorCode::validation,
                "image " + graph.image_id + ": width and height must be positive, got " +
                    std::to_string(graph.image_width) + "x" +
                    std::to_string(graph.image_height));
  }
  std::unordered_set<int> ids;
  for (const auto& object : graph.objects) {
    if (object.object_id < 0) {
      throw Error(ErrorCode::validation,
                  "object id " + std::to_string(object.object_id) + " must be non-negative");
    }
    if (!ids.insert(object.object_id).second) {
      throw Error(ErrorCode::validation,
                  "duplicate object id " + std::to_string(object.object_id) +
                      " in image " + graph.image_id);
    }
    if (object.category_label.empty()) {
      throw Error(ErrorCode::validation,
                  "object " + std::to_string(object.object_id) + ": empty category label");
    }
    const BoundingBox& b = object.bbox;
    if (!(b.x_min < b.x_max) || !(b.y_min < b.y_max)) {
      throw Error(ErrorCode::validation,
                  "object " + std::to_string(object.object_id) +
                      ": degenerate bbox " + bbox_string(b));
    }
    if (b.x_min < 0 || b.y_min < 0 || b.x_max > graph.image_width ||
        b.y_max > graph.image_height) {
      throw Error(ErrorCode::validation,
                  "object " + std::to_string(object.object_id) + ": bbox " +
                      bbox_string(b) + " outside image " +
                      std::to_string(graph.image_width) + "x" +
                      std::to_string(graph.image_height));
    }
    if (object.detection_score < 0.0 || object.detection_score > 1.0) {
      throw Error(ErrorCode::validation,
                  "object " + std::to_string(object.object_id) + ": score " +
                      std::to_string(object.detection_score) + " outside [0, 1]");
    }
  }
  for (const auto& relation : graph.relations) {
    if (relation.predicate_label.empty()) {
      throw Error(ErrorCode::validation, "relation with empty predicate label");
    }
    if (relation.subject_id == relation.object_id) {
      throw Error(ErrorCode::validation,
                  "relation subject and object are both id " +
                      std::to_string(relation.subject_id));
    }
    for (int endpoint : {relation.subject_id, relation.object_id}) {
      if (!ids.count(endpoint)) {
        throw Error(ErrorCode::referential_integrity,
                    "relation references object id " + std::to_string(endpoint) +
                        " absent from image " + graph.image_id);
      }
    }
    if (relation.relation_score < 0.0 || relation.relation_score > 1.0) {
      throw Error(ErrorCode::validation,
                  "relation score " + std::to_string(relation.relation_score) +
                      " outside [0, 1]");
    }
  }
}

SceneGraph parse_scene_graph(std::string_view document) {
  json doc = json::parse(document, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    parse_fail("document", "not a JSON object");
  }

  SceneGraph graph;
  graph.image_id = require_string(doc, "image_id");
  graph.image_width = require_int(doc, "width");
  graph.image_height = require_int(doc, "height");

  if (!doc.contains("objects") || !doc.at("objects").is_array()) {
    parse_fail("objects", "expected an array");
  }
  for (std::size_t i = 0; i < doc.at("objects").size(); ++i) {
    const json& entry = doc.at("objects")[i];
    const std::string where = "objects[" + std::to_string(i) + "]";
    if (!entry.is_object()) {
      parse_fail(where, "expected an object");
    }
    ObjectInstance object;
    object.object_id = require_int(entry, "id");
    object.category_label = normalize_label(require_string(entry, "label"));
    if (!entry.contains("bbox") || !entry.at("bbox").is_array() ||
        entry.at("bbox").size() != 4) {
      parse_fail(where + ".bbox", "expected [x_min, y_min, x_max, y_max]");
    }
    double coords[4];
    for (int c = 0; c < 4; ++c) {
      if (!entry.at("bbox")[c].is_number()) {
        parse_fail(where + ".bbox", "expected numeric coordinates");
      }
      coords[c] = entry.at("bbox")[c].get<double>();
    }
    object.bbox = BoundingBox{coords[0], coords[1], coords[2], coords[3]};
    object.detection_score = optional_score(entry, "score");
    graph.objects.push_back(std::move(object));
  }

  if (!doc.contains("relations") || !doc.at("relations").is_array()) {
    parse_fail("relations", "expected an array");
  }
  for (std::size_t i = 0; i < doc.at("relations").size(); ++i) {
    const json& entry = doc.at("relations")[i];
    const std::string where = "relations[" + std::to_string(i) + "]";
    if (!entry.is_object()) {
      parse_fail(where, "expected an object");
    }
    RelationTriple relation;
    relation.subject_id = require_int(entry, "subject");
    relation.predicate_label = normalize_label(require_string(entry, "predicate"));
    relation.object_id = require_int(entry, "object");
    relation.relation_score = optional_score(entry, "score");
    graph.relations.push_back(std::move(relation));
  }

  if (doc.contains("predicates")) {
    if (!doc.at("predicates").is_array()) {
      parse_fail("predicates", "expected an array of strings");
    }
    for (const json& entry : doc.at("predicates")) {
      if (!entry.is_string()) {
        parse_fail("predicates", "expected an array of strings");
      }
      graph.declared_predicates.push_back(normalize_label(entry.get<std::string>()));
    }
  }

  validate_scene_graph(graph);
  return graph;
}

std::string serialize_scene_graph(const SceneGraph& graph) {
  json doc;
  doc["image_id"] = graph.image_id;
  doc["width"] = graph.image_width;
  doc["height"] = graph.image_height;
  doc["objects"] = json::array();
  for (const auto& object : graph.objects) {
    json entry;
    entry["id"] = object.object_id;
    entry["label"] = object.category_label;
    entry["bbox"] = {object.bbox.x_min, object.bbox.y_min, object.bbox.x_max,
                     object.bbox.y_max};
    entry["score"] = object.detection_score;
    doc["objects"].push_back(std::move(entry));
  }
  doc["relations"] = json::array();
  for (const auto& relation : graph.relations) {
    json entry;
    entry["subject"] = relation.subject_id;
    entry["predicate"] = relation.predicate_label;
    entry["object"] = relation.object_id;
    entry["score"] = relation.relation_score;
    doc["relations"].push_back(std::move(entry));
  }
  if (!graph.declared_predicates.empty()) {
    doc["predicates"] = graph.declared_predicates;
  }
  return doc.dump();
}

Point center(const BoundingBox& bbox) {
  return Point{(bbox.x_min + bbox.x_max) / 2.0, (bbox.y_min + bbox.y_max) / 2.0};
}

GridCell grid_cell(Point point, double image_width, double image_height) {
  if (image_width <= 0 || image_height <= 0) {
    throw Error(ErrorCode::validation, "image dimensions must be positive");
  }
  if (point.x < 0 || point.x > image_width || point.y < 0 || point.y > image_height) {
    std::ostringstream out;
    out << "point (" << point.x << ", " << point.y << ") outside image "
        << image_width << "x" << image_height;
    throw Error(ErrorCode::validation, out.str());
  }
  int col = std::min(static_cast<int>(std::floor(3.0 * point.x / image_width)), 2);
  int row = std::min(static_cast<int>(std::floor(3.0 * point.y / image_height)), 2);
  return grid_cell_from_row_col(row, col);
}

std::map<std::string, int> category_counts(const SceneGraph& graph) {
  std::map<std::string, int> counts;
  for (const auto& object : graph.objects) {
    counts[object.category_label] += 1;
  }
  return counts;
}

std::map<std::string, std::map<GridCell, int>> category_grid_histograms(
    const SceneGraph& graph) {
  std::map<std::string, std::map<GridCell, int>> histograms;
  for (const auto& object : graph.objects) {
    GridCell cell = grid_cell(center(object.bbox), graph.image_width, graph.image_height);
    histograms[object.category_label][cell] += 1;
  }
  return histograms;
}

DatasetFormat dataset_format_from_name(std::string_view name) {
  if (name == "dir") return DatasetFormat::directory;
  if (name == "lines") return DatasetFormat::lines;
  throw Error(ErrorCode::usage,
              "dataset.format: expected 'dir' or 'lines', got '" + std::string(name) + "'");
}

AnnotationAdapter adapter_from_name(std::string_view name) {
  if (name == "canonical") return AnnotationAdapter::canonical;
  if (name == "aug") return AnnotationAdapter::aug;
  if (name == "vg") return AnnotationAdapter::vg;
  throw Error(ErrorCode::usage,
              "adapter: expected 'canonical', 'aug' or 'vg', got '" + std::string(name) + "'");
}

namespace {

// AUG-style layout: {"image": <id>, "width", "height",
//   "objects": [{"id", "category", "bbox": [x1,y1,x2,y2], "score"?}],
//   "relations": [[subject, predicate, object], ...]}.
// Extra per-object keys are dropped with a warning; boxes are clamped to the
// image frame.
AdaptedDocument adapt_aug(std::string_view document) {
  json doc = json::parse(document, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    parse_fail("document", "not a JSON object (aug layout)");
  }
  AdaptedDocument result;
  json canonical;

  if (doc.contains("image") && doc.at("image").is_string()) {
    canonical["image_id"] = doc.at("image");
  } else {
    parse_fail("image", "expected a string (aug layout)");
  }
  canonical["width"] = require_int(doc, "width");
  canonical["height"] = require_int(doc, "height");
  double width = canonical["width"].get<double>();
  double height = canonical["height"].get<double>();

  canonical["objects"] = json::array();
  if (doc.contains("objects") && doc.at("objects").is_array()) {
    for (const json& entry : doc.at("objects")) {
      json object;
      object["id"] = require_int(entry, "id");
      object["label"] = require_string(entry, "category");
      if (!entry.contains("bbox") || !entry.at("bbox").is_array() ||
          entry.at("bbox").size() != 4) {
        parse_fail("objects.bbox", "expected [x1, y1, x2, y2] (aug layout)");
      }
      double x1 = entry.at("bbox")[0].get<double>();
      double y1 = entry.at("bbox")[1].get<double>();
      double x2 = entry.at("bbox")[2].get<double>();
      double y2 = entry.at("bbox")[3].get<double>();
      double cx1 = std::clamp(x1, 0.0, width);
      double cy1 = std::clamp(y1, 0.0, height);
      double cx2 = std::clamp(x2, 0.0, width);
      double cy2 = std::clamp(y2, 0.0, height);
      if (cx1 != x1 || cy1 != y1 || cx2 != x2 || cy2 != y2) {
        result.warnings.push_back("aug: clamped out-of-frame bbox of object " +
                                  std::to_string(object["id"].get<int>()));
      }
      object["bbox"] = {cx1, cy1, cx2, cy2};
      if (entry.contains("score")) {
        object["score"] = entry.at("score");
      }
      for (const auto& item : entry.items()) {
        if (item.key() != "id" && item.key() != "category" && item.key() != "bbox" &&
            item.key() != "score") {
          result.warnings.push_back("aug: dropped object field '" + item.key() + "'");
        }
      }
      canonical["objects"].push_back(std::move(object));
    }
  }

  canonical["relations"] = json::array();
  if (doc.contains("relations") && doc.at("relations").is_array()) {
    for (const json& entry : doc.at("relations")) {
      if (!entry.is_array() || entry.size() != 3) {
        parse_fail("relations", "expected [subject, predicate, object] triples (aug layout)");
      }
      json relation;
      relation["subject"] = entry[0];
      relation["predicate"] = entry[1];
      relation["object"] = entry[2];
      canonical["relations"].push_back(std::move(relation));
    }
  }

  result.graph = parse_scene_graph(canonical.dump());
  return result;
}

// VG-style layout: {"image_id": <int>, "width", "height",
//   "objects": [{"object_id", "names": [...], "x", "y", "w", "h", "synsets"?}],
//   "relationships": [{"subject_id", "predicate", "object_id"}]}.
// Only the first name is kept; synsets and extra names are dropped with a
// warning; (x, y, w, h) converts to corner coordinates clamped to the frame.
AdaptedDocument adapt_vg(std::string_view document) {
  json doc = json::parse(document, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    parse_fail("document", "not a JSON object (vg layout)");
  }
  AdaptedDocument result;
  json canonical;

  if (!doc.contains("image_id") || !doc.at("image_id").is_number_integer()) {
    parse_fail("image_id", "expected an integer (vg layout)");
  }
  canonical["image_id"] = std::to_string(doc.at("image_id").get<long long>());
  canonical["width"] = require_int(doc, "width");
  canonical["height"] = require_int(doc, "height");
  double width = canonical["width"].get<double>();
  double height = canonical["height"].get<double>();

  canonical["objects"] = json::array();
  if (doc.contains("objects") && doc.at("objects").is_array()) {
    for (const json& entry : doc.at("objects")) {
      json object;
      object["id"] = require_int(entry, "object_id");
      if (!entry.contains("names") || !entry.at("names").is_array() ||
          entry.at("names").empty() || !entry.at("names")[0].is_string()) {
        parse_fail("objects.names", "expected a non-empty string array (vg layout)");
      }
      object["label"] = entry.at("names")[0];
      if (entry.at("names").size() > 1) {
        result.warnings.push_back("vg: dropped " +
                                  std::to_string(entry.at("names").size() - 1) +
                                  " alternate name(s) of object " +
                                  std::to_string(object["id"].get<int>()));
      }
      if (entry.contains("synsets")) {
        result.warnings.push_back("vg: dropped synsets of object " +
                                  std::to_string(object["id"].get<int>()));
      }
      double x = require_number(entry, "x");
      double y = require_number(entry, "y");
      double w = require_number(entry, "w");
      double h = require_number(entry, "h");
      double x1 = std::clamp(x, 0.0, width);
      double y1 = std::clamp(y, 0.0, height);
      double x2 = std::clamp(x + w, 0.0, width);
      double y2 = std::clamp(y + h, 0.0, height);
      if (x1 != x || y1 != y || x2 != x + w || y2 != y + h) {
        result.warnings.push_back("vg: clamped out-of-frame bbox of object " +
                                  std::to_string(object["id"].get<int>()));
      }
      object["bbox"] = {x1, y1, x2, y2};
      canonical["objects"].push_back(std::move(object));
    }
  }

  canonical["relations"] = json::array();
  if (doc.contains("relationships") && doc.at("relationships").is_array()) {
    for (const json& entry : doc.at("relationships")) {
      json relation;
      relation["subject"] = require_int(entry, "subject_id");
      relation["predicate"] = require_string(entry, "predicate");
      relation["object"] = require_int(entry, "object_id");
      canonical["relations"].push_back(std::move(relation));
    }
  }

  result.graph = parse_scene_graph(canonical.dump());
  return result;
}

}  // namespace

AdaptedDocument adapt_document(std::string_view document, AnnotationAdapter adapter) {
  switch (adapter) {
    case AnnotationAdapter::canonical: {
      AdaptedDocument result;
      result.graph = parse_scene_graph(document);
      return result;
    }
    case AnnotationAdapter::aug:
      return adapt_aug(document);
    case AnnotationAdapter::vg:
      return adapt_vg(document);
  }
  throw Error(ErrorCode::internal, "unhandled adapter");
}

const SceneGraph* Dataset::find(std::string_view image_id) const {
  for (const auto& graph : graphs) {
    if (graph.image_id == image_id) {
      return &graph;
    }
  }
  return nullptr;
}

Dataset load_dataset(const std::string& path, DatasetFormat format,
                     AnnotationAdapter adapter) {
  namespace fs = std::filesystem;
  Dataset dataset;
  std::vector<std::string> documents;

  if (format == DatasetFormat::directory) {
    if (!fs::is_directory(path)) {
      throw Error(ErrorCode::input, "not a directory: " + path);
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      documents.push_back(read_text_file(file.string()));
    }
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw Error(ErrorCode::input, "cannot open dataset file: " + path);
    }
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) {
        documents.push_back(line);
      }
    }
  }

  std::unordered_set<std::string> seen_ids;
  for (const auto& document : documents) {
    AdaptedDocument adapted = adapt_document(document, adapter);
    if (!seen_ids.insert(adapted.graph.image_id).second) {
      throw Error(ErrorCode::conflict,
                  "duplicate image_id in dataset: " + adapted.graph.image_id);
    }
    dataset.graphs.push_back(std::move(adapted.graph));
    for (auto& warning : adapted.warnings) {
      dataset.warnings.push_back(std::move(warning));
    }
  }
  return dataset;
}

}  // namespace sgrag
