#include "sgrag/chunks.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "sgrag/errors.hpp"
#include "sgrag/util.hpp"

namespace sgrag {
namespace {

using json = nlohmann::json;

}  // namespace

std::vector<KnowledgeChunk> build_chunks(const SceneGraph& graph, double min_score) {
  std::unordered_map<int, const ObjectInstance*> objects_by_id;
  std::map<std::string, std::map<GridCell, int>> histograms;
  std::map<std::string, int> counts;
  for (const auto& object : graph.objects) {
    if (object.detection_score < min_score) {
      continue;
    }
    objects_by_id.emplace(object.object_id, &object);
    GridCell cell =
        grid_cell(center(object.bbox), graph.image_width, graph.image_height);
    histograms[object.category_label][cell] += 1;
    counts[object.category_label] += 1;
  }

  std::map<std::string, std::set<std::string>> phrases_by_category;
  for (const auto& relation : graph.relations) {
    if (relation.relation_score < min_score) {
      continue;
    }
    auto subject = objects_by_id.find(relation.subject_id);
    auto object = objects_by_id.find(relation.object_id);
    if (subject == objects_by_id.end() || object == objects_by_id.end()) {
      continue;  // an endpoint fell below the score filter
    }
    std::string phrase = subject->second->category_label + " " +
                         relation.predicate_label + " " +
                         object->second->category_label;
    phrases_by_category[subject->second->category_label].insert(phrase);
    phrases_by_category[object->second->category_label].insert(std::move(phrase));
  }

  std::vector<KnowledgeChunk> chunks;
  chunks.reserve(counts.size());
  for (const auto& [label, count] : counts) {
    KnowledgeChunk chunk;
    chunk.chunk_id = graph.image_id + "#" + label;
    chunk.image_id = graph.image_id;
    chunk.category_label = label;
    chunk.count = count;
    chunk.location_histogram = histograms[label];
    auto phrases = phrases_by_category.find(label);
    if (phrases != phrases_by_category.end()) {
      chunk.relation_phrases.assign(phrases->second.begin(), phrases->second.end());
    }
    chunk.canonical_text = render_chunk_text(chunk);
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

std::string render_chunk_text(const KnowledgeChunk& chunk) {
  std::string text = "category: " + chunk.category_label +
                     " | count: " + std::to_string(chunk.count) + " | locations: ";
  bool first = true;
  for (const auto& [cell, count] : chunk.location_histogram) {
    if (!first) text += ", ";
    text += std::string(grid_cell_name(cell)) + " x" + std::to_string(count);
    first = false;
  }
  text += " | relations: ";
  if (chunk.relation_phrases.empty()) {
    text += "none";
  } else {
    text += join(chunk.relation_phrases, "; ");
  }
  return text;
}

std::string chunk_to_record(const KnowledgeChunk& chunk) {
  json record;
  record["chunk_id"] = chunk.chunk_id;
  record["image_id"] = chunk.image_id;
  record["category"] = chunk.category_label;
  record["count"] = chunk.count;
  json locations = json::object();
  for (const auto& [cell, count] : chunk.location_histogram) {
    locations[std::string(grid_cell_name(cell))] = count;
  }
  record["locations"] = std::move(locations);
  record["relations"] = chunk.relation_phrases;
  record["text"] = chunk.canonical_text;
  return record.dump();
}

KnowledgeChunk chunk_from_record(std::string_view line) {
  json record = json::parse(line, nullptr, false);
  if (record.is_discarded() || !record.is_object()) {
    throw Error(ErrorCode::parse, "chunk record: not a JSON object");
  }
  KnowledgeChunk chunk;
  try {
    chunk.chunk_id = record.at("chunk_id").get<std::string>();
    chunk.image_id = record.at("image_id").get<std::string>();
    chunk.category_label = record.at("category").get<std::string>();
    chunk.count = record.at("count").get<int>();
    for (const auto& item : record.at("locations").items()) {
      auto cell = grid_cell_from_name(item.key());
      if (!cell) {
        throw Error(ErrorCode::parse, "chunk record: unknown grid cell '" + item.key() + "'");
      }
      chunk.location_histogram[*cell] = item.value().get<int>();
    }
    chunk.relation_phrases = record.at("relations").get<std::vector<std::string>>();
    chunk.canonical_text = record.at("text").get<std::string>();
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::parse, std::string("chunk record: ") + ex.what());
  }

  int histogram_total = 0;
  for (const auto& [cell, count] : chunk.location_histogram) {
    if (count <= 0) {
      throw Error(ErrorCode::validation,
                  "chunk " + chunk.chunk_id + ": non-positive location count");
    }
    histogram_total += count;
  }
  if (histogram_total != chunk.count) {
    throw Error(ErrorCode::validation,
                "chunk " + chunk.chunk_id + ": count " + std::to_string(chunk.count) +
                    " != histogram total " + std::to_string(histogram_total));
  }
  if (!std::is_sorted(chunk.relation_phrases.begin(), chunk.relation_phrases.end()) ||
      std::adjacent_find(chunk.relation_phrases.begin(), chunk.relation_phrases.end()) !=
          chunk.relation_phrases.end()) {
    throw Error(ErrorCode::validation,
                "chunk " + chunk.chunk_id + ": relation phrases not sorted/deduplicated");
  }
  if (render_chunk_text(chunk) != chunk.canonical_text) {
    throw Error(ErrorCode::validation,
                "chunk " + chunk.chunk_id + ": recorded text does not regenerate from fields");
  }
  return chunk;
}

std::string render_chunk_dump(const std::vector<KnowledgeChunk>& chunks) {
  std::string out;
  for (const auto& chunk : chunks) {
    out += chunk_to_record(chunk);
    out += '\n';
  }
  return out;
}

std::vector<KnowledgeChunk> parse_chunk_dump(std::string_view dump) {
  std::vector<KnowledgeChunk> chunks;
  std::size_t start = 0;
  while (start < dump.size()) {
    std::size_t end = dump.find('\n', start);
    if (end == std::string_view::npos) end = dump.size();
    std::string_view line = dump.substr(start, end - start);
    if (!line.empty()) {
      chunks.push_back(chunk_from_record(line));
    }
    start = end + 1;
  }
  return chunks;
}

void write_chunk_dump(const std::string& path, const std::vector<KnowledgeChunk>& chunks) {
  write_text_file(path, render_chunk_dump(chunks));
}

std::vector<KnowledgeChunk> read_chunk_dump(const std::string& path) {
  return parse_chunk_dump(read_text_file(path));
}

}  // namespace sgrag
