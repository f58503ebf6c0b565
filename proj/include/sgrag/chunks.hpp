#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sgrag/scene_graph.hpp"

namespace sgrag {

// One per object category: the retrieval unit. canonical_text is always
// regenerable byte-identically from the other fields.
struct KnowledgeChunk {
  std::string chunk_id;  // image_id + "#" + category_label
  std::string image_id;
  std::string category_label;
  int count = 0;  // equals the sum of location_histogram values
  std::map<GridCell, int> location_histogram;
  std::vector<std::string> relation_phrases;  // sorted, deduplicated
  std::string canonical_text;
};

// Deterministic per-category chunks, sorted by category label. Every relation
// triple is phrased into the chunks of both of its endpoints. Objects and
// relations scoring below min_score are dropped (relations also drop when an
// endpoint does). Output is independent of input ordering.
std::vector<KnowledgeChunk> build_chunks(const SceneGraph& graph,
                                         double min_score = 0.0);

// `category: <label> | count: <n> | locations: <cell> x<k>[, ...] |
//  relations: <phrase>[; ...]` with locations in row-major cell order and the
// literal `none` for an empty phrase list. Bit-exact and idempotent.
std::string render_chunk_text(const KnowledgeChunk& chunk);

// One-line JSON record (sorted keys) for the chunk dump.
std::string chunk_to_record(const KnowledgeChunk& chunk);

// Parses a dump line and verifies the chunk invariants, including that the
// recorded text regenerates byte-identically.
KnowledgeChunk chunk_from_record(std::string_view line);

std::string render_chunk_dump(const std::vector<KnowledgeChunk>& chunks);
std::vector<KnowledgeChunk> parse_chunk_dump(std::string_view dump);

void write_chunk_dump(const std::string& path, const std::vector<KnowledgeChunk>& chunks);
std::vector<KnowledgeChunk> read_chunk_dump(const std::string& path);

}  // namespace sgrag
