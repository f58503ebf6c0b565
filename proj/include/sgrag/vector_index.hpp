#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sgrag/chunks.hpp"
#include "sgrag/embedder.hpp"

namespace sgrag {

struct IndexEntry {
  std::string chunk_id;   // unique within an index
  EmbeddingVector vector; // f32-grade values, see VectorIndex::insert
  double norm = 0.0;      // cached L2 norm of the stored values
  KnowledgeChunk payload;
};

struct RetrievalHit {
  std::string chunk_id;
  double score = 0.0;  // cosine similarity, in [-1, 1]
  KnowledgeChunk payload;
};

// Scores non-increasing; ties broken by chunk_id ascending; length min(k, n).
struct RetrievalResult {
  std::vector<RetrievalHit> hits;
};

// Exact-scan cosine index. Immutable once built; concurrent reads are safe.
// Inserted vectors are L2-normalized in double precision and then snapped to
// the float32 grid so that the persisted form (32-bit floats) is bit-identical
// to the in-memory form.
class VectorIndex {
 public:
  VectorIndex() = default;
  explicit VectorIndex(int dimension) : dimension_(dimension) {}

  int dimension() const { return dimension_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<IndexEntry>& entries() const { return entries_; }

  // Throws a conflict error on duplicate chunk_id and a dimension error when
  // the vector length disagrees with the index dimension.
  void insert(std::string chunk_id, EmbeddingVector vector, KnowledgeChunk payload);

  // Exact top-k by cosine similarity. k must be >= 1; an empty index yields
  // an empty result.
  RetrievalResult top_k(const EmbeddingVector& query, int k) const;

  void save(const std::string& path) const;
  static VectorIndex load(const std::string& path);

 private:
  int dimension_ = 0;  // 0 until the first insert fixes it
  std::vector<IndexEntry> entries_;
};

struct IndexInput {
  std::string chunk_id;
  std::string text;  // embedded text (may carry a corpus-mode image prefix)
  KnowledgeChunk payload;
};

VectorIndex build_index(const std::vector<IndexInput>& inputs, Embedder& embedder);

// Inputs for one image's chunks; corpus mode prefixes the embedded text with
// "image: <id> | " so questions can address a specific image.
std::vector<IndexInput> index_inputs_from_chunks(const std::vector<KnowledgeChunk>& chunks,
                                                 bool corpus_mode);

}  // namespace sgrag
